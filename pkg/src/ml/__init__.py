"""
ML module for the batch-normalization-embedded dense classifier.
"""

from .layers import (
    BatchNorm,
    Dense,
    Sigmoid,
    bn_forward_infer,
    bn_forward_train,
    dense_forward,
    sigmoid,
    softmax,
    softmax_cross_entropy,
)
from .network import BN_LAYOUTS, DEPTH_LAYOUTS, LayerSpec, Network, NetworkSpec, backward, make_layout, xavier_init
from .optimizer import AdamState, adam_step
from .persistence import load_model, save_model, write_training_log
from .trainer import EpochLog, TrainedModel, predict, predict_logits, predict_proba, train

__all__ = [
    "AdamState",
    "BN_LAYOUTS",
    "BatchNorm",
    "DEPTH_LAYOUTS",
    "Dense",
    "EpochLog",
    "LayerSpec",
    "Network",
    "NetworkSpec",
    "Sigmoid",
    "TrainedModel",
    "adam_step",
    "backward",
    "bn_forward_infer",
    "bn_forward_train",
    "dense_forward",
    "load_model",
    "make_layout",
    "predict",
    "predict_logits",
    "predict_proba",
    "save_model",
    "sigmoid",
    "softmax",
    "softmax_cross_entropy",
    "train",
    "write_training_log",
    "xavier_init",
]
