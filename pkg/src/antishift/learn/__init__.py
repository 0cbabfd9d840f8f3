"""Empirically trained predictors and hyperparameter search."""
from .mlp import AdamW, Mlp
from .mmd import median_bandwidth, mmd2_rbf
from .search import HyperSearchSpace, SearchResult, random_search
from .train import (
    LearnedPredictor,
    LossSpec,
    TrainConfig,
    grad_check,
    loss_and_grad,
    train_invariant,
    train_plain,
)
from .weights import balancing_weights

__all__ = [
    "AdamW",
    "HyperSearchSpace",
    "LearnedPredictor",
    "LossSpec",
    "Mlp",
    "SearchResult",
    "TrainConfig",
    "balancing_weights",
    "grad_check",
    "loss_and_grad",
    "median_bandwidth",
    "mmd2_rbf",
    "random_search",
    "train_invariant",
    "train_plain",
]
