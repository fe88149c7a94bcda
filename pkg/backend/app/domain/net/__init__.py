"""
Feedforward Network (numpy)
"""
from .schemas import (
    EpochRecord,
    FeedforwardModel,
    ForwardPass,
    Gradients,
    NetSpec,
    SubsetAccuracy,
    TrainConfig,
    TrainingTrace,
)
from .model import backward, cross_entropy, evaluate_loss, forward, init_model, layer_activations, loss_and_grad, predict
from .optim import Adam, GradientDescent, get_optimizer
from .checkpoint import CheckpointStore
from .trainer import accuracy_by_subset, train

__all__ = [
    "EpochRecord",
    "FeedforwardModel",
    "ForwardPass",
    "Gradients",
    "NetSpec",
    "SubsetAccuracy",
    "TrainConfig",
    "TrainingTrace",
    "backward",
    "cross_entropy",
    "evaluate_loss",
    "forward",
    "init_model",
    "layer_activations",
    "loss_and_grad",
    "predict",
    "Adam",
    "GradientDescent",
    "get_optimizer",
    "CheckpointStore",
    "accuracy_by_subset",
    "train",
]
