"""
The optical-mapped CNN: model, forward backends, digital backpropagation and training.
"""

from src.convnet.config import Backend, TrainConfig
from src.convnet.model import CnnModel, save_checkpoint, load_checkpoint
from src.convnet.backends import OpticalSetup, digital_conv
from src.convnet.layers import ForwardResult, Prediction, forward, forward_batch
from src.convnet.optim import Adam
from src.convnet.training import (
    Gradients,
    EpochRecord,
    EvaluationResult,
    loss_and_grads,
    train,
    evaluate,
    noise_sweep,
    default_sigmas
)
from src.convnet.export import write_history, write_confusion

__all__ = [
    'Backend',
    'TrainConfig',
    'CnnModel',
    'save_checkpoint',
    'load_checkpoint',
    'OpticalSetup',
    'digital_conv',
    'ForwardResult',
    'Prediction',
    'forward',
    'forward_batch',
    'Adam',
    'Gradients',
    'EpochRecord',
    'EvaluationResult',
    'loss_and_grads',
    'train',
    'evaluate',
    'noise_sweep',
    'default_sigmas',
    'write_history',
    'write_confusion'
]
