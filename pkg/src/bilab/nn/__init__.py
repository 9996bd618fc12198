from .checkpoint import (
    CheckpointError,
    load_checkpoint,
    model_from_config,
    read_header,
    save_checkpoint,
)
from .gradcheck import GradCheckReport, grad_check, relative_error
from .layers import Linear, clip_grad_norm, collect_grads, count_params, zero_grads
from .lstm import LstmConfig, LstmModel
from .normalize import NormStats
from .tensor import Tensor, concat, dropout, layer_norm, mse_loss, softmax
from .transformer import (
    MultiHeadAttention,
    TransformerConfig,
    TransformerModel,
    causal_mask,
    sinusoidal_table,
)

__all__ = [
    "CheckpointError", "load_checkpoint", "model_from_config", "read_header",
    "save_checkpoint", "GradCheckReport", "grad_check", "relative_error",
    "Linear", "clip_grad_norm", "collect_grads", "count_params", "zero_grads",
    "LstmConfig", "LstmModel", "NormStats", "Tensor", "concat", "dropout",
    "layer_norm", "mse_loss", "softmax", "MultiHeadAttention",
    "TransformerConfig", "TransformerModel", "causal_mask", "sinusoidal_table",
]
