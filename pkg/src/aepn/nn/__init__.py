from .tensor import Tensor, no_grad
from .optim import Adam, clip_grad_norm
from .models import (GraphBatch, HeteroGNN, GraphActorCritic, VectorActorCritic,
                     graph_registry, segment_softmax, save_checkpoint, load_checkpoint)

__all__ = [
    "Tensor", "no_grad", "Adam", "clip_grad_norm",
    "GraphBatch", "HeteroGNN", "GraphActorCritic", "VectorActorCritic",
    "graph_registry", "segment_softmax", "save_checkpoint", "load_checkpoint",
]
