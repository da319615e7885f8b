"""Toy-scale low-rank adaptation: adapters, schedule, hand-rolled training."""

from .adapter import TARGET_TAGS, LoraAdapter, delta, init_adapter, merged_forward
from .model import GradCheck, ToyModel, gradient_check
from .schedule import cosine_warmup_lr
from .train import (
    AdamW,
    ToyTrainConfig,
    TrainResult,
    load_checkpoint,
    load_config,
    config_from_mapping,
    parse_config,
    parse_flat_config,
    save_checkpoint,
    train_toy,
)

__all__ = [
    "TARGET_TAGS",
    "AdamW",
    "GradCheck",
    "LoraAdapter",
    "ToyModel",
    "ToyTrainConfig",
    "TrainResult",
    "cosine_warmup_lr",
    "delta",
    "gradient_check",
    "init_adapter",
    "load_checkpoint",
    "load_config",
    "merged_forward",
    "config_from_mapping",
    "parse_config",
    "parse_flat_config",
    "save_checkpoint",
    "train_toy",
]

from .demo import DemoReport, run_demo  # noqa: E402

__all__ += ["DemoReport", "run_demo"]
