"""Toy training loop: AdamW on adapter weights, gradient accumulation,
cosine-with-warmup schedule, per-epoch logging and checkpoints.

Checkpoint layout (one directory per save)::

    <out>/epoch_0003/
        manifest.json      shapes, rank, alpha, step, epoch, byte order
        q.A.bin q.B.bin    raw float64, little-endian, C order
        ...
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable

import numpy as np

from ..errors import ConfigError
from .model import ToyModel
from .schedule import cosine_warmup_lr

DTYPE = "<f8"


@dataclass(frozen=True)
class ToyTrainConfig:
    epochs: int = 8
    batch_size: int = 16
    learning_rate: float = 1e-2
    weight_decay: float = 0.01
    accumulation_steps: int = 4
    warmup_ratio: float = 0.03
    seed: int = 0
    checkpoint_interval: int = 1
    rank: int = 16
    alpha: float = 32.0
    dropout_p: float = 0.0

    def __post_init__(self):
        for name in ("epochs", "batch_size", "accumulation_steps", "checkpoint_interval", "rank"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if self.learning_rate <= 0 or self.alpha <= 0:
            raise ConfigError("learning_rate and alpha must be positive")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay must be non-negative")
        if not 0.0 <= self.warmup_ratio < 1.0:
            raise ConfigError("warmup_ratio must lie in [0, 1)")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ConfigError("dropout_p must lie in [0, 1)")


# Accept the hyperparameter table's wording as well as the field names.
_ALIASES = {
    "lora_rank": "rank", "lora_rank_(r)": "rank", "r": "rank",
    "lora_alpha": "alpha",
    "training_epochs": "epochs", "num_epochs": "epochs",
    "gradient_accumulation_steps": "accumulation_steps",
    "warm-up_ratio": "warmup_ratio", "warm_up_ratio": "warmup_ratio",
    "lora_dropout": "dropout_p", "dropout": "dropout_p",
}


def parse_flat_config(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines (``:`` also accepted); ``#`` starts a comment."""
    out = {}
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigError(f"line {k}: expected key = value")
        key, value = (s.strip() for s in line.split(sep, 1))
        out[key.lower().replace(" ", "_")] = value
    return out


def config_from_mapping(values: dict, *, strict: bool = True) -> ToyTrainConfig:
    """Build a config from string values; unknown keys are errors unless ``strict`` is off."""
    types = {f.name: f.type for f in fields(ToyTrainConfig)}
    kwargs = {}
    for key, value in values.items():
        name = _ALIASES.get(key, key)
        if name not in types:
            if strict:
                raise ConfigError(f"unknown key {key!r}")
            continue
        try:
            kwargs[name] = int(value) if types[name] == "int" else float(value)
        except ValueError as exc:
            raise ConfigError(f"bad value {value!r} for {key}") from exc
    return ToyTrainConfig(**kwargs)


def parse_config(text: str) -> ToyTrainConfig:
    return config_from_mapping(parse_flat_config(text))


def load_config(path: str | Path) -> ToyTrainConfig:
    try:
        return parse_config(Path(path).read_text("utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


class AdamW:
    """Adam with decoupled weight decay, updating arrays in place."""

    def __init__(self, params: dict[str, np.ndarray], weight_decay: float = 0.01,
                 betas=(0.9, 0.999), eps: float = 1e-8):
        self.params = params
        self.wd = weight_decay
        self.b1, self.b2 = betas
        self.eps = eps
        self.m = {k: np.zeros_like(p) for k, p in params.items()}
        self.v = {k: np.zeros_like(p) for k, p in params.items()}
        self.t = 0

    def step(self, grads: dict[str, np.ndarray], lr: float) -> None:
        self.t += 1
        c1 = 1 - self.b1 ** self.t
        c2 = 1 - self.b2 ** self.t
        for k, p in self.params.items():
            g = grads[k]
            self.m[k] = self.b1 * self.m[k] + (1 - self.b1) * g
            self.v[k] = self.b2 * self.v[k] + (1 - self.b2) * g * g
            p *= 1 - lr * self.wd
            p -= lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)


def save_checkpoint(model: ToyModel, directory: str | Path, *, step: int, epoch: int) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    tensors = []
    for name, p in model.parameters().items():
        fname = f"{name}.bin"
        (out / fname).write_bytes(np.ascontiguousarray(p, dtype=DTYPE).tobytes())
        tensors.append({"name": name, "file": fname, "shape": list(p.shape)})
    first = next(iter(model.adapters.values()))
    manifest = {
        "dtype": "float64",
        "byte_order": "little",
        "r": first.r,
        "alpha": first.alpha,
        "step": step,
        "epoch": epoch,
        "tensors": tensors,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    return out


def load_checkpoint(directory: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    d = Path(directory)
    manifest = json.loads((d / "manifest.json").read_text("utf-8"))
    arrays = {}
    for t in manifest["tensors"]:
        data = np.frombuffer((d / t["file"]).read_bytes(), dtype=DTYPE)
        arrays[t["name"]] = data.reshape(t["shape"]).astype(float)
    return manifest, arrays


@dataclass
class TrainResult:
    log: list = field(default_factory=list)
    checkpoints: list = field(default_factory=list)
    optimizer_steps: int = 0
    total_steps: int = 0
    initial_loss: float = math.nan
    final_loss: float = math.nan

    def log_lines(self) -> list[str]:
        return [json.dumps(r, sort_keys=True) for r in self.log]


def _micro_batches(n: int, batch_size: int, rng: np.random.Generator | None):
    order = np.arange(n) if rng is None else rng.permutation(n)
    return [order[i:i + batch_size] for i in range(0, n, batch_size)]


def train_toy(
    model: ToyModel,
    X: np.ndarray,
    T: np.ndarray,
    cfg: ToyTrainConfig,
    *,
    eval_data: tuple[np.ndarray, np.ndarray] | None = None,
    eval_metrics: dict[str, Callable[[ToyModel, np.ndarray, np.ndarray], float]] | None = None,
    checkpoint_dir: str | Path | None = None,
    shuffle: bool = True,
) -> TrainResult:
    """Train the attached adapters; base weights are never written.

    Micro-batches of ``batch_size`` are accumulated and the optimizer steps
    after every ``accumulation_steps`` of them, counted across epoch
    boundaries. The schedule spans the number of optimizer steps.
    Checkpoints are written every ``checkpoint_interval`` epochs and after
    the last one.
    """
    if not model.adapters:
        raise ConfigError("no adapters attached")
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)
    if len(X) != len(T) or len(X) == 0:
        raise ConfigError("inputs and targets must be non-empty and the same length")
    params = model.parameters()
    opt = AdamW(params, cfg.weight_decay)
    rng = np.random.default_rng(cfg.seed)
    micro_per_epoch = math.ceil(len(X) / cfg.batch_size)
    total = (micro_per_epoch * cfg.epochs) // cfg.accumulation_steps
    if total < 1:
        raise ConfigError("fewer micro-batches than accumulation_steps: no optimizer step would run")

    result = TrainResult(total_steps=total, initial_loss=model.loss(X, T))
    acc = {k: np.zeros_like(p) for k, p in params.items()}
    pending = 0
    steps = 0
    for epoch in range(1, cfg.epochs + 1):
        losses = []
        for idx in _micro_batches(len(X), cfg.batch_size, rng if shuffle else None):
            xb, tb = X[idx], T[idx]
            masks = model.dropout_masks(len(idx), rng) if cfg.dropout_p > 0 else None
            loss, grads = model.loss_and_grads(xb, tb, masks)
            losses.append(loss)
            for k in acc:
                acc[k] += grads[k] / cfg.accumulation_steps
            pending += 1
            if pending == cfg.accumulation_steps and steps < total:
                lr = cosine_warmup_lr(steps, total, cfg.warmup_ratio, cfg.learning_rate)
                opt.step(acc, lr)
                steps += 1
                pending = 0
                for k in acc:
                    acc[k][...] = 0.0
        record = {
            "epoch": epoch,
            "step": steps,
            "lr": cosine_warmup_lr(steps, total, cfg.warmup_ratio, cfg.learning_rate),
            "train_loss": float(np.mean(losses)),
            "eval_loss": model.loss(*eval_data) if eval_data is not None else None,
        }
        for name, fn in (eval_metrics or {}).items():
            ex, et = eval_data if eval_data is not None else (X, T)
            record[name] = float(fn(model, ex, et))
        result.log.append(record)
        if checkpoint_dir is not None and (epoch % cfg.checkpoint_interval == 0 or epoch == cfg.epochs):
            path = save_checkpoint(model, Path(checkpoint_dir) / f"epoch_{epoch:04d}", step=steps, epoch=epoch)
            result.checkpoints.append(str(path))
    result.optimizer_steps = steps
    result.final_loss = model.loss(X, T)
    return result


def config_dict(cfg: ToyTrainConfig) -> dict:
    return asdict(cfg)
