"""Low-rank adapters: ``W + (alpha/r) B A`` with ``B`` starting at zero."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import RankError, ShapeError

TARGET_TAGS = ("q", "k", "v", "o")


@dataclass
class LoraAdapter:
    A: np.ndarray  # r x n
    B: np.ndarray  # m x r
    r: int
    alpha: float
    dropout_p: float = 0.0
    target_tag: str = "q"

    @property
    def scale(self) -> float:
        return self.alpha / self.r

    @property
    def shape(self) -> tuple[int, int]:
        return self.B.shape[0], self.A.shape[1]

    @property
    def trainable_count(self) -> int:
        return self.A.size + self.B.size


def init_adapter(
    m: int,
    n: int,
    r: int,
    alpha: float | None = None,
    dropout_p: float = 0.0,
    seed: int = 0,
    *,
    target_tag: str = "q",
    a_std: str = "1/r",
) -> LoraAdapter:
    """Fresh adapter for an ``m x n`` weight.

    ``A`` is normal with standard deviation ``1/r`` (or ``1/sqrt(r)`` with
    ``a_std="1/sqrt(r)"``); ``B`` is zero, so the adapter starts as a no-op.
    ``alpha`` defaults to ``r`` (unit scaling).
    """
    if r < 1 or r > min(m, n):
        raise RankError(f"rank {r} outside [1, min({m}, {n})]")
    if not 0.0 <= dropout_p < 1.0:
        raise RankError(f"dropout probability {dropout_p} outside [0, 1)")
    if target_tag not in TARGET_TAGS:
        raise ValueError(f"target tag must be one of {TARGET_TAGS}")
    std = {"1/r": 1.0 / r, "1/sqrt(r)": 1.0 / math.sqrt(r)}[a_std]
    rng = np.random.default_rng(seed)
    A = rng.normal(0.0, std, size=(r, n))
    B = np.zeros((m, r))
    return LoraAdapter(A, B, r, float(r if alpha is None else alpha), dropout_p, target_tag)


def delta(adapter: LoraAdapter) -> np.ndarray:
    """The weight update ``(alpha/r) B A`` as an explicit matrix."""
    return adapter.scale * (adapter.B @ adapter.A)


def merged_forward(W: np.ndarray, adapter: LoraAdapter, x: np.ndarray,
                   mask: np.ndarray | None = None) -> np.ndarray:
    """``(W + delta) x`` evaluated as ``W x + s B (A x)``.

    ``x`` may be a vector or a batch of row vectors. ``mask`` is an optional
    inverted-dropout mask applied to the adapter input only.
    """
    W = np.asarray(W)
    x = np.asarray(x, dtype=float)
    m, n = adapter.shape
    if W.shape != (m, n) or x.shape[-1] != n:
        raise ShapeError(f"weight {W.shape}, adapter {(m, n)} and input {x.shape} do not line up")
    xa = x if mask is None else x * mask
    if x.ndim == 1:
        return W @ x + adapter.scale * (adapter.B @ (adapter.A @ xa))
    return x @ W.T + adapter.scale * ((xa @ adapter.A.T) @ adapter.B.T)
