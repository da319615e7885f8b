"""A two-layer dense toy network with q/k/v/o projections and adapters.

Forward pass on a batch ``X`` (rows are samples)::

    h = act(X Wq' + X Wk')        # first layer, two parallel projections
    y = (h Wv') Wo'               # second layer, two stacked projections

where ``W'`` is the base weight (frozen) plus the adapter update, written
in row-vector form. Loss is ``0.5 * mean_i ||y_i - t_i||^2``. The backward
pass is written out by hand and only produces adapter gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from .adapter import TARGET_TAGS, LoraAdapter, init_adapter

_ACT = {
    "linear": (lambda z: z, lambda z, a: np.ones_like(z)),
    "tanh": (np.tanh, lambda z, a: 1.0 - a * a),
}


class ToyModel:
    def __init__(self, d_in: int, d_hidden: int, d_out: int, *, activation: str = "tanh", seed: int = 0):
        if activation not in _ACT:
            raise ValueError(f"activation must be one of {sorted(_ACT)}")
        rng = np.random.default_rng(seed)
        shapes = {"q": (d_hidden, d_in), "k": (d_hidden, d_in), "v": (d_hidden, d_hidden), "o": (d_out, d_hidden)}
        self.base = {}
        for tag in TARGET_TAGS:
            m, n = shapes[tag]
            w = rng.normal(0.0, 1.0 / np.sqrt(n), size=(m, n))
            w.setflags(write=False)
            self.base[tag] = w
        self.adapters: dict[str, LoraAdapter] = {}
        self.activation = activation
        self.dims = (d_in, d_hidden, d_out)

    def attach(self, r: int, alpha: float, *, targets=TARGET_TAGS, dropout_p: float = 0.0,
               seed: int = 0, a_std: str = "1/r") -> None:
        for k, tag in enumerate(targets):
            m, n = self.base[tag].shape
            self.adapters[tag] = init_adapter(m, n, r, alpha, dropout_p, seed + k, target_tag=tag, a_std=a_std)

    @property
    def trainable_count(self) -> int:
        return sum(a.trainable_count for a in self.adapters.values())

    @property
    def full_count(self) -> int:
        """Parameters full fine-tuning of the adapted matrices would train."""
        return sum(self.base[t].size for t in self.adapters)

    def parameters(self) -> dict[str, np.ndarray]:
        out = {}
        for tag, ad in self.adapters.items():
            out[f"{tag}.A"] = ad.A
            out[f"{tag}.B"] = ad.B
        return out

    # -- forward / backward -------------------------------------------------

    def _proj(self, tag, X, masks):
        Z = X @ self.base[tag].T
        ad = self.adapters.get(tag)
        cache = None
        if ad is not None:
            mask = masks.get(tag) if masks else None
            Xa = X if mask is None else X * mask
            U = Xa @ ad.A.T
            Z = Z + ad.scale * (U @ ad.B.T)
            cache = (Xa, U, mask)
        return Z, cache

    def dropout_masks(self, n_rows: int, rng: np.random.Generator) -> dict:
        masks = {}
        for tag, ad in self.adapters.items():
            if ad.dropout_p > 0:
                keep = rng.random((n_rows, ad.A.shape[1])) >= ad.dropout_p
                masks[tag] = keep / (1.0 - ad.dropout_p)
        return masks

    def forward(self, X, masks=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dims[0]:
            raise ShapeError(f"expected a batch with {self.dims[0]} columns, got {X.shape}")
        act, _ = _ACT[self.activation]
        zq, cq = self._proj("q", X, masks)
        zk, ck = self._proj("k", X, masks)
        z1 = zq + zk
        h = act(z1)
        zv, cv = self._proj("v", h, masks)
        y, co = self._proj("o", zv, masks)
        return y, {"X": X, "z1": z1, "h": h, "zv": zv, "proj": {"q": cq, "k": ck, "v": cv, "o": co}}

    def loss(self, X, T, masks=None) -> float:
        """Mean half squared error."""
        y, _ = self.forward(X, masks)
        return 0.5 * float(np.mean(np.sum((y - np.asarray(T)) ** 2, axis=1)))

    def _proj_back(self, tag, X, dZ, cache, grads):
        """Adapter grads for one projection; returns dX through base + adapter."""
        W = self.base[tag]
        dX = dZ @ W
        ad = self.adapters.get(tag)
        if ad is not None:
            Xa, U, mask = cache
            s = ad.scale
            grads[f"{tag}.B"] = s * dZ.T @ U
            dU = s * dZ @ ad.B
            grads[f"{tag}.A"] = dU.T @ Xa
            dXa = dU @ ad.A
            dX = dX + (dXa if mask is None else dXa * mask)
        return dX

    def loss_and_grads(self, X, T, masks=None) -> tuple[float, dict[str, np.ndarray]]:
        y, c = self.forward(X, masks)
        T = np.asarray(T, dtype=float)
        N = c["X"].shape[0]
        diff = y - T
        loss = 0.5 * float(np.mean(np.sum(diff ** 2, axis=1)))
        dy = diff / N
        grads: dict[str, np.ndarray] = {}
        proj = c["proj"]
        dzv = self._proj_back("o", c["zv"], dy, proj["o"], grads)
        dh = self._proj_back("v", c["h"], dzv, proj["v"], grads)
        _, dact = _ACT[self.activation]
        dz1 = dh * dact(c["z1"], c["h"])
        self._proj_back("q", c["X"], dz1, proj["q"], grads)
        self._proj_back("k", c["X"], dz1, proj["k"], grads)
        return loss, grads


@dataclass(frozen=True)
class GradCheck:
    max_rel_error: float
    max_abs_analytic: float
    max_abs_numeric: float


def gradient_check(model: ToyModel, X, T, epsilon: float = 1e-5, *, grad_fn=None,
                   floor: float = 1e-8) -> GradCheck:
    """Central differences on every adapter entry against the analytic gradient.

    Relative error is ``|a - n| / max(|a|, |n|, floor)``. ``grad_fn`` swaps
    in another backward (used for fault-injection tests).
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValueError("epsilon must lie in [1e-7, 1e-3]")
    grad_fn = grad_fn or model.loss_and_grads
    _, analytic = grad_fn(X, T)
    worst = 0.0
    big_a = big_n = 0.0
    for name, p in model.parameters().items():
        g = analytic[name]
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            old = p[idx]
            p[idx] = old + epsilon
            up = model.loss(X, T)
            p[idx] = old - epsilon
            down = model.loss(X, T)
            p[idx] = old
            num = (up - down) / (2 * epsilon)
            a = g[idx]
            big_a, big_n = max(big_a, abs(a)), max(big_n, abs(num))
            worst = max(worst, abs(a - num) / max(abs(a), abs(num), floor))
    return GradCheck(float(worst), float(big_a), float(big_n))
