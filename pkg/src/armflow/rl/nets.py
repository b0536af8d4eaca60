"""Tiny tanh MLPs with hand-written backprop and a flat parameter layout.

Everything works on one flat float64 vector so policies can be saved,
perturbed by population search, and checked against finite differences.
Layout: [W1, b1, W2, b2, ..., Wk, bk] followed by an optional log-std
tail for Gaussian policies. Weights are stored (out, in).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "layer_sizes",
    "param_count",
    "init_params",
    "unpack",
    "forward",
    "backward",
    "Adam",
]


def layer_sizes(in_dim: int, hidden: tuple[int, ...], out_dim: int) -> list[tuple[int, int]]:
    dims = [in_dim, *hidden, out_dim]
    return [(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]


def param_count(in_dim: int, hidden: tuple[int, ...], out_dim: int, extra: int = 0) -> int:
    return sum(o * i + o for o, i in layer_sizes(in_dim, hidden, out_dim)) + extra


def init_params(
    rng: np.random.Generator,
    in_dim: int,
    hidden: tuple[int, ...],
    out_dim: int,
    extra_tail: np.ndarray | None = None,
    out_scale: float = 1.0,
) -> np.ndarray:
    """Scaled normal weights, zero biases; the output layer can be shrunk
    (small ``out_scale`` keeps an initial policy near zero action)."""
    sizes = layer_sizes(in_dim, hidden, out_dim)
    chunks: list[np.ndarray] = []
    for k, (out, inp) in enumerate(sizes):
        scale = (out_scale if k == len(sizes) - 1 else 1.0) / math.sqrt(inp)
        w = rng.normal(0.0, scale, size=(out, inp))
        chunks.append(w.ravel())
        chunks.append(np.zeros(out))
    if extra_tail is not None:
        chunks.append(np.asarray(extra_tail, dtype=float))
    return np.concatenate(chunks)


def unpack(
    params: np.ndarray, in_dim: int, hidden: tuple[int, ...], out_dim: int, extra: int = 0
) -> tuple[list[np.ndarray], list[np.ndarray], np.ndarray]:
    """Split the flat vector into (weights, biases, tail) views."""
    ws: list[np.ndarray] = []
    bs: list[np.ndarray] = []
    pos = 0
    for out, inp in layer_sizes(in_dim, hidden, out_dim):
        ws.append(params[pos : pos + out * inp].reshape(out, inp))
        pos += out * inp
        bs.append(params[pos : pos + out])
        pos += out
    tail = params[pos : pos + extra]
    if pos + extra != params.size:
        raise ValueError(
            f"parameter vector has {params.size} entries, expected {pos + extra}"
        )
    return ws, bs, tail


def forward(
    ws: list[np.ndarray], bs: list[np.ndarray], x: np.ndarray
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Batched forward pass; tanh hidden layers, linear output.

    Returns the output (N, out) and the per-layer activations needed by
    :func:`backward` (input first, post-tanh hiddens after).
    """
    acts = [x]
    h = x
    for i in range(len(ws) - 1):
        h = np.tanh(h @ ws[i].T + bs[i])
        acts.append(h)
    y = h @ ws[-1].T + bs[-1]
    return y, acts


def backward(
    ws: list[np.ndarray], acts: list[np.ndarray], dy: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Backprop an upstream gradient dy (N, out) to parameter gradients."""
    dws: list[np.ndarray] = [np.empty(0)] * len(ws)
    dbs: list[np.ndarray] = [np.empty(0)] * len(ws)
    grad = dy
    for i in range(len(ws) - 1, -1, -1):
        dws[i] = grad.T @ acts[i]
        dbs[i] = grad.sum(axis=0)
        if i > 0:
            grad = (grad @ ws[i]) * (1.0 - acts[i] ** 2)
    return dws, dbs


def flatten_grads(
    dws: list[np.ndarray], dbs: list[np.ndarray], tail: np.ndarray | None = None
) -> np.ndarray:
    chunks = []
    for dw, db in zip(dws, dbs):
        chunks.append(dw.ravel())
        chunks.append(db)
    if tail is not None:
        chunks.append(tail)
    return np.concatenate(chunks)


@dataclass
class Adam:
    """Plain Adam over a flat parameter vector."""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        self._m: np.ndarray | None = None
        self._v: np.ndarray | None = None
        self._t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        if self._m is None:
            self._m = np.zeros_like(params)
            self._v = np.zeros_like(params)
        self._t += 1
        self._m = self.beta1 * self._m + (1.0 - self.beta1) * grad
        self._v = self.beta2 * self._v + (1.0 - self.beta2) * grad * grad
        m_hat = self._m / (1.0 - self.beta1 ** self._t)
        v_hat = self._v / (1.0 - self.beta2 ** self._t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
