"""Small fully connected network with hand-written backpropagation."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

ACTIVATIONS = ("tanh", "relu")


def orthogonal(shape, gain: float, rng: np.random.Generator) -> np.ndarray:
    rows, cols = shape
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return np.ascontiguousarray(gain * q[:rows, :cols])


class Mlp:
    """Affine layers with a shared hidden activation and a linear output head.

    Weights are stored ``(fan_in, fan_out)`` so a batch ``x`` of shape
    ``(B, fan_in)`` maps through ``x @ W + b``.
    """

    def __init__(self, sizes: Sequence[int], activation: str = "tanh",
                 rng: Optional[np.random.Generator] = None, output_gain: float = 1.0,
                 hidden_gain: float = np.sqrt(2.0)):
        if activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        if len(sizes) < 2:
            raise ValueError("an MLP needs at least input and output sizes")
        self.sizes = [int(s) for s in sizes]
        self.activation = activation
        rng = rng if rng is not None else np.random.default_rng(0)
        self.weights = []
        self.biases = []
        n_layers = len(self.sizes) - 1
        for i in range(n_layers):
            gain = output_gain if i == n_layers - 1 else hidden_gain
            self.weights.append(orthogonal((self.sizes[i], self.sizes[i + 1]), gain, rng))
            self.biases.append(np.zeros(self.sizes[i + 1]))
        self._cache = None

    @property
    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def set_params(self, params: Sequence[np.ndarray]):
        for i in range(len(self.weights)):
            self.weights[i][...] = params[2 * i]
            self.biases[i][...] = params[2 * i + 1]

    def copy_from(self, other: "Mlp"):
        self.set_params(other.params)

    def _act(self, z):
        return np.tanh(z) if self.activation == "tanh" else np.maximum(z, 0.0)

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Forward pass without caching (for acting)."""
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = self._act(h)
        return h

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.sizes[0]:
            raise ValueError(f"input has {x.shape[-1]} features, expected {self.sizes[0]}")
        squeeze = x.ndim == 1
        h = x[None, :] if squeeze else x
        inputs, outs = [], []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            h = h @ w + b
            if i < last:
                h = self._act(h)
            outs.append(h)
        self._cache = (inputs, outs, squeeze)
        return h[0] if squeeze else h

    def backward(self, grad_out: np.ndarray) -> list[np.ndarray]:
        """Gradients w.r.t. ``params`` given dLoss/dOutput of the last forward."""
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        inputs, outs, squeeze = self._cache
        g = np.asarray(grad_out, dtype=np.float64)
        if squeeze:
            g = g[None, :]
        if g.shape != outs[-1].shape:
            raise ValueError(f"upstream gradient shape {g.shape} != output shape {outs[-1].shape}")
        grads = [None] * (2 * len(self.weights))
        for i in range(len(self.weights) - 1, -1, -1):
            if i < len(self.weights) - 1:
                a = outs[i]
                g = g * (1.0 - a * a) if self.activation == "tanh" else g * (a > 0.0)
            grads[2 * i] = inputs[i].T @ g
            grads[2 * i + 1] = g.sum(axis=0)
            if i > 0:
                g = g @ self.weights[i].T
        return grads


def clip_grad_norm(grads: list[np.ndarray], max_norm: Optional[float]) -> float:
    total = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads)))
    if max_norm is not None and total > max_norm:
        scale = max_norm / (total + 1e-6)
        for g in grads:
            g *= scale
    return total


class Adam:
    def __init__(self, params: list[np.ndarray], lr: float, betas=(0.9, 0.999), eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads: list[np.ndarray]):
        self.t += 1
        c1 = 1.0 - self.b1 ** self.t
        c2 = 1.0 - self.b2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
