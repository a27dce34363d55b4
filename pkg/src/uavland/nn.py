"""Small fully-connected networks with hand-written backprop and Adam.

All arrays are float64. Inputs may be a single vector or a ``(batch, n)``
matrix; outputs keep the same rank.
"""
from __future__ import annotations

import copy

import numpy as np

OUTPUTS = ("linear", "tanh")


class Mlp:
    """ReLU hidden layers with a linear or tanh output head.

    ``weights[l]`` has shape ``(layer_sizes[l+1], layer_sizes[l])``.
    ``forward`` caches the activations that ``backward`` consumes; gradients
    accumulate until ``adam_step`` or ``zero_grad`` clears them.
    """

    def __init__(self, layer_sizes, output="linear", rng=None, out_scale=1.0):
        if output not in OUTPUTS:
            raise ValueError(f"output must be one of {OUTPUTS}, got {output!r}")
        layer_sizes = tuple(int(n) for n in layer_sizes)
        if len(layer_sizes) < 2 or min(layer_sizes) < 1:
            raise ValueError(f"bad layer sizes {layer_sizes}")
        rng = np.random.default_rng(rng)
        self.layer_sizes = layer_sizes
        self.output = output
        self.weights = []
        self.biases = []
        for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = 1.0 / np.sqrt(n_in)
            self.weights.append(rng.uniform(-bound, bound, (n_out, n_in)))
            self.biases.append(rng.uniform(-bound, bound, n_out))
        self.weights[-1] *= out_scale
        self.biases[-1] *= out_scale
        self.grad_w = [np.zeros_like(w) for w in self.weights]
        self.grad_b = [np.zeros_like(b) for b in self.biases]
        self._m = [np.zeros_like(p) for p in self.parameters()]
        self._v = [np.zeros_like(p) for p in self.parameters()]
        self.adam_t = 0
        self._cache = None

    @property
    def n_in(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_out(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list:
        """Weights and biases interleaved: ``[W0, b0, W1, b1, ...]`` (live views)."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def gradients(self) -> list:
        out = []
        for gw, gb in zip(self.grad_w, self.grad_b):
            out += [gw, gb]
        return out

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.ndim != 2 or h.shape[1] != self.n_in:
            raise ValueError(f"expected input width {self.n_in}, got shape {x.shape}")
        acts = [h]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w.T + b
            if i < last:
                h = np.maximum(h, 0.0)
            elif self.output == "tanh":
                h = np.tanh(h)
            acts.append(h)
        self._cache = (acts, single)
        return h[0] if single else h

    __call__ = forward

    def backward(self, upstream):
        """Accumulate parameter gradients and return d(loss)/d(input).

        ``upstream`` is d(loss)/d(output) for the last ``forward`` call.
        """
        if self._cache is None:
            raise RuntimeError("backward() called before forward()")
        acts, single = self._cache
        g = np.asarray(upstream, dtype=float)
        if single:
            g = g[None, :]
        if g.shape != acts[-1].shape:
            raise ValueError(f"upstream shape {g.shape} != output shape {acts[-1].shape}")
        if self.output == "tanh":
            g = g * (1.0 - acts[-1] ** 2)
        for i in range(len(self.weights) - 1, -1, -1):
            self.grad_w[i] += g.T @ acts[i]
            self.grad_b[i] += g.sum(axis=0)
            g = g @ self.weights[i]
            if i > 0:
                g = g * (acts[i] > 0.0)
        return g[0] if single else g

    def zero_grad(self):
        for g in self.gradients():
            g.fill(0.0)

    def adam_step(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        """One bias-corrected Adam update from the accumulated gradients, then clear them."""
        self.adam_t += 1
        t = self.adam_t
        c1 = 1.0 - beta1 ** t
        c2 = 1.0 - beta2 ** t
        for p, g, m, v in zip(self.parameters(), self.gradients(), self._m, self._v):
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
        self.zero_grad()

    def copy(self) -> "Mlp":
        return copy.deepcopy(self)

    def same_topology(self, other: "Mlp") -> bool:
        return self.layer_sizes == other.layer_sizes and self.output == other.output

    def all_finite(self) -> bool:
        return all(np.isfinite(p).all() for p in self.parameters())

    # -- persistence ------------------------------------------------------

    def to_arrays(self, prefix: str = "") -> dict:
        """Flat name->array mapping with a layer-shape header entry."""
        out = {
            f"{prefix}layer_sizes": np.array(self.layer_sizes, dtype=np.int64),
            f"{prefix}output": np.array(self.output),
        }
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            out[f"{prefix}W{i}"] = w.copy()
            out[f"{prefix}b{i}"] = b.copy()
        return out

    @classmethod
    def from_arrays(cls, arrays, prefix: str = "") -> "Mlp":
        sizes = [int(n) for n in arrays[f"{prefix}layer_sizes"]]
        net = cls(sizes, output=str(arrays[f"{prefix}output"]))
        for i in range(len(sizes) - 1):
            w = np.asarray(arrays[f"{prefix}W{i}"], dtype=float)
            b = np.asarray(arrays[f"{prefix}b{i}"], dtype=float)
            if w.shape != net.weights[i].shape or b.shape != net.biases[i].shape:
                raise ValueError(f"layer {i} shape does not match header {sizes}")
            net.weights[i][...] = w
            net.biases[i][...] = b
        return net

    def save(self, path):
        with open(path, "wb") as fh:
            np.savez(fh, **self.to_arrays())

    @classmethod
    def load(cls, path) -> "Mlp":
        with np.load(path, allow_pickle=False) as data:
            return cls.from_arrays(data)


def soft_update(target: Mlp, source: Mlp, tau: float):
    """Move ``target`` toward ``source``: ``theta' <- tau*theta + (1-tau)*theta'``."""
    if not target.same_topology(source):
        raise ValueError(f"topology mismatch: {target.layer_sizes} vs {source.layer_sizes}")
    for t, s in zip(target.parameters(), source.parameters()):
        t[...] = tau * s + (1.0 - tau) * t
