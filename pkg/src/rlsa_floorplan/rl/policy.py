"""Actor-critic MLPs in plain numpy with hand-written backprop.

All weights live in one flat float64 vector; each layer is a reshaped view
into it, so optimizers and finite-difference checks work on ``params``
directly.
"""
from __future__ import annotations

from typing import Dict, List, Tuple

import numpy as np


def _orthogonal(rng, shape, gain):
    a = rng.standard_normal((max(shape), min(shape)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if shape[0] < shape[1]:
        q = q.T
    return gain * q[:shape[0], :shape[1]]


def log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


class PolicyNet:
    """Two tanh MLPs: actor (input -> n logits) and critic (input -> V)."""

    def __init__(self, n_inputs: int, n_actions: int, hidden: int = 128, seed=0):
        self.n_inputs = n_inputs
        self.n_actions = n_actions
        self.hidden = hidden
        self.layout: List[Tuple[str, Tuple[int, ...]]] = []
        for head, n_out in (("actor", n_actions), ("critic", 1)):
            dims = [n_inputs, hidden, hidden, n_out]
            for k in range(3):
                self.layout.append((f"{head}.W{k}", (dims[k], dims[k + 1])))
                self.layout.append((f"{head}.b{k}", (dims[k + 1],)))
        self.size = sum(int(np.prod(s)) for _, s in self.layout)
        self.params = np.zeros(self.size)
        self._bind()
        rng = np.random.default_rng(seed)
        gains = {"actor": (1.0, 1.0, 0.01), "critic": (1.0, 1.0, 1.0)}
        for head in ("actor", "critic"):
            for k in range(3):
                W = self.view(f"{head}.W{k}")
                W[...] = _orthogonal(rng, W.shape, gains[head][k])

    def _bind(self):
        self._views: Dict[str, np.ndarray] = {}
        off = 0
        for name, shape in self.layout:
            size = int(np.prod(shape))
            self._views[name] = self.params[off:off + size].reshape(shape)
            off += size

    def view(self, name: str) -> np.ndarray:
        return self._views[name]

    def set_params(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.size,):
            raise ValueError(f"expected {self.size} parameters, got {flat.shape}")
        self.params[...] = flat

    def copy(self) -> "PolicyNet":
        other = object.__new__(PolicyNet)
        other.__dict__.update(n_inputs=self.n_inputs, n_actions=self.n_actions,
                              hidden=self.hidden, layout=list(self.layout), size=self.size,
                              params=self.params.copy())
        other._bind()
        return other

    # ------------------------------------------------------------------ forward

    def _mlp(self, head: str, X: np.ndarray):
        h0 = X
        a1 = np.tanh(h0 @ self.view(f"{head}.W0") + self.view(f"{head}.b0"))
        a2 = np.tanh(a1 @ self.view(f"{head}.W1") + self.view(f"{head}.b1"))
        out = a2 @ self.view(f"{head}.W2") + self.view(f"{head}.b2")
        return out, (h0, a1, a2)

    def forward(self, X: np.ndarray):
        """Return (logits[B, n], values[B], cache)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        logits, ca = self._mlp("actor", X)
        v, cc = self._mlp("critic", X)
        return logits, v[:, 0], (ca, cc)

    def probs(self, x: np.ndarray) -> np.ndarray:
        logits, _, _ = self.forward(x)
        return np.exp(log_softmax(logits))

    def value(self, x: np.ndarray) -> float:
        return float(self.forward(x)[1][0])

    # ----------------------------------------------------------------- backward

    def _mlp_backward(self, head, cache, dout, grad):
        h0, a1, a2 = cache
        g = {}
        g["W2"] = a2.T @ dout
        g["b2"] = dout.sum(axis=0)
        d2 = (dout @ self.view(f"{head}.W2").T) * (1 - a2 ** 2)
        g["W1"] = a1.T @ d2
        g["b1"] = d2.sum(axis=0)
        d1 = (d2 @ self.view(f"{head}.W1").T) * (1 - a1 ** 2)
        g["W0"] = h0.T @ d1
        g["b0"] = d1.sum(axis=0)
        for k, v in g.items():
            grad[f"{head}.{k}"][...] = v

    def backward(self, cache, dlogits: np.ndarray, dvalues: np.ndarray) -> np.ndarray:
        """Flat gradient of a scalar loss given dL/dlogits and dL/dvalues."""
        flat = np.zeros(self.size)
        grad = {}
        off = 0
        for name, shape in self.layout:
            size = int(np.prod(shape))
            grad[name] = flat[off:off + size].reshape(shape)
            off += size
        ca, cc = cache
        self._mlp_backward("actor", ca, dlogits, grad)
        self._mlp_backward("critic", cc, np.asarray(dvalues)[:, None], grad)
        return flat

    # -------------------------------------------------------------- persistence

    def layers(self) -> List[dict]:
        return [{"name": name, "shape": list(shape), "values": self.view(name).ravel().tolist()}
                for name, shape in self.layout]

    @classmethod
    def from_layers(cls, layers: List[dict]) -> "PolicyNet":
        shapes = {d["name"]: tuple(d["shape"]) for d in layers}
        n_inputs, hidden = shapes["actor.W0"]
        n_actions = shapes["actor.W2"][1]
        net = cls(n_inputs, n_actions, hidden)
        for d in layers:
            if tuple(d["shape"]) != net.view(d["name"]).shape:
                raise ValueError(f"layer {d['name']}: shape {d['shape']} does not match network")
            net.view(d["name"])[...] = np.asarray(d["values"], dtype=np.float64).reshape(d["shape"])
        return net


class Adam:
    def __init__(self, size: int, lr: float = 3e-4, betas=(0.9, 0.999), eps: float = 1e-8):
        self.lr, self.betas, self.eps = lr, betas, eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        b1, b2 = self.betas
        self.t += 1
        self.m = b1 * self.m + (1 - b1) * grad
        self.v = b2 * self.v + (1 - b2) * grad * grad
        mhat = self.m / (1 - b1 ** self.t)
        vhat = self.v / (1 - b2 ** self.t)
        params -= self.lr * mhat / (np.sqrt(vhat) + self.eps)

    def state_dict(self) -> dict:
        return {"t": self.t, "m": self.m.tolist(), "v": self.v.tolist()}

    def load_state_dict(self, d: dict) -> None:
        self.t = int(d["t"])
        self.m = np.asarray(d["m"], dtype=np.float64)
        self.v = np.asarray(d["v"], dtype=np.float64)
