"""Network container, MSE loss, reverse-mode gradients, and Adam."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import NonFiniteGradient, ShapeMismatch
from .layers import Conv3d, Dense, Dropout, Flatten, Lstm, MaxPool3d


class Network:
    """A straight stack of layers sharing one parameter list."""

    def __init__(self, layers):
        self.layers = list(layers)

    @property
    def params(self):
        return [p for layer in self.layers for p in layer.params]

    @property
    def grads(self):
        return [g for layer in self.layers for g in layer.grads]

    def zero_grads(self):
        for layer in self.layers:
            layer.zero_grads()

    def forward(self, x, training=False):
        out = np.asarray(x, dtype=np.float64)
        for layer in self.layers:
            out = layer.forward(out, training=training)
        return out

    def backward(self, grad_out):
        grad = grad_out
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def get_flat_params(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params]) if self.params else np.zeros(0)

    def set_flat_params(self, flat: np.ndarray):
        offset = 0
        for p in self.params:
            p[...] = flat[offset : offset + p.size].reshape(p.shape)
            offset += p.size
        if offset != flat.size:
            raise ShapeMismatch(f"parameter blob has {flat.size} values, network needs {offset}")


def mse(pred: np.ndarray, target: np.ndarray):
    """Mean squared error over all elements, with its gradient wrt pred."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeMismatch(f"prediction {pred.shape} vs target {target.shape}")
    diff = pred - target
    loss = float(np.mean(diff * diff))
    return loss, 2.0 * diff / diff.size


def backprop(net: Network, inputs, targets, training=False):
    """Loss and exact reverse-mode MSE gradients for every parameter.

    Returns (loss, grads) where grads aligns with ``net.params``.  Uses a
    fresh accumulator, so repeated calls do not mix gradients.
    """
    net.zero_grads()
    pred = net.forward(inputs, training=training)
    loss, dpred = mse(pred, targets)
    net.backward(dpred)
    grads = net.grads
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient("non-finite entries in parameter gradient")
    return loss, grads


@dataclass
class AdamState:
    """Per-parameter moment estimates for bias-corrected Adam."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    first_moment: list = field(default_factory=list)
    second_moment: list = field(default_factory=list)

    @classmethod
    def for_params(cls, params, lr=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8):
        return cls(
            lr=lr, beta1=beta1, beta2=beta2, epsilon=epsilon, step=0,
            first_moment=[np.zeros_like(p) for p in params],
            second_moment=[np.zeros_like(p) for p in params],
        )


def adam_step(state: AdamState, params, grads):
    """One bias-corrected Adam update, applied to params in place."""
    if len(params) != len(state.first_moment) or len(params) != len(grads):
        raise ShapeMismatch("params, grads and optimizer state are misaligned")
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1**state.step
    correction2 = 1.0 - b2**state.step
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        if p.shape != g.shape:
            raise ShapeMismatch(f"parameter {p.shape} vs gradient {g.shape}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        p -= state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params, state


# -------------------------------------------------------------- checkpoints

def layer_descriptor(layer) -> dict:
    if isinstance(layer, Lstm):
        return {"type": "lstm", "n_in": layer.n_in, "units": layer.units,
                "return_sequences": layer.return_sequences}
    if isinstance(layer, Dense):
        return {"type": "dense", "n_in": layer.n_in, "n_out": layer.n_out,
                "activation": layer.activation}
    if isinstance(layer, Conv3d):
        return {"type": "conv3d", "c_in": layer.c_in, "c_out": layer.c_out}
    if isinstance(layer, MaxPool3d):
        return {"type": "maxpool3d"}
    if isinstance(layer, Dropout):
        return {"type": "dropout", "rate": layer.rate}
    if isinstance(layer, Flatten):
        return {"type": "flatten"}
    raise ShapeMismatch(f"cannot describe layer {type(layer).__name__}")


def layer_from_descriptor(desc: dict, rng):
    kind = desc["type"]
    if kind == "lstm":
        return Lstm(desc["n_in"], desc["units"], desc["return_sequences"], rng)
    if kind == "dense":
        return Dense(desc["n_in"], desc["n_out"], desc["activation"], rng)
    if kind == "conv3d":
        return Conv3d(desc["c_in"], desc["c_out"], rng)
    if kind == "maxpool3d":
        return MaxPool3d()
    if kind == "dropout":
        return Dropout(desc["rate"], rng)
    if kind == "flatten":
        return Flatten()
    raise ShapeMismatch(f"unknown layer type {kind!r}")


def save_network(net: Network, path: str | Path, header_extra: dict | None = None):
    """Write a checkpoint: one JSON header line, then the float64 blob."""
    header = dict(header_extra or {})
    header["arch"] = [layer_descriptor(layer) for layer in net.layers]
    blob = net.get_flat_params().astype("<f8").tobytes()
    header["n_params"] = len(blob) // 8
    with Path(path).open("wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(blob)


def load_network(path: str | Path):
    """Read a checkpoint back; returns (network, header)."""
    raw = Path(path).read_bytes()
    nl = raw.index(b"\n")
    header = json.loads(raw[:nl].decode("utf-8"))
    flat = np.frombuffer(raw[nl + 1 :], dtype="<f8").astype(np.float64)
    rng = np.random.default_rng(0)
    net = Network([layer_from_descriptor(d, rng) for d in header["arch"]])
    net.set_flat_params(flat)
    return net, header
