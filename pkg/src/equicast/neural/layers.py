"""Layers for the small float64 network engine.

Everything runs on plain numpy arrays in double precision, which keeps
training bitwise deterministic for a fixed seed and makes the
finite-difference gradient checks in the test suite meaningful.

Each layer caches what its backward pass needs during forward, so a
backward call must follow the forward call it differentiates.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from ..errors import ShapeMismatch


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _glorot(rng, shape, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    """Interface: forward caches, backward returns the input gradient."""

    params: list
    grads: list

    def forward(self, x, training=False):
        raise NotImplementedError

    def backward(self, grad_out):
        raise NotImplementedError

    def zero_grads(self):
        for g in self.grads:
            g[...] = 0.0


class Dense(Layer):
    def __init__(self, n_in, n_out, activation=None, rng=None):
        rng = rng or np.random.default_rng(0)
        if activation not in (None, "relu"):
            raise ShapeMismatch(f"unsupported activation {activation!r}")
        self.n_in, self.n_out = n_in, n_out
        self.activation = activation
        self.w = _glorot(rng, (n_in, n_out), n_in, n_out)
        self.b = np.zeros(n_out)
        self.params = [self.w, self.b]
        self.grads = [np.zeros_like(self.w), np.zeros_like(self.b)]

    def forward(self, x, training=False):
        if x.ndim != 2 or x.shape[1] != self.n_in:
            raise ShapeMismatch(f"dense expects (B, {self.n_in}), got {x.shape}")
        self._x = x
        out = x @ self.w + self.b
        if self.activation == "relu":
            self._mask = out > 0
            out = out * self._mask
        return out

    def backward(self, grad_out):
        if self.activation == "relu":
            grad_out = grad_out * self._mask
        self.grads[0] += self._x.T @ grad_out
        self.grads[1] += grad_out.sum(axis=0)
        return grad_out @ self.w.T


class Lstm(Layer):
    """Single LSTM layer with the four gates fused into one matmul per step.

    Gate order in the fused weight matrices is input, forget, candidate,
    output.  The forget-gate bias starts at 1.  Parameter count is
    4 * (units*n_in + units*units + units).
    """

    def __init__(self, n_in, units, return_sequences=False, rng=None):
        rng = rng or np.random.default_rng(0)
        self.n_in, self.units = n_in, units
        self.return_sequences = return_sequences
        k = 1.0 / np.sqrt(units)
        self.w = rng.uniform(-k, k, size=(n_in, 4 * units))
        self.u = rng.uniform(-k, k, size=(units, 4 * units))
        self.b = np.zeros(4 * units)
        self.b[units : 2 * units] = 1.0
        self.params = [self.w, self.u, self.b]
        self.grads = [np.zeros_like(self.w), np.zeros_like(self.u), np.zeros_like(self.b)]

    def forward(self, x, training=False, initial_state=None):
        if x.ndim != 3 or x.shape[2] != self.n_in:
            raise ShapeMismatch(f"lstm expects (B, T, {self.n_in}), got {x.shape}")
        batch, steps, _ = x.shape
        un = self.units
        if initial_state is None:
            h = np.zeros((batch, un))
            c = np.zeros((batch, un))
        else:
            h, c = (np.array(s, dtype=np.float64) for s in initial_state)
        self._x = x
        self._cache = []
        outputs = np.empty((batch, steps, un))
        for t in range(steps):
            xt = x[:, t, :]
            z = xt @ self.w + h @ self.u + self.b
            gi = _sigmoid(z[:, :un])
            gf = _sigmoid(z[:, un : 2 * un])
            gc = np.tanh(z[:, 2 * un : 3 * un])
            go = _sigmoid(z[:, 3 * un :])
            c_new = gf * c + gi * gc
            tc = np.tanh(c_new)
            h_new = go * tc
            self._cache.append((xt, h, c, gi, gf, gc, go, tc))
            h, c = h_new, c_new
            outputs[:, t, :] = h
        self._state = (h, c)
        return outputs if self.return_sequences else h

    @property
    def final_state(self):
        return self._state

    def backward(self, grad_out):
        x = self._x
        batch, steps, _ = x.shape
        un = self.units
        dx = np.empty_like(x)
        dh_rec = np.zeros((batch, un))
        dc_next = np.zeros((batch, un))
        dw, du, db = self.grads
        for t in reversed(range(steps)):
            xt, h_prev, c_prev, gi, gf, gc, go, tc = self._cache[t]
            if self.return_sequences:
                dh = grad_out[:, t, :] + dh_rec
            else:
                dh = (grad_out + dh_rec) if t == steps - 1 else dh_rec
            do = dh * tc
            dc = dc_next + dh * go * (1.0 - tc * tc)
            di = dc * gc
            df = dc * c_prev
            dg = dc * gi
            dc_next = dc * gf
            dz = np.concatenate(
                [di * gi * (1 - gi), df * gf * (1 - gf), dg * (1 - gc * gc), do * go * (1 - go)],
                axis=1,
            )
            dw += xt.T @ dz
            du += h_prev.T @ dz
            db += dz.sum(axis=0)
            dx[:, t, :] = dz @ self.w.T
            dh_rec = dz @ self.u.T
        return dx


def lstm_forward(layer: Lstm, sequence, initial_state=None):
    """Run one (possibly unbatched) sequence through an LSTM layer.

    Returns (outputs, (h, c)) where outputs follows the layer's
    return_sequences setting.
    """
    seq = np.asarray(sequence, dtype=np.float64)
    single = seq.ndim == 2
    if single:
        seq = seq[None, :, :]
        if initial_state is not None:
            initial_state = tuple(np.atleast_2d(s) for s in initial_state)
    out = layer.forward(seq, initial_state=initial_state)
    h, c = layer.final_state
    if single:
        return out[0], (h[0], c[0])
    return out, (h, c)


class Conv3d(Layer):
    """3x3x3 convolution with same padding and relu activation."""

    KERNEL = 3

    def __init__(self, c_in, c_out, rng=None):
        rng = rng or np.random.default_rng(0)
        k = self.KERNEL
        fan_in = k ** 3 * c_in
        self.c_in, self.c_out = c_in, c_out
        self.kernel = _glorot(rng, (k, k, k, c_in, c_out), fan_in, c_out)
        self.bias = np.zeros(c_out)
        self.params = [self.kernel, self.bias]
        self.grads = [np.zeros_like(self.kernel), np.zeros_like(self.bias)]

    def forward(self, x, training=False):
        if x.ndim != 5 or x.shape[4] != self.c_in:
            raise ShapeMismatch(f"conv3d expects (B, H, W, D, {self.c_in}), got {x.shape}")
        b, h, w, d, _ = x.shape
        xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (1, 1), (0, 0)))
        out = np.tile(self.bias, (b, h, w, d, 1)).astype(np.float64)
        for di, dj, dk in product(range(3), repeat=3):
            patch = xp[:, di : di + h, dj : dj + w, dk : dk + d, :]
            out += np.tensordot(patch, self.kernel[di, dj, dk], axes=([4], [0]))
        self._xp = xp
        self._mask = out > 0
        return out * self._mask

    def backward(self, grad_out):
        grad = grad_out * self._mask
        xp = self._xp
        b, hp, wp, dp, _ = xp.shape
        h, w, d = hp - 2, wp - 2, dp - 2
        dk_full, dbias = self.grads
        dbias += grad.sum(axis=(0, 1, 2, 3))
        dxp = np.zeros_like(xp)
        for di, dj, dk in product(range(3), repeat=3):
            patch = xp[:, di : di + h, dj : dj + w, dk : dk + d, :]
            dk_full[di, dj, dk] += np.tensordot(patch, grad, axes=([0, 1, 2, 3], [0, 1, 2, 3]))
            dxp[:, di : di + h, dj : dj + w, dk : dk + d, :] += np.tensordot(
                grad, self.kernel[di, dj, dk], axes=([4], [1])
            )
        return dxp[:, 1 : 1 + h, 1 : 1 + w, 1 : 1 + d, :]


class MaxPool3d(Layer):
    """2x2x2 max pooling with stride 2; trailing odd slices are dropped."""

    def __init__(self):
        self.params = []
        self.grads = []

    def forward(self, x, training=False):
        if x.ndim != 5:
            raise ShapeMismatch(f"maxpool3d expects (B, H, W, D, C), got {x.shape}")
        b, h, w, d, c = x.shape
        h2, w2, d2 = h // 2, w // 2, d // 2
        if min(h2, w2, d2) < 1:
            raise ShapeMismatch(f"spatial dims too small to pool: {x.shape}")
        xc = x[:, : 2 * h2, : 2 * w2, : 2 * d2, :]
        blocks = xc.reshape(b, h2, 2, w2, 2, d2, 2, c)
        blocks = blocks.transpose(0, 1, 3, 5, 7, 2, 4, 6).reshape(b, h2, w2, d2, c, 8)
        self._idx = blocks.argmax(axis=-1)
        self._in_shape = x.shape
        out = np.take_along_axis(blocks, self._idx[..., None], axis=-1)[..., 0]
        return out

    def backward(self, grad_out):
        b, h, w, d, c = self._in_shape
        h2, w2, d2 = h // 2, w // 2, d // 2
        dblocks = np.zeros((b, h2, w2, d2, c, 8))
        np.put_along_axis(dblocks, self._idx[..., None], grad_out[..., None], axis=-1)
        dcrop = dblocks.reshape(b, h2, w2, d2, c, 2, 2, 2).transpose(0, 1, 5, 2, 6, 3, 7, 4)
        dcrop = dcrop.reshape(b, 2 * h2, 2 * w2, 2 * d2, c)
        dx = np.zeros(self._in_shape)
        dx[:, : 2 * h2, : 2 * w2, : 2 * d2, :] = dcrop
        return dx


class Dropout(Layer):
    """Inverted dropout: identity at inference, scaled mask in training."""

    def __init__(self, rate, rng=None):
        if not 0.0 <= rate < 1.0:
            raise ShapeMismatch(f"dropout rate must be in [0, 1), got {rate}")
        rng = rng or np.random.default_rng(0)
        self.rate = rate
        self.rng = np.random.default_rng(int(rng.integers(2**63)))
        self.params = []
        self.grads = []
        self._mask = None

    def forward(self, x, training=False):
        if not training or self.rate == 0.0:
            self._mask = None
            return x
        keep = 1.0 - self.rate
        self._mask = (self.rng.random(x.shape) < keep) / keep
        return x * self._mask

    def backward(self, grad_out):
        if self._mask is None:
            return grad_out
        return grad_out * self._mask


class Flatten(Layer):
    def __init__(self):
        self.params = []
        self.grads = []

    def forward(self, x, training=False):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad_out):
        return grad_out.reshape(self._shape)
