"""Recurrent and dense layers with explicit reverse-mode gradients.

Every layer owns a dict of parameter arrays and exposes

* ``forward(x) -> (y, cache)``
* ``backward(dy, cache) -> (dx, grads)`` where ``grads`` mirrors ``params``.

Sequences are batch-major: ``x`` has shape ``(batch, time, features)``.
Recurrent layers use two bias vectors per gate set (input-side and
hidden-side), matching the common framework convention.
"""
from __future__ import annotations

import numpy as np


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _flat(a):
    """Merge leading (batch, time) axes for a single BLAS contraction."""
    return np.ascontiguousarray(a).reshape(-1, a.shape[-1])


def _uniform(rng, shape, bound, dtype):
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Linear:
    def __init__(self, n_in, n_out, rng=None, dtype=np.float32):
        rng = rng if rng is not None else np.random.default_rng(0)
        bound = 1.0 / np.sqrt(n_in)
        self.params = {
            "W": _uniform(rng, (n_in, n_out), bound, dtype),
            "b": _uniform(rng, (n_out,), bound, dtype),
        }

    def forward(self, x):
        return x @ self.params["W"] + self.params["b"], x

    def backward(self, dy, x):
        grads = {"W": x.T @ dy, "b": dy.sum(axis=0)}
        return dy @ self.params["W"].T, grads


class LSTM:
    """Single-direction LSTM; gate order is input, forget, cell, output."""

    gates = 4

    def __init__(self, n_in, hidden, rng=None, dtype=np.float32, reverse=False):
        rng = rng if rng is not None else np.random.default_rng(0)
        bound = 1.0 / np.sqrt(hidden)
        g = self.gates * hidden
        self.hidden = hidden
        self.reverse = reverse
        self.params = {
            "W_ih": _uniform(rng, (n_in, g), bound, dtype),
            "W_hh": _uniform(rng, (hidden, g), bound, dtype),
            "b_ih": _uniform(rng, (g,), bound, dtype),
            "b_hh": _uniform(rng, (g,), bound, dtype),
        }

    def _steps(self, n_steps):
        return range(n_steps - 1, -1, -1) if self.reverse else range(n_steps)

    def forward(self, x):
        p = self.params
        batch, n_steps, _ = x.shape
        H = self.hidden
        xz = x @ p["W_ih"] + (p["b_ih"] + p["b_hh"])
        h = np.zeros((batch, H), dtype=x.dtype)
        c = np.zeros((batch, H), dtype=x.dtype)
        out = np.zeros((batch, n_steps, H), dtype=x.dtype)
        acts = np.zeros((n_steps, batch, 4 * H), dtype=x.dtype)
        cells = np.zeros((n_steps, batch, H), dtype=x.dtype)
        h_prev = np.zeros((n_steps, batch, H), dtype=x.dtype)
        c_prev = np.zeros((n_steps, batch, H), dtype=x.dtype)
        for t in self._steps(n_steps):
            h_prev[t], c_prev[t] = h, c
            z = xz[:, t] + h @ p["W_hh"]
            a = acts[t]
            a[:, :2 * H] = sigmoid(z[:, :2 * H])
            a[:, 2 * H:3 * H] = np.tanh(z[:, 2 * H:3 * H])
            a[:, 3 * H:] = sigmoid(z[:, 3 * H:])
            i, f, g, o = a[:, :H], a[:, H:2 * H], a[:, 2 * H:3 * H], a[:, 3 * H:]
            c = f * c + i * g
            cells[t] = c
            h = o * np.tanh(c)
            out[:, t] = h
        return out, (x, acts, cells, h_prev, c_prev)

    def backward(self, dout, cache):
        x, acts, cells, h_prev, c_prev = cache
        p = self.params
        batch, n_steps, _ = x.shape
        H = self.hidden
        dh = np.zeros((batch, H), dtype=x.dtype)
        dc = np.zeros((batch, H), dtype=x.dtype)
        dz_all = np.zeros((batch, n_steps, 4 * H), dtype=x.dtype)
        W_hh_T = p["W_hh"].T
        for t in reversed(list(self._steps(n_steps))):
            a = acts[t]
            i, f, g, o = a[:, :H], a[:, H:2 * H], a[:, 2 * H:3 * H], a[:, 3 * H:]
            tc = np.tanh(cells[t])
            dh = dh + dout[:, t]
            dc = dc + dh * o * (1.0 - tc * tc)
            dz = dz_all[:, t]
            dz[:, :H] = dc * g * i * (1.0 - i)
            dz[:, H:2 * H] = dc * c_prev[t] * f * (1.0 - f)
            dz[:, 2 * H:3 * H] = dc * i * (1.0 - g * g)
            dz[:, 3 * H:] = dh * tc * o * (1.0 - o)
            dc = dc * f
            dh = dz @ W_hh_T
        dz_flat = dz_all.reshape(-1, 4 * H)
        db = dz_flat.sum(axis=0)
        grads = {
            "W_ih": _flat(x).T @ dz_flat,
            "W_hh": _flat(np.swapaxes(h_prev, 0, 1)).T @ dz_flat,
            "b_ih": db,
            "b_hh": db.copy(),
        }
        return dz_all @ p["W_ih"].T, grads


class GRU:
    """Single-direction GRU; gate order is reset, update, candidate.

    The candidate applies the reset gate to the hidden-side affine term:
    ``n = tanh(x W_in + b_in + r * (h W_hn + b_hn))``.
    """

    gates = 3

    def __init__(self, n_in, hidden, rng=None, dtype=np.float32, reverse=False):
        rng = rng if rng is not None else np.random.default_rng(0)
        bound = 1.0 / np.sqrt(hidden)
        g = self.gates * hidden
        self.hidden = hidden
        self.reverse = reverse
        self.params = {
            "W_ih": _uniform(rng, (n_in, g), bound, dtype),
            "W_hh": _uniform(rng, (hidden, g), bound, dtype),
            "b_ih": _uniform(rng, (g,), bound, dtype),
            "b_hh": _uniform(rng, (g,), bound, dtype),
        }

    def _steps(self, n_steps):
        return range(n_steps - 1, -1, -1) if self.reverse else range(n_steps)

    def forward(self, x):
        p = self.params
        batch, n_steps, _ = x.shape
        H = self.hidden
        xg = x @ p["W_ih"] + p["b_ih"]
        h = np.zeros((batch, H), dtype=x.dtype)
        out = np.zeros((batch, n_steps, H), dtype=x.dtype)
        gates = np.zeros((n_steps, batch, 3 * H), dtype=x.dtype)
        hn = np.zeros((n_steps, batch, H), dtype=x.dtype)
        h_prev = np.zeros((n_steps, batch, H), dtype=x.dtype)
        for t in self._steps(n_steps):
            h_prev[t] = h
            hg = h @ p["W_hh"] + p["b_hh"]
            rz = sigmoid(xg[:, t, :2 * H] + hg[:, :2 * H])
            r, z = rz[:, :H], rz[:, H:]
            n = np.tanh(xg[:, t, 2 * H:] + r * hg[:, 2 * H:])
            gates[t, :, :2 * H] = rz
            gates[t, :, 2 * H:] = n
            hn[t] = hg[:, 2 * H:]
            h = (1.0 - z) * n + z * h
            out[:, t] = h
        return out, (x, gates, hn, h_prev)

    def backward(self, dout, cache):
        x, gates, hn, h_prev = cache
        p = self.params
        batch, n_steps, _ = x.shape
        H = self.hidden
        dh = np.zeros((batch, H), dtype=x.dtype)
        gx_all = np.zeros((batch, n_steps, 3 * H), dtype=x.dtype)
        gh_all = np.zeros((batch, n_steps, 3 * H), dtype=x.dtype)
        W_hh_T = p["W_hh"].T
        for t in reversed(list(self._steps(n_steps))):
            r, z, n = gates[t, :, :H], gates[t, :, H:2 * H], gates[t, :, 2 * H:]
            dh = dh + dout[:, t]
            dn = dh * (1.0 - z) * (1.0 - n * n)
            dz = dh * (h_prev[t] - n) * z * (1.0 - z)
            dr = dn * hn[t] * r * (1.0 - r)
            gx = gx_all[:, t]
            gx[:, :H], gx[:, H:2 * H], gx[:, 2 * H:] = dr, dz, dn
            gh = gh_all[:, t]
            gh[:, :H], gh[:, H:2 * H], gh[:, 2 * H:] = dr, dz, dn * r
            dh = dh * z + gh @ W_hh_T
        grads = {
            "W_ih": _flat(x).T @ _flat(gx_all),
            "W_hh": _flat(np.swapaxes(h_prev, 0, 1)).T @ _flat(gh_all),
            "b_ih": gx_all.sum(axis=(0, 1)),
            "b_hh": gh_all.sum(axis=(0, 1)),
        }
        return gx_all @ p["W_ih"].T, grads


class Bidirectional:
    """Forward and backward copies of a recurrent layer, outputs concatenated per step."""

    def __init__(self, cell, n_in, hidden, rng=None, dtype=np.float32):
        rng = rng if rng is not None else np.random.default_rng(0)
        self.hidden = hidden
        self.fwd = cell(n_in, hidden, rng, dtype)
        self.bwd = cell(n_in, hidden, rng, dtype, reverse=True)

    @property
    def params(self):
        out = {f"fwd.{k}": v for k, v in self.fwd.params.items()}
        out.update({f"bwd.{k}": v for k, v in self.bwd.params.items()})
        return out

    def forward(self, x):
        yf, cf = self.fwd.forward(x)
        yb, cb = self.bwd.forward(x)
        return np.concatenate([yf, yb], axis=2), (cf, cb)

    def backward(self, dy, cache):
        cf, cb = cache
        H = self.hidden
        dxf, gf = self.fwd.backward(dy[:, :, :H], cf)
        dxb, gb = self.bwd.backward(dy[:, :, H:], cb)
        grads = {f"fwd.{k}": v for k, v in gf.items()}
        grads.update({f"bwd.{k}": v for k, v in gb.items()})
        return dxf + dxb, grads
