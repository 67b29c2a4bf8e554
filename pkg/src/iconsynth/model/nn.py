"""Differentiable building blocks (forward + hand-derived backward).

Every forward returns (output, cache); the matching backward consumes
the upstream gradient and the cache. Shapes are (..., dim); inputs are
flattened to 2-D before BLAS calls, which matters on CPU.
"""

from __future__ import annotations

import numpy as np

LN_EPS = 1e-5

# tanh-approximation GELU constants
_G0 = 0.7978845608028654  # sqrt(2/pi)
_G1 = 0.044715


def layernorm_forward(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * inv
    return xhat * g + b, (xhat, inv, g)


def layernorm_backward(dy, cache):
    xhat, inv, g = cache
    d = xhat.shape[-1]
    dg = (dy * xhat).reshape(-1, d).sum(axis=0)
    db = dy.reshape(-1, d).sum(axis=0)
    dxhat = dy * g
    # dx = inv * (dxhat - mean(dxhat) - xhat * mean(dxhat * xhat))
    dx = inv * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    )
    return dx, dg, db


def gelu_forward(x):
    u = x * x
    u *= x
    u *= _G1
    u += x
    u *= _G0
    t = np.tanh(u)
    y = t + 1.0
    y *= x
    y *= 0.5
    return y, (x, t)


def gelu_backward(dy, cache):
    x, t = cache
    du = x * x
    du *= 3.0 * _G1
    du += 1.0
    du *= _G0
    s = t * t
    np.subtract(1.0, s, out=s)
    s *= du
    s *= x
    s += 1.0
    s += t
    s *= 0.5
    s *= dy
    return s


def linear_forward(x, w, b):
    shape = x.shape
    x2 = x.reshape(-1, shape[-1])
    y = x2 @ w
    y += b
    return y.reshape(shape[:-1] + (w.shape[1],)), (x2, w, shape)


def linear_backward(dy, cache):
    x2, w, shape = cache
    dy2 = dy.reshape(-1, dy.shape[-1])
    dw = x2.T @ dy2
    db = dy2.sum(axis=0)
    dx = (dy2 @ w.T).reshape(shape)
    return dx, dw, db


def softmax(x, axis=-1):
    m = np.max(x, axis=axis, keepdims=True)
    e = x - m
    np.exp(e, out=e)
    e /= e.sum(axis=axis, keepdims=True)
    return e


def softmax_backward(dy, y):
    return y * (dy - (dy * y).sum(axis=-1, keepdims=True))


def softmax_and_ce(logits, targets):
    """One-exp fused softmax + cross-entropy over rows.

    Returns (probs, ce) where probs is a fresh array safe to reuse as the
    gradient buffer.
    """
    n = logits.shape[0]
    m = logits.max(axis=1)
    z = logits - m[:, None]
    np.exp(z, out=z)
    s = z.sum(axis=1)
    z /= s[:, None]
    ce = np.log(s) + m - logits[np.arange(n), targets]
    return z, ce


def dropout_forward(x, p: float, rng: np.random.Generator | None, train: bool):
    if not train or p <= 0.0:
        return x, None
    u = rng.random(x.shape, dtype=np.float32)
    mask = (u >= p).astype(x.dtype)
    mask *= 1.0 / (1.0 - p)
    return x * mask, mask


def dropout_backward(dy, mask):
    if mask is None:
        return dy
    return dy * mask


def log_softmax(x, axis=-1):
    m = np.max(x, axis=axis, keepdims=True)
    z = x - m
    return z - np.log(np.exp(z).sum(axis=axis, keepdims=True))
