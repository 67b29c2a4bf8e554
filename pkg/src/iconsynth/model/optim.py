"""Adam with global-norm gradient clipping and a warmup/linear-decay
learning-rate schedule."""

from __future__ import annotations

import numpy as np


class Adam:
    def __init__(self, params: dict, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict, grads: dict, lr: float) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1**self.t
        inv_sqrt_bias2 = 1.0 / np.sqrt(1.0 - b2**self.t)
        for k, g in grads.items():
            m = self.m[k]
            v = self.v[k]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            # update = lr * (m / bias1) / (sqrt(v / bias2) + eps)
            denom = np.sqrt(v)
            denom *= inv_sqrt_bias2
            denom += self.eps
            np.divide(m, denom, out=denom)
            denom *= lr / bias1
            params[k] -= denom


def clip_global_norm(grads: dict, max_norm: float) -> float:
    """Scale all gradients so their joint L2 norm is at most max_norm;
    returns the pre-clip norm."""
    total = 0.0
    for g in grads.values():
        total += float(np.vdot(g, g))
    norm = float(np.sqrt(total))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for g in grads.values():
            g *= scale
    return norm


class WarmupLinearDecay:
    """Linear ramp to base_lr over the warmup fraction, then linear decay
    to zero at total_steps."""

    def __init__(self, base_lr: float, total_steps: int, warmup_frac: float = 0.05):
        if total_steps < 1:
            raise ValueError("total_steps must be >= 1")
        self.base_lr = base_lr
        self.total_steps = total_steps
        self.warmup_steps = max(1, int(round(total_steps * warmup_frac)))

    def lr(self, step: int) -> float:
        """step is 0-based (the step about to be taken)."""
        if step < self.warmup_steps:
            return self.base_lr * (step + 1) / self.warmup_steps
        remaining = self.total_steps - step
        span = max(1, self.total_steps - self.warmup_steps)
        return self.base_lr * max(0.0, remaining / span)
