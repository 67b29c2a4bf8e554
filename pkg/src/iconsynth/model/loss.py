"""Weighted two-segment cross-entropy: total = text + lambda * icon.

Each component is the cross-entropy averaged over its weighted target
positions; zero-weight positions contribute nothing, and a segment with
no weighted positions contributes exactly 0.
"""

from __future__ import annotations

import numpy as np

from . import nn


def joint_loss(
    logits: np.ndarray,
    targets: np.ndarray,
    weights: np.ndarray,
    is_icon: np.ndarray,
    lambda_icon: float,
):
    """logits (N, V), targets/weights/is_icon (N,).

    Returns (total, text_component, icon_component, dlogits); dlogits is
    the gradient of the total loss.
    """
    n = logits.shape[0]
    probs, ce = nn.softmax_and_ce(logits, targets)
    text_w = weights * (~is_icon)
    icon_w = weights * is_icon
    text_total = float(text_w.sum())
    icon_total = float(icon_w.sum())
    l_text = float((ce * text_w).sum() / text_total) if text_total > 0 else 0.0
    l_icon = float((ce * icon_w).sum() / icon_total) if icon_total > 0 else 0.0
    total = l_text + lambda_icon * l_icon

    coef = np.zeros(n, dtype=logits.dtype)
    if text_total > 0:
        coef += text_w / text_total
    if icon_total > 0:
        coef += lambda_icon * icon_w / icon_total
    probs *= coef[:, None]  # probs becomes dlogits in place
    probs[np.arange(n), targets] -= coef
    return total, l_text, l_icon, probs
