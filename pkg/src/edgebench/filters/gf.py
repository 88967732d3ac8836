"""Self-guided filter."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from ..image import as_image, box_mean


def filter_gf(img, radius: int, epsilon: float) -> np.ndarray:
    """Guided filter with the input as its own guide.

    Per window: ``a = var / (var + eps)``, ``b = mean - a * mean``; the output
    is ``mean(a) * u + mean(b)`` with every mean taken over the same
    ``(2r+1)^2`` window.
    """
    u = as_image(img)
    radius = int(radius)
    if radius < 1:
        raise ParameterError(f"radius must be >= 1, got {radius}")
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    mean = box_mean(u, radius)
    var = box_mean(u * u, radius) - mean * mean
    a = var / (var + epsilon)
    b = mean - a * mean
    return box_mean(a, radius) * u + box_mean(b, radius)
