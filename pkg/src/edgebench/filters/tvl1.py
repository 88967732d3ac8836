"""TV-L1 decomposition by primal-dual iteration."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ParameterError
from ..image import as_image, gradients


def _div(px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """Negative adjoint of :func:`edgebench.image.gradients`."""
    px = px.copy()
    py = py.copy()
    px[:, -1] = 0.0
    py[-1, :] = 0.0
    d = px + py
    d[:, 1:] -= px[:, :-1]
    d[1:, :] -= py[:-1, :]
    return d


def tvl1_energy(u, v, lam: float) -> float:
    """``||u - v||_1 + lam * ||grad v||_1`` (isotropic total variation)."""
    gx, gy = gradients(v)
    return float(np.abs(np.asarray(u) - v).sum() + lam * np.sqrt(gx**2 + gy**2).sum())


def filter_tvl1(img, lam: float, iterations: int = 500) -> np.ndarray:
    """Minimise ``||u - v||_1 + lam ||grad v||_1`` with Chambolle-Pock.

    Step sizes ``tau = sigma = 1/sqrt(8)`` satisfy ``tau sigma ||grad||^2 <= 1``;
    over-relaxation ``theta = 1``; the iteration count is fixed.
    """
    u = as_image(img)
    if not lam > 0:
        raise ParameterError(f"lambda must be > 0, got {lam}")
    tau = sigma = 1.0 / math.sqrt(8.0)
    v = u.copy()
    v_bar = u.copy()
    px = np.zeros_like(u)
    py = np.zeros_like(u)
    for _ in range(iterations):
        gx, gy = gradients(v_bar)
        px += sigma * gx
        py += sigma * gy
        scale = np.maximum(1.0, np.sqrt(px**2 + py**2) / lam)
        px /= scale
        py /= scale
        v_old = v
        w = v + tau * _div(px, py) - u
        v = u + np.sign(w) * np.maximum(np.abs(w) - tau, 0.0)
        v_bar = 2.0 * v - v_old
    return v
