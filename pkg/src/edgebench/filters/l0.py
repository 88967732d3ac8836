"""L0 gradient minimisation by half-quadratic splitting."""

from __future__ import annotations

import numpy as np
from scipy import fft

from ..errors import ParameterError
from ..image import as_image, gradients
from .tvl1 import _div

BETA_MAX = 1e5


def _neumann_laplacian_eigs(shape: tuple[int, int]) -> np.ndarray:
    """Eigenvalues of ``grad^T grad`` (forward differences) in the DCT-II basis."""
    h, w = shape
    ey = 2.0 - 2.0 * np.cos(np.pi * np.arange(h) / h)
    ex = 2.0 - 2.0 * np.cos(np.pi * np.arange(w) / w)
    return ey[:, None] + ex[None, :]


def filter_l0(img, lam: float, kappa: float = 2.0, beta_max: float = BETA_MAX) -> np.ndarray:
    """Approximately minimise ``||u - v||^2 + lam * #{x : grad v(x) != 0}``.

    Alternates a hard threshold on the auxiliary gradient field with a
    screened Poisson solve for ``v``; the penalty grows from ``2 lam`` by a
    factor ``kappa`` until it exceeds ``beta_max``. The Poisson step is
    diagonal in the DCT-II basis because the gradient uses Neumann borders.
    """
    u = as_image(img)
    if not lam > 0:
        raise ParameterError(f"lambda must be > 0, got {lam}")
    if not kappa > 1:
        raise ParameterError(f"kappa must be > 1, got {kappa}")
    eigs = _neumann_laplacian_eigs(u.shape)
    u_hat = fft.dctn(u, type=2, norm="ortho")
    v = u.copy()
    beta = 2.0 * lam
    while beta < beta_max:
        h, g = gradients(v)
        small = h * h + g * g <= lam / beta
        h[small] = 0.0
        g[small] = 0.0
        rhs = u_hat - beta * fft.dctn(_div(h, g), type=2, norm="ortho")
        v = fft.idctn(rhs / (1.0 + beta * eigs), type=2, norm="ortho")
        beta *= kappa
    return v
