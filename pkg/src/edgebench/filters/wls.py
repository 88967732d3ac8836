"""Weighted least squares smoothing."""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from ..errors import NumericalError, ParameterError
from ..image import as_image, gradients, log_luminance

WLS_EPS = 1e-4


def wls_system(img, alpha: float, lam: float, eps: float = WLS_EPS) -> sparse.csr_matrix:
    """Assemble ``Id + lam * L_w`` for the image in row-major order.

    ``L_w`` is the 5-point Laplacian whose link between a pixel and its right
    (lower) neighbour is weighted by ``(|d log u / dx|^alpha + eps)^-1``.
    """
    u = as_image(img)
    h, w = u.shape
    gx, gy = gradients(log_luminance(u))
    # links (y, x)-(y, x+1) and (y, x)-(y+1, x); zero past the last column/row
    wx = np.zeros((h, w))
    wy = np.zeros((h, w))
    wx[:, :-1] = lam / (np.abs(gx[:, :-1]) ** alpha + eps)
    wy[:-1, :] = lam / (np.abs(gy[:-1, :]) ** alpha + eps)
    wx, wy = wx.ravel(), wy.ravel()
    n = h * w
    diag = 1.0 + wx + wy
    diag[1:] += wx[:-1]
    diag[w:] += wy[:-w]
    return sparse.diags(
        [diag, -wx[:-1], -wx[:-1], -wy[:-w], -wy[:-w]],
        [0, 1, -1, w, -w], shape=(n, n), format="csr")


def filter_wls(img, alpha: float, lam: float, rtol: float = 1e-6,
               maxiter: int = 20000) -> np.ndarray:
    """Solve ``(Id + lam * L_w) v = u`` by Jacobi-preconditioned CG.

    Raises:
        NumericalError: CG did not reach ``rtol`` in ``maxiter`` steps; the
            exception carries the final relative residual.
    """
    u = as_image(img)
    if not alpha > 0:
        raise ParameterError(f"alpha must be > 0, got {alpha}")
    if lam < 0:
        raise ParameterError(f"lambda must be >= 0, got {lam}")
    if lam == 0:
        return u.copy()
    a = wls_system(u, alpha, lam)
    b = u.ravel()
    inv_diag = 1.0 / a.diagonal()
    precond = splinalg.LinearOperator(a.shape, matvec=lambda r: inv_diag * r)
    x, info = splinalg.cg(a, b, x0=b.copy(), rtol=rtol, atol=0.0,
                          maxiter=maxiter, M=precond)
    if info != 0:
        residual = float(np.linalg.norm(b - a @ x) / np.linalg.norm(b))
        raise NumericalError(
            f"WLS conjugate gradient stopped after {maxiter} iterations "
            f"with relative residual {residual:.3e}", residual)
    return x.reshape(u.shape)
