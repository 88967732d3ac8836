"""Fast bilateral filter on a bilateral grid."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..errors import ParameterError
from ..image import as_image


def filter_fbf(img, sigma_s: float, sigma_r: float, slices: int = 64,
               spatial_oversampling: int = 2) -> np.ndarray:
    """Bilateral filter approximated on a 3-D (y, x, intensity) grid.

    The range axis spans the actual [min, max] of the input in ``slices - 1``
    steps. The spatial axes are sampled every ``sigma_s / spatial_oversampling``
    pixels. Samples are splatted with trilinear weights into homogeneous
    (value, weight) cells, the grid is blurred with a Gaussian whose deviation
    is ``sigma_s`` and ``sigma_r`` expressed in grid units, and the result is
    sliced back trilinearly.

    Args:
        img: input image.
        sigma_s: spatial standard deviation in pixels.
        sigma_r: range standard deviation in intensity units.
        slices: number of intensity samples ``S``.
        spatial_oversampling: grid cells per ``sigma_s``.
    """
    u = as_image(img)
    if sigma_s <= 0 or sigma_r <= 0:
        raise ParameterError("sigma_s and sigma_r must be > 0")
    if slices < 2:
        raise ParameterError(f"slices must be >= 2, got {slices}")
    lo, hi = float(u.min()), float(u.max())
    if hi - lo == 0.0:
        return u.copy()

    h, w = u.shape
    step_s = sigma_s / spatial_oversampling
    step_r = (hi - lo) / (slices - 1)
    # grid coordinates, padded by the blur support on every side
    pad_s = int(np.ceil(4 * spatial_oversampling)) + 1
    pad_r = int(np.ceil(4 * sigma_r / step_r)) + 1
    gy = np.arange(h)[:, None] / step_s + pad_s
    gx = np.arange(w)[None, :] / step_s + pad_s
    gz = (u - lo) / step_r + pad_r
    gy = np.broadcast_to(gy, u.shape)
    gx = np.broadcast_to(gx, u.shape)
    shape = (int(np.floor(gy.max())) + pad_s + 2,
             int(np.floor(gx.max())) + pad_s + 2,
             slices + 2 * pad_r + 1)

    coords = (gy.ravel(), gx.ravel(), gz.ravel())
    base = [np.floor(c).astype(np.intp) for c in coords]
    frac = [c - b for c, b in zip(coords, base)]
    values = np.zeros(shape)
    weights = np.zeros(shape)
    flat_u = u.ravel()
    for dy in (0, 1):
        wy = frac[0] if dy else 1.0 - frac[0]
        for dx in (0, 1):
            wx = frac[1] if dx else 1.0 - frac[1]
            for dz in (0, 1):
                wz = frac[2] if dz else 1.0 - frac[2]
                wt = wy * wx * wz
                idx = np.ravel_multi_index(
                    (base[0] + dy, base[1] + dx, base[2] + dz), shape)
                weights.ravel()[:] += np.bincount(idx, wt, weights.size)
                values.ravel()[:] += np.bincount(idx, wt * flat_u, values.size)

    grid_sigma = (spatial_oversampling, spatial_oversampling, sigma_r / step_r)
    values = ndimage.gaussian_filter(values, grid_sigma, mode="constant", truncate=4.0)
    weights = ndimage.gaussian_filter(weights, grid_sigma, mode="constant", truncate=4.0)

    num = ndimage.map_coordinates(values, np.stack(coords), order=1)
    den = ndimage.map_coordinates(weights, np.stack(coords), order=1)
    return (num / den).reshape(u.shape)


def bilateral_exact(img, sigma_s: float, sigma_r: float,
                    radius: int | None = None) -> np.ndarray:
    """Brute-force bilateral filter; ``radius=None`` uses the whole image."""
    u = as_image(img)
    h, w = u.shape
    ys, xs = np.mgrid[0:h, 0:w]
    out = np.empty_like(u)
    for y in range(h):
        for x in range(w):
            d2 = (ys - y) ** 2 + (xs - x) ** 2
            wt = np.exp(-d2 / (2 * sigma_s**2)) * np.exp(-(u - u[y, x]) ** 2 / (2 * sigma_r**2))
            if radius is not None:
                wt = wt * ((np.abs(ys - y) <= radius) & (np.abs(xs - x) <= radius))
            out[y, x] = np.sum(wt * u) / np.sum(wt)
    return out
