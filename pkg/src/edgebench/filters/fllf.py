"""Fast local Laplacian filter with the smoothing remapping."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from ..image import (_check_pyramid_size, as_image, build_laplacian_pyramid,
                     collapse_laplacian_pyramid, gaussian_pyramid)


def remap(x: np.ndarray, g: float, sigma_r: float) -> np.ndarray:
    """Detail-compressing remapping around the reference intensity ``g``.

    Differences smaller than ``sigma_r`` are compressed by a cubic,
    larger ones pass unchanged (the map is continuous at ``|x - g| = sigma_r``).
    """
    d = x - g
    t = np.abs(d) / sigma_r
    return np.where(t <= 1.0, g + np.sign(d) * sigma_r * t**3, x)


def filter_fllf(img, sigma_r: float, l_max: int = 6, samples: int = 64) -> np.ndarray:
    """Local Laplacian filtering from ``samples`` remapped pyramids.

    For intensities ``g_i`` spread uniformly on [0, 1], the input is remapped
    around ``g_i`` and decomposed. Each output Laplacian coefficient is the
    linear interpolation, between the two samples that bracket the
    Gaussian-pyramid coefficient at that position, of the remapped pyramids'
    coefficients. The residual is the input's Gaussian residual.
    """
    u = as_image(img)
    if not sigma_r > 0:
        raise ParameterError(f"sigma_r must be > 0, got {sigma_r}")
    if samples < 2:
        raise ParameterError(f"samples must be >= 2, got {samples}")
    _check_pyramid_size(u.shape, l_max)
    gauss = gaussian_pyramid(u, l_max)
    out = [np.zeros_like(level) for level in gauss[:-1]]
    out.append(gauss[-1].copy())
    step = 1.0 / (samples - 1)
    for g in np.linspace(0.0, 1.0, samples):
        pyr = build_laplacian_pyramid(remap(u, g, sigma_r), l_max)
        for level in range(l_max):
            weight = np.maximum(0.0, 1.0 - np.abs(gauss[level] - g) / step)
            # intensities outside [0, 1] take the nearest end sample in full
            if g == 0.0:
                weight[gauss[level] < 0.0] = 1.0
            elif g == 1.0:
                weight[gauss[level] > 1.0] = 1.0
            out[level] += weight * pyr[level]
    return collapse_laplacian_pyramid(out)


def llf_exact(img, sigma_r: float, l_max: int) -> np.ndarray:
    """Reference local Laplacian filter: one remapped pyramid per coefficient."""
    u = as_image(img)
    _check_pyramid_size(u.shape, l_max)
    gauss = gaussian_pyramid(u, l_max)
    out = [np.zeros_like(level) for level in gauss[:-1]]
    out.append(gauss[-1].copy())
    for level in range(l_max):
        rows, cols = gauss[level].shape
        for y in range(rows):
            for x in range(cols):
                g = gauss[level][y, x]
                out[level][y, x] = build_laplacian_pyramid(remap(u, g, sigma_r), l_max)[level][y, x]
    return collapse_laplacian_pyramid(out)
