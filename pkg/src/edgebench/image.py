"""Grayscale image primitives shared by the filters, patterns and measures.

Images are plain 2-D ``float64`` numpy arrays (rows, columns) with a nominal
dynamic of [0, 1]; masks are boolean arrays of the same shape. Every boundary
is handled by half-sample symmetric extension (``d c b a | a b c d``).
"""

from __future__ import annotations

import math
from os import PathLike
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from scipy import fft, ndimage

from .errors import FormatError, ParameterError, StructureError

#: Floor applied before taking the log of an image.
LOG_EPS = 1.0 / 256.0

#: Sentinel returned by :func:`psnr_detail` when the detail layer is zero.
NO_DETAIL = math.inf

_BURT_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def as_image(img, name: str = "image") -> np.ndarray:
    """Validate and return ``img`` as a finite 2-D float64 array."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise ParameterError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ParameterError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains NaN or Inf")
    return arr


def _check_same_shape(*arrays: np.ndarray) -> None:
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise ParameterError(f"dimension mismatch: {sorted(shapes)}")


# --------------------------------------------------------------------------
# I/O
# --------------------------------------------------------------------------

def load_image(path: str | PathLike) -> np.ndarray:
    """Read an 8/16-bit grayscale PGM or PNG and scale it to [0, 1].

    Colour files are reduced to the plain average of their RGB channels.

    Raises:
        OSError: the file cannot be read.
        FormatError: the pixel format is not supported.
    """
    path = Path(path)
    try:
        with PILImage.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("L", "P", "RGB", "RGBA", "LA"):
                if mode == "L":
                    data = np.asarray(im, dtype=np.float64)
                else:
                    rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                    data = rgb.mean(axis=2)
                scale = 255.0
            elif mode in ("I;16", "I;16B", "I;16L", "I"):
                data = np.asarray(im, dtype=np.float64)
                scale = 65535.0
            else:
                raise FormatError(f"{path}: unsupported pixel format {mode!r}")
    except PILImage.UnidentifiedImageError as exc:
        raise FormatError(f"{path}: not a PGM/PNG image") from exc
    if data.max(initial=0.0) > scale:
        raise FormatError(f"{path}: samples exceed {int(scale)}")
    return data / scale


def save_image(img, path: str | PathLike) -> None:
    """Clamp to [0, 1] and write as a 16-bit PGM or PNG (chosen by suffix)."""
    arr = as_image(img)
    q = np.rint(np.clip(arr, 0.0, 1.0) * 65535.0).astype(np.uint16)
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in (".png", ".pgm"):
        raise FormatError(f"{path}: only .png and .pgm are written")
    PILImage.fromarray(q).save(path)


def save_mask(mask, path: str | PathLike) -> None:
    """Write a boolean mask as an 8-bit image (0 / 255)."""
    m = np.asarray(mask, dtype=bool)
    PILImage.fromarray(np.where(m, 255, 0).astype(np.uint8)).save(Path(path))


# --------------------------------------------------------------------------
# Blurs and local statistics
# --------------------------------------------------------------------------

def gaussian_blur_fourier(img, sigma: float) -> np.ndarray:
    """Gaussian blur applied as a multiplication in the frequency domain.

    The symmetric extension of the image is periodic with period ``2N``;
    its spectrum is exactly the DCT-II of the image, so the transfer function
    ``exp(-2 pi^2 sigma^2 xi^2)`` is applied to DCT coefficients at
    frequencies ``xi = k / 2N``.
    """
    arr = as_image(img)
    if not sigma > 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    coeffs = fft.dctn(arr, type=2, norm="ortho")
    for axis, n in enumerate(arr.shape):
        xi = np.arange(n) / (2.0 * n)
        gain = np.exp(-2.0 * np.pi**2 * sigma**2 * xi**2)
        shape = [1, 1]
        shape[axis] = n
        coeffs *= gain.reshape(shape)
    return fft.idctn(coeffs, type=2, norm="ortho")


def gaussian_blur_spatial(img, sigma: float) -> np.ndarray:
    """Separable Gaussian convolution truncated at radius ``ceil(3 sigma)``."""
    arr = as_image(img)
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return arr.copy()
    radius = int(math.ceil(3.0 * sigma))
    return ndimage.gaussian_filter(arr, sigma, mode="reflect", radius=radius)


def box_mean(img, radius: int) -> np.ndarray:
    """Mean over the ``(2r+1)^2`` window clipped to the image domain.

    Computed with integral images, O(1) per pixel; border windows are
    normalised by the number of pixels they actually cover.
    """
    arr = as_image(img)
    radius = int(radius)
    if radius < 0:
        raise ParameterError(f"radius must be >= 0, got {radius}")
    if radius == 0:
        return arr.copy()
    h, w = arr.shape
    sat = np.zeros((h + 1, w + 1))
    sat[1:, 1:] = arr.cumsum(axis=0).cumsum(axis=1)
    r0 = np.clip(np.arange(h) - radius, 0, h)
    r1 = np.clip(np.arange(h) + radius + 1, 0, h)
    c0 = np.clip(np.arange(w) - radius, 0, w)
    c1 = np.clip(np.arange(w) + radius + 1, 0, w)
    total = (sat[r1][:, c1] - sat[r0][:, c1] - sat[r1][:, c0] + sat[r0][:, c0])
    count = np.outer(r1 - r0, c1 - c0)
    return total / count


def gradients(img) -> tuple[np.ndarray, np.ndarray]:
    """Forward differences ``(gx, gy)``, zero on the last column / row."""
    arr = as_image(img)
    gx = np.zeros_like(arr)
    gy = np.zeros_like(arr)
    gx[:, :-1] = arr[:, 1:] - arr[:, :-1]
    gy[:-1, :] = arr[1:, :] - arr[:-1, :]
    return gx, gy


def log_luminance(img) -> np.ndarray:
    return np.log(np.maximum(as_image(img), LOG_EPS))


def variance_masked(img, mask) -> float:
    """Population variance of ``img`` over the true pixels of ``mask``."""
    arr = as_image(img)
    m = np.asarray(mask, dtype=bool)
    _check_same_shape(arr, m)
    n = int(m.sum())
    if n < 2:
        raise ParameterError(f"mask must hold at least 2 pixels, has {n}")
    values = arr[m]
    return float(np.mean((values - values.mean()) ** 2))


def psnr_detail(input_img, base) -> float:
    """``-10 log10(RMS(input - base))``; :data:`NO_DETAIL` for zero detail.

    This is the detail-amount figure used for cross-calibration. Note the
    RMS (not the MSE) sits inside the logarithm.
    """
    u = as_image(input_img, "input")
    v = as_image(base, "base")
    _check_same_shape(u, v)
    rms = math.sqrt(float(np.mean((u - v) ** 2)))
    if rms == 0.0:
        return NO_DETAIL
    return -10.0 * math.log10(rms)


# --------------------------------------------------------------------------
# Laplacian pyramid
# --------------------------------------------------------------------------

def _blur5(arr: np.ndarray) -> np.ndarray:
    out = ndimage.correlate1d(arr, _BURT_KERNEL, axis=0, mode="reflect")
    return ndimage.correlate1d(out, _BURT_KERNEL, axis=1, mode="reflect")


def pyr_down(arr: np.ndarray) -> np.ndarray:
    """Blur with the 5-tap binomial kernel and keep every other sample."""
    return _blur5(arr)[::2, ::2]


def pyr_up(arr: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Expand ``arr`` onto a grid of ``shape`` (``ceil(shape / 2) == arr.shape``).

    Zero-insertion followed by the binomial kernel, normalised by the
    kernel mass that actually landed on each sample so that borders of odd
    and even sized grids stay exact for constants.
    """
    if (shape[0] + 1) // 2 != arr.shape[0] or (shape[1] + 1) // 2 != arr.shape[1]:
        raise StructureError(f"cannot expand {arr.shape} onto {shape}")
    up = np.zeros(shape)
    up[::2, ::2] = arr
    ones = np.zeros(shape)
    ones[::2, ::2] = 1.0
    return _blur5(up) / _blur5(ones)


def gaussian_pyramid(img, l_max: int) -> list[np.ndarray]:
    arr = as_image(img)
    levels = [arr]
    for _ in range(l_max):
        levels.append(pyr_down(levels[-1]))
    return levels


def _check_pyramid_size(shape: tuple[int, int], l_max: int) -> None:
    if l_max < 1:
        raise ParameterError(f"l_max must be >= 1, got {l_max}")
    if min(shape) < 2**l_max:
        raise ParameterError(
            f"image {shape} too small for {l_max} pyramid levels "
            f"(needs >= {2**l_max} px per side)")


def build_laplacian_pyramid(img, l_max: int) -> list[np.ndarray]:
    """Burt-Adelson pyramid: ``l_max`` band-pass levels plus the residual."""
    arr = as_image(img)
    _check_pyramid_size(arr.shape, l_max)
    gauss = gaussian_pyramid(arr, l_max)
    levels = [fine - pyr_up(coarse, fine.shape)
              for fine, coarse in zip(gauss[:-1], gauss[1:])]
    levels.append(gauss[-1])
    return levels


def collapse_laplacian_pyramid(pyr: list[np.ndarray]) -> np.ndarray:
    if len(pyr) < 2:
        raise StructureError("a pyramid needs at least one band and a residual")
    out = np.asarray(pyr[-1], dtype=np.float64)
    for band in reversed(pyr[:-1]):
        band = np.asarray(band, dtype=np.float64)
        out = band + pyr_up(out, band.shape)
    return out
