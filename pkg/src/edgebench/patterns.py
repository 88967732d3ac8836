"""Synthetic test patterns and their measurement masks.

Four patterns are generated, one per artifact:

* ``LumHalo``: six sharp vertical edges of increasing height.
* ``Staircase``: six edges of height 0.8 blurred with increasing sigma.
* ``Compart``: bright squares and rectangles on a dark background.
* ``ContHalo``: noisy bright rectangles separated by dark barriers.

The two edge kinds are filtered one image at a time; the central horizontal
band of each filtered image is then stacked with :func:`composite_bands`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ParameterError
from .image import as_image, gaussian_blur_fourier, gaussian_blur_spatial

DEFAULT_SIZE = 480
DEFAULT_SEED = 42
EDGE_HEIGHTS = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
EDGE_SIGMAS = (0.7, 1.4, 2.8, 5.6, 11.2, 22.4)
STAIRCASE_HEIGHT = 0.8
MASK_WIDTH = 40

# Compartmentalization layout. Each row holds four shapes of a single base
# side: square, gap, wide rectangle, gap, square, gap, wide rectangle.
COMPART_LAYOUT = {
    "background": 0.1,
    "foreground": 0.9,
    "sides": (4, 8, 12, 16, 24, 32, 48, 64),
    "interstices": (2, 4, 8),
    "rectangle_aspect": 2,
    "row_gap": 16,
    "antialias_sigma": 0.5,
    "border_band": 2,
}

# Contrast-halo layout: a dark frame and a 4 x 4 grid of textured cells.
CONTHALO_LAYOUT = {
    "barrier": 0.1,
    "texture_mean": 0.7,
    "noise_amplitude": 0.05,
    "frame_width": 16,
    "barrier_widths_x": (2, 4, 8),
    "barrier_widths_y": (8, 4, 2),
    "exclusion_band": 2,
    "ext_width": 8,
    "int_margin": 12,
}


class PatternKind(str, enum.Enum):
    LUM_HALO = "LumHalo"
    STAIRCASE = "Staircase"
    COMPART = "Compart"
    CONT_HALO = "ContHalo"

    def __str__(self) -> str:
        return self.value


@dataclass
class PatternBundle:
    kind: PatternKind
    inputs: list[np.ndarray]
    masks: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    @property
    def image(self) -> np.ndarray:
        """The single input, or the band composite of the six edge inputs."""
        if len(self.inputs) == 1:
            return self.inputs[0]
        return composite_bands(self.inputs)


def _edge_masks(size: int, mirrored: bool = False) -> dict[str, np.ndarray]:
    left = np.zeros((size, size), dtype=bool)
    right = np.zeros((size, size), dtype=bool)
    mid = size // 2
    left[:, mid - MASK_WIDTH:mid] = True
    right[:, mid:mid + MASK_WIDTH] = True
    if mirrored:
        left, right = right, left
    return {"left": left, "right": right}


def _check_size(size: int) -> None:
    if size % 6 != 0 or size < 2 * MASK_WIDTH + 12:
        raise ParameterError(f"size must be a multiple of 6 and >= {2 * MASK_WIDTH + 12}, got {size}")


def _step(size: int, height: float, bright_left: bool) -> np.ndarray:
    img = np.empty((size, size))
    mid = size // 2
    hi, lo = 0.5 + height / 2.0, 0.5 - height / 2.0
    img[:, :mid] = hi if bright_left else lo
    img[:, mid:] = lo if bright_left else hi
    return img


def gen_edge_patterns(heights=EDGE_HEIGHTS, size: int = DEFAULT_SIZE,
                      bright_left: bool = True) -> PatternBundle:
    """Six sharp vertical edges at column ``size // 2``.

    With ``bright_left`` the left half is ``0.5 + h/2``; the flipped polarity
    also swaps the roles of the left/right masks so scores are unchanged.
    """
    heights = [float(h) for h in heights]
    _check_size(size)
    if len(heights) != 6 or not all(0.0 < h <= 1.0 for h in heights):
        raise ParameterError(f"need six heights in (0, 1], got {heights}")
    inputs = [_step(size, h, bright_left) for h in heights]
    return PatternBundle(
        PatternKind.LUM_HALO, inputs, _edge_masks(size, not bright_left),
        {"size": size, "heights": heights, "bright_left": bright_left,
         "mask_width": MASK_WIDTH})


def gen_blurred_edge_patterns(sigmas=EDGE_SIGMAS, size: int = DEFAULT_SIZE,
                              bright_left: bool = True) -> PatternBundle:
    """Six edges of height 0.8 blurred in the Fourier domain."""
    sigmas = [float(s) for s in sigmas]
    _check_size(size)
    if len(sigmas) != 6 or not all(s > 0 for s in sigmas):
        raise ParameterError(f"need six positive sigmas, got {sigmas}")
    step = _step(size, STAIRCASE_HEIGHT, bright_left)
    inputs = [gaussian_blur_fourier(step, s) for s in sigmas]
    return PatternBundle(
        PatternKind.STAIRCASE, inputs, _edge_masks(size, not bright_left),
        {"size": size, "sigmas": sigmas, "height": STAIRCASE_HEIGHT,
         "bright_left": bright_left, "mask_width": MASK_WIDTH})


def band_rows(height: int) -> tuple[int, int]:
    """Row range ``[start, stop)`` of the central ``height // 6`` rows."""
    band = height // 6
    start = (height - band) // 2
    return start, start + band


def composite_bands(filtered) -> np.ndarray:
    """Stack the central ``H/6`` rows of each of six images, in order."""
    images = [as_image(f) for f in filtered]
    if len(images) != 6:
        raise ParameterError(f"need exactly 6 images, got {len(images)}")
    shape = images[0].shape
    if any(im.shape != shape for im in images):
        raise ParameterError("images must share one shape")
    if shape[0] % 6 != 0:
        raise ParameterError(f"height must be a multiple of 6, got {shape[0]}")
    start, stop = band_rows(shape[0])
    return np.vstack([im[start:stop] for im in images])


# --------------------------------------------------------------------------
# Compartmentalization
# --------------------------------------------------------------------------

def _compart_shapes(size: int) -> np.ndarray:
    cfg = COMPART_LAYOUT
    g1, g2, g3 = cfg["interstices"]
    aspect = cfg["rectangle_aspect"]
    rows = []
    for s in cfg["sides"]:
        widths = [s, g1, aspect * s, g2, s, g3, aspect * s]
        rows.append((s, widths))
    total_h = sum(s for s, _ in rows) + cfg["row_gap"] * (len(rows) - 1)
    total_w = max(sum(w) for _, w in rows)
    if total_h + 2 * cfg["row_gap"] > size or total_w + 2 * cfg["row_gap"] > size:
        raise ParameterError(f"size {size} cannot host the compartmentalization layout")
    shapes = np.zeros((size, size), dtype=bool)
    y = (size - total_h) // 2
    for s, widths in rows:
        x = (size - sum(widths)) // 2
        for k, w in enumerate(widths):
            if k % 2 == 0:
                shapes[y:y + s, x:x + w] = True
            x += w
        y += s + cfg["row_gap"]
    return shapes


def border_band(shapes: np.ndarray, width: int) -> np.ndarray:
    """Pixels within chessboard distance ``width`` of the other class."""
    square = np.ones((3, 3), dtype=bool)
    grown = ndimage.binary_dilation(shapes, square, iterations=width)
    shrunk = ndimage.binary_erosion(shapes, square, iterations=width, border_value=1)
    return grown & ~shrunk


def gen_compart_pattern(size: int = DEFAULT_SIZE) -> PatternBundle:
    """Bright shapes of many areas on a dark background, lightly anti-aliased.

    The ``inter`` mask drops a band of ``border_band`` pixels on both sides of
    every shape outline.
    """
    if size < 256:
        raise ParameterError(f"size must be >= 256, got {size}")
    cfg = COMPART_LAYOUT
    shapes = _compart_shapes(size)
    img = np.where(shapes, cfg["foreground"], cfg["background"])
    img = gaussian_blur_spatial(img, cfg["antialias_sigma"])
    inter = ~border_band(shapes, cfg["border_band"])
    return PatternBundle(
        PatternKind.COMPART, [img], {"inter": inter, "shapes": shapes},
        {"size": size, "layout": _jsonable(cfg)})


# --------------------------------------------------------------------------
# Contrast halo
# --------------------------------------------------------------------------

def _cell_edges(size: int, frame: int, barriers) -> list[tuple[int, int]]:
    inner = size - 2 * frame - sum(barriers)
    n = len(barriers) + 1
    widths = [inner // n + (1 if k < inner % n else 0) for k in range(n)]
    spans = []
    x = frame
    for k, w in enumerate(widths):
        spans.append((x, x + w))
        x += w + (barriers[k] if k < len(barriers) else 0)
    return spans


def gen_conthalo_pattern(size: int = DEFAULT_SIZE, seed: int = DEFAULT_SEED) -> PatternBundle:
    """Uniform-noise texture cells enclosed by dark barriers of several widths.

    Masks (by chessboard distance ``d`` to the nearest barrier pixel):
    ``ext`` holds texture pixels with ``band < d <= band + ext_width``,
    ``int`` those with ``d > int_margin``.
    """
    if size < 256:
        raise ParameterError(f"size must be >= 256, got {size}")
    cfg = CONTHALO_LAYOUT
    cols = _cell_edges(size, cfg["frame_width"], cfg["barrier_widths_x"])
    rows = _cell_edges(size, cfg["frame_width"], cfg["barrier_widths_y"])
    texture = np.zeros((size, size), dtype=bool)
    for y0, y1 in rows:
        for x0, x1 in cols:
            texture[y0:y1, x0:x1] = True

    rng = np.random.default_rng(seed)
    amp = cfg["noise_amplitude"]
    noise = rng.uniform(-amp, amp, size=(size, size))
    img = np.where(texture, cfg["texture_mean"] + noise, cfg["barrier"])

    dist = ndimage.distance_transform_cdt(texture, metric="chessboard")
    band = cfg["exclusion_band"]
    ext = texture & (dist > band) & (dist <= band + cfg["ext_width"])
    interior = texture & (dist > cfg["int_margin"])
    return PatternBundle(
        PatternKind.CONT_HALO, [img],
        {"int": interior, "ext": ext, "texture": texture},
        {"size": size, "seed": seed, "layout": _jsonable(cfg)})


def _jsonable(cfg: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()}


def generate_all(size: int = DEFAULT_SIZE, seed: int = DEFAULT_SEED) -> dict[PatternKind, PatternBundle]:
    return {
        PatternKind.LUM_HALO: gen_edge_patterns(size=size),
        PatternKind.STAIRCASE: gen_blurred_edge_patterns(size=size),
        PatternKind.COMPART: gen_compart_pattern(size),
        PatternKind.CONT_HALO: gen_conthalo_pattern(size, seed),
    }
