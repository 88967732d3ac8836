from __future__ import annotations

import numpy as np
import pytest

from edgebench.errors import ParameterError
from edgebench.image import gaussian_blur_fourier
from edgebench.measures import measure_compart, measure_conthalo
from edgebench.patterns import (COMPART_LAYOUT, EDGE_SIGMAS, MASK_WIDTH, PatternKind, band_rows,
                                border_band, composite_bands, gen_blurred_edge_patterns,
                                gen_compart_pattern, gen_conthalo_pattern, gen_edge_patterns,
                                generate_all)


@pytest.fixture(scope="module")
def patterns():
    return generate_all()


def test_default_shapes(patterns):
    assert set(patterns) == set(PatternKind)
    for bundle in patterns.values():
        assert bundle.image.shape == (480, 480)
        for mask in bundle.masks.values():
            assert mask.shape == (480, 480) and mask.dtype == bool


def test_edge_pattern_values_and_masks():
    bundle = gen_edge_patterns()
    assert len(bundle.inputs) == 6
    last = bundle.inputs[-1]
    assert np.all(last[:, :240] == pytest.approx(0.9)) and np.all(last[:, 240:] == pytest.approx(0.1))
    left, right = bundle.masks["left"], bundle.masks["right"]
    assert left.sum() == right.sum() == MASK_WIDTH * 480
    assert not np.any(left & right)
    assert np.all(left[:, 200:240]) and np.all(right[:, 240:280])


def test_mirrored_edges_swap_masks():
    plain = gen_edge_patterns()
    flipped = gen_edge_patterns(bright_left=False)
    assert np.array_equal(flipped.masks["left"], plain.masks["right"])
    assert np.allclose(flipped.inputs[2], 1.0 - plain.inputs[2])


def test_blurred_edges():
    bundle = gen_blurred_edge_patterns()
    first = bundle.inputs[0]
    # odd symmetry about the edge between columns 239 and 240
    assert np.allclose(first[:, 239] + first[:, 240], 1.0, atol=1e-12)
    for sigma, img in zip(EDGE_SIGMAS, bundle.inputs):
        reach = int(np.ceil(4 * sigma)) + 1
        if 240 - reach > 0:
            assert np.max(np.abs(img[:, :240 - reach] - 0.9)) < 1e-3
            assert np.max(np.abs(img[:, 240 + reach:] - 0.1)) < 1e-3


def test_blurred_edges_semigroup():
    inputs = gen_blurred_edge_patterns().inputs
    for k in range(5):
        sigma = EDGE_SIGMAS[k]
        step_up = gaussian_blur_fourier(inputs[k], sigma * np.sqrt(3.0))
        assert np.max(np.abs(step_up - inputs[k + 1])) < 1e-3


def test_composite_bands():
    assert band_rows(480) == (200, 280)
    levels = [0.1 * (k + 1) for k in range(6)]
    comp = composite_bands([np.full((480, 32), c) for c in levels])
    assert comp.shape == (480, 32)
    for k, c in enumerate(levels):
        assert np.all(comp[80 * k:80 * (k + 1)] == c)
    edges = gen_edge_patterns()
    same = composite_bands([edges.inputs[3]] * 6)
    assert np.array_equal(same, edges.inputs[3])
    with pytest.raises(ParameterError):
        composite_bands([np.zeros((480, 8))] * 5)


def test_compart_pattern():
    bundle = gen_compart_pattern()
    img, shapes, inter = bundle.image, bundle.masks["shapes"], bundle.masks["inter"]
    big = COMPART_LAYOUT["sides"][-1]
    # the largest squares sit in the last row; take the centre of one of them
    ys = np.nonzero(shapes.any(axis=1))[0]
    bottom = ys.max()
    cy = bottom - big // 2
    row = shapes[cy]
    runs = np.flatnonzero(np.diff(np.r_[0, row.astype(int), 0]))
    starts, stops = runs[::2], runs[1::2]
    square = next(s for s, e in zip(starts, stops) if e - s == big)
    assert img[cy, square + big // 2] == pytest.approx(0.9, abs=1e-3)
    assert measure_compart(img, img, inter) == 0.0


def _naive_border_band(shapes, width):
    h, w = shapes.shape
    out = np.zeros_like(shapes)
    for y in range(h):
        for x in range(w):
            win = shapes[max(0, y - width):y + width + 1, max(0, x - width):x + width + 1]
            out[y, x] = win.any() and not win.all()
    return out


def test_border_band_matches_naive():
    rng = np.random.default_rng(3)
    shapes = np.zeros((40, 40), dtype=bool)
    for _ in range(6):
        y, x = rng.integers(0, 34, size=2)
        hh, ww = rng.integers(1, 8, size=2)
        shapes[y:y + hh, x:x + ww] = True
    band = border_band(shapes, 2)
    naive = _naive_border_band(shapes, 2)
    assert np.array_equal(band, naive)


def test_compart_too_small():
    with pytest.raises(ParameterError):
        gen_compart_pattern(256)


def test_conthalo_pattern():
    a = gen_conthalo_pattern(seed=5)
    b = gen_conthalo_pattern(seed=5)
    c = gen_conthalo_pattern(seed=6)
    assert np.array_equal(a.image, b.image)
    assert not np.array_equal(a.image, c.image)
    interior, ext, texture = a.masks["int"], a.masks["ext"], a.masks["texture"]
    assert not np.any(interior & ext)
    assert np.all(interior <= texture) and np.all(ext <= texture)
    band = border_band(texture, 2)
    assert not np.any(ext & band) and not np.any(interior & band)
    tex = a.image[texture]
    assert tex.min() >= 0.65 and tex.max() <= 0.75
    assert np.all(a.image[~texture] == 0.1)
    assert measure_conthalo(a.image - a.image, interior, ext) == 0.0


def test_default_mask_sizes(patterns):
    lum = patterns[PatternKind.LUM_HALO].masks
    assert lum["left"].sum() == lum["right"].sum() == 19200
    compart = patterns[PatternKind.COMPART].masks
    assert (compart["inter"].sum(), compart["shapes"].sum()) == (214240, 50880)
    cont = patterns[PatternKind.CONT_HALO].masks
    assert (cont["int"].sum(), cont["ext"].sum(), cont["texture"].sum()) == (114244, 49408, 188356)
