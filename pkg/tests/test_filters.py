from __future__ import annotations

import itertools
import time

import numpy as np
import pytest
from scipy import sparse

from edgebench.calibration import load_calibration_images
from edgebench.errors import NumericalError, ParameterError
from edgebench.filters import (FIXED_PARAMS, PUBLISHED_PRESET, FilterId, FilterSpec, decompose,
                               enhance, preset_spec)
from edgebench.filters.dt import filter_dt
from edgebench.filters.fbf import bilateral_exact, filter_fbf
from edgebench.filters.fllf import filter_fllf, llf_exact, remap
from edgebench.filters.gf import filter_gf
from edgebench.filters.l0 import filter_l0
from edgebench.filters.tvl1 import _div, filter_tvl1, tvl1_energy
from edgebench.filters.wls import filter_wls, wls_system
from edgebench.image import gradients, psnr_detail

rng = np.random.default_rng(11)


# ---------------------------------------------------------------- oracles

def _gf_oracle(img, r, eps):
    """Per-window ridge regression, then average of the window predictions."""
    h, w = img.shape
    acc = np.zeros_like(img)
    cnt = np.zeros_like(img)
    for cy in range(h):
        for cx in range(w):
            ys = slice(max(0, cy - r), min(h, cy + r + 1))
            xs = slice(max(0, cx - r), min(w, cx + r + 1))
            patch = img[ys, xs].ravel()
            design = np.column_stack([patch, np.ones_like(patch)])
            design = np.vstack([design, [np.sqrt(eps * patch.size), 0.0]])
            target = np.append(patch, 0.0)
            (a, b), *_ = np.linalg.lstsq(design, target, rcond=None)
            acc[ys, xs] += a * img[ys, xs] + b
            cnt[ys, xs] += 1
    return acc / cnt


def test_micro_oracles_within_budget():
    start = time.perf_counter()
    img = rng.random((9, 9))
    assert np.max(np.abs(filter_fbf(img, 2.0, 0.3, slices=256) - bilateral_exact(img, 2.0, 0.3))) < 0.01

    img = rng.random((12, 12))
    assert np.max(np.abs(filter_gf(img, 2, 0.01) - _gf_oracle(img, 2, 0.01))) < 1e-8

    img = rng.random((8, 8))
    dense = np.linalg.solve(wls_system(img, 1.2, 0.5).toarray(), img.ravel()).reshape(8, 8)
    assert np.max(np.abs(filter_wls(img, 1.2, 0.5) - dense)) < 1e-6

    img = rng.random((32, 32))
    assert np.max(np.abs(filter_fllf(img, 0.2, l_max=3) - llf_exact(img, 0.2, 3))) < 2e-3
    assert time.perf_counter() - start < 30


def test_fllf_oracle_smooth_input():
    y, x = np.mgrid[0:32, 0:32] / 31.0
    img = 0.2 + 0.6 * x * y + 0.05 * np.sin(9 * x)
    assert np.max(np.abs(filter_fllf(img, 0.1, l_max=3) - llf_exact(img, 0.1, 3))) < 2e-3


# ---------------------------------------------------------------- constants

@pytest.mark.parametrize("fid", list(FilterId))
def test_constant_fixed_point(fid):
    img = np.full((64, 64), 0.42)
    tol = 1e-3 if fid in (FilterId.TVL1, FilterId.L0IS) else 1e-6
    parts = decompose(img, preset_spec(fid))
    assert np.max(np.abs(parts.base - 0.42)) < tol
    assert np.max(np.abs(parts.detail)) < tol


@pytest.mark.parametrize("fid", list(FilterId))
def test_base_plus_detail_reconstructs(fid):
    img = rng.random((64, 64))
    parts = decompose(img, preset_spec(fid))
    assert np.array_equal(parts.detail, img - parts.base)
    # u - b + b can differ from u by one rounding step, never more
    assert np.max(np.abs(parts.base + parts.detail - img)) <= np.spacing(1.0)


# ---------------------------------------------------------------- knob monotonicity

@pytest.fixture(scope="module")
def crops():
    images = load_calibration_images()
    out = []
    for img in images:
        h, w = img.shape
        out.append(img[h // 2 - 48:h // 2 + 48, w // 2 - 48:w // 2 + 48])
    return out


@pytest.mark.parametrize("fid", list(FilterId))
def test_detail_grows_with_knob(fid, crops):
    preset = PUBLISHED_PRESET[fid][1]
    knobs = [preset * f for f in (0.25, 0.5, 1.0, 2.0, 4.0)]
    for img in crops:
        db = [psnr_detail(img, decompose(img, preset_spec(fid, k)).base) for k in knobs]
        assert all(a >= b - 1e-9 for a, b in zip(db, db[1:])), (fid, db)


# ---------------------------------------------------------------- shift equivariance

def test_gf_shift_equivariance():
    big = rng.random((80, 80))
    a = filter_gf(big[:60, :60], 4, 0.01)
    b = filter_gf(big[5:65, 3:63], 4, 0.01)
    assert np.max(np.abs(a[5 + 8:-8, 3 + 8:-8] - b[8:-8 - 5, 8:-8 - 3])) < 1e-12


def test_dt_shift_equivariance():
    big = rng.random((120, 120))
    a = filter_dt(big[:100, :100], 3.0, 0.3)
    b = filter_dt(big[7:107, 4:104], 3.0, 0.3)
    m = 40
    assert np.max(np.abs(a[7 + m:-m, 4 + m:-m] - b[m:-m - 7, m:-m - 4])) < 1e-6


# ---------------------------------------------------------------- per-filter examples

def test_fbf_step_preserved():
    img = np.full((16, 240), 0.1)
    img[:, :120] = 0.9
    out = filter_fbf(img, 40.0, 0.1178)
    far = np.r_[0:120 - 41, 120 + 41:240]
    assert np.max(np.abs(out[:, far] - img[:, far])) < 0.02


def test_fbf_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        filter_fbf(np.zeros((8, 8)), 0.0, 0.1)
    with pytest.raises(ParameterError):
        filter_fbf(np.zeros((8, 8)), 2.0, 0.1, slices=1)


def test_dt_step_edge_kept():
    img = np.zeros((4, 200))
    img[:, 100:] = 1.0
    out = filter_dt(img, 40.0, 0.1166)[0]
    crossing = np.argmax(out >= 0.5)
    assert abs(crossing - 100) <= 2


def test_dt_large_range_sigma_is_gaussian_like():
    ramp = np.tile(np.linspace(0.1, 0.9, 300), (3, 1))
    out = filter_dt(ramp, 10.0, 1e6)
    assert np.max(np.abs(out[:, 100:200] - ramp[:, 100:200])) < 1e-4
    impulse = np.zeros((1, 401))
    impulse[0, 200] = 1.0
    resp = filter_dt(impulse, 10.0, 1e6)[0]
    x = np.arange(401) - 200
    std = np.sqrt(np.sum(resp * x**2) / resp.sum())
    assert std == pytest.approx(10.0, rel=0.05)


def test_gf_published_parameters():
    spec = preset_spec(FilterId.GF)
    assert spec.params["radius"] == 40
    assert spec.params["epsilon"] == pytest.approx(0.075**2)


def test_wls_identity_and_constant():
    img = rng.random((10, 10))
    assert np.array_equal(filter_wls(img, 1.2, 0.0), img)
    assert np.allclose(filter_wls(np.full((10, 10), 0.3), 1.2, 5.0), 0.3, atol=1e-6)


def test_wls_system_is_symmetric_positive():
    a = wls_system(rng.random((6, 7)), 1.2, 0.5)
    assert abs(a - a.T).max() < 1e-14
    assert np.all(np.linalg.eigvalsh(a.toarray()) >= 1 - 1e-9)


def test_wls_reports_non_convergence():
    img = rng.random((16, 16))
    with pytest.raises(NumericalError) as info:
        filter_wls(img, 1.2, 50.0, rtol=1e-14, maxiter=2)
    assert info.value.residual > 0


def test_fllf_remap_shape():
    x = np.linspace(0, 1, 101)
    out = remap(x, 0.5, 0.1)
    assert out[50] == 0.5
    near = np.abs(x - 0.5) <= 0.1
    assert np.allclose(out[~near], x[~near])
    # continuous at |x - g| = sigma_r
    assert remap(np.array([0.6]), 0.5, 0.1)[0] == pytest.approx(0.6)


def test_fllf_sampling_convergence():
    img = rng.random((32, 32))
    s2 = filter_fllf(img, 0.2, l_max=3, samples=2)
    s64 = filter_fllf(img, 0.2, l_max=3, samples=64)
    s128 = filter_fllf(img, 0.2, l_max=3, samples=128)
    assert np.max(np.abs(s2 - s64)) > 1e-2
    assert np.max(np.abs(s64 - s128)) < 1e-3


def test_tvl1_tiny_lambda_is_identity():
    img = rng.random((24, 24))
    assert np.max(np.abs(filter_tvl1(img, 1e-6) - img)) < 1e-3


def test_tv_divergence_is_negative_adjoint():
    for shape in ((1, 9), (7, 1), (6, 8)):
        v = rng.standard_normal(shape)
        px, py = rng.standard_normal(shape), rng.standard_normal(shape)
        gx, gy = gradients(v)
        assert np.sum(gx * px + gy * py) == pytest.approx(-np.sum(v * _div(px, py)), abs=1e-12)


def test_tvl1_energy_against_exhaustive_search():
    # two-level signal with two narrow outliers
    signal = np.r_[np.full(10, 0.2), np.full(10, 0.8)]
    signal[3] += 0.3
    signal[15] -= 0.25
    u = signal[None, :]
    lam = 0.7
    v = filter_tvl1(u, lam)
    energy = tvl1_energy(u, v, lam)

    levels = np.unique(signal)
    best = np.inf
    n = signal.size
    for a, b in itertools.product(levels, repeat=2):
        for j in range(n + 1):
            cand = np.r_[np.full(j, a), np.full(n - j, b)][None, :]
            best = min(best, tvl1_energy(u, cand, lam))
    assert abs(energy - best) <= 0.005 * best


def test_l0_is_piecewise_constant_on_checkerboard():
    y, x = np.mgrid[0:64, 0:64]
    board = (((x // 16) + (y // 16)) % 2).astype(float)
    out = filter_l0(board, 0.002)
    gx, gy = gradients(out)
    mag = np.hypot(gx, gy)
    # true edges sit between columns/rows 15|16, 31|32, 47|48; about 9% of
    # pixels carry a forward difference across one of them
    on_edge = np.zeros_like(board, dtype=bool)
    for k in (15, 31, 47):
        on_edge[:, k] = on_edge[k, :] = True
    assert np.all(mag[~on_edge] < 1e-3)
    assert np.all(mag[on_edge & ((gx != 0) | (gy != 0))] > 0.9)
    assert np.max(np.abs(out - board)) < 0.01


def test_l0_large_lambda_flattens():
    img = 0.5 + 0.2 * (rng.random((32, 32)) - 0.5)
    out = filter_l0(img, 10.0)
    assert np.max(np.abs(out - img.mean())) < 0.02


# ---------------------------------------------------------------- specs and enhance

def test_filter_spec_validation():
    with pytest.raises(ParameterError):
        FilterSpec(FilterId.GF, {"radius": 40})
    with pytest.raises(ParameterError):
        preset_spec(FilterId.GF, knob=0.0)
    spec = preset_spec("DT").with_knob(0.5)
    assert spec.knob_value == 0.5 and spec.params["sigma_s"] == FIXED_PARAMS[FilterId.DT]["sigma_s"]


def test_enhance():
    img = rng.random((48, 48))
    spec = preset_spec(FilterId.GF)
    assert np.array_equal(enhance(img, spec, 1.0, 1.0), img)
    parts = decompose(img, spec)
    out = enhance(img, spec, alpha=3.0, beta=0.75)
    assert np.allclose(out, 0.125 + 0.75 * parts.base + 3.0 * parts.detail)
    out6 = enhance(img, spec, alpha=6.0, beta=1.0)
    assert np.allclose(out6 - img, 5.0 * parts.detail)


def test_knob_errors_are_parameter_errors():
    img = np.zeros((16, 16))
    for call in (lambda: filter_gf(img, 2, 0.0), lambda: filter_dt(img, 4.0, 0.0),
                 lambda: filter_l0(img, 0.0), lambda: filter_tvl1(img, -1.0),
                 lambda: filter_fllf(img, 0.0, l_max=2)):
        with pytest.raises(ParameterError):
            call()


def test_wls_matrix_type():
    assert sparse.issparse(wls_system(np.ones((3, 3)), 1.2, 1.0))
