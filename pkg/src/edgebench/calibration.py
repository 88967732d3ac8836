"""Cross-calibration of the detail knob of each filter.

Every filter keeps its fixed parameters; its single detail knob is solved by
log-domain bisection so that the detail PSNR, averaged over a set of
calibration images, hits a common target.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CalibrationError, EdgeBenchError, ParameterError
from .filters import PUBLISHED_PRESET, FilterId, FilterSpec, decompose, preset_spec
from .image import NO_DETAIL, load_image, psnr_detail

log = logging.getLogger(__name__)

TARGET_DB = 16.23
TOLERANCE_DB = 0.05
MAX_ITERATIONS = 60


def default_bounds() -> dict[FilterId, tuple[float, float]]:
    """One decade on each side of the published knob value."""
    return {fid: (value / 10.0, value * 10.0) for fid, (_, value) in PUBLISHED_PRESET.items()}


def bundled_image_paths() -> list[Path]:
    root = resources.files("edgebench") / "data" / "calibration"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".png"))


def load_calibration_images(directory: str | Path | None = None) -> list[np.ndarray]:
    """Images from ``directory`` (``*.png``, ``*.pgm``), or the bundled set."""
    if directory is None:
        paths = bundled_image_paths()
    else:
        directory = Path(directory)
        paths = sorted(p for p in directory.iterdir() if p.suffix.lower() in (".png", ".pgm"))
    if not paths:
        raise ParameterError(f"no calibration images found in {directory}")
    return [load_image(p) for p in paths]


@dataclass
class CalibrationConfig:
    images: list[np.ndarray]
    target_db: float = TARGET_DB
    tolerance_db: float = TOLERANCE_DB
    max_iterations: int = MAX_ITERATIONS
    bounds: dict[FilterId, tuple[float, float]] = field(default_factory=default_bounds)
    filters: Sequence[FilterId] = tuple(FilterId)

    def __post_init__(self):
        if not self.images:
            raise ParameterError("calibration needs at least one image")
        if not self.tolerance_db > 0:
            raise ParameterError("tolerance_db must be > 0")
        for fid, (lo, hi) in self.bounds.items():
            if not 0 < lo < hi:
                raise ParameterError(f"{fid}: invalid knob bounds [{lo}, {hi}]")


@dataclass
class CalibrationEntry:
    filter: str
    knob_name: str
    value: float | None
    achieved_db: float | None
    iterations: int
    converged: bool
    history: list[list[float]] = field(default_factory=list)
    error: str | None = None

    def summary(self) -> dict:
        return {"filter": self.filter, "knob_name": self.knob_name, "value": self.value,
                "achieved_db": self.achieved_db, "iterations": self.iterations}


@dataclass
class CalibrationResult:
    target_db: float
    tolerance_db: float
    entries: dict[str, CalibrationEntry]

    @property
    def failures(self) -> list[str]:
        return [fid for fid, e in self.entries.items() if not e.converged]

    def knobs(self) -> dict[str, float]:
        return {fid: e.value for fid, e in self.entries.items() if e.converged}

    def to_dict(self) -> dict:
        return {"target_db": self.target_db, "tolerance_db": self.tolerance_db,
                "entries": [asdict(e) for e in self.entries.values()]}


def avg_detail_psnr(spec: FilterSpec, images: Iterable[np.ndarray]) -> float:
    """Mean detail PSNR over ``images``; ``inf`` if any detail layer is zero."""
    values = []
    for img in images:
        value = psnr_detail(img, decompose(img, spec).base)
        if value == NO_DETAIL:
            return NO_DETAIL
        values.append(value)
    if not values:
        raise ParameterError("avg_detail_psnr needs at least one image")
    return float(np.mean(values))


def calibrate_knob(evaluate: Callable[[float], float], lo: float, hi: float,
                   target_db: float = TARGET_DB, tolerance_db: float = TOLERANCE_DB,
                   max_iterations: int = MAX_ITERATIONS):
    """Log-domain bisection for ``evaluate(knob) == target_db``.

    ``evaluate`` must decrease with the knob: above target at ``lo``, below
    at ``hi``.

    Returns:
        ``(knob, achieved_db, iterations, history)`` where ``history`` lists
        every ``(knob, dB)`` evaluation in order.

    Raises:
        CalibrationError: the bracket does not straddle the target, or the
            tolerance is not met within ``max_iterations`` bisection steps.
    """
    history = []

    def probe(k):
        db = evaluate(k)
        history.append([k, db])
        return db

    db_lo, db_hi = probe(lo), probe(hi)
    for k, db in ((lo, db_lo), (hi, db_hi)):
        if abs(db - target_db) <= tolerance_db:
            return k, db, 0, history
    if not (db_lo > target_db > db_hi):
        raise CalibrationError(
            f"bracket [{lo:.6g}, {hi:.6g}] gives [{db_lo:.4f}, {db_hi:.4f}] dB, "
            f"which does not straddle {target_db} dB", history)
    for it in range(1, max_iterations + 1):
        mid = math.sqrt(lo * hi)
        db = probe(mid)
        if abs(db - target_db) <= tolerance_db:
            return mid, db, it, history
        if db > target_db:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"no convergence after {max_iterations} steps; last bracket "
        f"[{lo:.6g}, {hi:.6g}]", history)


def calibrate_filter(filter_id: FilterId | str, config: CalibrationConfig) -> CalibrationEntry:
    fid = FilterId(filter_id)
    spec = preset_spec(fid)
    lo, hi = config.bounds[fid]
    knob, db, iterations, history = calibrate_knob(
        lambda k: avg_detail_psnr(spec.with_knob(k), config.images),
        lo, hi, config.target_db, config.tolerance_db, config.max_iterations)
    log.info("%s: %s = %.6g -> %.4f dB (%d steps)", fid, spec.detail_knob, knob, db, iterations)
    return CalibrationEntry(str(fid), spec.detail_knob, knob, db, iterations, True, history)


def calibrate_all(config: CalibrationConfig) -> CalibrationResult:
    """Calibrate every filter of ``config`` independently.

    A failing filter is recorded with its error and does not stop the others.
    """
    entries = {}
    for fid in config.filters:
        fid = FilterId(fid)
        try:
            entries[str(fid)] = calibrate_filter(fid, config)
        except EdgeBenchError as exc:
            log.warning("%s: calibration failed: %s", fid, exc)
            history = getattr(exc, "history", [])
            entries[str(fid)] = CalibrationEntry(
                str(fid), PUBLISHED_PRESET[fid][0], None, None, len(history), False,
                history, str(exc))
    return CalibrationResult(config.target_db, config.tolerance_db, entries)
