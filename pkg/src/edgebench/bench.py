"""Benchmark orchestration: patterns -> parameters -> filtering -> scores.

The report produced by :func:`run_benchmark` is a pure function of its
:class:`BenchmarkConfig` and the package version; :func:`emit_report` and
:func:`emit_barplots` serialise it without timestamps so reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .calibration import CalibrationConfig, calibrate_all, load_calibration_images
from .errors import CalibrationError, ConfigurationError
from .filters import FilterId, decompose, preset_spec
from .image import save_image
from .measures import (ARTIFACTS, REFERENCE_FILTERS, ArtifactScores, Normalizers, fuse_scores,
                       measure_compart, measure_conthalo, measure_lumhalo,
                       measure_staircase, rank_filters)
from .patterns import (DEFAULT_SEED, DEFAULT_SIZE, PatternBundle, PatternKind,
                       composite_bands, generate_all)

log = logging.getLogger(__name__)

EMIT_FLAGS = ("csv", "json", "svg", "images")

ARTIFACT_TITLES = {
    "lum_halo": "Luminance halo (H)",
    "staircase": "Staircasing (S)",
    "compart": "Compartmentalization (P)",
    "cont_halo": "Contrast halo (C)",
    "fused": "Fused score (A)",
}

# Choices recorded in every report so that scores can be reproduced.
METHOD_NOTES = {
    "compart_variance": "population variance over the inter mask pixels only",
    "fllf_remapping": "r(x) = g + sign(x-g) sigma_r rho(|x-g|/sigma_r), rho(t)=t^3 (t<=1), t (t>1)",
    "tvl1_lambda": "lambda weights the TV term; the published 0.205 weights the fidelity term, so the preset is 1/0.205",
    "wls_epsilon": 1e-4,
    "l0_schedule": "beta0 = 2 lambda, beta *= kappa while beta < 1e5",
    "edge_polarity": "bright left, dark right",
    "conthalo_zero_variance": "both variances < 1e-12 -> score 0",
}


@dataclass
class BenchmarkConfig:
    filters: Sequence[FilterId] = tuple(FilterId)
    params_mode: str = "paper"
    size: int = DEFAULT_SIZE
    seed: int = DEFAULT_SEED
    out_dir: Path | None = None
    emit: Sequence[str] = ("csv", "json", "svg")
    normalizers: tuple[float, float, float, float] | None = None
    calibration_images: str | Path | None = None
    target_db: float | None = None
    tolerance_db: float | None = None
    jobs: int = 1

    def __post_init__(self):
        self.filters = tuple(sorted({FilterId(f) for f in self.filters}, key=str))
        if not self.filters:
            raise ConfigurationError("the filter set is empty")
        if self.params_mode not in ("paper", "calibrate"):
            raise ConfigurationError(f"unknown params mode {self.params_mode!r}")
        unknown = set(self.emit) - set(EMIT_FLAGS)
        if unknown:
            raise ConfigurationError(f"unknown emit flags {sorted(unknown)}")
        if self.normalizers is not None:
            if len(self.normalizers) != 4 or not all(v > 0 for v in self.normalizers):
                raise ConfigurationError("normalizers must be four positive values h,s,p,c")
            self.normalizers = tuple(float(v) for v in self.normalizers)
        if self.out_dir is not None:
            self.out_dir = Path(self.out_dir)
            if self.out_dir.exists() and not self.out_dir.is_dir():
                raise ConfigurationError(f"{self.out_dir} is not a directory")

    def to_dict(self) -> dict:
        return {"filters": [str(f) for f in self.filters], "params_mode": self.params_mode,
                "size": self.size, "seed": self.seed,
                "normalizers": list(self.normalizers) if self.normalizers else None}


@dataclass
class BenchmarkReport:
    version: str
    config: dict
    parameters: dict[str, dict]
    scores: dict[str, ArtifactScores]
    normalizers: dict
    ranking: list[str]
    calibration: dict | None
    patterns: dict
    notes: dict = field(default_factory=lambda: dict(METHOD_NOTES))
    # (filter id, pattern kind) -> (input, base); not serialised
    layers: dict = field(default_factory=dict, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "parameters": self.parameters,
            "scores": {fid: sc.to_dict() for fid, sc in self.scores.items()},
            "normalizers": self.normalizers,
            "ranking": self.ranking,
            "calibration": self.calibration,
            "patterns": self.patterns,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BenchmarkReport":
        fields = dict(data)
        fields["scores"] = {fid: ArtifactScores(**sc) for fid, sc in data["scores"].items()}
        return cls(**fields)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------

def _filter_pattern(task):
    """Worker: decompose one pattern with one filter, return the base layer."""
    spec, bundle = task
    bases = [decompose(u, spec).base for u in bundle.inputs]
    if len(bases) == 1:
        return bases[0]
    return composite_bands(bases)


def _measure(kind: PatternKind, bundle: PatternBundle, image: np.ndarray, base: np.ndarray) -> float:
    m = bundle.masks
    if kind is PatternKind.LUM_HALO:
        return measure_lumhalo(image, base, m["left"], m["right"])
    if kind is PatternKind.STAIRCASE:
        return measure_staircase(image, base, m["left"], m["right"])
    if kind is PatternKind.COMPART:
        return measure_compart(image, base, m["inter"])
    return measure_conthalo(image - base, m["int"], m["ext"])


def resolve_parameters(config: BenchmarkConfig):
    """Filter specs for the run, plus the calibration record if any."""
    if config.params_mode == "paper":
        specs = {fid: preset_spec(fid) for fid in config.filters}
        return specs, None
    cal_kwargs = {}
    if config.target_db is not None:
        cal_kwargs["target_db"] = config.target_db
    if config.tolerance_db is not None:
        cal_kwargs["tolerance_db"] = config.tolerance_db
    cal = calibrate_all(CalibrationConfig(
        load_calibration_images(config.calibration_images),
        filters=config.filters, **cal_kwargs))
    if cal.failures:
        errors = "; ".join(f"{fid}: {cal.entries[fid].error}" for fid in cal.failures)
        raise CalibrationError(f"calibration failed for {cal.failures}: {errors}")
    specs = {fid: preset_spec(fid, cal.entries[str(fid)].value) for fid in config.filters}
    return specs, cal.to_dict()


def run_benchmark(config: BenchmarkConfig, keep_layers: bool = False) -> BenchmarkReport:
    """Score every configured filter on the four patterns, then fuse and rank.

    Raises:
        ConfigurationError: a reference filter needed for normalisation is
            absent and no explicit normalizers were given.
    """
    refs = set(REFERENCE_FILTERS.values())
    if config.normalizers is None and not refs <= {str(f) for f in config.filters}:
        raise ConfigurationError(
            f"reference filters {sorted(refs - {str(f) for f in config.filters})} are "
            "missing; add them to the filter set or pass --normalizers h,s,p,c")

    bundles = generate_all(config.size, config.seed)
    specs, calibration = resolve_parameters(config)

    tasks = [(fid, kind) for fid in config.filters for kind in PatternKind]
    payload = [(specs[fid], bundles[kind]) for fid, kind in tasks]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            bases = list(pool.map(_filter_pattern, payload))
    else:
        bases = []
        for (fid, kind), item in zip(tasks, payload):
            log.info("filtering %s with %s", kind, fid)
            bases.append(_filter_pattern(item))

    images = {kind: bundles[kind].image for kind in PatternKind}
    raw: dict[str, dict[str, float]] = {str(fid): {} for fid in config.filters}
    layers = {}
    for (fid, kind), base in zip(tasks, bases):
        artifact = ARTIFACTS[list(PatternKind).index(kind)]
        raw[str(fid)][artifact] = _measure(kind, bundles[kind], images[kind], base)
        if keep_layers:
            layers[(str(fid), str(kind))] = (images[kind], base)
    scores = {fid: ArtifactScores(**vals) for fid, vals in raw.items()}

    if config.normalizers is not None:
        norms = Normalizers(*config.normalizers,
                            provenance={a: "explicit" for a in ARTIFACTS})
    else:
        norms = Normalizers.from_scores(scores)
    fused = fuse_scores(scores, norms)
    for fid, value in fused.items():
        scores[fid].fused = value
    ranking = rank_filters(fused)

    parameters = {}
    for fid in config.filters:
        spec = specs[fid]
        parameters[str(fid)] = {
            "params": dict(spec.params),
            "detail_knob": spec.detail_knob,
            "source": "published-preset" if calibration is None else "calibrated",
        }
    patterns = {str(kind): b.meta for kind, b in bundles.items()}
    return BenchmarkReport(
        version=__version__,
        config=config.to_dict(),
        parameters=parameters,
        scores=scores,
        normalizers={**dict(zip(ARTIFACTS, norms.as_tuple())), "provenance": norms.provenance},
        ranking=ranking,
        calibration=calibration,
        patterns=patterns,
        layers=layers,
    )


# --------------------------------------------------------------------------
# Emission
# --------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.9g}"


def scores_csv(report: BenchmarkReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["filter", "H", "S", "P", "C", "A", "rank"])
    rank = {fid: i + 1 for i, fid in enumerate(report.ranking)}
    for fid in sorted(report.scores, key=lambda f: rank[f]):
        sc = report.scores[fid]
        writer.writerow([fid, *(_fmt(v) for v in sc.as_tuple()), _fmt(sc.fused), rank[fid]])
    return buf.getvalue()


def emit_report(report: BenchmarkReport, out_dir: str | Path,
                flags: Sequence[str] = ("csv", "json")) -> list[Path]:
    """Write ``scores.csv``, ``report.json`` and optionally the layer images.

    Images are 16-bit PNG: ``<pattern>_<filter>_base.png`` and
    ``<pattern>_<filter>_detail.png``, the detail offset by +0.5.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in flags:
        path = out / "scores.csv"
        path.write_text(scores_csv(report))
        written.append(path)
    if "json" in flags:
        path = out / "report.json"
        path.write_text(report.to_json())
        written.append(path)
    if "images" in flags:
        if not report.layers:
            raise ConfigurationError("report carries no layers; run with keep_layers=True")
        for (fid, kind), (image, base) in sorted(report.layers.items()):
            for name, layer in (("base", base), ("detail", image - base + 0.5)):
                path = out / f"{kind.lower()}_{fid.lower()}_{name}.png"
                save_image(layer, path)
                written.append(path)
    if "svg" in flags:
        written.extend(emit_barplots(report, out))
    return written


def barplot_svg(title: str, values: dict[str, float]) -> str:
    """Horizontal bar chart, bars sorted by descending value."""
    items = sorted(values.items(), key=lambda kv: (-kv[1], kv[0]))
    bar_h, gap, left, width, top = 22, 8, 70, 360, 40
    height = top + len(items) * (bar_h + gap) + 20
    vmax = max((v for _, v in items if math.isfinite(v)), default=0.0) or 1.0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{left + width + 110}" '
        f'height="{height}" font-family="sans-serif" font-size="12">',
        f'<text x="{left}" y="22" font-size="14">{escape(title)}</text>',
    ]
    for i, (name, value) in enumerate(items):
        y = top + i * (bar_h + gap)
        w = width * min(value / vmax, 1.0) if math.isfinite(value) else float(width)
        lines.append(f'<text x="{left - 6}" y="{y + 15}" text-anchor="end">{escape(name)}</text>')
        lines.append(f'<rect x="{left}" y="{y}" width="{w:.2f}" height="{bar_h}" fill="#4a78b5"/>')
        lines.append(f'<text x="{left + w + 4:.2f}" y="{y + 15}">{_fmt(value)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_barplots(report: BenchmarkReport, out_dir: str | Path) -> list[Path]:
    """One SVG per artifact plus one for the fused score."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in (*ARTIFACTS, "fused"):
        values = {fid: getattr(sc, name) for fid, sc in report.scores.items()}
        path = out / f"bars_{name}.svg"
        path.write_text(barplot_svg(ARTIFACT_TITLES[name], values))
        written.append(path)
    return written

