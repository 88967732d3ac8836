"""Artifact measures, score fusion and ranking.

Notation: ``u0`` is the filter input, ``u1`` its base layer, and
``u0 - u1`` the detail layer.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, ParameterError
from .image import as_image, variance_masked

#: Variances below this are treated as zero by :func:`measure_conthalo`.
ZERO_VARIANCE = 1e-12

#: Reference filter defining the normaliser of each artifact term.
REFERENCE_FILTERS = {"lum_halo": "L0IS", "staircase": "FBF",
                     "compart": "WLS", "cont_halo": "GF"}

ARTIFACTS = ("lum_halo", "staircase", "compart", "cont_halo")


@dataclass
class ArtifactScores:
    lum_halo: float
    staircase: float
    compart: float
    cont_halo: float
    fused: float | None = None

    def __post_init__(self):
        for name in ARTIFACTS:
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} score must be >= 0")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lum_halo, self.staircase, self.compart, self.cont_halo)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Normalizers:
    lum_halo: float
    staircase: float
    compart: float
    cont_halo: float
    provenance: dict[str, str] = field(default_factory=dict)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lum_halo, self.staircase, self.compart, self.cont_halo)

    @classmethod
    def from_scores(cls, scores: Mapping[str, ArtifactScores]) -> "Normalizers":
        """Take each normaliser from its reference filter's score."""
        missing = sorted({ref for ref in REFERENCE_FILTERS.values()} - set(map(str, scores)))
        if missing:
            raise ConfigurationError(
                f"reference filters {missing} are not part of the run; add them "
                "or pass explicit normalizers h,s,p,c")
        by_name = {str(k): v for k, v in scores.items()}
        values = {a: getattr(by_name[ref], a) for a, ref in REFERENCE_FILTERS.items()}
        return cls(**values, provenance=dict(REFERENCE_FILTERS))


def _positive_part_sq(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0) ** 2


def _edge_inputs(input_img, base, left, right):
    u0 = as_image(input_img, "input")
    u1 = as_image(base, "base")
    left = np.asarray(left, dtype=bool)
    right = np.asarray(right, dtype=bool)
    if not (u0.shape == u1.shape == left.shape == right.shape):
        raise ParameterError(
            f"dimension mismatch: {u0.shape}, {u1.shape}, {left.shape}, {right.shape}")
    return u0, u1, left, right


def measure_lumhalo(input_img, base, left, right) -> float:
    """Squared base undershoot on the left mask plus overshoot on the right."""
    u0, u1, left, right = _edge_inputs(input_img, base, left, right)
    return float(_positive_part_sq(u0 - u1)[left].sum()
                 + _positive_part_sq(u1 - u0)[right].sum())


def measure_staircase(input_img, base, left, right) -> float:
    """Mirror of :func:`measure_lumhalo`: penalises edge reinforcement."""
    u0, u1, left, right = _edge_inputs(input_img, base, left, right)
    return float(_positive_part_sq(u1 - u0)[left].sum()
                 + _positive_part_sq(u0 - u1)[right].sum())


def measure_compart(input_img, base, inter) -> float:
    """Population variance of the detail over the pixels of ``inter``."""
    u0 = as_image(input_img, "input")
    u1 = as_image(base, "base")
    if u0.shape != u1.shape:
        raise ParameterError(f"dimension mismatch: {u0.shape}, {u1.shape}")
    return variance_masked(u0 - u1, inter)


def measure_conthalo(detail, int_mask, ext_mask) -> float:
    """``max(1, var_int / var_ext) - 1`` of the detail layer.

    When both variances vanish the ratio is taken as 1; a vanishing exterior
    variance alone gives ``inf``.
    """
    d = as_image(detail, "detail")
    var_int = variance_masked(d, int_mask)
    var_ext = variance_masked(d, ext_mask)
    if var_ext < ZERO_VARIANCE:
        if var_int < ZERO_VARIANCE:
            return 0.0
        return math.inf
    return max(1.0, var_int / var_ext) - 1.0


def fuse_scores(scores: Mapping[str, ArtifactScores], norms: Normalizers) -> dict[str, float]:
    """Sum of squared scores, each divided by its squared normaliser."""
    refs = norms.as_tuple()
    for name, value in zip(ARTIFACTS, refs):
        if not value > 0:
            ref = norms.provenance.get(name, "explicit")
            raise ConfigurationError(
                f"normalizer for {name} is {value!r} (reference {ref}); it must be > 0")
    return {str(fid): sum((s / r) ** 2 for s, r in zip(sc.as_tuple(), refs))
            for fid, sc in scores.items()}


def rank_filters(fused: Mapping[str, float]) -> list[str]:
    """Filter ids by ascending fused score, ties broken by id."""
    return sorted(map(str, fused), key=lambda fid: (fused[fid], fid))
