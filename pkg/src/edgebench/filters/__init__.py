"""Base + detail decomposition filters behind one interface.

Each filter is identified by a :class:`FilterId` and configured by a
:class:`FilterSpec` holding its parameters and naming the single parameter
(the *detail knob*) that controls how much detail is extracted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np

from ..errors import ParameterError
from ..image import as_image
from .dt import filter_dt
from .fbf import filter_fbf
from .fllf import filter_fllf
from .gf import filter_gf
from .l0 import filter_l0
from .tvl1 import filter_tvl1
from .wls import filter_wls

__all__ = [
    "FilterId", "FilterSpec", "Decomposition", "PUBLISHED_PRESET", "FIXED_PARAMS",
    "decompose", "enhance", "preset_spec",
    "filter_dt", "filter_fbf", "filter_fllf", "filter_gf", "filter_l0",
    "filter_tvl1", "filter_wls",
]


class FilterId(str, enum.Enum):
    FBF = "FBF"
    DT = "DT"
    GF = "GF"
    WLS = "WLS"
    FLLF = "FLLF"
    TVL1 = "TVL1"
    L0IS = "L0IS"

    def __str__(self) -> str:
        return self.value


def _run_fbf(u, p):
    return filter_fbf(u, p["sigma_s"], p["sigma_r"], int(p["slices"]))


def _run_dt(u, p):
    return filter_dt(u, p["sigma_s"], p["sigma_r"], int(p["iterations"]))


def _run_gf(u, p):
    return filter_gf(u, int(p["radius"]), p["epsilon"])


def _run_wls(u, p):
    return filter_wls(u, p["alpha"], p["lambda"])


def _run_fllf(u, p):
    return filter_fllf(u, p["sigma_r"], int(p["l_max"]), int(p["samples"]))


def _run_tvl1(u, p):
    return filter_tvl1(u, p["lambda"], int(p["iterations"]))


def _run_l0(u, p):
    return filter_l0(u, p["lambda"], p["kappa"])


_RUNNERS: dict[FilterId, Callable[[np.ndarray, Mapping[str, float]], np.ndarray]] = {
    FilterId.FBF: _run_fbf,
    FilterId.DT: _run_dt,
    FilterId.GF: _run_gf,
    FilterId.WLS: _run_wls,
    FilterId.FLLF: _run_fllf,
    FilterId.TVL1: _run_tvl1,
    FilterId.L0IS: _run_l0,
}

#: Parameters held fixed for every run (spatial scale, exponents, sampling).
FIXED_PARAMS: dict[FilterId, dict[str, float]] = {
    FilterId.GF: {"radius": 40},
    FilterId.FBF: {"sigma_s": 40.0, "slices": 64},
    FilterId.DT: {"sigma_s": 40.0, "iterations": 3},
    FilterId.WLS: {"alpha": 1.2},
    FilterId.FLLF: {"l_max": 6, "samples": 64},
    FilterId.TVL1: {"iterations": 500},
    FilterId.L0IS: {"kappa": 2.0},
}

#: (knob name, published value) per filter.
PUBLISHED_PRESET: dict[FilterId, tuple[str, float]] = {
    FilterId.GF: ("epsilon", 0.075**2),
    FilterId.FBF: ("sigma_r", 0.1178),
    FilterId.DT: ("sigma_r", 0.1166),
    FilterId.WLS: ("lambda", 0.5),
    FilterId.FLLF: ("sigma_r", 0.103),
    # published as the weight of the fidelity term (0.205); here lambda
    # weights the total variation, hence the reciprocal
    FilterId.TVL1: ("lambda", 1.0 / 0.205),
    FilterId.L0IS: ("lambda", 0.002),
}


@dataclass(frozen=True)
class FilterSpec:
    id: FilterId
    params: Mapping[str, float] = field(default_factory=dict)
    detail_knob: str = ""

    def __post_init__(self):
        object.__setattr__(self, "id", FilterId(self.id))
        knob = self.detail_knob or PUBLISHED_PRESET[self.id][0]
        object.__setattr__(self, "detail_knob", knob)
        params = dict(self.params)
        required = set(FIXED_PARAMS[self.id]) | {PUBLISHED_PRESET[self.id][0]}
        missing = required - set(params)
        if missing:
            raise ParameterError(f"{self.id}: missing parameters {sorted(missing)}")
        if knob not in params or not params[knob] > 0:
            raise ParameterError(f"{self.id}: detail knob {knob!r} must be > 0")
        object.__setattr__(self, "params", params)

    @property
    def knob_value(self) -> float:
        return float(self.params[self.detail_knob])

    def with_knob(self, value: float) -> "FilterSpec":
        params = dict(self.params)
        params[self.detail_knob] = float(value)
        return replace(self, params=params)


def preset_spec(filter_id: FilterId | str, knob: float | None = None) -> FilterSpec:
    """Filter spec with the fixed parameters and the published (or given) knob value."""
    fid = FilterId(filter_id)
    name, value = PUBLISHED_PRESET[fid]
    params = dict(FIXED_PARAMS[fid])
    params[name] = value if knob is None else float(knob)
    return FilterSpec(fid, params, name)


@dataclass(frozen=True)
class Decomposition:
    base: np.ndarray
    detail: np.ndarray


def decompose(img, spec: FilterSpec) -> Decomposition:
    """Split ``img`` into ``base`` (filter output) and ``detail = img - base``."""
    u = as_image(img)
    base = np.asarray(_RUNNERS[spec.id](u, spec.params), dtype=np.float64)
    return Decomposition(base=base, detail=u - base)


def enhance(img, spec: FilterSpec, alpha: float, beta: float,
            dynamic: float = 1.0) -> np.ndarray:
    """``(1 - beta)/2 * D + beta * base + alpha * detail``, not clamped."""
    u = as_image(img)
    if alpha == 1.0 and beta == 1.0:
        return u.copy()
    parts = decompose(u, spec)
    return (1.0 - beta) / 2.0 * dynamic + beta * parts.base + alpha * parts.detail
