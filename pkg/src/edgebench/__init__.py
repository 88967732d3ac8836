"""Benchmark of edge-aware base + detail decomposition filters.

Seven filters, four synthetic artifact test patterns, four artifact measures,
PSNR-based cross-calibration of the filters and a fused ranking.
"""

__version__ = "0.1.0"

from .errors import (CalibrationError, ConfigurationError, EdgeBenchError,  # noqa: E402
                     FormatError, NumericalError, ParameterError, StructureError)
from .filters import FilterId, FilterSpec, decompose, enhance, preset_spec  # noqa: E402
from .image import load_image, save_image, save_mask  # noqa: E402
from .measures import (ArtifactScores, Normalizers, fuse_scores,  # noqa: E402
                       measure_compart, measure_conthalo, measure_lumhalo,
                       measure_staircase, rank_filters)
from .patterns import PatternKind, generate_all  # noqa: E402

__all__ = [
    "__version__",
    "EdgeBenchError", "ParameterError", "FormatError", "StructureError",
    "NumericalError", "CalibrationError", "ConfigurationError",
    "FilterId", "FilterSpec", "decompose", "enhance", "preset_spec",
    "load_image", "save_image", "save_mask",
    "ArtifactScores", "Normalizers", "fuse_scores", "rank_filters",
    "measure_lumhalo", "measure_staircase", "measure_compart", "measure_conthalo",
    "PatternKind", "generate_all",
]
