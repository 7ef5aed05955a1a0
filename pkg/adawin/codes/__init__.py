"""
Adawin Codes Module

Code constructions and decoding problems:
- Toric, bivariate bicycle and repetition CSS codes
- BB polynomial parsing (``x^3 + y + y^2``)
- Hardware-inspired noise models mapped to per-round rates
- Phenomenological detector error models and shot sampling
- DEM JSON export/import
"""

from adawin.codes.css import (
    BB_CATALOG,
    CssCode,
    build_bb,
    build_bb_from_strings,
    build_bb_named,
    build_repetition,
    build_toric,
    logical_supports,
)
from adawin.codes.dem import (
    DetectorModel,
    build_code_capacity_dem,
    build_memory_dem,
    llr_weights,
    sample_faults,
    sample_shot,
)
from adawin.codes.noise import (
    NOISE_KINDS,
    OPERATION_SCALES,
    NoiseModelSpec,
    effective_rates,
)
from adawin.codes.polynomials import format_polynomial, parse_polynomial
from adawin.codes.serialization import (
    DEM_SCHEMA_VERSION,
    dem_from_json,
    dem_to_json,
    load_dem,
    save_dem,
)

__all__ = [
    # Codes
    "CssCode",
    "build_toric",
    "build_bb",
    "build_bb_from_strings",
    "build_bb_named",
    "build_repetition",
    "logical_supports",
    "BB_CATALOG",
    # Polynomials
    "parse_polynomial",
    "format_polynomial",
    # Noise
    "NoiseModelSpec",
    "effective_rates",
    "NOISE_KINDS",
    "OPERATION_SCALES",
    # Detector error models
    "DetectorModel",
    "build_memory_dem",
    "build_code_capacity_dem",
    "llr_weights",
    "sample_faults",
    "sample_shot",
    # Serialization
    "dem_to_json",
    "dem_from_json",
    "save_dem",
    "load_dem",
    "DEM_SCHEMA_VERSION",
]
