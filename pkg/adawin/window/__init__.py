"""
Adawin Window Module

Sliding-window decoding:
- Window geometry and schedule (window, commit, buffer)
- Sub-DEM extraction with upper-boundary truncation
- Artificial defects across the commit boundary
- The window engine and its per-window records
"""

from adawin.window.engine import (
    RECORD_COLUMNS,
    InnerDecoder,
    WindowEngine,
    WindowInstance,
    WindowRecord,
    decode_global,
    decode_stream,
    timed_decode,
)
from adawin.window.schedule import (
    SubDem,
    WindowConfig,
    WindowSpan,
    apply_artificial_defects,
    extract_sub_dem,
    extract_window,
    schedule,
)

__all__ = [
    # Schedule
    "WindowConfig",
    "WindowSpan",
    "schedule",
    "SubDem",
    "extract_window",
    "extract_sub_dem",
    "apply_artificial_defects",
    # Engine
    "WindowEngine",
    "WindowInstance",
    "WindowRecord",
    "InnerDecoder",
    "RECORD_COLUMNS",
    "decode_stream",
    "decode_global",
    "timed_decode",
]
