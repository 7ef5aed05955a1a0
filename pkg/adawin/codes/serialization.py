"""
JSON export and import of detector error models.

Document layout (``schema_version`` 1)::

    {
      "schema_version": 1,
      "n_detectors": 18, "n_faults": 45, "n_observables": 2, "rounds": 2,
      "faults": [[0, 3], [1, 4], ...],        # detector indices per fault
      "priors": [0.01, ...],
      "observables": [[0], [], ...],          # observable indices per fault
      "round_of_detector": [0, 0, ..., 1],
      "coords": [[0, 0], ...] | null,
      "periods": [3, 3] | null
    }

Priors are written with ``repr`` precision so a round trip is bit-exact.
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from adawin.codes.dem import DetectorModel
from adawin.errors import ConfigError
from adawin.gf2 import SparseBitMatrix

DEM_SCHEMA_VERSION = 1

_REQUIRED_KEYS = (
    'schema_version',
    'n_detectors',
    'n_faults',
    'n_observables',
    'rounds',
    'faults',
    'priors',
    'observables',
    'round_of_detector',
)
_OPTIONAL_KEYS = ('coords', 'periods')


def dem_to_json(dem: DetectorModel) -> Dict[str, Any]:
    """Convert a DetectorModel to a JSON-compatible dict."""
    return {
        'schema_version': DEM_SCHEMA_VERSION,
        'n_detectors': dem.n_detectors,
        'n_faults': dem.n_faults,
        'n_observables': dem.n_observables,
        'rounds': dem.rounds,
        'faults': [list(col) for col in dem.h.cols],
        'priors': [float(p) for p in dem.priors],
        'observables': [list(col) for col in dem.observables.cols],
        'round_of_detector': [int(r) for r in dem.round_of_detector],
        'coords': None if dem.coords is None else dem.coords.tolist(),
        'periods': None if dem.periods is None else list(dem.periods),
    }


def dem_from_json(doc: Dict[str, Any]) -> DetectorModel:
    """
    Rebuild a DetectorModel from ``dem_to_json`` output.

    Raises:
        ConfigError: If the document is malformed or inconsistent.
    """
    if not isinstance(doc, dict):
        raise ConfigError("DEM document must be a JSON object")
    missing = [k for k in _REQUIRED_KEYS if k not in doc]
    if missing:
        raise ConfigError(f"DEM document is missing keys: {', '.join(missing)}")
    unknown = sorted(set(doc) - set(_REQUIRED_KEYS) - set(_OPTIONAL_KEYS))
    if unknown:
        raise ConfigError(f"DEM document has unknown keys: {', '.join(unknown)}")
    if doc['schema_version'] != DEM_SCHEMA_VERSION:
        raise ConfigError(
            f"Unsupported DEM schema_version {doc['schema_version']!r}; "
            f"expected {DEM_SCHEMA_VERSION}"
        )

    try:
        n_det = int(doc['n_detectors'])
        n_obs = int(doc['n_observables'])
        faults = doc['faults']
        observables = doc['observables']
        if len(faults) != int(doc['n_faults']) or len(observables) != len(faults):
            raise ConfigError(
                f"DEM declares {doc['n_faults']} faults but lists "
                f"{len(faults)} fault and {len(observables)} observable columns"
            )
        periods = doc.get('periods')
        coords = doc.get('coords')
        return DetectorModel(
            h=SparseBitMatrix.from_columns(n_det, faults),
            priors=np.array(doc['priors'], dtype=np.float64),
            observables=SparseBitMatrix.from_columns(n_obs, observables),
            round_of_detector=np.array(doc['round_of_detector'], dtype=np.int64),
            rounds=int(doc['rounds']),
            coords=None if coords is None else np.array(coords, dtype=np.int64),
            periods=None if periods is None else (int(periods[0]), int(periods[1])),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"Invalid DEM document: {exc}") from exc


def save_dem(dem: DetectorModel, path: Union[str, Path]) -> Path:
    """Write a DEM as JSON, atomically (temp file then rename)."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            json.dump(dem_to_json(dem), f)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def load_dem(path: Union[str, Path]) -> DetectorModel:
    """
    Read a DEM JSON file.

    Raises:
        OSError: If the file cannot be read.
        ConfigError: If it is not valid JSON or not a valid DEM document.
    """
    with open(path, 'r', encoding='utf-8') as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    return dem_from_json(doc)
