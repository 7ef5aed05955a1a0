"""
Run configuration documents.

A run configuration is a JSON object with a ``schema_version`` and the
sections ``code``, ``noise``, ``window``, ``adaptive``, ``bp`` and ``study``
plus the top-level keys ``shots``, ``seed``, ``rounds``, ``basis``,
``threads`` and ``output``. Every key is optional; omitted keys take the
defaults below. Unknown keys are rejected with their dotted path.

Example::

    {
      "schema_version": 1,
      "code": {"family": "toric", "d": 7},
      "noise": {"kind": "depolarizing", "p": 0.005},
      "rounds": 35,
      "window": {"mode": "adaptive", "commit": 1},
      "adaptive": {"baseline": 3, "target": 7},
      "shots": 10000
    }

Presets shipped with the package can be named instead of a path:
``preset:smoke``, ``preset:toric_d7`` or ``preset:bb72``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Type, TypeVar, Union

from adawin.adaptive import AdaptiveConfig, HypertunerState, QConfig
from adawin.codes import NoiseModelSpec
from adawin.decoders import BpConfig
from adawin.errors import ConfigError
from adawin.harness import CodeSpec, ExperimentSpec

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

STUDY_KINDS = (
    'experiment',
    'adaptive_comparison',
    'ler_vs_q',
    'separation',
    'commit_sweep',
    'time_scaling',
)

SWEEP_AXES = ('p', 'W', 'C', 'alpha')

PRESET_PREFIX = 'preset:'

_PRESET_DIR = Path(__file__).parent / "presets"
_PRESETS: Dict[str, Dict[str, Any]] = {}

T = TypeVar('T')


def _load_presets() -> Dict[str, Dict[str, Any]]:
    """Load the bundled preset documents."""
    global _PRESETS
    if not _PRESETS:
        for path in sorted(_PRESET_DIR.glob('*.json')):
            with open(path, 'r', encoding='utf-8') as f:
                _PRESETS[path.stem] = json.load(f)
    return _PRESETS


def preset_names() -> Tuple[str, ...]:
    return tuple(sorted(_load_presets()))


@dataclass(frozen=True)
class WindowSection:
    """
    Window settings.

    Attributes:
        mode: ``global``, ``fixed`` or ``adaptive``.
        size: W in fixed mode.
        commit: C.
        check_residual: Verify every window's consistency while decoding.
    """

    mode: str = 'fixed'
    size: int = 3
    commit: int = 1
    check_residual: bool = False


@dataclass(frozen=True)
class AdaptiveSection:
    """
    Adaptive settings; ``baseline`` and ``target`` default to max(2, d // 2) and d.
    """

    baseline: Optional[int] = None
    target: Optional[int] = None
    alpha: float = 2.0
    include_committed_carryover: bool = False
    c0: float = 0.003
    delta: float = 0.1
    r_min: float = 0.2
    r_max: float = 0.3
    max_retries: int = 1
    tuner_mode: str = 'per_shot'
    record_trace: bool = False

    def build(self, distance: int) -> AdaptiveConfig:
        return AdaptiveConfig(
            baseline_window=self.baseline if self.baseline is not None else max(2, distance // 2),
            target_window=self.target if self.target is not None else distance,
            q_config=QConfig(self.alpha, self.include_committed_carryover),
            tuner=HypertunerState.initial(self.c0, self.delta, self.r_min, self.r_max),
            max_retries_per_window=self.max_retries,
            tuner_mode=self.tuner_mode,
        )


@dataclass(frozen=True)
class BpSection:
    """BP settings and the cluster weight mode of the LSD stage."""

    max_iterations: int = 30
    scaling_factor: float = 0.625
    parallel_schedule: bool = True
    weight_mode: str = 'solution'

    def build(self) -> BpConfig:
        return BpConfig(self.max_iterations, self.scaling_factor, self.parallel_schedule)


@dataclass(frozen=True)
class StudySection:
    """
    Which study ``benchmark`` runs.

    Attributes:
        kind: One of ``STUDY_KINDS``.
        q_bins: Equal-population Q bins for ``ler_vs_q``.
        q_edges: Explicit Q bin edges (override ``q_bins``).
        commits: Commit sizes for ``commit_sweep``.
        sizes: Window sizes for ``time_scaling`` (default 2..d).
        pairs: (baseline, target) pairs for ``adaptive_comparison``.
        oracle_shots: Syndromes per fragment for ``oracle-check``.
        oracle_p: Prior of the oracle fragments.
    """

    kind: str = 'experiment'
    q_bins: int = 10
    q_edges: Tuple[float, ...] = ()
    commits: Tuple[int, ...] = (1, 2, 3)
    sizes: Tuple[int, ...] = ()
    pairs: Tuple[Tuple[int, int], ...] = ()
    oracle_shots: int = 200
    oracle_p: float = 0.05

    def __post_init__(self) -> None:
        if self.kind not in STUDY_KINDS:
            raise ValueError(f"kind must be one of {', '.join(STUDY_KINDS)}, got {self.kind!r}")
        if any(len(pair) != 2 for pair in self.pairs):
            raise ValueError("every pair must be [baseline, target]")


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved run configuration."""

    code: CodeSpec = field(default_factory=CodeSpec)
    noise: NoiseModelSpec = field(default_factory=lambda: NoiseModelSpec('depolarizing', 0.01))
    window: WindowSection = field(default_factory=WindowSection)
    adaptive: AdaptiveSection = field(default_factory=AdaptiveSection)
    bp: BpSection = field(default_factory=BpSection)
    study: StudySection = field(default_factory=StudySection)
    shots: int = 100
    seed: int = 0
    rounds: int = 6
    basis: str = 'Z'
    threads: int = 1
    output: str = 'results'
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        """The configuration with every default spelled out."""
        return asdict(self)

    def experiment_spec(self, force_adaptive: bool = False) -> ExperimentSpec:
        """
        The experiment this configuration describes.

        Args:
            force_adaptive: Build the adaptive block even outside adaptive
                mode (comparison studies need it).

        Raises:
            ConfigError: If the settings are inconsistent.
        """
        adaptive_mode = self.window.mode == 'adaptive'
        try:
            self.code.build()
            adaptive = (
                self.adaptive.build(self.code.distance)
                if adaptive_mode or force_adaptive
                else None
            )
            return ExperimentSpec(
                code=self.code,
                noise=self.noise,
                rounds=self.rounds,
                basis=self.basis,
                window_mode=self.window.mode,
                window=self.window.size,
                commit=self.window.commit,
                adaptive=adaptive,
                bp=self.bp.build(),
                weight_mode=self.bp.weight_mode,
                shots=self.shots,
                seed=self.seed,
                threads=self.threads,
                check_residual=self.window.check_residual,
                record_trace=self.adaptive.record_trace,
            )
        except ValueError as exc:
            raise ConfigError(f"Inconsistent configuration: {exc}") from exc

    def with_axis(self, axis: str, value: float) -> RunConfig:
        """
        Configuration of one sweep point.

        Args:
            axis: ``p`` (noise rate), ``W`` (fixed window size, or the retry
                target in adaptive mode), ``C`` (commit size) or ``alpha``
                (Q exponent).
            value: Value of that axis.

        Raises:
            ConfigError: For an unknown axis, a bad value, or ``W`` in
                global mode where no window size applies.
        """
        if axis == 'W' and self.window.mode == 'global':
            raise ConfigError("Sweep axis W has no effect in global window mode")
        try:
            if axis == 'p':
                return replace(self, noise=replace(self.noise, p=float(value)))
            if axis == 'W':
                size = _as_int(value, axis)
                if self.window.mode == 'adaptive':
                    return replace(self, adaptive=replace(self.adaptive, target=size))
                return replace(self, window=replace(self.window, size=size))
            if axis == 'C':
                return replace(self, window=replace(self.window, commit=_as_int(value, axis)))
            if axis == 'alpha':
                return replace(self, adaptive=replace(self.adaptive, alpha=float(value)))
        except ValueError as exc:
            raise ConfigError(f"Bad {axis} value {value!r}: {exc}") from exc
        raise ConfigError(f"Unknown sweep axis {axis!r}; expected one of {', '.join(SWEEP_AXES)}")


def _as_int(value: float, name: str) -> int:
    if float(value) != int(value):
        raise ValueError(f"{name} must be an integer")
    return int(value)


_SECTIONS: Dict[str, Type[Any]] = {
    'code': CodeSpec,
    'noise': NoiseModelSpec,
    'window': WindowSection,
    'adaptive': AdaptiveSection,
    'bp': BpSection,
    'study': StudySection,
}

_TOP_LEVEL = ('schema_version', 'shots', 'seed', 'rounds', 'basis', 'threads', 'output')


def _check_keys(doc: Mapping[str, Any], allowed: Tuple[str, ...], path: str) -> None:
    for key in doc:
        if key not in allowed:
            dotted = f"{path}.{key}" if path else key
            raise ConfigError(f"Unknown config key {dotted!r}")


def _tuplify(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_tuplify(v) for v in value)
    return value


def _section(cls: Type[T], doc: Any, path: str) -> T:
    if not isinstance(doc, dict):
        raise ConfigError(f"Config section {path!r} must be an object")
    names = tuple(f.name for f in fields(cls))
    _check_keys(doc, names, path)
    kwargs = {k: _tuplify(v) for k, v in doc.items()}
    if cls is NoiseModelSpec:
        kwargs = {'kind': 'depolarizing', 'p': 0.01, **kwargs}
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"Invalid {path!r} section: {exc}") from exc


def parse_config(doc: Any) -> RunConfig:
    """
    Validate a configuration document and fill in defaults.

    Raises:
        ConfigError: On a wrong schema version, unknown keys or bad values.
    """
    if not isinstance(doc, dict):
        raise ConfigError("Config document must be a JSON object")
    _check_keys(doc, _TOP_LEVEL + tuple(_SECTIONS), '')
    version = doc.get('schema_version', SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"Unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")

    sections = {name: _section(cls, doc.get(name, {}), name) for name, cls in _SECTIONS.items()}
    top = {k: doc[k] for k in _TOP_LEVEL if k in doc}
    for key in ('shots', 'seed', 'rounds', 'threads'):
        if key in top and (isinstance(top[key], bool) or not isinstance(top[key], int)):
            raise ConfigError(f"Config key {key!r} must be an integer, got {top[key]!r}")
    for key in ('basis', 'output'):
        if key in top and not isinstance(top[key], str):
            raise ConfigError(f"Config key {key!r} must be a string, got {top[key]!r}")
    cfg = RunConfig(**sections, **top)
    if cfg.shots < 1:
        raise ConfigError(f"shots must be >= 1, got {cfg.shots}")
    if cfg.threads < 1:
        raise ConfigError(f"threads must be >= 1, got {cfg.threads}")
    return cfg


def read_config_document(source: Union[str, Path]) -> Dict[str, Any]:
    """
    Raw document from a file path or ``preset:NAME``.

    Raises:
        ConfigError: If the file or preset does not exist or is not JSON.
    """
    text = str(source)
    if text.startswith(PRESET_PREFIX):
        name = text[len(PRESET_PREFIX):]
        presets = _load_presets()
        if name not in presets:
            raise ConfigError(f"Unknown preset {name!r}; available: {', '.join(sorted(presets))}")
        return json.loads(json.dumps(presets[name]))
    path = Path(text)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def load_config(
    source: Union[str, Path, None] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """
    Load, override and validate a configuration.

    Args:
        source: Path or ``preset:NAME``; None starts from the defaults.
        overrides: Top-level keys (``shots``, ``seed``, ``threads``,
            ``output``) to replace; None values are ignored.

    Returns:
        RunConfig.
    """
    doc = read_config_document(source) if source is not None else {}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _TOP_LEVEL:
            raise ConfigError(f"Cannot override {key!r}")
        doc[key] = value
    cfg = parse_config(doc)
    logger.debug("Resolved configuration from %s", source or 'defaults')
    return cfg
