"""
Hardware-inspired noise models reduced to phenomenological rates.

Each model scales a base rate p per operation:

    Operation                         NA      SI100
    single-qubit Clifford             p/10    p/10
    two-qubit Clifford                p       p
    readout                           p       5p
    reset                             p       2p
    idle                              p/10    p/10
    error while waiting for meas/reset p/10   2p

The memory-experiment model only has two knobs, a data flip per round and a
measurement flip per round, so each model maps its table row to
``(p_data, p_meas)`` through the rate table below.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Tuple

# Per-operation multipliers of the base rate p.
OPERATION_SCALES: Dict[str, Dict[str, float]] = {
    'NA': {
        'single_qubit': 0.1,
        'two_qubit': 1.0,
        'readout': 1.0,
        'reset': 1.0,
        'idle': 0.1,
        'wait': 0.1,
    },
    'SI100': {
        'single_qubit': 0.1,
        'two_qubit': 1.0,
        'readout': 5.0,
        'reset': 2.0,
        'idle': 0.1,
        'wait': 2.0,
    },
}

_NA = OPERATION_SCALES['NA']
_SI = OPERATION_SCALES['SI100']

RateFunc = Callable[[float], Tuple[float, float]]

# kind -> p -> (p_data, p_meas)
RATE_TABLE: Dict[str, RateFunc] = {
    'depolarizing': lambda p: (p, p),
    # NA: wait-for-measurement error folded into the readout flip.
    'NA': lambda p: (
        p * (_NA['two_qubit'] + _NA['idle']),
        p * (_NA['readout'] + _NA['wait']),
    ),
    # SI100: long wait hits data qubits; reset error lands on the ancilla readout.
    'SI100': lambda p: (
        p * (_SI['two_qubit'] + _SI['idle'] + _SI['wait']),
        p * (_SI['readout'] + _SI['reset']),
    ),
}

NOISE_KINDS = tuple(RATE_TABLE)


@dataclass(frozen=True)
class NoiseModelSpec:
    """
    A noise model kind and its base physical error rate.

    Attributes:
        kind: One of ``depolarizing``, ``NA``, ``SI100``.
        p: Base rate, 0 < p < 0.5.

    Examples:
        >>> NoiseModelSpec('SI100', 0.001).kind
        'SI100'
    """

    kind: str
    p: float

    def __post_init__(self) -> None:
        if self.kind not in RATE_TABLE:
            raise ValueError(
                f"Unknown noise model {self.kind!r}; expected one of {', '.join(NOISE_KINDS)}"
            )
        if not 0.0 < self.p < 0.5:
            raise ValueError(f"Base error rate must satisfy 0 < p < 0.5, got {self.p}")


def effective_rates(spec: NoiseModelSpec) -> Tuple[float, float]:
    """
    Per-round data and measurement flip probabilities for a noise model.

    Args:
        spec: Noise model kind and base rate.

    Returns:
        Tuple of (p_data, p_meas).

    Examples:
        >>> effective_rates(NoiseModelSpec('depolarizing', 0.005))
        (0.005, 0.005)
    """
    return RATE_TABLE[spec.kind](spec.p)
