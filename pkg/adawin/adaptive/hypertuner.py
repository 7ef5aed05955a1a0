"""
On-off threshold controller for the retry rate.

The observed retry rate r_obs is the cumulative average over every processed
window. Above the target band the threshold is raised by a fixed
multiplicative step, below the band it is lowered, and inside the band it is
left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

# Threshold never drops below this, so Q > c stays a meaningful test.
C_FLOOR = 1e-6


@dataclass(frozen=True)
class HypertunerState:
    """
    Threshold controller state.

    Attributes:
        c: Current threshold, > 0.
        c0: Initial threshold.
        delta: Multiplicative step, in (0, 1).
        r_min: Lower edge of the target retry band.
        r_max: Upper edge of the target retry band.
        n_proc: Windows processed.
        n_retry: Windows retried.

    Examples:
        >>> HypertunerState.initial().c
        0.003
    """

    c: float
    c0: float
    delta: float = 0.1
    r_min: float = 0.2
    r_max: float = 0.3
    n_proc: int = 0
    n_retry: int = 0

    def __post_init__(self) -> None:
        if not self.c > 0 or not self.c0 > 0:
            raise ValueError(f"Thresholds must be positive, got c={self.c}, c0={self.c0}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0.0 <= self.r_min < self.r_max <= 1.0:
            raise ValueError(
                f"Target band must satisfy 0 <= r_min < r_max <= 1, got "
                f"[{self.r_min}, {self.r_max}]"
            )
        if not 0 <= self.n_retry <= self.n_proc:
            raise ValueError(
                f"Counters must satisfy 0 <= n_retry <= n_proc, got {self.n_retry}/{self.n_proc}"
            )

    @classmethod
    def initial(
        cls,
        c0: float = 0.003,
        delta: float = 0.1,
        r_min: float = 0.2,
        r_max: float = 0.3,
    ) -> HypertunerState:
        """Fresh state with ``c = c0`` and zero counters."""
        return cls(c=c0, c0=c0, delta=delta, r_min=r_min, r_max=r_max)

    @property
    def r_obs(self) -> float:
        """Cumulative retry rate; 0 before any window."""
        return self.n_retry / self.n_proc if self.n_proc else 0.0

    def reset(self) -> HypertunerState:
        """Back to ``c0`` with zero counters, same band and step."""
        return replace(self, c=self.c0, n_proc=0, n_retry=0)


def should_retry(q: float, state: HypertunerState) -> bool:
    """
    Retry decision: strictly ``q > c``.

    Examples:
        >>> should_retry(0.005, HypertunerState.initial(0.003))
        True
        >>> should_retry(0.003, HypertunerState.initial(0.003))
        False
    """
    return q > state.c


def hypertuner_update(state: HypertunerState, retried: bool) -> HypertunerState:
    """
    Count one window and move the threshold.

    Args:
        state: Current controller state.
        retried: Whether the window was retried.

    Returns:
        The new state.

    Examples:
        >>> round(hypertuner_update(HypertunerState.initial(0.003), True).c, 7)
        0.0033
    """
    n_proc = state.n_proc + 1
    n_retry = state.n_retry + int(retried)
    r_obs = n_retry / n_proc
    c = state.c
    if r_obs > state.r_max:
        c = c * (1.0 + state.delta)
    elif r_obs < state.r_min:
        c = max(c * (1.0 - state.delta), C_FLOOR)
    return replace(state, c=c, n_proc=n_proc, n_retry=n_retry)
