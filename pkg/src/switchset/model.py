"""Three-class population: stable A, stable B and switching C elements.

Counts are integers and every derived probability is an exact
:class:`~fractions.Fraction`. Use :func:`fmt12` for a decimal rendering.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
import operator

__all__ = [
    "Interval",
    "Outcome",
    "SetConfig",
    "epoch_mean",
    "fmt12",
    "make_config",
    "probability_bounds",
]


def fmt12(value) -> str:
    """Render a number with 12 significant digits."""
    return format(float(value), ".12g")


class Outcome(enum.Enum):
    """Observed label of a single draw and its numeric value."""

    A = 1
    B = -1

    @property
    def label(self) -> str:
        return self.name

    @classmethod
    def from_label(cls, label: str) -> Outcome:
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown outcome label {label!r}; expected 'A' or 'B'") from None


@dataclass(frozen=True)
class SetConfig:
    n_A: int
    n_B: int
    n_C: int

    def __post_init__(self):
        for name in ("n_A", "n_B", "n_C"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError(f"{name} must be an int, got {type(value).__name__}")
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
        if self.N < 1:
            raise ValueError("a set needs at least one element")

    @property
    def N(self) -> int:
        return self.n_A + self.n_B + self.n_C

    def mirrored(self) -> SetConfig:
        """Swap the roles of A and B."""
        return SetConfig(self.n_B, self.n_A, self.n_C)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi <= 1:
            raise ValueError(f"need 0 <= lo <= hi <= 1, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi


def make_config(n_A: int, n_B: int, n_C: int) -> SetConfig:
    return SetConfig(*(operator.index(n) for n in (n_A, n_B, n_C)))


def probability_bounds(config: SetConfig) -> Interval:
    """Range of P(A) as the switching elements move between A and B."""
    N = config.N
    return Interval(Fraction(config.n_A, N), Fraction(config.n_A + config.n_C, N))


def _check_switch_count(config: SetConfig, s) -> int:
    if isinstance(s, bool):
        raise TypeError("switch count must be an integer, got bool")
    s = operator.index(s)
    if not 0 <= s <= config.n_C:
        raise ValueError(f"switch count {s} outside [0, {config.n_C}]")
    return s


def epoch_mean(config: SetConfig, s: int) -> Fraction:
    """Mean of the +1/-1 observable when ``s`` switching elements project as A."""
    s = _check_switch_count(config, s)
    return Fraction(config.n_A + s - config.n_B - (config.n_C - s), config.N)
