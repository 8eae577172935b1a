"""Observation process for sets with switching elements.

During one epoch the number ``s`` of switching elements that project as A
is frozen, and draws are taken with replacement from all ``N`` elements.
Between epochs ``s`` moves according to a :class:`SwitchPolicy`.

All randomness comes from :class:`numpy.random.Generator` seeded
explicitly; the bit generator name is stored on every
:class:`SampleSeries` so a replay can be checked against the same stream.
"""

from __future__ import annotations

import csv
import enum
import io
import operator
from dataclasses import dataclass, field

import numpy as np

from switchset.dynamics import SchemeSpec
from switchset.model import SetConfig, fmt12

__all__ = [
    "RNG_ALGORITHM",
    "EpochObservation",
    "PolicyKind",
    "SampleSeries",
    "SwitchPolicy",
    "draw_outcomes",
    "evolve_and_sample",
    "make_rng",
    "next_switch_state",
    "read_series_csv",
    "sample_epoch",
    "switch_path",
    "validate_policy",
    "write_series_csv",
]

RNG_ALGORITHM = "numpy.PCG64"
CSV_HEADER = ("epoch", "s", "draws", "count_a", "count_b", "mean")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class PolicyKind(enum.Enum):
    SCHEME = "scheme"
    # each switching element independently projects as A with prob pi_A
    INDEPENDENT = "independent"
    # s uniform on {0, ..., n_C}, the discrete analogue of a uniform short-term mean
    UNIFORM = "uniform"


@dataclass(frozen=True)
class SwitchPolicy:
    """How the switching count evolves from one epoch to the next.

    Scheme-driven policies need ``scheme.M == n_C + 1`` so that scheme states
    and switching counts coincide.
    """

    kind: PolicyKind
    n_C: int
    initial_s: int = 0
    scheme: SchemeSpec | None = None
    pi_A: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if not 0 <= self.initial_s <= self.n_C:
            raise ValueError(f"initial_s {self.initial_s} outside [0, {self.n_C}]")
        if self.kind is PolicyKind.SCHEME:
            if self.scheme is None:
                raise ValueError("scheme-driven policy needs a scheme")
            if self.scheme.M != self.n_C + 1:
                raise ValueError(
                    f"scheme modulus {self.scheme.M} must equal n_C + 1 = {self.n_C + 1}"
                )
        elif self.kind is PolicyKind.INDEPENDENT:
            if self.pi_A is None or not 0 <= self.pi_A <= 1:
                raise ValueError(f"pi_A must lie in [0, 1], got {self.pi_A}")

    @classmethod
    def scheme_driven(cls, config: SetConfig, kind, k: int, initial_s: int = 0) -> SwitchPolicy:
        scheme = SchemeSpec(kind, k, config.n_C + 1)
        return cls(PolicyKind.SCHEME, config.n_C, initial_s, scheme=scheme)

    @classmethod
    def independent(cls, config: SetConfig, pi_A: float, initial_s: int = 0) -> SwitchPolicy:
        return cls(PolicyKind.INDEPENDENT, config.n_C, initial_s, pi_A=pi_A)

    @classmethod
    def uniform(cls, config: SetConfig, initial_s: int = 0) -> SwitchPolicy:
        return cls(PolicyKind.UNIFORM, config.n_C, initial_s)

    def mirrored(self) -> SwitchPolicy:
        """Policy for the A/B-swapped set; only defined for the random kinds."""
        initial = self.n_C - self.initial_s
        if self.kind is PolicyKind.INDEPENDENT:
            return SwitchPolicy(self.kind, self.n_C, initial, pi_A=1 - self.pi_A)
        if self.kind is PolicyKind.UNIFORM:
            return SwitchPolicy(self.kind, self.n_C, initial)
        raise ValueError("scheme-driven policies have no mirror image")

    def describe(self) -> str:
        if self.kind is PolicyKind.SCHEME:
            return f"scheme:{self.scheme.describe()},s0={self.initial_s}"
        if self.kind is PolicyKind.INDEPENDENT:
            return f"independent(pi_A={self.pi_A}),s0={self.initial_s}"
        return f"uniform,s0={self.initial_s}"


@dataclass(frozen=True)
class EpochObservation:
    epoch_index: int
    s: int
    draws: int
    count_A: int
    count_B: int

    def __post_init__(self):
        if self.count_A + self.count_B != self.draws:
            raise ValueError("count_A + count_B must equal draws")

    @property
    def sample_mean(self) -> float:
        return (self.count_A - self.count_B) / self.draws

    def estimated_a_count(self, N: int) -> float:
        """Implied number of A-looking elements, ``N * (mean + 1) / 2``."""
        return N * (self.sample_mean + 1) / 2


@dataclass(frozen=True)
class SampleSeries:
    config: SetConfig
    policy: str
    epochs: tuple[EpochObservation, ...]
    seed: int
    rng_algorithm: str = field(default=RNG_ALGORITHM)

    def means(self) -> np.ndarray:
        return np.array([e.sample_mean for e in self.epochs])

    def switch_counts(self) -> list[int]:
        return [e.s for e in self.epochs]


def _check_draws(draws) -> int:
    draws = operator.index(draws)
    if draws < 1:
        raise ValueError(f"draws must be at least 1, got {draws}")
    return draws


def draw_outcomes(config: SetConfig, s: int, draws: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``draws`` elements with replacement and return their +1/-1 values.

    Elements are indexed so that the first ``n_A + s`` look like A.
    """
    if not 0 <= s <= config.n_C:
        raise ValueError(f"switch count {s} outside [0, {config.n_C}]")
    draws = _check_draws(draws)
    picks = rng.integers(0, config.N, size=draws)
    return np.where(picks < config.n_A + s, 1, -1).astype(np.int8)


def sample_epoch(
    config: SetConfig, s: int, draws: int, rng: np.random.Generator, epoch_index: int = 0
) -> EpochObservation:
    values = draw_outcomes(config, s, draws, rng)
    count_A = int(np.count_nonzero(values == 1))
    return EpochObservation(epoch_index, int(s), len(values), count_A, len(values) - count_A)


def next_switch_state(policy: SwitchPolicy, current_s: int, rng: np.random.Generator) -> int:
    if not 0 <= current_s <= policy.n_C:
        raise ValueError(f"switch count {current_s} outside [0, {policy.n_C}]")
    if policy.kind is PolicyKind.SCHEME:
        return policy.scheme.step(current_s)
    if policy.kind is PolicyKind.INDEPENDENT:
        return int(rng.binomial(policy.n_C, policy.pi_A))
    return int(rng.integers(0, policy.n_C + 1))


def switch_path(policy: SwitchPolicy, epochs: int, rng: np.random.Generator) -> list[int]:
    """Switching count for each of ``epochs`` epochs, starting at ``initial_s``."""
    if epochs < 1:
        raise ValueError(f"epochs must be at least 1, got {epochs}")
    path = [policy.initial_s]
    for _ in range(epochs - 1):
        path.append(next_switch_state(policy, path[-1], rng))
    return path


def validate_policy(config: SetConfig, policy: SwitchPolicy) -> None:
    if policy.n_C != config.n_C:
        raise ValueError(f"policy built for n_C={policy.n_C}, config has n_C={config.n_C}")


def evolve_and_sample(
    config: SetConfig, policy: SwitchPolicy, epochs: int, draws_per_epoch: int, seed: int
) -> SampleSeries:
    validate_policy(config, policy)
    _check_draws(draws_per_epoch)
    if epochs < 1:
        raise ValueError(f"epochs must be at least 1, got {epochs}")
    rng = make_rng(seed)
    observations = []
    s = policy.initial_s
    for i in range(epochs):
        if i:
            s = next_switch_state(policy, s, rng)
        observations.append(sample_epoch(config, s, draws_per_epoch, rng, epoch_index=i))
    return SampleSeries(config, policy.describe(), tuple(observations), seed)


def write_series_csv(series: SampleSeries, stream=None) -> str:
    """Write the series as CSV to ``stream`` (if given) and return the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for e in series.epochs:
        writer.writerow([e.epoch_index, e.s, e.draws, e.count_A, e.count_B, fmt12(e.sample_mean)])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def read_series_csv(text: str) -> list[EpochObservation]:
    """Parse CSV written by :func:`write_series_csv`.

    The ``mean`` column is checked against the counts rather than trusted.
    """
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}, got {header}")
    out = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        epoch, s, draws, count_a, count_b = (int(v) for v in row[:5])
        obs = EpochObservation(epoch, s, draws, count_a, count_b)
        if abs(float(row[5]) - obs.sample_mean) > 1e-11:
            raise ValueError(f"line {lineno}: mean {row[5]} disagrees with counts")
        out.append(obs)
    return out
