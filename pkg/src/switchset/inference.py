"""Statistics of the short-term mean, the threshold decision and Bayes inversion.

The short-term mean is the average of the +1/-1 observable within one
epoch. Treating it as uniform between its extremes gives the closed forms
:func:`expected_mean`, :func:`mean_square` and :func:`variance_mean`. A
count-based simulator only ever realises ``n_C + 1`` distinct means, so
:func:`discrete_variance_mean` gives the matching variance for ``s``
uniform on ``{0, ..., n_C}``.
"""

from __future__ import annotations

import enum
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from switchset.model import Outcome, SetConfig, fmt12
from switchset.sampler import SwitchPolicy, draw_outcomes, next_switch_state, validate_policy

__all__ = [
    "SOURCES",
    "ConfusionModel",
    "Hypothesis",
    "MomentReport",
    "SwitchingEstimate",
    "decision_error_rate",
    "decision_frequency",
    "discrete_variance_mean",
    "estimate_switching_count",
    "expected_mean",
    "joint_table",
    "mean_square",
    "moment_report",
    "observation_probability",
    "posterior_source",
    "short_term_means",
    "threshold_decide",
    "variance_mean",
]


def expected_mean(config: SetConfig) -> Fraction:
    return Fraction(config.n_A - config.n_B, config.N)


def mean_square(config: SetConfig) -> Fraction:
    a, b, c, N = config.n_A, config.n_B, config.n_C, config.N
    return Fraction(3 * a * a + 3 * b * b + c * c - 6 * a * b, 3 * N * N)


def variance_mean(config: SetConfig) -> Fraction:
    """Variance of a short-term mean spread uniformly over its range.

    Only the switching fraction matters: ``n_C**2 / (3 N**2)``.
    """
    return Fraction(config.n_C**2, 3 * config.N**2)


def discrete_variance_mean(config: SetConfig) -> Fraction:
    """Variance of the epoch mean when ``s`` is uniform on ``{0, ..., n_C}``."""
    c = config.n_C
    return Fraction(c * (c + 2), 3 * config.N**2)


@dataclass(frozen=True)
class MomentReport:
    mean: Fraction
    mean_square: Fraction
    variance: Fraction

    def as_csv_row(self) -> str:
        return ",".join(fmt12(v) for v in (self.mean, self.mean_square, self.variance))


def moment_report(config: SetConfig) -> MomentReport:
    return MomentReport(expected_mean(config), mean_square(config), variance_mean(config))


def short_term_means(config: SetConfig, switch_counts) -> np.ndarray:
    """Exact epoch means (no draw noise) for a sequence of switching counts."""
    s = np.asarray(switch_counts, dtype=np.int64)
    if s.size and (s.min() < 0 or s.max() > config.n_C):
        raise ValueError(f"switch counts must lie in [0, {config.n_C}]")
    return (config.n_A - config.n_B - config.n_C + 2 * s) / config.N


def _sqrt(x):
    """Square root that stays exact for rational perfect squares."""
    if isinstance(x, Rational):
        if not isinstance(x, Fraction):
            x = Fraction(x)
        num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if num * num == x.numerator and den * den == x.denominator:
            return Fraction(num, den)
    return math.sqrt(x)


@dataclass(frozen=True)
class SwitchingEstimate:
    """Size of the switching class implied by an observed variance.

    ``continuous`` inverts ``n_C**2 / (3 N**2)``; ``discrete`` inverts
    ``n_C (n_C + 2) / (3 N**2)``. Both are clamped to ``[0, N]``.
    """

    continuous: Fraction | float
    discrete: Fraction | float


def estimate_switching_count(observed_variance, N: int) -> SwitchingEstimate:
    if observed_variance < 0:
        raise ValueError(f"variance must be nonnegative, got {observed_variance}")
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    scaled = 3 * N * N * observed_variance
    continuous = _sqrt(scaled)
    discrete = _sqrt(1 + scaled) - 1
    return SwitchingEstimate(_clamp(continuous, N), _clamp(discrete, N))


def _clamp(x, N):
    if x < 0:
        return 0
    return N if x > N else x


class Hypothesis(enum.Enum):
    A = "A"
    B = "B"


def _decide_total(total) -> Hypothesis:
    # ties go to A
    return Hypothesis.A if total >= 0 else Hypothesis.B


def threshold_decide(series: Iterable[int]) -> Hypothesis:
    """Choose A when the +1/-1 observations sum to zero or more."""
    values = np.asarray(list(series) if not isinstance(series, np.ndarray) else series)
    if values.size == 0:
        raise ValueError("cannot decide on an empty series")
    if not np.all(np.abs(values) == 1):
        raise ValueError("observations must be +1 or -1")
    return _decide_total(int(values.sum(dtype=np.int64)))


def decision_frequency(
    config: SetConfig,
    policy: SwitchPolicy,
    draws: int,
    epochs: int,
    replicates: int,
    seed: int,
) -> float:
    """Fraction of replicates in which the pooled threshold rule picks A.

    Each replicate is a fresh survey of ``epochs`` epochs with ``draws`` draws
    each, run on its own generator spawned from ``seed``.
    """
    if replicates < 1 or epochs < 1:
        raise ValueError("replicates and epochs must be at least 1")
    validate_policy(config, policy)
    wins = 0
    for child in np.random.SeedSequence(seed).spawn(replicates):
        rng = np.random.Generator(np.random.PCG64(child))
        s = policy.initial_s
        pooled = []
        for i in range(epochs):
            if i:
                s = next_switch_state(policy, s, rng)
            pooled.append(draw_outcomes(config, s, draws, rng))
        if threshold_decide(np.concatenate(pooled)) is Hypothesis.A:
            wins += 1
    return wins / replicates


def decision_error_rate(
    config: SetConfig,
    policy: SwitchPolicy,
    draws: int,
    epochs: int,
    replicates: int,
    seed: int,
) -> float:
    """Fraction of replicates whose decision contradicts the sign of the expected mean."""
    truth = expected_mean(config)
    if truth == 0:
        raise ValueError("expected mean is zero, so neither hypothesis is true")
    freq_a = decision_frequency(config, policy, draws, epochs, replicates, seed)
    return 1 - freq_a if truth > 0 else freq_a


SOURCES = ("A", "B", "C")


def _as_number(x):
    if isinstance(x, bool):
        raise TypeError("probabilities must be numbers")
    if isinstance(x, (Rational, float)):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def _close(x, y) -> bool:
    if isinstance(x, Rational) and isinstance(y, Rational):
        return x == y
    return abs(x - y) <= 1e-9


@dataclass(frozen=True)
class ConfusionModel:
    """Source priors and per-source observation likelihoods.

    ``likelihoods[i]`` is ``(p(A_o | source i), p(B_o | source i))`` for the
    sources in :data:`SOURCES` order. Pass :class:`~fractions.Fraction`
    values to keep the posterior exact.
    """

    priors: tuple
    likelihoods: tuple

    def __post_init__(self):
        priors = tuple(_as_number(p) for p in self.priors)
        rows = tuple(tuple(_as_number(p) for p in row) for row in self.likelihoods)
        if len(priors) != 3:
            raise ValueError(f"need 3 priors, got {len(priors)}")
        if len(rows) != 3 or any(len(r) != 2 for r in rows):
            raise ValueError("likelihoods must be a 3x2 table")
        for p in priors + tuple(v for r in rows for v in r):
            if not 0 <= p <= 1:
                raise ValueError(f"probability {p} outside [0, 1]")
        if not _close(sum(priors), 1):
            raise ValueError(f"priors sum to {sum(priors)}, not 1")
        for src, row in zip(SOURCES, rows):
            if not _close(sum(row), 1):
                raise ValueError(f"likelihood row for source {src} sums to {sum(row)}, not 1")
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "likelihoods", rows)

    @classmethod
    def from_a_likelihoods(cls, priors: Sequence, p_a_given: Sequence) -> ConfusionModel:
        """Build from ``p(A_o | source)`` alone; ``p(B_o | source)`` is the complement."""
        return cls(tuple(priors), tuple((p, 1 - p) for p in p_a_given))

    @classmethod
    def from_mapping(cls, doc: Mapping) -> ConfusionModel:
        try:
            return cls(tuple(doc["priors"]), tuple(tuple(r) for r in doc["likelihoods"]))
        except KeyError as exc:
            raise ValueError(f"model document lacks key {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, text: str) -> ConfusionModel:
        """Parse JSON; decimal literals become exact fractions."""
        return cls.from_mapping(json.loads(text, parse_float=Fraction))


def _outcome_column(observed) -> int:
    if not isinstance(observed, Outcome):
        observed = Outcome.from_label(str(observed))
    return 0 if observed is Outcome.A else 1


def joint_table(model: ConfusionModel) -> dict[tuple[str, str], object]:
    """``p(source, observation)`` for every cell of the 3x2 table."""
    return {
        (src, obs.label): prior * row[_outcome_column(obs)]
        for src, prior, row in zip(SOURCES, model.priors, model.likelihoods)
        for obs in Outcome
    }


def observation_probability(model: ConfusionModel, observed) -> object:
    col = _outcome_column(observed)
    return sum(prior * row[col] for prior, row in zip(model.priors, model.likelihoods))


def posterior_source(model: ConfusionModel, observed) -> dict[str, object]:
    col = _outcome_column(observed)
    weights = [prior * row[col] for prior, row in zip(model.priors, model.likelihoods)]
    total = sum(weights)
    if total == 0:
        raise ValueError(f"observation {observed} has probability zero under the model")
    return {src: w / total for src, w in zip(SOURCES, weights)}
