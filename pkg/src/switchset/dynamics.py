"""Modular dynamics for the count of switching elements seen as A.

Three update rules act on the state space ``{0, ..., M-1}``:

* additive: ``s -> (s + k) mod M``
* multiplicative: ``s -> k*s mod M``
* collatz: ``s -> s/2`` for even ``s`` (0 counts as even), ``(k*s + 1) mod M`` otherwise

Every rule defines a functional graph on a finite set, so each trajectory
ends in a cycle. The helpers here walk single trajectories
(:func:`trajectory`, :func:`orbit_report`) or partition the whole state
space (:func:`classify_states`).
"""

from __future__ import annotations

import enum
import operator
from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_ENUMERABLE_MODULUS",
    "OrbitReport",
    "SchemeKind",
    "SchemeSpec",
    "StateClassification",
    "TruncatedTrajectory",
    "basin",
    "canonical_cycle",
    "classify_states",
    "factorize",
    "is_prime",
    "is_primitive_root",
    "multiplicative_order",
    "one_step_table",
    "orbit_report",
    "step_additive",
    "step_collatz",
    "step_multiplicative",
    "trajectory",
]

# classify_states materialises one successor per state
MAX_ENUMERABLE_MODULUS = 1 << 24


class SchemeKind(enum.Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"
    COLLATZ = "collatz"

    @classmethod
    def parse(cls, name) -> SchemeKind:
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ", ".join(kind.value for kind in cls)
            raise ValueError(f"unknown scheme {name!r}; expected one of {choices}") from None


def _check_modulus(M) -> int:
    M = operator.index(M)
    if M < 2:
        raise ValueError(f"modulus must be at least 2, got {M}")
    return M


def _check_state(s, M: int) -> int:
    s = operator.index(s)
    if not 0 <= s < M:
        raise ValueError(f"state {s} outside [0, {M - 1}]")
    return s


def step_additive(s: int, k: int, M: int) -> int:
    M = _check_modulus(M)
    return (_check_state(s, M) + k) % M


def step_multiplicative(s: int, k: int, M: int) -> int:
    M = _check_modulus(M)
    return (k * _check_state(s, M)) % M


def step_collatz(s: int, k: int, M: int) -> int:
    M = _check_modulus(M)
    s = _check_state(s, M)
    if s % 2 == 0:
        return s // 2
    return (k * s + 1) % M


_STEPS = {
    SchemeKind.ADDITIVE: step_additive,
    SchemeKind.MULTIPLICATIVE: step_multiplicative,
    SchemeKind.COLLATZ: step_collatz,
}


@dataclass(frozen=True)
class SchemeSpec:
    """One modular update rule with its parameter ``k`` and modulus ``M``."""

    kind: SchemeKind
    k: int
    M: int

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind.parse(self.kind))
        k = operator.index(self.k)
        if k < 0:
            raise ValueError(f"k must be nonnegative, got {k}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "M", _check_modulus(self.M))

    @classmethod
    def additive(cls, k: int, M: int) -> SchemeSpec:
        return cls(SchemeKind.ADDITIVE, k, M)

    @classmethod
    def multiplicative(cls, k: int, M: int) -> SchemeSpec:
        return cls(SchemeKind.MULTIPLICATIVE, k, M)

    @classmethod
    def collatz(cls, k: int, M: int) -> SchemeSpec:
        return cls(SchemeKind.COLLATZ, k, M)

    def step(self, s: int) -> int:
        return _STEPS[self.kind](s, self.k, self.M)

    def successors(self) -> list[int]:
        """Successor of every state, indexed by state."""
        return self.successor_array().tolist()

    def successor_array(self) -> np.ndarray:
        # k is reduced first so k*s stays inside int64 for any enumerable M
        k, M = self.k % self.M, self.M
        s = np.arange(M, dtype=np.int64)
        if self.kind is SchemeKind.ADDITIVE:
            out = (s + k) % M
        elif self.kind is SchemeKind.MULTIPLICATIVE:
            out = (k * s) % M
        else:
            out = np.where(s % 2 == 0, s // 2, (k * s + 1) % M)
        return out

    def describe(self) -> str:
        return f"{self.kind.value}(k={self.k}, M={self.M})"


class TruncatedTrajectory(RuntimeError):
    """Raised when ``max_steps`` runs out before any state repeats.

    The states visited so far are kept on ``states``.
    """

    def __init__(self, states: list[int], max_steps: int):
        super().__init__(f"no repeated state within {max_steps} steps")
        self.states = states
        self.max_steps = max_steps


def trajectory(scheme: SchemeSpec, start: int, max_steps: int | None = None) -> list[int]:
    """States visited from ``start`` up to and including the first repeat.

    ``max_steps`` bounds the number of transitions; ``M`` transitions always
    suffice, and that is the default.
    """
    start = _check_state(start, scheme.M)
    if max_steps is None:
        max_steps = scheme.M
    elif max_steps < 1:
        raise ValueError(f"max_steps must be at least 1, got {max_steps}")

    states = [start]
    seen = {start}
    s = start
    for _ in range(max_steps):
        s = scheme.step(s)
        states.append(s)
        if s in seen:
            return states
        seen.add(s)
    raise TruncatedTrajectory(states, max_steps)


def canonical_cycle(cycle) -> tuple[int, ...]:
    """Rotate a cycle so it starts at its smallest state, keeping iteration order."""
    cycle = tuple(cycle)
    if not cycle:
        return cycle
    i = cycle.index(min(cycle))
    return cycle[i:] + cycle[:i]


@dataclass(frozen=True)
class OrbitReport:
    start: int
    path: tuple[int, ...]
    tail_length: int
    cycle: tuple[int, ...]
    max_value: int

    @property
    def is_fixed_point(self) -> bool:
        return len(self.cycle) == 1

    @property
    def distinct_states(self) -> tuple[int, ...]:
        return self.path[:-1]

    @property
    def path_length(self) -> int:
        """Transitions between the distinct states of the path."""
        return len(self.path) - 2

    def steps_to(self, state: int) -> int:
        """Number of transitions from the start to the first visit of ``state``."""
        try:
            return self.path.index(state)
        except ValueError:
            raise ValueError(f"state {state} is not on the orbit of {self.start}") from None


def orbit_report(scheme: SchemeSpec, start: int) -> OrbitReport:
    path = trajectory(scheme, start)
    tail_length = path.index(path[-1])
    return OrbitReport(
        start=path[0],
        path=tuple(path),
        tail_length=tail_length,
        cycle=canonical_cycle(path[tail_length:-1]),
        max_value=max(path),
    )


def one_step_table(scheme: SchemeSpec) -> dict[int, int]:
    return dict(enumerate(scheme.successors()))


@dataclass(frozen=True)
class StateClassification:
    """Partition of the state space into fixed points, longer cycles and transients.

    ``cycles`` holds only cycles of length two or more, each in canonical form
    and ordered by smallest element. ``attractor[s]`` indexes into
    :attr:`all_cycles` and names the cycle that state ``s`` eventually enters.
    """

    M: int
    fixed_points: frozenset[int]
    cycles: tuple[tuple[int, ...], ...]
    transients: frozenset[int]
    attractor: tuple[int, ...]

    @property
    def all_cycles(self) -> tuple[tuple[int, ...], ...]:
        """Every cycle including fixed points as 1-cycles, ordered by smallest element."""
        return tuple(sorted(self.cycles + tuple((p,) for p in self.fixed_points)))

    @property
    def cyclic_states(self) -> frozenset[int]:
        return frozenset(s for c in self.cycles for s in c) | self.fixed_points

    def cycle_of(self, state: int) -> tuple[int, ...]:
        return self.all_cycles[self.attractor[_check_state(state, self.M)]]


def classify_states(scheme: SchemeSpec) -> StateClassification:
    """Exhaustively partition ``{0, ..., M-1}`` under the scheme.

    Each state is visited once: walks stop at the first state already seen,
    and a walk that runs into itself has found a new cycle.
    """
    M = scheme.M
    if M > MAX_ENUMERABLE_MODULUS:
        raise ValueError(f"modulus {M} exceeds enumeration bound {MAX_ENUMERABLE_MODULUS}")
    succ = scheme.successors()

    UNSEEN = -1
    walk_id = [UNSEEN] * M
    # cycle label of each state, assigned once its walk is resolved
    label = [UNSEEN] * M
    found: list[tuple[int, ...]] = []

    for start in range(M):
        if walk_id[start] != UNSEEN:
            continue
        walk = []
        s = start
        while walk_id[s] == UNSEEN:
            walk_id[s] = start
            walk.append(s)
            s = succ[s]
        if walk_id[s] == start and label[s] == UNSEEN:
            i = walk.index(s)
            found.append(tuple(walk[i:]))
            for c in walk[i:]:
                label[c] = len(found) - 1
            walk = walk[:i]
        target = label[s]
        for t in walk:
            label[t] = target

    canon = [canonical_cycle(c) for c in found]
    order = sorted(range(len(canon)), key=lambda i: canon[i])
    rank = {old: new for new, old in enumerate(order)}

    fixed = frozenset(c[0] for c in canon if len(c) == 1)
    cycles = tuple(canon[i] for i in order if len(canon[i]) > 1)
    cyclic = {s for c in canon for s in c}
    transients = frozenset(s for s in range(M) if s not in cyclic)
    return StateClassification(
        M=M,
        fixed_points=fixed,
        cycles=cycles,
        transients=transients,
        attractor=tuple(rank[lab] for lab in label),
    )


def basin(scheme: SchemeSpec, target: int) -> frozenset[int]:
    """All states whose trajectory passes through ``target`` (``target`` included).

    With ``target=0`` this answers whether the A-projected count can die out.
    """
    target = _check_state(target, scheme.M)
    preimages: list[list[int]] = [[] for _ in range(scheme.M)]
    for s, t in enumerate(scheme.successors()):
        preimages[t].append(s)
    reached = {target}
    queue = deque([target])
    while queue:
        for p in preimages[queue.popleft()]:
            if p not in reached:
                reached.add(p)
                queue.append(p)
    return frozenset(reached)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for ``n < 3.3e24``."""
    n = operator.index(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division."""
    n = operator.index(n)
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    factors: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def multiplicative_order(k: int, M: int) -> int:
    """Smallest ``e >= 1`` with ``k**e = 1 (mod M)``; needs ``gcd(k, M) = 1``."""
    from math import gcd

    M = _check_modulus(M)
    k = operator.index(k) % M
    if gcd(k, M) != 1:
        raise ValueError(f"{k} is not invertible mod {M}")
    # the order divides phi(M); strip prime factors while the power stays 1
    phi = 1
    for p, e in factorize(M).items():
        phi *= (p - 1) * p ** (e - 1)
    order = phi
    for p in factorize(phi):
        while order % p == 0 and pow(k, order // p, M) == 1:
            order //= p
    return order


def is_primitive_root(k: int, M: int) -> bool:
    """True iff ``k`` generates the multiplicative group mod the prime ``M``."""
    M = _check_modulus(M)
    if not is_prime(M):
        raise ValueError(f"modulus {M} is not prime")
    k = operator.index(k)
    if not 1 <= k < M:
        raise ValueError(f"k must lie in [1, {M - 1}], got {k}")
    return all(pow(k, (M - 1) // q, M) != 1 for q in factorize(M - 1))
