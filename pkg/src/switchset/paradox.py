"""Simpson-type aggregation reversals for tables with interval numerators.

A :class:`StratifiedTable` compares two subjects across strata. Each cell
has a fixed denominator and a numerator known only up to an integer range.
:func:`detect_inversions` walks every admissible choice of numerators and
records, with exact fractions, who wins each stratum and who wins after
pooling.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "MAX_SCENARIOS",
    "TIE",
    "Cell",
    "InversionReport",
    "Scenario",
    "StratifiedTable",
    "aggregate",
    "compare_strata",
    "detect_inversions",
    "read_report_csv",
    "read_table_csv",
    "write_report_csv",
]

MAX_SCENARIOS = 10**6
TIE = "tie"
TABLE_HEADER = ("subject", "stratum", "num_lo", "num_hi", "den")


@dataclass(frozen=True)
class Cell:
    num_lo: int
    num_hi: int
    den: int

    def __post_init__(self):
        if self.den < 1:
            raise ValueError(f"denominator must be positive, got {self.den}")
        if not 0 <= self.num_lo <= self.num_hi <= self.den:
            raise ValueError(
                f"need 0 <= num_lo <= num_hi <= den, got {self.num_lo}..{self.num_hi}/{self.den}"
            )

    @property
    def choices(self) -> range:
        return range(self.num_lo, self.num_hi + 1)


@dataclass(frozen=True)
class StratifiedTable:
    """Two subjects, each with one :class:`Cell` per stratum.

    ``cells[i][j]`` belongs to ``subjects[i]`` and ``strata[j]``.
    """

    subjects: tuple[str, str]
    strata: tuple[str, ...]
    cells: tuple[tuple[Cell, ...], tuple[Cell, ...]]

    def __post_init__(self):
        if len(self.subjects) != 2 or self.subjects[0] == self.subjects[1]:
            raise ValueError(f"need two distinct subjects, got {self.subjects}")
        if TIE in self.subjects:
            raise ValueError(f"{TIE!r} is reserved and cannot name a subject")
        if not self.strata:
            raise ValueError("table has no strata")
        if len(set(self.strata)) != len(self.strata):
            raise ValueError("stratum names must be unique")
        if len(self.cells) != 2 or any(len(row) != len(self.strata) for row in self.cells):
            raise ValueError("need exactly one cell per subject and stratum")

    @classmethod
    def from_rows(cls, subjects, strata, rows) -> StratifiedTable:
        """Build from plain ``(lo, hi, den)`` triples, one row per subject."""
        cells = tuple(tuple(Cell(*c) for c in row) for row in rows)
        return cls(tuple(subjects), tuple(strata), cells)

    @property
    def scenario_count(self) -> int:
        return math.prod(len(c.choices) for row in self.cells for c in row)

    def check_choice(self, choice: Mapping[str, Sequence[int]]) -> tuple[tuple[int, ...], ...]:
        """Normalise a ``{subject: numerators}`` choice and check it against the ranges."""
        out = []
        for subject, row in zip(self.subjects, self.cells):
            try:
                nums = tuple(choice[subject])
            except KeyError:
                raise ValueError(f"choice lacks subject {subject!r}") from None
            if len(nums) != len(row):
                raise ValueError(f"{subject}: need {len(row)} numerators, got {len(nums)}")
            for stratum, n, cell in zip(self.strata, nums, row):
                if n not in cell.choices:
                    raise ValueError(
                        f"{subject}/{stratum}: numerator {n} outside {cell.num_lo}..{cell.num_hi}"
                    )
            out.append(nums)
        return tuple(out)


def _winner(subjects, x: Fraction, y: Fraction) -> str:
    if x > y:
        return subjects[0]
    if y > x:
        return subjects[1]
    return TIE


def aggregate(table: StratifiedTable, choice) -> tuple[Fraction, Fraction]:
    nums = table.check_choice(choice)
    return tuple(
        Fraction(sum(n), sum(c.den for c in row)) for n, row in zip(nums, table.cells)
    )


def compare_strata(table: StratifiedTable, choice) -> tuple[str, ...]:
    """Winner of each stratum, or :data:`TIE`."""
    (n0, n1) = table.check_choice(choice)
    row0, row1 = table.cells
    return tuple(
        _winner(table.subjects, Fraction(a, c0.den), Fraction(b, c1.den))
        for a, b, c0, c1 in zip(n0, n1, row0, row1)
    )


def _dominator(subjects, winners: Sequence[str]) -> str | None:
    # wins or ties every stratum and wins at least one outright
    for subject in subjects:
        if all(w in (subject, TIE) for w in winners) and subject in winners:
            return subject
    return None


@dataclass(frozen=True)
class Scenario:
    numerators: tuple[tuple[int, ...], tuple[int, ...]]
    stratum_winners: tuple[str, ...]
    aggregates: tuple[Fraction, Fraction]
    aggregate_winner: str
    dominator: str | None
    inversion: bool
    exception: bool

    def choice(self, subjects) -> dict[str, tuple[int, ...]]:
        return dict(zip(subjects, self.numerators))


@dataclass(frozen=True)
class InversionReport:
    """Every scenario of a table plus the subject that usually dominates per stratum.

    ``presumed_dominator`` dominates the strata in more scenarios than the
    other subject; scenarios where it does not are flagged ``exception``.
    """

    table: StratifiedTable
    scenarios: tuple[Scenario, ...]
    presumed_dominator: str | None

    @property
    def inversions(self) -> tuple[Scenario, ...]:
        return tuple(s for s in self.scenarios if s.inversion)

    @property
    def exceptions(self) -> tuple[Scenario, ...]:
        return tuple(s for s in self.scenarios if s.exception)

    def find(self, choice) -> Scenario:
        nums = self.table.check_choice(choice)
        for s in self.scenarios:
            if s.numerators == nums:
                return s
        raise KeyError(choice)


def detect_inversions(table: StratifiedTable, limit: int = MAX_SCENARIOS) -> InversionReport:
    if table.scenario_count > limit:
        raise ValueError(f"{table.scenario_count} scenarios exceed the enumeration bound {limit}")
    width = len(table.strata)
    flat_ranges = [c.choices for row in table.cells for c in row]
    subjects = table.subjects

    raw = []
    for flat in itertools.product(*flat_ranges):
        nums = (flat[:width], flat[width:])
        choice = dict(zip(subjects, nums))
        winners = compare_strata(table, choice)
        aggs = aggregate(table, choice)
        agg_winner = _winner(subjects, *aggs)
        dom = _dominator(subjects, winners)
        inversion = dom is not None and agg_winner not in (dom, TIE)
        raw.append((nums, winners, aggs, agg_winner, dom, inversion))

    counts = {s: sum(1 for r in raw if r[4] == s) for s in subjects}
    presumed = None
    if counts[subjects[0]] != counts[subjects[1]]:
        presumed = max(subjects, key=counts.__getitem__)

    scenarios = tuple(
        Scenario(*r, exception=presumed is not None and r[4] != presumed) for r in raw
    )
    return InversionReport(table, scenarios, presumed)


def read_table_csv(text: str) -> StratifiedTable:
    """Parse ``subject,stratum,num_lo,num_hi,den`` rows.

    Subjects and strata keep their order of first appearance. Errors name
    the offending line.
    """
    lines = list(csv.reader(io.StringIO(text)))
    if not lines or not any(field.strip() for field in lines[0]):
        raise ValueError("line 1: empty table file")
    header = tuple(f.strip() for f in lines[0])
    if header != TABLE_HEADER:
        raise ValueError(f"line 1: expected header {','.join(TABLE_HEADER)}, got {','.join(header)}")

    subjects: list[str] = []
    strata: list[str] = []
    cells: dict[tuple[str, str], Cell] = {}
    for lineno, row in enumerate(lines[1:], start=2):
        if not any(field.strip() for field in row):
            continue
        if len(row) != len(TABLE_HEADER):
            raise ValueError(f"line {lineno}: expected 5 fields, got {len(row)}")
        subject, stratum = row[0].strip(), row[1].strip()
        try:
            lo, hi, den = (int(v) for v in row[2:])
            cell = Cell(lo, hi, den)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if (subject, stratum) in cells:
            raise ValueError(f"line {lineno}: duplicate cell {subject}/{stratum}")
        if subject not in subjects:
            if len(subjects) == 2:
                raise ValueError(f"line {lineno}: third subject {subject!r}; only two allowed")
            subjects.append(subject)
        if stratum not in strata:
            strata.append(stratum)
        cells[subject, stratum] = cell

    if len(subjects) != 2:
        raise ValueError(f"need two subjects, found {len(subjects)}")
    missing = [f"{s}/{t}" for s in subjects for t in strata if (s, t) not in cells]
    if missing:
        raise ValueError(f"missing cells: {', '.join(missing)}")
    try:
        return StratifiedTable(
            tuple(subjects),
            tuple(strata),
            tuple(tuple(cells[s, t] for t in strata) for s in subjects),
        )
    except ValueError as exc:
        raise ValueError(f"invalid table: {exc}") from None


def _report_header(table: StratifiedTable) -> list[str]:
    header = ["scenario"]
    header += [f"num:{s}:{t}" for s in table.subjects for t in table.strata]
    header += [f"winner:{t}" for t in table.strata]
    header += [f"aggregate:{s}" for s in table.subjects]
    header += ["aggregate_winner", "dominator", "inversion", "exception"]
    return header


def write_report_csv(report: InversionReport, stream=None) -> str:
    """One row per scenario; aggregates are written as exact ``p/q`` fractions."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_report_header(report.table))
    for i, sc in enumerate(report.scenarios):
        writer.writerow(
            [i]
            + [n for row in sc.numerators for n in row]
            + list(sc.stratum_winners)
            + [f"{a.numerator}/{a.denominator}" for a in sc.aggregates]
            + [sc.aggregate_winner, sc.dominator or "", int(sc.inversion), int(sc.exception)]
        )
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def read_report_csv(text: str, table: StratifiedTable) -> tuple[Scenario, ...]:
    """Parse CSV written by :func:`write_report_csv` for ``table``."""
    rows = list(csv.reader(io.StringIO(text)))
    header = _report_header(table)
    if not rows or rows[0] != header:
        raise ValueError("report header does not match the table")
    k = len(table.strata)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        flat = tuple(int(v) for v in row[1 : 1 + 2 * k])
        pos = 1 + 2 * k
        winners = tuple(row[pos : pos + k])
        aggs = tuple(Fraction(v) for v in row[pos + k : pos + k + 2])
        agg_winner, dom, inv, exc = row[pos + k + 2 :]
        out.append(
            Scenario(
                (flat[:k], flat[k:]), winners, aggs, agg_winner, dom or None, inv == "1", exc == "1"
            )
        )
    return tuple(out)
