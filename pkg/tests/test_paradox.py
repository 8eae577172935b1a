from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from switchset.paradox import (
    TIE,
    Cell,
    StratifiedTable,
    aggregate,
    compare_strata,
    detect_inversions,
    read_report_csv,
    read_table_csv,
    write_report_csv,
)


def choice(lisa2, bart2):
    return {"Lisa": (0, lisa2), "Bart": (1, bart2)}


class TestAggregate:
    def test_table1_totals(self, table1):
        lisa, bart = aggregate(table1, choice(3, 2))
        assert lisa == Fraction(3, 6)
        assert aggregate(table1, {"Lisa": (0, 3), "Bart": (1, 3)})[1] == Fraction(4, 7)

    def test_single_stratum(self):
        t = StratifiedTable.from_rows(("x", "y"), ("only",), [[(2, 2, 7)], [(1, 1, 3)]])
        assert aggregate(t, {"x": (2,), "y": (1,)}) == (Fraction(2, 7), Fraction(1, 3))

    @pytest.mark.parametrize(
        "bad", [choice(5, 2), choice(3, 1), {"Lisa": (0, 3)}, {"Lisa": (0,), "Bart": (1, 2)}]
    )
    def test_rejects_bad_choice(self, table1, bad):
        with pytest.raises(ValueError):
            aggregate(table1, bad)


class TestCompare:
    def test_paper_exception(self, table1):
        assert compare_strata(table1, choice(4, 2)) == ("Bart", "Lisa")

    def test_week1(self, table1):
        for l2, b2 in product((3, 4), (2, 3)):
            assert compare_strata(table1, choice(l2, b2))[0] == "Bart"

    def test_tie(self):
        t = StratifiedTable.from_rows(("x", "y"), ("s",), [[(1, 1, 2)], [(2, 2, 4)]])
        assert compare_strata(t, {"x": (1,), "y": (2,)}) == (TIE,)


class TestDetect:
    def test_table1(self, table1):
        report = detect_inversions(table1)
        assert len(report.scenarios) == 4
        flags = {(s.numerators[0][1], s.numerators[1][1]): s.inversion for s in report.scenarios}
        assert flags == {(3, 2): True, (3, 3): False, (4, 2): False, (4, 3): True}
        assert report.presumed_dominator == "Bart"
        assert [s.numerators for s in report.exceptions] == [((0, 4), (1, 2))]
        assert report.find(choice(3, 3)).aggregate_winner == "Bart"
        assert report.find(choice(4, 3)).aggregate_winner == "Lisa"

    def test_classic_instance(self):
        t = StratifiedTable.from_rows(
            ("a", "b"), ("s1", "s2"), [[(1, 1, 5), (6, 6, 8)], [(2, 2, 8), (4, 4, 5)]]
        )
        (sc,) = detect_inversions(t).scenarios
        assert sc.stratum_winners == ("b", "b")
        assert sc.aggregates == (Fraction(7, 13), Fraction(6, 13))
        assert sc.inversion

    def test_no_inversion_when_consistent(self):
        t = StratifiedTable.from_rows(
            ("a", "b"), ("s1", "s2"), [[(3, 3, 4), (2, 2, 3)], [(1, 1, 4), (1, 1, 3)]]
        )
        report = detect_inversions(t)
        assert not report.inversions

    def test_tie_in_one_stratum_still_dominates(self):
        t = StratifiedTable.from_rows(
            ("a", "b"), ("s1", "s2"), [[(1, 1, 2), (1, 1, 10)], [(1, 1, 2), (0, 0, 1)]]
        )
        (sc,) = detect_inversions(t).scenarios
        assert sc.stratum_winners == (TIE, "a")
        assert sc.dominator == "a"
        assert sc.aggregate_winner == "b"  # 2/12 < 1/3
        assert sc.inversion

    def test_bound(self, table1):
        with pytest.raises(ValueError):
            detect_inversions(table1, limit=3)

    @given(st.data())
    def test_completeness_and_recomputable_flags(self, data):
        strata = data.draw(st.integers(1, 3))
        rows = []
        for _ in range(2):
            row = []
            for _ in range(strata):
                den = data.draw(st.integers(1, 6))
                lo = data.draw(st.integers(0, den))
                hi = data.draw(st.integers(lo, den))
                row.append((lo, hi, den))
            rows.append(row)
        t = StratifiedTable.from_rows(("p", "q"), [f"s{i}" for i in range(strata)], rows)
        report = detect_inversions(t)
        expected = 1
        for row in rows:
            for lo, hi, _ in row:
                expected *= hi - lo + 1
        assert len(report.scenarios) == expected == t.scenario_count
        for sc in report.scenarios:
            ch = sc.choice(t.subjects)
            assert compare_strata(t, ch) == sc.stratum_winners
            assert aggregate(t, ch) == sc.aggregates
            w = sc.stratum_winners
            dom = next(
                (s for s in t.subjects if s in w and all(x in (s, TIE) for x in w)), None
            )
            assert sc.dominator == dom
            other_wins = dom is not None and sc.aggregate_winner not in (dom, TIE)
            assert sc.inversion == other_wins

    @given(st.integers(1, 5), st.integers(1, 9), st.integers(0, 4))
    def test_monotone_in_numerator(self, den, other_den, n):
        n = min(n, den - 1)
        t = StratifiedTable.from_rows(
            ("x", "y"), ("s1", "s2"), [[(0, den, den), (1, 1, other_den)], [(0, 0, 1), (0, 0, 1)]]
        )
        lo = aggregate(t, {"x": (n, 1), "y": (0, 0)})[0]
        hi = aggregate(t, {"x": (n + 1, 1), "y": (0, 0)})[0]
        assert hi > lo


class TestTableValidation:
    def test_cell_invariant(self):
        with pytest.raises(ValueError):
            Cell(2, 4, 3)
        with pytest.raises(ValueError):
            Cell(2, 1, 3)
        with pytest.raises(ValueError):
            Cell(0, 0, 0)

    def test_subjects(self):
        with pytest.raises(ValueError):
            StratifiedTable.from_rows(("x", "x"), ("s",), [[(0, 0, 1)], [(0, 0, 1)]])


class TestCsvIo:
    def test_read_table1(self, data_dir, table1):
        assert read_table_csv((data_dir / "table1.csv").read_text()) == table1

    def test_line_number_on_bad_numerator(self):
        text = "subject,stratum,num_lo,num_hi,den\nx,s,0,1,1\ny,s,0,5,3\n"
        with pytest.raises(ValueError, match="line 3"):
            read_table_csv(text)

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            read_table_csv("")

    def test_missing_cell(self):
        text = "subject,stratum,num_lo,num_hi,den\nx,s1,0,1,1\ny,s1,0,1,3\nx,s2,0,0,2\n"
        with pytest.raises(ValueError, match="y/s2"):
            read_table_csv(text)

    def test_third_subject(self):
        text = "subject,stratum,num_lo,num_hi,den\nx,s,0,1,1\ny,s,0,1,3\nz,s,0,0,2\n"
        with pytest.raises(ValueError, match="line 4"):
            read_table_csv(text)

    def test_report_round_trip(self, table1):
        report = detect_inversions(table1)
        text = write_report_csv(report)
        assert read_report_csv(text, table1) == report.scenarios
        assert text.splitlines()[0].startswith("scenario,num:Lisa:Week 1,num:Lisa:Week 2")
