import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cauchycomp.metric import (
    DescriptorError,
    check_isometry,
    IsometryMap,
    parse_rational,
    rational_arith,
    render_rational,
    verify_metric_axioms,
)
from cauchycomp.spaces import CORRUPTED_TABLE, SHIPPED_SPACES, FiniteSpace, make_space


def test_add_thirds_and_sixths():
    assert rational_arith(Fraction(1, 3), Fraction(1, 6), "add") == Fraction(1, 2)


def test_cmp_uses_lowest_terms():
    assert rational_arith(parse_rational("2/4"), parse_rational("1/2"), "cmp") == 0
    assert render_rational(parse_rational("2/4")) == "1/2"


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        rational_arith(Fraction(1), Fraction(0), "div")


@pytest.mark.parametrize("op,expected", [
    ("sub", Fraction(1, 6)), ("mul", Fraction(1, 18)), ("div", Fraction(2)),
])
def test_remaining_ops(op, expected):
    assert rational_arith(Fraction(1, 3), Fraction(1, 6), op) == expected


def test_unknown_op():
    with pytest.raises(ValueError):
        rational_arith(1, 2, "pow")


@pytest.mark.parametrize("bad", ["1.5", "x/2", "3/0", 1.5, None, True])
def test_parse_rejects_inexact_or_garbage(bad):
    with pytest.raises(DescriptorError):
        parse_rational(bad)


def test_render_always_has_denominator():
    assert render_rational(Fraction(3)) == "3/1"
    assert render_rational(Fraction(-6, 4)) == "-3/2"


@given(st.fractions())
def test_render_parse_round_trip(q):
    assert parse_rational(render_rational(q)) == q


def test_rationals_abs_axioms_pass():
    report = verify_metric_axioms(make_space({"kind": "rationals_abs"}), seed=0, n_samples=1000)
    assert report.passed
    assert set(report.checks) == {"zero_self", "nonnegativity", "symmetry", "triangle"}


def test_padic_axioms_include_ultrametric():
    report = verify_metric_axioms(make_space({"kind": "rationals_padic", "p": 2}), 0, 1000)
    assert report.passed
    assert report["ultrametric"].passed


def test_abs_is_not_ultrametric_on_samples():
    # sanity check that the ultrametric test would bite: |0-2| > max(|0-1|, |1-2|)
    sp = make_space({"kind": "rationals_abs"})
    assert sp.dist(Fraction(0), Fraction(2)) > max(sp.dist(Fraction(0), Fraction(1)),
                                                  sp.dist(Fraction(1), Fraction(2)))


def test_corrupted_table_triangle_witness():
    sp = make_space(CORRUPTED_TABLE, validate=False)
    report = verify_metric_axioms(sp)
    assert not report.passed
    assert report.failures() == ["triangle"]
    assert report["triangle"].witness == ["a", "b", "c"]
    assert report.to_dict()["triangle"] == {"status": "fail", "witness": ["a", "b", "c"]}


def test_corrupted_table_rejected_when_validating():
    with pytest.raises(DescriptorError, match="triangle"):
        make_space(CORRUPTED_TABLE)


def test_finite_indiscernibles_checked_exhaustively():
    sp = FiniteSpace(["a", "b"], [[0, 0], [0, 0]], validate=False)
    report = verify_metric_axioms(sp)
    assert report["indiscernibles"].witness == ["a", "b"]


def test_shipped_finite_tables_pass():
    for name in ("finite_path3", "finite_ultra4"):
        assert verify_metric_axioms(make_space(SHIPPED_SPACES[name])).passed


def test_report_serializes_to_json():
    report = verify_metric_axioms(make_space({"kind": "rationals_abs"}), 1, 10)
    assert json.loads(json.dumps(report.to_dict()))["triangle"] == {"status": "pass"}


def test_too_few_samples():
    with pytest.raises(ValueError):
        verify_metric_axioms(make_space({"kind": "rationals_abs"}), 0, 2)


def test_check_isometry_flags_scaling():
    sp = make_space({"kind": "rationals_abs"})
    double = IsometryMap(sp, sp, lambda x: 2 * x, "double")
    report = check_isometry(double, [Fraction(0), Fraction(1)], 0)
    assert not report.passed
    assert check_isometry(IsometryMap(sp, sp, lambda x: x + 7), sp.sample(0, 20), 0).passed
