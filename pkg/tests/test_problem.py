import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robustpareto import (
    EvaluationError,
    Problem,
    UncertainParam,
    VariableKind,
    VariableSpec,
    evaluate,
    make_explicit_scenarios,
    make_oat_scenarios,
    toy,
    validate_problem,
    with_variable_kinds,
)


def test_validate_well_formed_toy():
    assert validate_problem(toy()) == []


def test_validate_degenerate_bounds():
    p = Problem(
        name="bad",
        variables=(VariableSpec("t", VariableKind.HNV, 1.0, 1.0),),
        uncertain=(),
        objectives=(lambda x, y, u: 0.0, lambda x, y, u: 0.0),
    )
    assert validate_problem(p) == ["variable t: lower < upper violated"]


def test_validate_single_objective():
    p = Problem(
        name="bad",
        variables=(VariableSpec("t", VariableKind.HNV, 0.0, 1.0),),
        uncertain=(),
        objectives=(lambda x, y, u: 0.0,),
    )
    assert validate_problem(p) == ["M ≥ 2 required"]


def test_validate_duplicate_names_and_bad_nominal():
    p = Problem(
        name="bad",
        variables=(
            VariableSpec("t", VariableKind.HNV, 0.0, 1.0),
            VariableSpec("t", VariableKind.WSV, 0.0, 1.0),
        ),
        uncertain=(UncertainParam("u", 2.0, -1.0, 1.0),),
        objectives=(lambda x, y, u: 0.0, lambda x, y, u: 0.0),
    )
    messages = validate_problem(p)
    assert "duplicate name: t" in messages
    assert "uncertain parameter u: lower ≤ nominal ≤ upper violated" in messages


class TestOatScenarios:
    def test_single_param(self):
        ss = make_oat_scenarios([UncertainParam("u", 0.0, -0.1, 0.1)])
        values = [s.values["u"] for s in ss]
        assert values == [0.0, -0.1, 0.1]
        assert [s.id for s in ss] == [0, 1, 2]
        assert ss.nominal.id == 0

    def test_column_ranges(self):
        params = [
            UncertainParam("l", 1.0, 0.6, 1.2),
            UncertainParam("w_MF", 0.8, 0.78, 0.82),
            UncertainParam("F12", 1.0, 0.9, 1.1),
        ]
        ss = make_oat_scenarios(params)
        assert len(ss) == 7
        s1 = ss.scenarios[1]
        assert s1.values == {"l": 0.6, "w_MF": 0.8, "F12": 1.0}

    def test_zero_params(self):
        ss = make_oat_scenarios([])
        assert len(ss) == 1
        assert ss.nominal.values == {}

    @settings(max_examples=50, derandomize=True, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.floats(-10, 10, allow_nan=False),
                st.floats(0.0, 5.0),
                st.floats(0.0, 5.0),
            ),
            max_size=6,
        )
    )
    def test_structure_property(self, triples):
        params = [
            UncertainParam(f"p{i}", nominal=c, lower=c - lo, upper=c + hi)
            for i, (c, lo, hi) in enumerate(triples)
        ]
        ss = make_oat_scenarios(params)
        assert len(ss) == 2 * len(params) + 1
        assert sum(s.is_nominal for s in ss) == 1
        for s in ss:
            for q in params:
                assert q.lower <= s.values[q.name] <= q.upper


class TestExplicitScenarios:
    PARAMS = [UncertainParam("u", 0.0, -0.1, 0.1)]

    def test_prepends_nominal(self):
        ss = make_explicit_scenarios(self.PARAMS, [{"u": 0.05}])
        assert [s.values["u"] for s in ss] == [0.0, 0.05]
        assert ss.nominal.id == 0

    def test_deduplicates_nominal(self):
        ss = make_explicit_scenarios(self.PARAMS, [{"u": 0.0}])
        assert [s.values["u"] for s in ss] == [0.0]

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="u out of range in row 0"):
            make_explicit_scenarios(self.PARAMS, [{"u": 0.5}])

    def test_missing_and_unknown(self):
        with pytest.raises(ValueError, match="u missing in row 0"):
            make_explicit_scenarios(self.PARAMS, [{}])
        with pytest.raises(ValueError, match="unknown parameter v in row 1"):
            make_explicit_scenarios(self.PARAMS, [{"u": 0.0}, {"u": 0.0, "v": 1.0}])


class TestEvaluate:
    def test_toy_values(self, toy_hnv, toy_oat):
        nominal = toy_oat.nominal
        ev = evaluate(toy_hnv, [0.0], [], nominal)
        np.testing.assert_allclose(ev.objectives, [0.0, 1.0], atol=0)
        ev = evaluate(toy_hnv, [np.pi / 4], [], nominal)
        np.testing.assert_allclose(ev.objectives, [1 - np.sqrt(2) / 2] * 2, rtol=1e-15)
        up = toy_oat.scenarios[2]
        ev = evaluate(toy_hnv, [np.pi / 4], [], up)
        np.testing.assert_allclose(ev.objectives, [1 - np.sqrt(2) / 2 + 0.1, 1 - np.sqrt(2) / 2 - 0.1], rtol=1e-15)

    def test_deterministic_bitwise(self, toy_hnv, toy_oat):
        a = evaluate(toy_hnv, [0.7], [], toy_oat.nominal)
        b = evaluate(toy_hnv, [0.7], [], toy_oat.nominal)
        assert np.array_equal(a.objectives, b.objectives)

    def test_non_finite_raises(self, toy_oat):
        p = Problem(
            name="bad",
            variables=(VariableSpec("t", VariableKind.HNV, 0.0, 1.0),),
            uncertain=(UncertainParam("u", 0.0, -0.1, 0.1),),
            objectives=(lambda x, y, u: np.inf, lambda x, y, u: 0.0),
        )
        with pytest.raises(EvaluationError, match="objective 0"):
            evaluate(p, [0.5], [], toy_oat.nominal)

    def test_outside_box_rejected(self, toy_hnv, toy_oat):
        with pytest.raises(ValueError, match="outside"):
            evaluate(toy_hnv, [3.0], [], toy_oat.nominal)

    def test_max_violation_nonnegative(self, column_problem, column_oat):
        ev = evaluate(column_problem, [40, 6, 1.4, 400, 400], [1.0, 0.21], column_oat.nominal)
        assert ev.max_violation >= 0.0
        assert len(ev.constraint_values) == 6


def test_with_variable_kinds_reclassifies(toy_wsv, toy_oat):
    flipped = with_variable_kinds(toy_wsv, {"t": VariableKind.HNV})
    assert len(flipped.hnv) == 1 and len(flipped.wsv) == 0
    for t in (0.0, 0.4, 1.2):
        a = evaluate(toy_wsv, [], [t], toy_oat.scenarios[1])
        b = evaluate(flipped, [t], [], toy_oat.scenarios[1])
        assert np.array_equal(a.objectives, b.objectives)
