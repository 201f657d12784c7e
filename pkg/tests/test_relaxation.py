import numpy as np
import pytest

from efsolver.errors import EqualitiesInfeasible
from efsolver.intervals import Interval
from efsolver.relaxation import (IntervalLinearSystem, LPStatus,
                                 adversarial_row_value, residual_vector,
                                 rohn_transform, solve_feasibility,
                                 solve_equalities)

from conftest import grid_min_violation, random_interval_system


def one_row(c1, c2, q):
    sys = IntervalLinearSystem()
    sys.add_row(0, (Interval(*c1), Interval(*c2)), Interval(*q))
    return sys


def test_endpoint_transform_of_straddling_row():
    lp = rohn_transform(one_row((-1, 3), (-3, 1), (-2, -2)))
    # LP columns carry (3, 1) for x1 and (1, 3) for x2
    assert lp.p_hi.tolist() == [[3.0, 1.0]]
    assert (-lp.p_lo).tolist() == [[1.0, 3.0]]
    assert lp.b.tolist() == [-2.0]
    assert lp.col_map == ((0, "+"), (1, "+"), (0, "-"), (1, "-"))


def test_transform_point_intervals():
    sys = IntervalLinearSystem()
    sys.add_row(0, (Interval(2, 2),), Interval(5, 5))
    lp = rohn_transform(sys)
    assert lp.p_hi.tolist() == [[2.0]] and lp.p_lo.tolist() == [[2.0]]
    assert lp.b.tolist() == [5.0]


def test_rhs_takes_lower_endpoint():
    sys = IntervalLinearSystem()
    sys.add_row(0, (Interval(0, 1),), Interval(-3, 7))
    assert rohn_transform(sys).b.tolist() == [-3.0]


def test_motivating_row_residual_two():
    lp = rohn_transform(one_row((-1, 3), (-3, 1), (-2, -2)))
    sol = solve_feasibility(lp)
    assert sol.rho == pytest.approx(2.0, abs=1e-7)
    assert np.abs(sol.x1).max() <= 1e-7 and np.abs(sol.x2).max() <= 1e-7
    assert residual_vector(lp, sol) == pytest.approx([2.0], abs=1e-7)


def test_shrunk_row_becomes_solvable():
    sol = solve_feasibility(rohn_transform(one_row((2, 3), (-3, 1), (-2, -2))))
    assert sol.rho <= 0
    # the certifying point satisfies the row at its adversarial endpoints
    x = sol.x
    assert adversarial_row_value((Interval(2, 3), Interval(-3, 1)), x) <= -2 + 1e-9


def test_unbounded_direction_reported():
    sys = IntervalLinearSystem()
    sys.add_row(0, (Interval(1, 2),), Interval.point(5.0))
    sol = solve_feasibility(rohn_transform(sys))
    assert sol.status is LPStatus.UNBOUNDED
    assert sol.rho <= 0


def test_no_rows_with_equality():
    sys = IntervalLinearSystem()
    lp = rohn_transform(sys, np.array([[1.0]]), np.array([1.0]))
    sol = solve_feasibility(lp)
    assert sol.rho == 0.0
    assert (sol.x1 - sol.x2)[0] == pytest.approx(1.0, abs=1e-9)


def test_equalities_infeasible_raises():
    sys = IntervalLinearSystem()
    sys.add_row(0, (Interval(0, 1),), Interval.point(1.0))
    lp = rohn_transform(sys, np.array([[1.0], [1.0]]), np.array([1.0, 2.0]))
    with pytest.raises(EqualitiesInfeasible):
        solve_feasibility(lp)


def test_equality_carried_exactly():
    # x1 pinned to 1 forces rho = p_hi - b even though x = 0 would be better
    sys = IntervalLinearSystem()
    sys.add_row(0, (Interval(-1, 3),), Interval.point(-2.0))
    lp = rohn_transform(sys, np.array([[1.0]]), np.array([1.0]))
    sol = solve_feasibility(lp)
    assert (sol.x1 - sol.x2)[0] == pytest.approx(1.0, abs=1e-9)
    assert sol.rho == pytest.approx(5.0, abs=1e-7)


def test_identical_rows_equal_residuals():
    sys = IntervalLinearSystem()
    for i in range(2):
        sys.add_row(i, (Interval(-1, 3), Interval(-3, 1)), Interval.point(-2.0))
    lp = rohn_transform(sys)
    sol = solve_feasibility(lp)
    d = residual_vector(lp, sol)
    assert d[0] == pytest.approx(d[1], abs=1e-9)


def test_residual_max_equals_rho():
    rng = np.random.default_rng(11)
    for _ in range(40):
        sys = random_interval_system(rng)
        lp = rohn_transform(sys)
        sol = solve_feasibility(lp)
        d = residual_vector(lp, sol)
        assert d.max() == pytest.approx(sol.rho, abs=1e-7)
        if sol.rho <= 0:
            assert (d <= 1e-9).all()


def test_complementarity_at_optimum():
    # with strictly positive widths, x1_j and x2_j are never both nonzero
    rng = np.random.default_rng(23)
    checked = 0
    while checked < 60:
        sys = random_interval_system(rng, width_min=0.1)
        sol = solve_feasibility(rohn_transform(sys))
        if sol.status is not LPStatus.OPTIMAL:
            continue
        assert np.minimum(sol.x1, sol.x2).max() <= 1e-7
        checked += 1


def test_solvability_certificate_sound():
    rng = np.random.default_rng(31)
    found = 0
    while found < 25:
        sys = random_interval_system(rng)
        lp = rohn_transform(sys)
        sol = solve_feasibility(lp)
        if sol.rho > 0:
            continue
        found += 1
        for row in sys.rows:
            assert adversarial_row_value(row.coeffs, sol.x) <= row.rhs.lo + 1e-7


def test_grid_oracle_agreement_small():
    rng = np.random.default_rng(47)
    agreements = 0
    while agreements < 15:
        sys = random_interval_system(rng, r=int(rng.integers(1, 3)))
        sol = solve_feasibility(rohn_transform(sys))
        if abs(sol.rho) <= 1e-3:
            continue
        oracle = grid_min_violation(sys)
        if abs(oracle) <= 1e-3:
            continue
        assert (sol.rho <= 0) == (oracle <= 0)
        agreements += 1


def test_monotone_under_interval_shrink():
    rng = np.random.default_rng(53)
    for _ in range(25):
        sys = random_interval_system(rng)
        base = solve_feasibility(rohn_transform(sys)).rho
        shrunk = IntervalLinearSystem()
        for row in sys.rows:
            tighter = tuple(
                Interval(iv.lo + 0.25 * rng.random() * iv.width,
                         iv.hi - 0.25 * rng.random() * iv.width)
                for iv in row.coeffs)
            shrunk.add_row(row.branch_id, tighter, row.rhs)
        assert solve_feasibility(rohn_transform(shrunk)).rho <= base + 1e-7


def test_solve_equalities_helper():
    x = solve_equalities(np.array([[1.0, 1.0]]), np.array([3.0]), 2)
    assert x.sum() == pytest.approx(3.0, abs=1e-9)
    with pytest.raises(EqualitiesInfeasible):
        solve_equalities(np.array([[1.0], [1.0]]), np.array([0.0, 1.0]), 1)
