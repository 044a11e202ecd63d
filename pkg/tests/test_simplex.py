"""LP solver checks: hand cases, KKT certificates, and a scipy cross-check
on randomized bounded problems."""

import numpy as np
import pytest
import scipy.optimize

from batplace.simplex import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    SimplexResult,
    solve_lp,
)

INF = np.inf


def _lp(c, a, b, lo, up):
    return LinearProgram(np.array(c, float), np.array(a, float).reshape(len(b), len(c)),
                         np.array(b, float), np.array(lo, float), np.array(up, float))


def test_min_x_above_three():
    res = solve_lp(_lp([1.0], np.zeros((0, 1)), [], [3.0], [INF]))
    assert res.status == OPTIMAL
    assert res.x[0] == pytest.approx(3.0, abs=1e-12)
    assert res.objective == pytest.approx(3.0, abs=1e-12)


def test_max_x_below_five():
    res = solve_lp(_lp([-1.0], np.zeros((0, 1)), [], [0.0], [5.0]))
    assert res.status == OPTIMAL
    assert res.x[0] == pytest.approx(5.0, abs=1e-12)
    assert res.objective == pytest.approx(-5.0, abs=1e-12)


def test_contradictory_bounds_infeasible():
    res = solve_lp(_lp([1.0], np.zeros((0, 1)), [], [0.0], [-1.0]))
    assert res.status == INFEASIBLE


def test_unbounded_below():
    res = solve_lp(_lp([-1.0], np.zeros((0, 1)), [], [0.0], [INF]))
    assert res.status == UNBOUNDED


def test_simple_equality():
    # min x + y  s.t. x + y = 2, 0 <= x,y <= 5
    res = solve_lp(_lp([1.0, 1.0], [[1.0, 1.0]], [2.0], [0, 0], [5, 5]))
    assert res.status == OPTIMAL
    assert res.objective == pytest.approx(2.0, abs=1e-10)
    # Dual of the single row must price one extra unit of rhs at 1.
    assert res.duals[0] == pytest.approx(1.0, abs=1e-9)


def test_infeasible_equality():
    res = solve_lp(_lp([1.0, 1.0], [[1.0, 1.0]], [20.0], [0, 0], [5, 5]))
    assert res.status == INFEASIBLE


def test_free_variable():
    # min y  s.t. y - x = 1, x in [0, 2], y free
    res = solve_lp(_lp([0.0, 1.0], [[-1.0, 1.0]], [1.0], [0.0, -INF], [2.0, INF]))
    assert res.status == OPTIMAL
    assert res.objective == pytest.approx(1.0, abs=1e-10)


def test_crash_basis_used():
    # With a valid crash basis, the solve should need no phase 1.
    lp = _lp([1.0, 2.0], [[1.0, 1.0]], [2.0], [0, 0], [5, 5])
    cold = solve_lp(lp)
    warm = solve_lp(lp, basis=np.array([0]))
    assert cold.status == warm.status == OPTIMAL
    assert warm.objective == cold.objective == pytest.approx(2.0, abs=1e-10)
    assert warm.iterations <= cold.iterations


def test_determinism_bit_identical():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(6, 14))
    b = a @ rng.uniform(0.2, 0.8, size=14)
    lp = _lp(rng.normal(size=14), a, b, np.zeros(14), np.ones(14))
    r1 = solve_lp(lp)
    r2 = solve_lp(lp)
    assert r1.status == r2.status == OPTIMAL
    assert r1.objective == r2.objective  # bit identical
    assert np.array_equal(r1.x, r2.x)


def _assert_kkt(lp: LinearProgram, res: SimplexResult, tol=1e-8):
    x, y, rc = res.x, res.duals, res.reduced_costs
    assert np.max(np.abs(lp.a_eq @ x - lp.b_eq)) <= tol if lp.row_count else True
    assert np.all(x >= lp.lower - tol) and np.all(x <= lp.upper + tol)
    # rc must agree with c - A'y and satisfy sign conditions at the bounds.
    rc_check = lp.c - lp.a_eq.T @ y if lp.row_count else lp.c
    assert np.max(np.abs(rc - rc_check)) <= 1e-7
    at_lo = np.abs(x - lp.lower) <= 1e-7
    at_up = np.abs(x - lp.upper) <= 1e-7
    interior = ~at_lo & ~at_up
    assert np.all(rc[interior] <= 1e-7) and np.all(rc[interior] >= -1e-7)
    assert np.all(rc[at_lo & ~at_up] >= -1e-7)
    assert np.all(rc[at_up & ~at_lo] <= 1e-7)
    # Strong duality: c'x == y'b + bound contributions.
    bound_term = np.where(rc > 0, rc * lp.lower, rc * lp.upper)
    bound_term = np.where(np.abs(rc) <= 1e-12, 0.0, bound_term)
    dual_obj = (y @ lp.b_eq if lp.row_count else 0.0) + bound_term.sum()
    assert res.objective == pytest.approx(dual_obj, abs=1e-6)


def test_random_lps_match_scipy():
    rng = np.random.default_rng(2024)
    solved = 0
    for trial in range(40):
        m = rng.integers(1, 7)
        n = m + rng.integers(1, 9)
        a = rng.normal(size=(m, n))
        x_feas = rng.uniform(0.0, 1.0, size=n)
        b = a @ x_feas
        c = rng.normal(size=n)
        lo = np.zeros(n)
        up = np.full(n, rng.uniform(1.0, 3.0))
        lp = _lp(c, a, b, lo, up)
        res = solve_lp(lp)
        ref = scipy.optimize.linprog(c, A_eq=a, b_eq=b, bounds=list(zip(lo, up)),
                                     method="highs")
        assert res.status == OPTIMAL
        assert ref.status == 0
        assert res.objective == pytest.approx(ref.fun, abs=1e-7)
        _assert_kkt(lp, res)
        solved += 1
    assert solved == 40


def test_random_lps_with_free_vars_match_scipy():
    rng = np.random.default_rng(99)
    for trial in range(25):
        m = rng.integers(1, 6)
        n = m + rng.integers(2, 8)
        a = rng.normal(size=(m, n))
        b = a @ rng.uniform(-1.0, 1.0, size=n)
        c = rng.normal(size=n)
        lo = np.where(rng.random(n) < 0.3, -np.inf, -rng.uniform(0.5, 2.0, n))
        up = np.where(rng.random(n) < 0.3, np.inf, rng.uniform(0.5, 2.0, n))
        free = ~np.isfinite(lo) & ~np.isfinite(up)
        # Keep the problem bounded by giving free variables a positive-cost pull.
        c = np.where(free, np.abs(c) + 0.1, c)
        lp = _lp(c, a, b, lo, up)
        res = solve_lp(lp)
        ref = scipy.optimize.linprog(
            c, A_eq=a, b_eq=b,
            bounds=[(None if not np.isfinite(l) else l,
                     None if not np.isfinite(u) else u) for l, u in zip(lo, up)],
            method="highs")
        if ref.status == 2:
            assert res.status == INFEASIBLE
            continue
        if ref.status == 3:
            assert res.status == UNBOUNDED
            continue
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(ref.fun, abs=1e-7)
        _assert_kkt(lp, res)


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        LinearProgram(np.ones(3), np.ones((2, 2)), np.ones(2), np.zeros(3), np.ones(3))
    with pytest.raises(ValueError):
        LinearProgram(np.ones(2), np.ones((2, 2)), np.ones(3), np.zeros(2), np.ones(2))
