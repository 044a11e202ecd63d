"""Self-contained dense bounded-variable primal simplex.

Problems are stated in equality standard form

    minimize    c'x
    subject to  A x = b,   lo <= x <= up,

where ``lo``/``up`` entries may be ``-inf``/``+inf``. General inequalities
are expected to be modelled by the caller through explicitly bounded
auxiliary variables (slack flows, range helpers), which keeps the solver
core small and the basis handling uniform.

Design notes:
  * Equality rows are rescaled to unit Euclidean norm up front; duals are
    rescaled back on exit, so callers see duals for the original rows.
  * Pricing is Dantzig (most negative reduced cost) with deterministic
    lowest-index tie-breaking; after a run of degenerate steps the solver
    falls back to Bland's rule, which guarantees termination.
  * A caller-supplied starting basis is validated and used when feasible,
    otherwise a standard artificial-variable phase 1 runs first.
  * The tableau is refactorized from scratch periodically and at
    termination, and the KKT conditions are re-verified on the exact
    refactorized quantities; a failed verification surfaces as an explicit
    status, never as a silently wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"
NUMERICAL_FAILURE = "numerical_failure"

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-10
STALL_LIMIT = 120
REFACTOR_EVERY = 400


@dataclass(frozen=True)
class LinearProgram:
    """Minimization LP in equality standard form with variable bounds."""

    c: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, c, a_eq, b_eq, lower, upper):
        c = np.asarray(c, dtype=float)
        a_eq = np.asarray(a_eq, dtype=float)
        b_eq = np.asarray(b_eq, dtype=float)
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        n = c.shape[0]
        if a_eq.ndim != 2 or a_eq.shape[1] != n:
            raise ValueError(f"a_eq must be m x {n}, got {a_eq.shape}")
        if b_eq.shape != (a_eq.shape[0],):
            raise ValueError("b_eq length must match a_eq row count")
        if lower.shape != (n,) or upper.shape != (n,):
            raise ValueError("bounds must match objective length")
        if not np.all(np.isfinite(c)):
            raise ValueError("objective coefficients must be finite")
        for arr in (c, a_eq, b_eq, lower, upper):
            arr.setflags(write=False)
        for name, val in (("c", c), ("a_eq", a_eq), ("b_eq", b_eq),
                          ("lower", lower), ("upper", upper)):
            object.__setattr__(self, name, val)

    @property
    def var_count(self) -> int:
        return self.c.shape[0]

    @property
    def row_count(self) -> int:
        return self.a_eq.shape[0]


@dataclass(frozen=True)
class SimplexResult:
    status: str
    x: np.ndarray | None
    duals: np.ndarray | None
    reduced_costs: np.ndarray | None
    objective: float | None
    iterations: int
    basis: np.ndarray | None = None


class _Tableau:
    """Mutable simplex state over scaled data."""

    def __init__(self, a, b, lo, up, free):
        self.a = a            # m x n, scaled rows
        self.b = b
        self.lo = lo
        self.up = up
        self.free = free      # mask: no finite bound on either side
        self.fixed = (lo == up)
        self.m, self.n = a.shape
        self.basis = np.empty(self.m, dtype=np.int64)
        self.in_basis = np.zeros(self.n, dtype=bool)
        self.at_up = np.zeros(self.n, dtype=bool)
        self.xn = np.zeros(self.n)      # nonbasic resting values
        self.xb = np.zeros(self.m)
        self.tab = np.empty((0, 0))
        self._work = None

    def nonbasic_start(self):
        """Rest every variable at its bound nearest zero (0 for free vars)."""
        xn = np.where(np.isfinite(self.lo), self.lo, 0.0)
        take_up = ~np.isfinite(self.lo) & np.isfinite(self.up)
        xn[take_up] = self.up[take_up]
        self.xn = xn
        self.at_up = take_up.copy()

    def factorize(self, costs):
        """Rebuild tableau, basic values, and reduced costs from the basis."""
        bmat = self.a[:, self.basis]
        self.tab = np.linalg.solve(bmat, self.a)
        rhs = self.b - self.a @ np.where(self.in_basis, 0.0, self.xn)
        self.xb = np.linalg.solve(bmat, rhs)
        y = np.linalg.solve(bmat.T, costs[self.basis])
        rc = costs - y @ self.a
        rc[self.basis] = 0.0
        if self._work is None or self._work.shape != self.tab.shape:
            self._work = np.empty_like(self.tab)
        return rc, y

    def current_x(self):
        x = np.where(self.in_basis, 0.0, self.xn)
        x[self.basis] = self.xb
        return x


def _choose_entering(rc, state, bland):
    """Index and direction (+1/-1) of the entering variable, or (-1, 0)."""
    viol = np.zeros(state.n)
    open_mask = ~state.in_basis & ~state.fixed
    at_lo = open_mask & ~state.at_up & ~state.free
    at_upm = open_mask & state.at_up
    fr = open_mask & state.free
    viol[at_lo] = np.maximum(-rc[at_lo], 0.0)
    viol[at_upm] = np.maximum(rc[at_upm], 0.0)
    viol[fr] = np.abs(rc[fr])
    cand = np.nonzero(viol > OPT_TOL)[0]
    if cand.size == 0:
        return -1, 0
    q = int(cand[0]) if bland else int(cand[np.argmax(viol[cand])])
    if state.free[q]:
        direction = 1 if rc[q] < 0 else -1
    else:
        direction = -1 if state.at_up[q] else 1
    return q, direction


def _solve_phase(state: _Tableau, costs, max_iter, allow_unbounded):
    """Run the simplex to optimality for the given cost vector.

    Returns (status, reduced_costs, duals, iterations)."""
    rc, y = state.factorize(costs)
    iters = 0
    stall = 0
    bland = False
    since_refactor = 0

    while True:
        q, s = _choose_entering(rc, state, bland)
        if q < 0:
            # Re-verify on exact quantities before declaring optimality.
            rc, y = state.factorize(costs)
            q, s = _choose_entering(rc, state, bland)
            if q < 0:
                return OPTIMAL, rc, y, iters
        if iters >= max_iter:
            return ITERATION_LIMIT, rc, y, iters
        iters += 1
        since_refactor += 1

        d = state.tab[:, q]
        w = s * d
        lo_b = state.lo[state.basis]
        up_b = state.up[state.basis]
        with np.errstate(divide="ignore", invalid="ignore"):
            lim = np.where(
                w > PIVOT_TOL,
                (state.xb - lo_b) / w,
                np.where(w < -PIVOT_TOL, (up_b - state.xb) / (-w), np.inf),
            )
        lim = np.where(np.isnan(lim), np.inf, lim)
        lim = np.maximum(lim, 0.0)
        t_basic = lim.min() if lim.size else np.inf
        span = state.up[q] - state.lo[q]
        t_own = span if np.isfinite(span) else np.inf

        if t_own <= t_basic:
            if not np.isfinite(t_own):
                if allow_unbounded:
                    return UNBOUNDED, rc, y, iters
                return NUMERICAL_FAILURE, rc, y, iters
            # Bound flip: the entering variable runs to its other bound.
            state.xb -= t_own * w
            state.at_up[q] = ~state.at_up[q]
            state.xn[q] = state.up[q] if state.at_up[q] else state.lo[q]
            stall = stall + 1 if t_own <= FEAS_TOL else 0
        else:
            ties = np.nonzero(lim <= t_basic + 1e-10)[0]
            r = int(ties[np.argmax(np.abs(w[ties]))])
            if bland:
                r = int(ties[np.argmin(state.basis[ties])])
            t = lim[r]
            leaving = int(state.basis[r])
            hits_upper = w[r] < 0
            state.xb -= t * w
            state.in_basis[leaving] = False
            state.at_up[leaving] = hits_upper
            state.xn[leaving] = state.up[leaving] if hits_upper else state.lo[leaving]
            entering_val = (state.xn[q] if not state.free[q] else 0.0) + s * t
            state.basis[r] = q
            state.in_basis[q] = True
            state.xb[r] = entering_val

            piv = state.tab[r, q]
            if abs(piv) < 1e-12:
                rc, y = state.factorize(costs)
                since_refactor = 0
                continue
            row = state.tab[r]
            row /= piv
            col = state.tab[:, q].copy()
            col[r] = 0.0
            np.multiply(col[:, None], row[None, :], out=state._work)
            np.subtract(state.tab, state._work, out=state.tab)
            state.tab[r] = row
            rc = rc - rc[q] * row
            rc[q] = 0.0
            stall = stall + 1 if t <= FEAS_TOL else 0

        if stall > STALL_LIMIT:
            bland = True
        elif stall == 0:
            bland = False
        if since_refactor >= REFACTOR_EVERY:
            rc, y = state.factorize(costs)
            since_refactor = 0


def _feasibility_gap(state: _Tableau) -> float:
    lo_b = state.lo[state.basis]
    up_b = state.up[state.basis]
    gap = np.maximum(lo_b - state.xb, state.xb - up_b)
    return float(gap.max()) if gap.size else 0.0


def solve_lp(lp: LinearProgram, basis=None, max_iter: int | None = None) -> SimplexResult:
    """Solve an LP to optimality.

    ``basis`` may name a candidate starting basis (column indices, one per
    row); it is used only when it is invertible and its basic solution is
    within bounds, otherwise a phase-1 start is performed. Results are
    deterministic for identical inputs.
    """
    n, m = lp.var_count, lp.row_count
    if max_iter is None:
        max_iter = 20_000 + 40 * (m + n)

    if np.any(lp.lower > lp.upper):
        return SimplexResult(INFEASIBLE, None, None, None, None, 0)
    if m == 0:
        return _solve_unconstrained(lp)

    scale = np.linalg.norm(lp.a_eq, axis=1)
    scale[scale == 0] = 1.0
    zero_rows = np.nonzero(np.all(lp.a_eq == 0, axis=1))[0]
    for r in zero_rows:
        if abs(lp.b_eq[r]) > FEAS_TOL:
            return SimplexResult(INFEASIBLE, None, None, None, None, 0)
    a = lp.a_eq / scale[:, None]
    b = lp.b_eq / scale
    lo = lp.lower.copy()
    up = lp.upper.copy()
    free = ~np.isfinite(lo) & ~np.isfinite(up)

    state = _Tableau(a, b, lo, up, free)
    state.nonbasic_start()

    started = False
    if basis is not None:
        basis = np.asarray(basis, dtype=np.int64)
        if basis.shape == (m,) and len(np.unique(basis)) == m:
            state.basis = basis.copy()
            state.in_basis[:] = False
            state.in_basis[basis] = True
            try:
                state.factorize(lp.c)
            except np.linalg.LinAlgError:
                state.in_basis[:] = False
            else:
                if _feasibility_gap(state) <= FEAS_TOL:
                    started = True
                else:
                    state.in_basis[:] = False

    total_iters = 0
    if not started:
        status, iters = _phase_one(state, lp, max_iter)
        total_iters += iters
        if status != OPTIMAL:
            return SimplexResult(status, None, None, None, None, total_iters)

    # Phase 1 may leave pinned artificial columns padded onto the state;
    # they carry zero cost and a [0, 0] range, so phase 2 ignores them.
    costs = lp.c
    if state.n > n:
        costs = np.concatenate([lp.c, np.zeros(state.n - n)])
    status, rc, y, iters = _solve_phase(state, costs, max_iter - total_iters, True)
    total_iters += iters
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED, None, None, None, None, total_iters)
    if status != OPTIMAL:
        return SimplexResult(status, None, None, None, None, total_iters)

    x = state.current_x()[:n]
    if _feasibility_gap(state) > 1e-7:
        return SimplexResult(NUMERICAL_FAILURE, None, None, None, None, total_iters)
    duals = y / scale
    objective = float(lp.c @ x)
    out_basis = state.basis.copy() if state.basis.max() < n else None
    return SimplexResult(OPTIMAL, x, duals, rc[:n], objective, total_iters,
                         basis=out_basis)


def _phase_one(state: _Tableau, lp: LinearProgram, max_iter: int):
    """Artificial-variable phase 1 on the scaled data held by ``state``.

    Pads the state with one artificial column per row, minimizes their sum,
    then shrinks the state back to the structural columns (artificials that
    remain basic at zero value get pinned to a [0, 0] range)."""
    m, n = state.m, state.n
    resid = state.b - state.a @ state.xn
    sign = np.where(resid >= 0, 1.0, -1.0)

    a_ext = np.hstack([state.a, np.diag(sign)])
    lo_ext = np.concatenate([state.lo, np.zeros(m)])
    up_ext = np.concatenate([state.up, np.full(m, np.inf)])
    free_ext = np.concatenate([state.free, np.zeros(m, dtype=bool)])

    ext = _Tableau(a_ext, state.b, lo_ext, up_ext, free_ext)
    ext.xn = np.concatenate([state.xn, np.zeros(m)])
    ext.at_up = np.concatenate([state.at_up, np.zeros(m, dtype=bool)])
    ext.basis = np.arange(n, n + m, dtype=np.int64)
    ext.in_basis[n:] = True

    costs = np.concatenate([np.zeros(n), np.ones(m)])
    status, rc, y, iters = _solve_phase(ext, costs, max_iter, False)
    if status != OPTIMAL:
        return (status if status != UNBOUNDED else NUMERICAL_FAILURE), iters
    infeas = float(costs[ext.basis] @ np.maximum(ext.xb, 0.0))
    if infeas > 1e-8:
        return INFEASIBLE, iters

    # Pin every artificial to [0, 0] so phase 2 can never move one; basic
    # leftovers (redundant rows) simply stay basic at value zero.
    ext.lo[n:] = 0.0
    ext.up[n:] = 0.0
    ext.fixed[n:] = True
    ext.xn[n:] = 0.0

    state.basis = ext.basis.copy()
    state.in_basis = ext.in_basis.copy()
    state.at_up = ext.at_up.copy()
    state.xn = ext.xn.copy()
    state.xb = ext.xb.copy()
    # Swap the padded arrays into the caller state so phase 2 sees them.
    state.a = ext.a
    state.lo = ext.lo
    state.up = ext.up
    state.free = ext.free
    state.fixed = ext.fixed
    state.n = ext.n
    state.tab = ext.tab
    state._work = ext._work
    return OPTIMAL, iters


def _solve_unconstrained(lp: LinearProgram) -> SimplexResult:
    """No equality rows: each variable independently runs to its best bound."""
    x = np.zeros(lp.var_count)
    for j in range(lp.var_count):
        cj, lo, up = lp.c[j], lp.lower[j], lp.upper[j]
        if cj > 0:
            if not np.isfinite(lo):
                return SimplexResult(UNBOUNDED, None, None, None, None, 0)
            x[j] = lo
        elif cj < 0:
            if not np.isfinite(up):
                return SimplexResult(UNBOUNDED, None, None, None, None, 0)
            x[j] = up
        else:
            x[j] = lo if np.isfinite(lo) else (up if np.isfinite(up) else 0.0)
    return SimplexResult(OPTIMAL, x, np.zeros(0), lp.c.copy(), float(lp.c @ x), 0)
