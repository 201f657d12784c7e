"""Interval linear systems and their feasibility-residual linear program.

An interval system P x <= q (entries of P, q are intervals, the inequality
must hold for every matrix in P and every right-hand side in q) is reduced
to an ordinary LP by the classical endpoint substitution (Rohn/Kreslova):
write x = x1 - x2 with x1, x2 >= 0, then the worst case over P is attained
at upper endpoints for x1 and lower endpoints for x2, and the worst case
over q at its lower endpoint:

    Phi(x1, x2) = Pbar x1 - Punder x2 <= q_lo,   x1, x2 >= 0.

Instead of testing feasibility directly we minimise the worst row
violation rho:

    min rho   s.t.  Pbar x1 - Punder x2 - q_lo <= rho * 1,
                    C (x1 - x2) = d,   x1, x2 >= 0.

rho <= 0 certifies solvability; a positive minimum measures the distance
to feasibility and its per-row residuals drive the splitting heuristics.
Equality rows are carried exactly (never relaxed by rho).

The residual LP can be unbounded below (some column improves every row at
once); any point far enough along that ray satisfies the system, so the LP
is re-solved with the floor rho >= -RHO_FLOOR and the achieved residual of
the returned vertex is reported, marked with status UNBOUNDED.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import EqualitiesInfeasible
from .intervals import Interval
from .simplex import SimplexStatus, simplex_solve

RHO_FLOOR = 1.0
RHO_TOL = 1e-9


@dataclass(frozen=True)
class ILSRow:
    branch_id: int
    coeffs: tuple[Interval, ...]
    rhs: Interval


@dataclass
class IntervalLinearSystem:
    rows: list[ILSRow] = field(default_factory=list)

    @property
    def r(self) -> int:
        return len(self.rows[0].coeffs) if self.rows else 0

    def add_row(self, branch_id: int, coeffs, rhs: Interval) -> None:
        coeffs = tuple(coeffs)
        if self.rows and len(coeffs) != self.r:
            raise ValueError("row width mismatch")
        self.rows.append(ILSRow(branch_id, coeffs, rhs))


@dataclass
class FeasibilityLP:
    """Endpoint matrices of the transformed system plus equality block.

    Column j of the LP carries the upper endpoint of interval column j
    (variables x1); column r+j carries the lower endpoint (variables x2).
    `col_map` records that correspondence.
    """

    p_hi: np.ndarray
    p_lo: np.ndarray
    b: np.ndarray
    eq_coeffs: np.ndarray
    eq_rhs: np.ndarray
    branch_ids: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.p_hi.shape[0]

    @property
    def r(self) -> int:
        return self.p_hi.shape[1]

    @property
    def col_map(self) -> tuple[tuple[int, str], ...]:
        r = self.r
        return tuple((j, "+") for j in range(r)) + tuple((j, "-") for j in range(r))


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"


@dataclass
class LPSolution:
    x1: np.ndarray
    x2: np.ndarray
    rho: float
    status: LPStatus = LPStatus.OPTIMAL

    @property
    def x(self) -> np.ndarray:
        return self.x1 - self.x2


def rohn_transform(sys: IntervalLinearSystem,
                   eq_coeffs: np.ndarray | None = None,
                   eq_rhs: np.ndarray | None = None) -> FeasibilityLP:
    """Build the endpoint LP data from an interval system and equalities."""
    n = len(sys.rows)
    r = sys.r if n else (eq_coeffs.shape[1] if eq_coeffs is not None else 0)
    p_hi = np.zeros((n, r))
    p_lo = np.zeros((n, r))
    b = np.zeros(n)
    for i, row in enumerate(sys.rows):
        p_hi[i] = [iv.hi for iv in row.coeffs]
        p_lo[i] = [iv.lo for iv in row.coeffs]
        b[i] = row.rhs.lo
    C = np.zeros((0, r)) if eq_coeffs is None else np.asarray(eq_coeffs, dtype=float)
    d = np.zeros(0) if eq_rhs is None else np.asarray(eq_rhs, dtype=float)
    if C.size and C.shape[1] != r:
        raise ValueError(f"equality block has {C.shape[1]} columns, expected {r}")
    return FeasibilityLP(p_hi, p_lo, b, C, d,
                         tuple(row.branch_id for row in sys.rows))


def solve_feasibility(lp: FeasibilityLP) -> LPSolution:
    """Minimise the worst row violation rho.

    Raises EqualitiesInfeasible when C x = d admits no solution.  With no
    inequality rows the result is any equality-feasible point with rho 0.
    When rho is unbounded below the LP is re-solved with the floor
    rho >= -RHO_FLOOR; the result then carries status UNBOUNDED together
    with the achieved (certifying) residual of the returned point.
    """
    n, r = lp.n, lp.r
    if n == 0:
        x = _equality_point(lp)
        return LPSolution(np.maximum(x, 0.0), np.maximum(-x, 0.0), 0.0)

    sol = _solve_residual_lp(lp, floor=None)
    if sol is not None:
        return sol
    sol = _solve_residual_lp(lp, floor=RHO_FLOOR)
    if sol is None:
        raise RuntimeError("floored residual LP cannot be unbounded")
    return sol


def _solve_residual_lp(lp: FeasibilityLP, floor: float | None) -> LPSolution | None:
    """One residual LP solve; None signals an unbounded objective.

    rho enters as a free variable written as rho = rho' + rho0 with
    rho0 = -min(b), so every inequality right-hand side b + rho0 is
    nonnegative and the slack basis is immediately feasible (phase 1 then
    only works on equality rows).
    """
    n, r = lp.n, lp.r
    rho0 = -float(lp.b.min())
    extra = 0
    if floor is not None:
        rho0 = max(rho0, -floor)
        extra = 1
    nvar = 2 * r + 1
    c = np.zeros(nvar)
    c[-1] = 1.0

    G = np.zeros((n + extra, nvar))
    h = np.zeros(n + extra)
    G[:n, :r] = lp.p_hi
    G[:n, r:2 * r] = -lp.p_lo
    G[:n, -1] = -1.0
    h[:n] = lp.b + rho0
    if floor is not None:
        G[n, -1] = -1.0      # rho >= -floor, in shifted form
        h[n] = floor + rho0

    E = np.zeros((lp.eq_coeffs.shape[0], nvar))
    if E.shape[0]:
        E[:, :r] = lp.eq_coeffs
        E[:, r:2 * r] = -lp.eq_coeffs
    nonneg = [True] * (2 * r) + [False]

    res = simplex_solve(c, G, h, E, lp.eq_rhs, nonneg=nonneg)
    if res.status is SimplexStatus.INFEASIBLE:
        # inequality rows are always satisfiable by a large rho, so only the
        # equality block can be at fault
        raise EqualitiesInfeasible("equality system C x = d is infeasible")
    if res.status is SimplexStatus.UNBOUNDED:
        return None

    x1 = res.x[:r]
    x2 = res.x[r:2 * r]
    rho = float(res.x[-1] + rho0)
    sol = LPSolution(x1, x2, rho)
    if floor is not None:
        # the floor only binds when the true minimum is below it; report the
        # achieved residual of the returned point, which certifies rho <= 0
        sol.rho = float(residual_vector(lp, sol).max())
        sol.status = LPStatus.UNBOUNDED
    return sol


def _equality_point(lp: FeasibilityLP) -> np.ndarray:
    return solve_equalities(lp.eq_coeffs, lp.eq_rhs, lp.r)


def solve_equalities(C: np.ndarray, d: np.ndarray, r: int) -> np.ndarray:
    """Some x with C x = d (phase 1 on the split variables), or raise
    EqualitiesInfeasible.  With no equalities returns the origin."""
    C = np.asarray(C, dtype=float).reshape(-1, r)
    d = np.asarray(d, dtype=float)
    if C.shape[0] == 0:
        return np.zeros(r)
    E = np.hstack([C, -C])
    res = simplex_solve(np.zeros(2 * r), E=E, f=d)
    if res.status is not SimplexStatus.OPTIMAL:
        raise EqualitiesInfeasible("equality system C x = d is infeasible")
    return res.x[:r] - res.x[r:]


def residual_vector(lp: FeasibilityLP, sol: LPSolution) -> np.ndarray:
    """Per-row violations d = Pbar x1 - Punder x2 - b at the LP point."""
    return lp.p_hi @ sol.x1 - lp.p_lo @ sol.x2 - lp.b


def adversarial_row_value(coeffs, x: np.ndarray) -> float:
    """sup over p in the interval coefficients of p . x (worst case per sign)."""
    total = 0.0
    for iv, xj in zip(coeffs, x):
        total += iv.hi * xj if xj >= 0 else iv.lo * xj
    return total
