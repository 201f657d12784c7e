"""Residual-driven splitting heuristics.

Three decisions are made when the LP relaxation reports rho > 0:

* which branch box to split: the row with the largest residual
  (split-worst), every row with positive residual (split-all), or, for the
  classical round-robin baseline, simply the oldest live box in rotation
  (no residual information used at all);

* which interval coefficient of that row to improve: the score
  width(p_j) * (max(x1_j, x2_j) + epsilon) estimates how much shrinking
  column j moves the residual.  The epsilon term keeps columns whose LP
  value happens to be zero from being starved: with epsilon = 0 the score
  degenerates to 0 there and the argmax can stall on a useless column
  forever;

* which box variable to split for that coefficient expression: trial
  evaluation of both midpoint children, scoring each variable by the best
  achievable movement of the targeted bound (upper bound for sign '+',
  lower for '-'), plus an aging credit kappa * width * age that guarantees
  every dimension is picked eventually (fairness, hence convergence).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AllDimensionsDegenerate, NoPositiveResidual
from .expr import Expr, eval_on_box
from .intervals import Box, Interval
from .relaxation import FeasibilityLP, IntervalLinearSystem, LPSolution

RHS_COEFFICIENT = -1  # SplitTarget.coefficient marker: improve the right-hand side


class Strategy(enum.Enum):
    ROUND_ROBIN = "round-robin"
    SPLIT_WORST = "split-worst"
    SPLIT_ALL = "split-all"

    @classmethod
    def from_name(cls, name: str) -> "Strategy":
        for s in cls:
            if s.value == name:
                return s
        raise ValueError(f"unknown strategy {name!r}")


@dataclass
class HeuristicConfig:
    """Tuning knobs for target selection.

    epsilon > 0 is required for the convergence guarantee; epsilon = 0 is
    accepted to allow studying the degenerate behaviour.  aging_kappa = 0
    gives the pure greedy variable choice.
    """

    epsilon: float = 1e-3
    aging_kappa: float = 0.1
    strategy: Strategy = Strategy.SPLIT_ALL

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.aging_kappa < 0:
            raise ValueError("aging_kappa must be >= 0")


@dataclass
class SplitTarget:
    """A suggestion to split one branch box.

    coefficient is an x index, RHS_COEFFICIENT for the right-hand side, or
    None when the variable is chosen without coefficient information
    (round-robin).  sign '+' targets the upper bound of the coefficient
    enclosure, '-' the lower bound.  variable is filled in by the caller.
    """

    branch_id: int
    coefficient: int | None
    sign: str | None
    variable: int | None = None


def coeff_score(p: Interval, x1j: float, x2j: float, epsilon: float) -> float:
    """width(p) * (max(x1, x2) + epsilon): expected residual improvement."""
    return p.width * (max(x1j, x2j) + epsilon)


def select_targets(sys: IntervalLinearSystem, lp: FeasibilityLP,
                   sol: LPSolution, residual: np.ndarray,
                   cfg: HeuristicConfig,
                   allow_nonpositive: bool = False) -> list[SplitTarget]:
    """Pick rows and coefficients to improve, per the configured strategy.

    Split-all returns one target per positive-residual row.  The
    single-box strategies return the full list of improvable rows in
    preference order (worst residual first; oldest box first for the
    round-robin baseline): the caller splits the first target whose box
    can still be split and ignores the rest.

    Requires rho > 0 (there is something to improve) unless
    allow_nonpositive is set (used for numerically marginal rho).  Rows
    whose intervals all have zero width cannot be improved by splitting
    and are skipped.
    """
    if sol.rho <= 0 and not allow_nonpositive:
        raise NoPositiveResidual(f"rho = {sol.rho} certifies solvability")

    def row_target(i: int) -> SplitTarget | None:
        row = sys.rows[i]
        widths = np.array([p.width for p in row.coeffs])
        if (widths > 0).any():
            if cfg.strategy is Strategy.ROUND_ROBIN:
                return SplitTarget(row.branch_id, None, None)
            scores = np.array([coeff_score(p, sol.x1[j], sol.x2[j], cfg.epsilon)
                               for j, p in enumerate(row.coeffs)])
            # zero-width coefficients cannot be tightened; never pick them
            j = int(np.argmax(np.where(widths > 0, scores, -np.inf)))
            sign = "+" if sol.x1[j] - sol.x2[j] >= 0 else "-"
            return SplitTarget(row.branch_id, j, sign)
        if row.rhs.width > 0:
            # only the right-hand side enclosure can be tightened; raising
            # its lower bound weakens the worst case
            if cfg.strategy is Strategy.ROUND_ROBIN:
                return SplitTarget(row.branch_id, None, None)
            return SplitTarget(row.branch_id, RHS_COEFFICIENT, "-")
        return None  # fully degenerate row: splitting cannot change it

    if cfg.strategy is Strategy.ROUND_ROBIN:
        # classical baseline: rotate through the branches (oldest live box
        # first), ignoring the residual information entirely
        order = sorted(range(len(sys.rows)), key=lambda i: sys.rows[i].branch_id)
    else:
        order = sorted(range(len(sys.rows)), key=lambda i: (-residual[i], i))
    if cfg.strategy is Strategy.SPLIT_ALL:
        targets = [t for i in order if residual[i] > 0
                   and (t := row_target(i)) is not None]
        if targets:
            return targets
    return [t for i in order if (t := row_target(i)) is not None]


def splitheur(t: Expr, box: Box, sign: str, ages: Sequence[int],
              kappa: float) -> int:
    """Choose the box dimension whose midpoint split most improves the
    targeted bound of the enclosure of t.

    Improvement of dimension i is the larger bound movement over the two
    children.  An aging credit kappa * width(enclosure) * ages[i] is added
    so starved dimensions win eventually.  Zero-width dimensions are
    excluded; ties go to the lowest dimension index.
    """
    base = eval_on_box(t, box)
    bound = base.hi if sign == "+" else base.lo
    base_width = base.width
    best_i = None
    best_score = -1.0
    for i, iv in enumerate(box.intervals):
        if iv.width <= 0.0 or not (iv.lo < iv.mid < iv.hi):
            continue
        improvement = 0.0
        for child in box.split(i):
            ev = eval_on_box(t, child)
            movement = abs(bound - (ev.hi if sign == "+" else ev.lo))
            improvement = max(improvement, movement)
        score = kappa * base_width * ages[i] + improvement
        if score > best_score:
            best_score = score
            best_i = i
    if best_i is None:
        raise AllDimensionsDegenerate("no splittable dimension in box")
    return best_i


def round_robin_var(box: Box, counter: int) -> int:
    """Cycle through dimensions, skipping zero-width ones."""
    s = len(box)
    for k in range(s):
        i = (counter + k) % s
        iv = box.intervals[i]
        if iv.width > 0.0 and iv.lo < iv.mid < iv.hi:
            return i
    raise AllDimensionsDegenerate("no splittable dimension in box")


class AgeTable:
    """Per (branch, expression) vectors counting, for each box dimension,
    how many variable choices have passed since that dimension was chosen.

    Children of a split inherit the parent's entries.
    """

    def __init__(self):
        self._ages: dict[tuple[int, Expr], np.ndarray] = {}

    def ages(self, branch_id: int, expr: Expr, ndims: int) -> np.ndarray:
        key = (branch_id, expr)
        if key not in self._ages:
            self._ages[key] = np.zeros(ndims, dtype=int)
        return self._ages[key]

    def record_choice(self, branch_id: int, expr: Expr, ndims: int,
                      chosen: int) -> None:
        ages = self.ages(branch_id, expr, ndims)
        ages += 1
        ages[chosen] = 0

    def inherit(self, parent_id: int, child_ids: Sequence[int]) -> None:
        for (bid, expr), vec in list(self._ages.items()):
            if bid == parent_id:
                for cid in child_ids:
                    self._ages[(cid, expr)] = vec.copy()
        for key in [k for k in self._ages if k[0] == parent_id]:
            del self._ages[key]
