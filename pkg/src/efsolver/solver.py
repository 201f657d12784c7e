"""Main solve loop and an independent solution verifier.

The loop classifies every live branch on its current box (proved true,
proved false, a linear interval row, or undecided), stops on a proved-false
branch (no x can exist), drops proved-true branches, and otherwise builds
the interval linear system of the remaining rows.  One residual LP both
decides solvability (rho <= 0) and, when infeasible so far, supplies the
residuals that drive target selection.  Chosen boxes are split at the
midpoint of the chosen dimension and the loop repeats until a solution is
certified, infeasibility is proved, or the split/time budget runs out.

The verifier is deliberately independent of the LP pipeline: it
substitutes the numeric solution into each branch formula and proves the
universal claim by interval evaluation with recursive bisection, sampling
box midpoints for counterexamples.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (AllDimensionsDegenerate, EqualitiesInfeasible,
                     InvalidProblem, SplitDegenerate)
from .expr import Add, Const, Expr, Mul, Sub, eval_on_box
from .heuristics import (RHS_COEFFICIENT, AgeTable, HeuristicConfig,
                         Strategy, round_robin_var, select_targets, splitheur)
from .intervals import Box
from .model import (And, Branch, FalseF, Formula, Guard, GuardAtom, Linear,
                    Or, Problem, TrueF, guard_atoms, validate_problem)
from .relaxation import (IntervalLinearSystem, adversarial_row_value,
                         residual_vector, rohn_transform, solve_equalities,
                         solve_feasibility)
from .simplify import (Decision, ProvedFalse, ProvedTrue, Undecided,
                       classify_guard, simplify_branch)

ACCEPT_TOL = 1e-9
EQUALITY_TOL = 1e-7


@dataclass
class SolveConfig:
    heuristic: HeuristicConfig = field(default_factory=HeuristicConfig)
    max_splits: int = 10_000
    time_budget: float = 120.0
    verify: bool = False
    verify_depth: int = 25

    def __post_init__(self):
        if self.max_splits < 0:
            raise ValueError("max_splits must be >= 0")


class Outcome(enum.Enum):
    SOLUTION = "solution"
    INFEASIBLE = "infeasible"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass
class SolveStats:
    splits: int = 0
    rounds: int = 0  # iterations that performed at least one split
    lp_solves: int = 0
    wall_time: float = 0.0
    # (branch_id, coefficient index or RHS_COEFFICIENT or None, dimension)
    split_history: list[tuple[int, int | None, int]] = field(default_factory=list)


@dataclass
class SolveOutcome:
    outcome: Outcome
    stats: SolveStats
    x: np.ndarray | None = None
    certificate: list[dict] | None = None
    witness: Branch | None = None
    witness_id: int | None = None
    reason: str = ""
    verification: "VerifyResult | None" = None

    @property
    def is_solution(self) -> bool:
        return self.outcome is Outcome.SOLUTION


@dataclass
class _BranchState:
    id: int
    box: Box
    formula: Formula
    status: object
    rr_counter: int = 0


def solve(problem: Problem, config: SolveConfig | None = None) -> SolveOutcome:
    cfg = config or SolveConfig()
    violations = validate_problem(problem)
    if violations:
        raise InvalidProblem(violations)

    t0 = time.perf_counter()
    stats = SolveStats()
    hc = cfg.heuristic
    ages = AgeTable()
    next_id = 0
    states: list[_BranchState] = []
    for br in problem.branches:
        states.append(_BranchState(next_id, br.box, br.formula,
                                   simplify_branch(br, problem.x_vars)))
        next_id += 1

    def done(outcome: SolveOutcome) -> SolveOutcome:
        stats.wall_time = time.perf_counter() - t0
        return outcome

    def out_of_budget() -> bool:
        return (stats.splits >= cfg.max_splits
                or time.perf_counter() - t0 > cfg.time_budget)

    def do_split(st: _BranchState, dim: int, coefficient: int | None) -> None:
        nonlocal next_id, states
        lo_box, hi_box = st.box.split(dim)
        children = []
        for child_box in (lo_box, hi_box):
            child = _BranchState(
                next_id, child_box, st.formula,
                simplify_branch(Branch(child_box, st.formula), problem.x_vars),
                st.rr_counter + 1)
            next_id += 1
            children.append(child)
        ages.inherit(st.id, [c.id for c in children])
        states = [s for s in states if s.id != st.id] + children
        stats.splits += 1
        stats.split_history.append((st.id, coefficient, dim))

    while True:
        for st in states:
            if isinstance(st.status, ProvedFalse):
                return done(SolveOutcome(
                    Outcome.INFEASIBLE, stats,
                    witness=Branch(st.box, st.formula), witness_id=st.id,
                    reason="a branch is false over its whole box"))
        states = [st for st in states if not isinstance(st.status, ProvedTrue)]
        states.sort(key=lambda s: s.id)

        if not states:
            try:
                x = solve_equalities(problem.eq_matrix(), problem.eq_vector(),
                                     problem.r)
            except EqualitiesInfeasible as exc:
                return done(SolveOutcome(Outcome.INFEASIBLE, stats,
                                         reason=str(exc)))
            return done(_solution(problem, x, [], stats, cfg, t0))

        undecided = [st for st in states if isinstance(st.status, Undecided)]
        if undecided:
            target = _pick_undecided(undecided)
            if target is None:
                return done(SolveOutcome(
                    Outcome.BUDGET_EXHAUSTED, stats,
                    reason="undecided branch with degenerate guard enclosures"))
            st, guard, sign = target
            if out_of_budget():
                return done(SolveOutcome(Outcome.BUDGET_EXHAUSTED, stats,
                                         reason="budget before guard split"))
            try:
                if hc.strategy is Strategy.ROUND_ROBIN:
                    dim = round_robin_var(st.box, st.rr_counter)
                else:
                    vec = ages.ages(st.id, guard.body, len(st.box))
                    dim = splitheur(guard.body, st.box, sign, vec, hc.aging_kappa)
                    ages.record_choice(st.id, guard.body, len(st.box), dim)
                do_split(st, dim, None)
                stats.rounds += 1
            except (AllDimensionsDegenerate, SplitDegenerate):
                return done(SolveOutcome(
                    Outcome.BUDGET_EXHAUSTED, stats,
                    reason="cannot split an undecided branch further"))
            continue

        # every live branch is a linear interval row
        sys = IntervalLinearSystem()
        for st in states:
            sys.add_row(st.id, st.status.coeff_intervals, st.status.rhs_interval)
        lp = rohn_transform(sys, problem.eq_matrix(), problem.eq_vector())
        try:
            sol = solve_feasibility(lp)
        except EqualitiesInfeasible as exc:
            return done(SolveOutcome(Outcome.INFEASIBLE, stats, reason=str(exc)))
        stats.lp_solves += 1
        resid = residual_vector(lp, sol)

        if sol.rho <= -ACCEPT_TOL:
            return done(_solution(problem, sol.x, sys.rows, stats, cfg, t0))

        targets = select_targets(sys, lp, sol, resid, hc,
                                 allow_nonpositive=(sol.rho <= ACCEPT_TOL))
        if not targets:
            # nothing can be tightened: every row is an exact point system,
            # so the LP verdict is final
            if sol.rho > ACCEPT_TOL:
                worst = sys.rows[int(np.argmax(resid))]
                st = next(s for s in states if s.id == worst.branch_id)
                return done(SolveOutcome(
                    Outcome.INFEASIBLE, stats,
                    witness=Branch(st.box, st.formula), witness_id=st.id,
                    reason="exact interval system is LP-infeasible"))
            return done(SolveOutcome(
                Outcome.BUDGET_EXHAUSTED, stats,
                reason="numerically marginal rho on an unsplittable system"))

        by_id = {st.id: st for st in states}
        round_splits = 0
        for tgt in targets:
            if out_of_budget():
                return done(SolveOutcome(Outcome.BUDGET_EXHAUSTED, stats,
                                         reason="split budget exhausted"))
            st = by_id[tgt.branch_id]
            try:
                if tgt.coefficient is None:
                    dim = round_robin_var(st.box, st.rr_counter)
                else:
                    atom = st.status.atom
                    if tgt.coefficient == RHS_COEFFICIENT:
                        expr = atom.rhs
                    else:
                        expr = atom.coeff_map()[problem.x_vars[tgt.coefficient]]
                    vec = ages.ages(st.id, expr, len(st.box))
                    dim = splitheur(expr, st.box, tgt.sign, vec, hc.aging_kappa)
                    ages.record_choice(st.id, expr, len(st.box), dim)
                do_split(st, dim, tgt.coefficient)
                if round_splits == 0:
                    stats.rounds += 1
                round_splits += 1
                if hc.strategy is not Strategy.SPLIT_ALL:
                    break  # single-box strategies split once per iteration
            except (AllDimensionsDegenerate, SplitDegenerate):
                continue  # this box is exhausted; try the next target
        if round_splits == 0:
            return done(SolveOutcome(
                Outcome.BUDGET_EXHAUSTED, stats,
                reason="no target branch can be split further"))


def _pick_undecided(undecided):
    """The undecided branch whose widest straddling guard enclosure is
    widest overall, that guard, and the bound to improve ('+' when the
    upper bound is nearer to deciding the guard)."""
    best = None
    best_width = -1.0
    for st in undecided:
        for g in guard_atoms(st.status.formula):
            iv = eval_on_box(g.body, st.box)
            if iv.width > best_width:
                sign = "+" if abs(iv.hi) < abs(iv.lo) else "-"
                best = (st, g, sign)
                best_width = iv.width
    if best is None or best_width <= 0.0:
        return None
    return best


def _solution(problem, x, rows, stats, cfg, t0) -> SolveOutcome:
    certificate = []
    for row in rows:
        lhs = adversarial_row_value(row.coeffs, x)
        certificate.append({
            "branch_id": row.branch_id,
            "worst_lhs": lhs,
            "rhs_lo": row.rhs.lo,
            "margin": row.rhs.lo - lhs,
        })
    out = SolveOutcome(Outcome.SOLUTION, stats, x=np.asarray(x, dtype=float),
                       certificate=certificate)
    if cfg.verify:
        out.verification = verify_solution(problem, out.x, cfg.verify_depth)
    return out


# -- independent verification -------------------------------------------------

class VerifyStatus(enum.Enum):
    VERIFIED = "verified"
    COUNTEREXAMPLE = "counterexample"
    UNKNOWN = "unknown"


@dataclass
class VerifyResult:
    status: VerifyStatus
    branch_id: int | None = None
    point: dict[str, float] | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status is VerifyStatus.VERIFIED


def verify_solution(problem: Problem, x, depth: int = 25,
                    max_boxes: int = 200_000) -> VerifyResult:
    """Check a candidate x against the problem, independently of the LP.

    Equalities are checked numerically to EQUALITY_TOL.  Each universal
    branch is proved by interval evaluation with recursive bisection up to
    `depth` levels; midpoints are sampled to find counterexamples.
    max_boxes caps the total bisection work per branch (exceeding it
    reports Unknown rather than exploring an exponential tree).
    """
    x = np.asarray(x, dtype=float)
    C, d = problem.eq_matrix(), problem.eq_vector()
    if C.shape[0]:
        err = np.abs(C @ x - d).max()
        if err > EQUALITY_TOL:
            return VerifyResult(VerifyStatus.COUNTEREXAMPLE,
                                reason=f"equality residual {err:.3g}")

    env = dict(zip(problem.x_vars, (float(v) for v in x)))
    sawunknown = False
    for i, br in enumerate(problem.branches):
        f = _substitute_x(br.formula, env)
        res = _check_forall(f, br.box, depth, [max_boxes])
        if res == "unknown":
            sawunknown = True
        elif res is not None:
            return VerifyResult(VerifyStatus.COUNTEREXAMPLE, branch_id=i,
                                point=res, reason="formula false at point")
    if sawunknown:
        return VerifyResult(VerifyStatus.UNKNOWN, reason="bisection depth limit")
    return VerifyResult(VerifyStatus.VERIFIED)


def _substitute_x(f: Formula, env: dict[str, float]) -> Formula:
    if isinstance(f, And):
        return And(tuple(_substitute_x(i, env) for i in f.items))
    if isinstance(f, Or):
        return Or(tuple(_substitute_x(i, env) for i in f.items))
    if isinstance(f, Linear):
        total: Expr = Const(0.0)
        for name, coeff in f.atom.coeffs:
            total = Add(total, Mul(Const(env[name]), coeff))
        return Guard(GuardAtom(Sub(total, f.atom.rhs), strict=False))
    return f


def _decide(f: Formula, box: Box) -> Decision:
    if isinstance(f, TrueF):
        return Decision.TRUE
    if isinstance(f, FalseF):
        return Decision.FALSE
    if isinstance(f, Guard):
        return classify_guard(f.atom, box)
    if isinstance(f, And):
        decisions = [_decide(i, box) for i in f.items]
        if any(d is Decision.FALSE for d in decisions):
            return Decision.FALSE
        if all(d is Decision.TRUE for d in decisions):
            return Decision.TRUE
        return Decision.UNDECIDED
    if isinstance(f, Or):
        decisions = [_decide(i, box) for i in f.items]
        if any(d is Decision.TRUE for d in decisions):
            return Decision.TRUE
        if all(d is Decision.FALSE for d in decisions):
            return Decision.FALSE
        return Decision.UNDECIDED
    raise TypeError(f"unexpected formula node {type(f).__name__}")


def _holds_at(f: Formula, point: dict[str, float]) -> bool:
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Guard):
        v = f.atom.body.evaluate(point)
        return v < 0.0 if f.atom.strict else v <= 0.0
    if isinstance(f, And):
        return all(_holds_at(i, point) for i in f.items)
    if isinstance(f, Or):
        return any(_holds_at(i, point) for i in f.items)
    raise TypeError(f"unexpected formula node {type(f).__name__}")


def _check_forall(f: Formula, box: Box, depth: int, budget: list[int]):
    """None when proved, a counterexample point, or 'unknown'."""
    budget[0] -= 1
    if budget[0] < 0:
        return "unknown"
    decision = _decide(f, box)
    if decision is Decision.TRUE:
        return None
    mid = box.midpoint()
    if decision is Decision.FALSE or not _holds_at(f, mid):
        return mid
    if depth <= 0:
        return "unknown"
    widths = box.widths()
    dim = int(np.argmax(widths))
    if widths[dim] <= 0.0:
        return "unknown"
    sawunknown = False
    try:
        children = box.split(dim)
    except SplitDegenerate:
        return "unknown"
    for child in children:
        res = _check_forall(f, child, depth - 1, budget)
        if res == "unknown":
            sawunknown = True
        elif res is not None:
            return res
    return "unknown" if sawunknown else None
