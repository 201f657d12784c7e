"""Solver for exists-forall constraints, linear in the existential
variables, over boxed universal variables.

Pipeline: interval evaluation decides the universal-only inequalities per
branch; the surviving linear inequality per branch forms an interval
linear system; an endpoint transformation turns it into a residual LP
whose optimum both certifies solvability and steers which box, which
coefficient and which variable to split next.
"""

from .errors import (AllDimensionsDegenerate, DomainError, EFSolverError,
                     EqualitiesInfeasible, InvalidProblem, NoPositiveResidual,
                     ParseError, SplitDegenerate, UndeclaredVariable)
from .expr import (Add, Const, Cos, Div, Expr, Mul, Neg, Pow, Sin, Sub, Var,
                   eval_on_box)
from .heuristics import (AgeTable, HeuristicConfig, SplitTarget, Strategy,
                         coeff_score, round_robin_var, select_targets,
                         splitheur)
from .intervals import Box, Interval
from .model import (And, Branch, FalseF, Formula, Guard, GuardAtom, Linear,
                    LinearAtom, Or, Problem, TrueF, Violation,
                    validate_problem)
from .parsing import parse_expression, parse_problem, problem_to_text
from .relaxation import (FeasibilityLP, ILSRow, IntervalLinearSystem,
                         LPSolution, LPStatus, residual_vector,
                         rohn_transform, solve_feasibility)
from .simplex import SimplexResult, SimplexStatus, simplex_solve
from .simplify import (BranchStatus, Decision, LinearRow, ProvedFalse,
                       ProvedTrue, Undecided, bool_simplify, classify_guard,
                       simplify_branch)
from .solver import (Outcome, SolveConfig, SolveOutcome, SolveStats,
                     VerifyResult, VerifyStatus, solve, verify_solution)

__version__ = "0.1.0"
