"""Sparse LP container and a bounded-variable primal simplex solver.

The solver works on a dense tableau. Nonbasic variables sit at one of their
bounds, so box constraints never become rows. Pricing is Dantzig's largest
reduced cost until a run of degenerate pivots is seen, after which Bland's
smallest-index rule takes over until the objective strictly improves; that
keeps the method finite without paying Bland's cost on every pivot.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

LE = "<="
EQ = "="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float
    upper: float


@dataclass(frozen=True)
class Constraint:
    family: str
    label: str
    indices: tuple[int, ...]
    coeffs: tuple[float, ...]
    sense: str
    rhs: float


@dataclass
class LpProblem:
    """Maximize ``objective . x`` subject to sparse rows and variable bounds."""

    variables: list[Variable]
    objective: list[float]
    constraints: list[Constraint]
    tolerance: float = 1e-7
    max_iterations: int = 50_000
    _index: dict[str, int] = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._index = {v.name: i for i, v in enumerate(self.variables)}
        if len(self._index) != len(self.variables):
            raise ValueError("duplicate variable names")
        if len(self.objective) != len(self.variables):
            raise ValueError("objective length must match the variable count")
        nvar = len(self.variables)
        for row in self.constraints:
            if row.sense not in (LE, EQ):
                raise ValueError(f"row {row.label}: unknown sense {row.sense!r}")
            if any(not 0 <= j < nvar for j in row.indices):
                raise ValueError(f"row {row.label}: references an undeclared variable")

    def index(self, name: str) -> int:
        return self._index[name]

    @property
    def families(self) -> set[str]:
        return {row.family for row in self.constraints}

    def to_json(self) -> str:
        return json.dumps({
            "variables": [[v.name, v.lower, v.upper] for v in self.variables],
            "objective": list(self.objective),
            "constraints": [
                [c.family, c.label, list(c.indices), list(c.coeffs), c.sense, c.rhs]
                for c in self.constraints
            ],
            "tolerance": self.tolerance,
            "max_iterations": self.max_iterations,
        })

    @classmethod
    def from_json(cls, text: str) -> "LpProblem":
        data = json.loads(text)
        return cls(
            variables=[Variable(n, lo, hi) for n, lo, hi in data["variables"]],
            objective=list(data["objective"]),
            constraints=[
                Constraint(f, lab, tuple(ix), tuple(co), sense, rhs)
                for f, lab, ix, co, sense, rhs in data["constraints"]
            ],
            tolerance=data["tolerance"],
            max_iterations=data["max_iterations"],
        )


@dataclass(frozen=True)
class LpSolution:
    status: str
    objective: float
    values: tuple[float, ...]
    iterations: int = 0

    def value(self, problem: LpProblem, name: str) -> float:
        return self.values[problem.index(name)]


def constraint_residuals(problem: LpProblem, values: Sequence[float]) -> list[tuple[Constraint, float]]:
    """Rows whose violation exceeds the problem tolerance, with the violation."""
    x = np.asarray(values, dtype=float)
    bad = []
    for row in problem.constraints:
        lhs = float(np.dot(row.coeffs, x[list(row.indices)])) if row.indices else 0.0
        gap = lhs - row.rhs
        viol = abs(gap) if row.sense == EQ else max(gap, 0.0)
        if viol > problem.tolerance * max(1.0, abs(row.rhs)):
            bad.append((row, viol))
    return bad


class _Tableau:
    """Dense bounded-variable simplex state (minimization form)."""

    REFRESH_EVERY = 200
    DEGENERATE_RUN = 30

    def __init__(self, A, b, lower, upper, tol, max_iter):
        self.A = A
        self.b = b
        self.lower = lower
        self.upper = upper
        self.tol = tol
        self.pivot_tol = 1e-9
        self.max_iter = max_iter
        self.iterations = 0

    def setup(self, basis, at_upper, x):
        self.basis = np.array(basis, dtype=np.int64)
        self.at_upper = at_upper
        self.x = x
        self.refactor()

    def refactor(self):
        B = self.A[:, self.basis]
        self.T = np.linalg.solve(B, self.A)
        nonbasic = np.ones(self.A.shape[1], dtype=bool)
        nonbasic[self.basis] = False
        xn = np.where(nonbasic, self.x, 0.0)
        self.x[self.basis] = np.linalg.solve(B, self.b - self.A @ xn)

    def run(self, cost, blocked):
        """Minimize ``cost . x``; ``blocked`` columns may never enter."""
        T = self.T
        d = cost - cost[self.basis] @ T
        tol = self.tol
        bland = False
        degenerate = 0
        since_refresh = 0
        while True:
            if self.iterations >= self.max_iter:
                return ITERATION_LIMIT
            is_basic = np.zeros(d.shape[0], dtype=bool)
            is_basic[self.basis] = True
            free_room = self.upper - self.lower > tol
            improving = np.where(self.at_upper, d > tol, d < -tol)
            eligible = improving & ~is_basic & ~blocked & free_room
            candidates = np.flatnonzero(eligible)
            if candidates.size == 0:
                return OPTIMAL
            if bland:
                j = int(candidates[0])
            else:
                j = int(candidates[np.argmax(np.abs(d[candidates]))])
            sigma = -1.0 if self.at_upper[j] else 1.0
            col = T[:, j]
            delta = sigma * col
            xb = self.x[self.basis]
            lb = self.lower[self.basis]
            ub = self.upper[self.basis]
            step = np.full(delta.shape[0], np.inf)
            down = delta > self.pivot_tol
            up = delta < -self.pivot_tol
            step[down] = (xb[down] - lb[down]) / delta[down]
            step[up] = (ub[up] - xb[up]) / -delta[up]
            step = np.maximum(step, 0.0)
            t_row = float(step.min()) if step.size else math.inf
            t_flip = float(self.upper[j] - self.lower[j])
            self.iterations += 1
            if t_flip <= t_row:
                if math.isinf(t_flip):
                    raise RuntimeError("unbounded direction in a bounded LP")
                self.x[self.basis] = xb - t_flip * delta
                self.at_upper[j] = not self.at_upper[j]
                self.x[j] = self.upper[j] if self.at_upper[j] else self.lower[j]
                degenerate = 0
                bland = False
                continue
            ties = np.flatnonzero(step <= t_row + 1e-12)
            if bland:
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                # most stable pivot among tied rows
                r = int(ties[np.argmax(np.abs(delta[ties]))])
            leaving = int(self.basis[r])
            self.x[self.basis] = xb - t_row * delta
            self.x[j] = self.x[j] + sigma * t_row
            self.at_upper[leaving] = bool(delta[r] < 0)
            self.x[leaving] = self.upper[leaving] if self.at_upper[leaving] else self.lower[leaving]
            self.at_upper[j] = False
            piv = T[r, j]
            prow = T[r] / piv
            T -= np.outer(col, prow)
            T[r] = prow
            d -= d[j] * prow
            self.basis[r] = j
            if t_row <= tol:
                degenerate += 1
                if degenerate >= self.DEGENERATE_RUN:
                    bland = True
            else:
                degenerate = 0
                bland = False
            since_refresh += 1
            if since_refresh >= self.REFRESH_EVERY:
                self.refactor()
                T = self.T
                d = cost - cost[self.basis] @ T
                since_refresh = 0


def solve_lp(problem: LpProblem) -> LpSolution:
    """Two-phase bounded-variable primal simplex; deterministic."""
    nvar = len(problem.variables)
    m = len(problem.constraints)
    tol = problem.tolerance
    lower = np.array([v.lower for v in problem.variables], dtype=float)
    upper = np.array([v.upper for v in problem.variables], dtype=float)
    if np.any(~np.isfinite(lower)):
        raise ValueError("every variable needs a finite lower bound")
    if np.any(upper < lower - tol):
        return LpSolution(INFEASIBLE, math.nan, tuple(lower.tolist()))
    c_max = np.array(problem.objective, dtype=float)
    if m == 0:
        x = np.where(c_max > 0, upper, lower)
        if np.any(~np.isfinite(x)):
            raise RuntimeError("unbounded objective")
        return LpSolution(OPTIMAL, float(c_max @ x), tuple(x.tolist()))

    slack_rows = [i for i, row in enumerate(problem.constraints) if row.sense == LE]
    nslack = len(slack_rows)
    ncols = nvar + nslack + m
    A = np.zeros((m, ncols))
    b = np.zeros(m)
    for i, row in enumerate(problem.constraints):
        for j, a in zip(row.indices, row.coeffs):
            A[i, j] += a
        b[i] = row.rhs
    for s, i in enumerate(slack_rows):
        A[i, nvar + s] = 1.0

    lo = np.concatenate([lower, np.zeros(nslack + m)])
    hi = np.concatenate([upper, np.full(nslack, np.inf), np.full(m, np.inf)])
    x = lo.copy()
    at_upper = np.zeros(ncols, dtype=bool)
    residual = b - A[:, :nvar] @ lower
    basis = []
    slack_of_row = {i: nvar + s for s, i in enumerate(slack_rows)}
    art0 = nvar + nslack
    for i in range(m):
        if i in slack_of_row and residual[i] >= 0:
            basis.append(slack_of_row[i])
        else:
            A[i, art0 + i] = 1.0 if residual[i] >= 0 else -1.0
            basis.append(art0 + i)
    artificial = np.zeros(ncols, dtype=bool)
    artificial[art0:] = True
    used_art = np.zeros(ncols, dtype=bool)
    used_art[[j for j in basis if j >= art0]] = True
    # unused artificial columns are pinned at zero and never enter
    hi[artificial & ~used_art] = 0.0

    tab = _Tableau(A, b, lo, hi, tol, problem.max_iterations)
    tab.setup(basis, at_upper, x)
    if used_art.any() and float(tab.x[used_art].sum()) > tol:
        cost1 = used_art.astype(float)
        status = tab.run(cost1, blocked=artificial)
        infeas = float(tab.x[used_art].sum())
        if status == ITERATION_LIMIT or infeas > tol * max(1.0, float(np.abs(b).max())):
            out = np.clip(tab.x[:nvar], lower, upper)
            st = ITERATION_LIMIT if status == ITERATION_LIMIT else INFEASIBLE
            return LpSolution(st, math.nan, tuple(out.tolist()), tab.iterations)
        # artificials stay basic at zero at worst; fix them there
    tab.upper[artificial] = 0.0
    tab.x[artificial] = 0.0
    tab.refactor()
    cost2 = np.concatenate([-c_max, np.zeros(nslack + m)])
    status = tab.run(cost2, blocked=artificial)
    tab.refactor()
    values = np.clip(tab.x[:nvar], lower, upper)
    # snap tiny noise so repeated solves serialize identically
    values = np.where(np.abs(values - np.round(values)) < 1e-11, np.round(values), values)
    objective = float(c_max @ values)
    return LpSolution(status, objective, tuple(float(v) for v in values), tab.iterations)
