"""Exact solver for small strictly convex QPs.

Solves ``min ||u - u_t||^2  s.t.  A u <= b`` for a handful of variables and
constraints. Because the Hessian is the identity, the problem is a Euclidean
projection onto a polyhedron, solved exactly by an active-set method that
starts from the unconstrained optimum and adds violated constraints
(dual/Goldfarb-Idnani flavor, so no phase-1 feasible point is needed).
Ties break on lowest constraint index, which keeps pivoting deterministic
and guards against cycling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MAX_PIVOTS = 1000
# Relative threshold below which a candidate row counts as linearly
# dependent on the working set.
_DEP_TOL = 1e-12


class Infeasible(RuntimeError):
    """The feasible set is empty."""


class MaxIterations(RuntimeError):
    """Pivot cap exceeded (cycling guard)."""


@dataclass(frozen=True, eq=False)
class QpProblem:
    """Projection target ``u_t`` and inequality system ``A u <= b``."""

    u_t: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        u_t = np.atleast_1d(np.asarray(self.u_t, dtype=float))
        A = np.asarray(self.A, dtype=float).reshape(-1, u_t.size)
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        object.__setattr__(self, "u_t", u_t)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if u_t.size < 1:
            raise ValueError("u_t must have at least one entry")
        if A.shape[0] != b.size:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.size}")
        if not (
            np.all(np.isfinite(u_t))
            and np.all(np.isfinite(A))
            and np.all(np.isfinite(b))
        ):
            raise ValueError("QP data must be finite")

    @property
    def n(self) -> int:
        return self.u_t.size

    @property
    def m(self) -> int:
        return self.b.size


@dataclass
class QpSolution:
    """Minimizer plus bookkeeping for diagnostics and warm starts."""

    u: np.ndarray
    status: str
    active_set: list[int] = field(default_factory=list)
    slack_norm: float = 0.0


def _active_set_core(
    u_t: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    tol: float,
    initial_active: list[int] | None = None,
) -> tuple[np.ndarray, list[int], np.ndarray]:
    """Project u_t onto {u : A u <= b}. Returns (u, working set, multipliers).

    Raises Infeasible if the polyhedron is empty and MaxIterations if the
    pivot cap trips.
    """
    m = A.shape[0]
    W: list[int] = []
    lam: list[float] = []
    u = u_t.copy()

    def eqp(work: list[int]) -> tuple[np.ndarray, np.ndarray]:
        """Solve the equality-constrained projection for a working set."""
        if not work:
            return u_t.copy(), np.empty(0)
        Aw = A[work]
        mult = np.linalg.solve(Aw @ Aw.T, Aw @ u_t - b[work])
        return u_t - Aw.T @ mult, mult

    if initial_active:
        # Seed the working set with independent hint rows, then drop any
        # whose multiplier comes out negative; the main loop fixes the rest.
        for i in sorted(set(initial_active)):
            trial = W + [i]
            Aw = A[trial]
            if np.linalg.matrix_rank(Aw) == len(trial):
                W = trial
        while W:
            u, mult = eqp(W)
            neg = [j for j, v in enumerate(mult) if v < -tol]
            if not neg:
                lam = list(mult)
                break
            del W[neg[0]]
        if not W:
            u = u_t.copy()
            lam = []

    pivots = 0
    while True:
        viol = np.flatnonzero(A @ u - b > tol)
        viol = [i for i in viol if i not in W]
        if not viol:
            return u, W, np.asarray(lam)
        p = viol[0]
        a_p = A[p]
        lam_p = 0.0
        while True:
            pivots += 1
            if pivots > _MAX_PIVOTS:
                raise MaxIterations(f"exceeded {_MAX_PIVOTS} active-set pivots")
            if W:
                Aw = A[W]
                r = np.linalg.solve(Aw @ Aw.T, Aw @ a_p)
                z = a_p - Aw.T @ r
            else:
                r = np.empty(0)
                z = a_p.copy()
            z_sq = float(a_p @ z)
            dependent = z_sq <= _DEP_TOL * float(a_p @ a_p)

            # Dual blocking step: multipliers move along -r as lam_p grows.
            t1 = np.inf
            k_drop = -1
            for j in range(len(W)):
                if r[j] > tol:
                    cand = lam[j] / r[j]
                    if cand < t1 - 1e-15 or (
                        abs(cand - t1) <= 1e-15 and (k_drop < 0 or W[j] < W[k_drop])
                    ):
                        t1 = cand
                        k_drop = j
            # Primal step that brings constraint p onto its boundary.
            t2 = np.inf if dependent else (float(a_p @ u) - b[p]) / z_sq

            t = min(t1, t2)
            if not np.isfinite(t):
                raise Infeasible(
                    f"constraint {p} cannot be satisfied together with {W}"
                )
            if t > 0.0:
                if not dependent:
                    u = u - t * z
                lam = [v - t * rj for v, rj in zip(lam, r)]
                lam_p += t
            if t2 <= t1:
                W.append(p)
                lam.append(lam_p)
                break
            del W[k_drop]
            del lam[k_drop]


def solve(
    problem: QpProblem,
    tol: float = 1e-9,
    initial_active: list[int] | None = None,
) -> QpSolution:
    """Exact minimizer of ``min ||u - u_t||^2 s.t. A u <= b``.

    Parameters
    ----------
    problem : QpProblem
    tol : float
        Feasibility/KKT tolerance.
    initial_active : list of int, optional
        Warm-start hint: constraint indices expected active at the optimum.

    Raises
    ------
    Infeasible
        If the feasible set is empty (use :func:`solve_relaxed` to recover).
    MaxIterations
        If the pivot cap trips.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    u_t, A, b = problem.u_t, problem.A, problem.b
    if problem.m == 0:
        return QpSolution(u=u_t.copy(), status="optimal")

    # Rows with (near) zero normal constrain nothing: drop them when their
    # bound is satisfiable, fail fast otherwise.
    norms = np.linalg.norm(A, axis=1)
    keep = norms >= 1e-12
    if not np.all(keep):
        if np.any(b[~keep] < -tol):
            raise Infeasible("zero-row constraint with negative bound")
        idx_map = np.flatnonzero(keep)
        hint = None
        if initial_active:
            pos = {int(v): i for i, v in enumerate(idx_map)}
            hint = [pos[i] for i in initial_active if i in pos]
        sub = QpProblem(u_t=u_t, A=A[keep], b=b[keep])
        sol = solve(sub, tol=tol, initial_active=hint)
        sol.active_set = [int(idx_map[i]) for i in sol.active_set]
        return sol

    u, W, _ = _active_set_core(u_t, A, b, tol, initial_active)
    return QpSolution(u=u, status="optimal", active_set=sorted(int(i) for i in W))


def solve_relaxed(
    problem: QpProblem,
    weight: float = 1e6,
    tol: float = 1e-9,
) -> QpSolution:
    """Slack-relaxed fallback for infeasible (or near-infeasible) problems.

    Solves ``min ||u - u_t||^2 + weight * ||s||^2`` subject to
    ``A u <= b + s`` and ``s >= 0``, which is always feasible. The returned
    ``slack_norm`` measures how much the original constraints had to give.
    """
    n, m = problem.n, problem.m
    if m == 0:
        return QpSolution(u=problem.u_t.copy(), status="relaxed")
    rw = np.sqrt(weight)
    # Change of variables y = [u; sqrt(weight) * s] keeps the identity
    # Hessian so the same projection core applies.
    A_ext = np.zeros((2 * m, n + m))
    A_ext[:m, :n] = problem.A
    A_ext[:m, n:] = -np.eye(m) / rw
    A_ext[m:, n:] = -np.eye(m) / rw
    b_ext = np.concatenate([problem.b, np.zeros(m)])
    y_t = np.concatenate([problem.u_t, np.zeros(m)])
    y, W, _ = _active_set_core(y_t, A_ext, b_ext, tol)
    s = y[n:] / rw
    return QpSolution(
        u=y[:n],
        status="relaxed",
        active_set=sorted(int(i) for i in W if i < m),
        slack_norm=float(np.linalg.norm(s)),
    )
