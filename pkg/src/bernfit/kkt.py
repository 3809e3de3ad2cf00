"""Exact constrained projection by exhaustive KKT active-set enumeration.

Solves min (q - p)^T M (q - p) over coefficient vectors q whose degree-n
elevation is componentwise nonnegative, optionally with the integral of q
pinned to the integral of p (the delta switch).  Works on the interval
(dim = 1) and on the unit right d-simplex with one code path.

For every candidate active set J the reduced system

    sum_{j in J} (W_ij - c * delta) mu_j = -(E p)_i,   i in J,

is solved, where W is half the elevated inverse-mass product U U^T and
c = d!/2.  A candidate is accepted when the multipliers are nonnegative
and the reconstructed elevated vector is feasible; the minimizer is unique,
so the first acceptance in enumeration order is the answer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import bernstein, simplex
from .bernstein import PolyCoeffs
from .simplex import SimplexPoly

MAX_SUBSET_BITS = 22

PRIMAL_TOL = 1e-9
DUAL_TOL = 1e-12
SLACK_TOL = 1e-9
RANK_TOL = 1e-11

_CHUNK = 32768


class IntractableProblemError(Exception):
    """Raised when 2^(constraint count) exceeds the enumeration budget."""


class NoFeasibleSubsetError(Exception):
    """Raised when enumeration exhausts without an accepted subset.

    Should be impossible for a well-posed feasible problem; seeing it means
    either the constraints are infeasible (e.g. a mass constraint with
    negative target integral) or a tolerance is mis-sized.
    """


@dataclass(frozen=True)
class KktProblem:
    """Constrained projection instance.

    target holds the Bernstein coefficients of the polynomial being
    projected, at degree m (length m+1 for dim=1, C(dim+m, dim) otherwise).
    delta=1 additionally pins the integral.  upper is accepted for oracle
    use only; the enumerator rejects it.
    """

    dim: int
    m: int
    n: int
    target: np.ndarray
    delta: int = 0
    upper: float | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not 0 <= self.m <= self.n:
            raise ValueError(f"need 0 <= m <= n, got m={self.m}, n={self.n}")
        if self.delta not in (0, 1):
            raise ValueError(f"delta must be 0 or 1, got {self.delta}")
        t = np.asarray(self.target, dtype=float)
        want = math.comb(self.dim + self.m, self.dim)
        if t.shape != (want,):
            raise ValueError(f"target must have shape ({want},), got {t.shape}")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "target", t)

    @property
    def num_constraints(self) -> int:
        return math.comb(self.dim + self.n, self.dim)


@dataclass(frozen=True)
class KktSolution:
    q: PolyCoeffs | SimplexPoly
    mu: np.ndarray
    nu: float
    active_set: tuple[int, ...]
    elevated: np.ndarray
    stationarity_residual: float
    min_elevated: float
    max_slack_violation: float
    subsets_examined: int
    systems_solved: int
    candidates_reconstructed: int
    rank_skips: int


@dataclass(frozen=True)
class KktDiagnostics:
    stationarity_inf: float
    min_elevated: float
    min_mu: float
    max_slack: float
    integral_gap: float
    dual_feasible: bool
    passed: bool


def subset_iterator(num_constraints: int):
    """All subsets of {0..num_constraints-1}: by cardinality, then lexicographic."""
    if num_constraints > MAX_SUBSET_BITS:
        raise IntractableProblemError(
            f"{num_constraints} constraints means 2^{num_constraints} subsets; "
            f"the enumeration budget is 2^{MAX_SUBSET_BITS}"
        )
    for k in range(num_constraints + 1):
        yield from itertools.combinations(range(num_constraints), k)


@dataclass(frozen=True)
class _ProblemData:
    """Precomputed matrices shared by every subset of one instance."""

    E: np.ndarray            # elevation, constraints x unknowns
    W: np.ndarray            # U^{m,n} (U^{m,n})^T / 2
    Umm: np.ndarray
    Umn: np.ndarray
    lam: np.ndarray          # degree-n eigenvalues repeated per multiplicity
    M: np.ndarray            # degree-m mass matrix
    c_delta: float           # d!/2, subtracted from W on the active block
    c_eq: float              # m!/(m+d)!: integral of one degree-m basis function
    d_factorial: float


@lru_cache(maxsize=64)
def _problem_data(dim: int, m: int, n: int) -> _ProblemData:
    if dim == 1:
        E = bernstein.elevation_matrix(m, n).entries
        fac = bernstein.spectral_factors(m, n)
        fmm = bernstein.spectral_factors(m, m)
        lam = fac.eigenvalues
        M = bernstein.mass_matrix(m).entries
        c_eq = 1.0 / (m + 1)
    else:
        E = simplex.simplex_elevation(dim, m, n)
        fac = simplex.simplex_spectral_factors(dim, m, n)
        fmm = simplex.simplex_spectral_factors(dim, m, m)
        lam = fac.eigenvalues
        M = simplex.simplex_mass_matrix(dim, m)
        c_eq = bernstein._factorial_ratio((m,), (m + dim,))
    dfact = float(math.factorial(dim))
    return _ProblemData(
        E=E,
        W=fac.W,
        Umm=fmm.U,
        Umn=fac.U,
        lam=lam,
        M=M,
        c_delta=dfact / 2.0,
        c_eq=c_eq,
        d_factorial=dfact,
    )


def _batched_solve(A: np.ndarray, b: np.ndarray):
    """Gaussian elimination with partial pivoting over a stack of systems.

    A has shape (batch, k, k) and b (batch, k).  Returns (x, full_rank)
    where full_rank marks systems whose pivots all clear RANK_TOL * max|A|.
    """
    batch, k, _ = A.shape
    U = A.copy()
    x = b.astype(float).copy()
    scale = np.max(np.abs(A), axis=(1, 2))
    # a zero block is rank deficient outright; the pivot test below would
    # otherwise accept it vacuously
    ok = scale > 0.0
    rows = np.arange(batch)
    for col in range(k):
        piv = np.argmax(np.abs(U[:, col:, col]), axis=1) + col
        swap = piv != col
        if np.any(swap):
            sb = rows[swap]
            pv = piv[swap]
            U[sb, pv, :], U[sb, col, :] = U[sb, col, :], U[sb, pv, :].copy()
            x[sb, pv], x[sb, col] = x[sb, col], x[sb, pv].copy()
        pivval = U[:, col, col]
        ok &= np.abs(pivval) >= RANK_TOL * scale
        safe = np.where(pivval == 0.0, 1.0, pivval)
        factors = U[:, col + 1 :, col] / safe[:, None]
        U[:, col + 1 :, col:] -= factors[:, :, None] * U[:, None, col, col:]
        x[:, col + 1 :] -= factors * x[:, col, None]
    for col in range(k - 1, -1, -1):
        acc = np.einsum("bj,bj->b", U[:, col, col + 1 :], x[:, col + 1 :])
        pivval = U[:, col, col]
        x[:, col] = (x[:, col] - acc) / np.where(pivval == 0.0, 1.0, pivval)
    return x, ok


def _candidate_solution(data, problem, J, mu_J):
    """Assemble (mu, nu, y) for a dual-feasible subset; y is the elevated q."""
    N = problem.num_constraints
    mu = np.zeros(N)
    if len(J):
        mu[np.asarray(J)] = mu_J
    nu = -data.d_factorial * float(mu.sum()) if problem.delta else 0.0
    y = data.W @ mu + data.E @ problem.target
    if problem.delta:
        y += 0.5 * nu
    return mu, nu, y


def _enumerate_accepted(problem: KktProblem, counters: dict):
    """Yield (J, mu, nu, y) for every subset passing both KKT checks.

    Enumeration follows subset_iterator order.  Cardinalities above the rank
    of the reduced-matrix family are skipped: any principal submatrix of a
    PSD matrix of rank r is singular beyond size r, so the rank guard would
    reject every such subset anyway.
    """
    if problem.upper is not None:
        raise ValueError(
            "upper bounds are handled by the penalty oracle, not the enumerator"
        )
    N = problem.num_constraints
    if N > MAX_SUBSET_BITS:
        raise IntractableProblemError(
            f"{N} constraints means 2^{N} subsets; the enumeration budget "
            f"is 2^{MAX_SUBSET_BITS}"
        )
    data = _problem_data(problem.dim, problem.m, problem.n)
    ep = data.E @ problem.target

    n_unknowns = problem.target.shape[0]
    max_card = min(N, n_unknowns - 1 if problem.delta else n_unknowns)

    for k in range(max_card + 1):
        if k == 0:
            counters["subsets"] += 1
            counters["solved"] += 1
            mu, nu, y = _candidate_solution(data, problem, (), ())
            counters["reconstructed"] += 1
            if y.min() >= -PRIMAL_TOL:
                yield (), mu, nu, y
            continue
        combos = itertools.combinations(range(N), k)
        while True:
            chunk = np.fromiter(
                itertools.chain.from_iterable(itertools.islice(combos, _CHUNK)),
                dtype=np.intp,
            ).reshape(-1, k)
            if chunk.shape[0] == 0:
                break
            counters["subsets"] += chunk.shape[0]
            A = data.W[chunk[:, :, None], chunk[:, None, :]]
            if problem.delta:
                A = A - data.c_delta
            b = -ep[chunk]
            x, fullrank = _batched_solve(A, b)
            counters["rank_skips"] += int(chunk.shape[0] - fullrank.sum())
            counters["solved"] += int(fullrank.sum())
            dual_ok = fullrank & np.all(x >= -DUAL_TOL, axis=1)
            for idx in np.flatnonzero(dual_ok):
                J = tuple(int(c) for c in chunk[idx])
                mu, nu, y = _candidate_solution(data, problem, J, x[idx])
                counters["reconstructed"] += 1
                if y.min() >= -PRIMAL_TOL:
                    yield J, mu, nu, y


def _finish(problem: KktProblem, data, J, mu, nu, y, counters) -> KktSolution:
    qvec = data.Umm @ (data.lam * (data.Umn.T @ y))
    if problem.dim == 1:
        q = PolyCoeffs(degree=problem.m, coeffs=qvec)
    else:
        q = SimplexPoly(dim=problem.dim, degree=problem.m, coeffs=qvec)
    stat = (
        2.0 * data.M @ (qvec - problem.target)
        - data.E.T @ mu
        - problem.delta * nu * data.c_eq
    )
    slack = np.abs(mu * y)
    return KktSolution(
        q=q,
        mu=mu,
        nu=nu,
        active_set=J,
        elevated=y,
        stationarity_residual=float(np.abs(stat).max()),
        min_elevated=float(y.min()),
        max_slack_violation=float(slack.max()) if slack.size else 0.0,
        subsets_examined=counters["subsets"],
        systems_solved=counters["solved"],
        candidates_reconstructed=counters["reconstructed"],
        rank_skips=counters["rank_skips"],
    )


def solve(problem: KktProblem, exhaustive: bool = False) -> KktSolution:
    """Find the unique constrained minimizer.

    With exhaustive=True the enumeration is not stopped at the first
    accepted subset; the first one is still returned (uniqueness makes all
    accepted subsets reconstruct the same polynomial, which tests verify).
    """
    counters = dict(subsets=0, solved=0, reconstructed=0, rank_skips=0)
    data = _problem_data(problem.dim, problem.m, problem.n)
    found = None
    for J, mu, nu, y in _enumerate_accepted(problem, counters):
        if found is None:
            found = (J, mu, nu, y)
            if not exhaustive:
                break
    if found is None:
        raise NoFeasibleSubsetError(
            f"no subset of {problem.num_constraints} constraints passed both "
            f"feasibility checks (m={problem.m}, n={problem.n}, "
            f"dim={problem.dim}, delta={problem.delta})"
        )
    return _finish(problem, data, *found, counters)


def accepted_subsets(problem: KktProblem) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """All accepted (J, elevated vector) pairs, for uniqueness checks."""
    counters = dict(subsets=0, solved=0, reconstructed=0, rank_skips=0)
    return [(J, y) for J, _, _, y in _enumerate_accepted(problem, counters)]


def objective(problem: KktProblem, qvec) -> float:
    """The cost (q - p)^T M (q - p) being minimized."""
    data = _problem_data(problem.dim, problem.m, problem.n)
    r = np.asarray(qvec, dtype=float) - problem.target
    return float(r @ data.M @ r)


def integral(problem: KktProblem, coeffs) -> float:
    """Integral of the degree-m polynomial with the given coefficients."""
    data = _problem_data(problem.dim, problem.m, problem.n)
    return data.c_eq * float(np.sum(coeffs))


def verify_kkt(problem: KktProblem, sol: KktSolution, tol: float) -> KktDiagnostics:
    """Recompute every KKT residual from scratch and compare against tol."""
    data = _problem_data(problem.dim, problem.m, problem.n)
    qvec = np.asarray(sol.q.coeffs, dtype=float)
    stat = (
        2.0 * data.M @ (qvec - problem.target)
        - data.E.T @ sol.mu
        - problem.delta * sol.nu * data.c_eq
    )
    elevated = data.E @ qvec
    slack = np.abs(sol.mu * elevated)
    gap = (
        abs(integral(problem, qvec) - integral(problem, problem.target))
        if problem.delta
        else 0.0
    )
    stationarity = float(np.abs(stat).max())
    min_elev = float(elevated.min())
    min_mu = float(sol.mu.min()) if sol.mu.size else 0.0
    max_slack = float(slack.max()) if slack.size else 0.0
    dual_ok = min_mu >= -tol
    passed = (
        stationarity <= tol
        and min_elev >= -tol
        and dual_ok
        and max_slack <= tol
        and gap <= tol
    )
    return KktDiagnostics(
        stationarity_inf=stationarity,
        min_elevated=min_elev,
        min_mu=min_mu,
        max_slack=max_slack,
        integral_gap=gap,
        dual_feasible=dual_ok,
        passed=passed,
    )
