"""Exact univariate nonnegativity through a pair of PSD matrices.

A polynomial of degree m is nonnegative on [0, 1] exactly when its monomial
coefficient vector can be written Omega0*(A) + Omega1*(B) with A and B
positive semidefinite; the Omega maps are assembled from Hankel basis
matrices and depend on the parity of m.  This module provides the forward
and adjoint maps, the monomial-to-Bernstein change of basis, and a solver
that minimizes the projection cost over the cone by quasi-Newton descent on
full-rank factors A = R0 R0^T, B = R1 R1^T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import kkt
from .bernstein import PolyCoeffs, binomial_float, evaluate, mass_matrix

CONE_DEGREE_LIMIT = 12


@dataclass(frozen=True)
class ConePoint:
    """PSD certificate pair for a degree-m nonnegative polynomial.

    For even m = 2l, A is (l+1)x(l+1) and B is l x l; for odd m = 2l+1 both
    are (l+1)x(l+1).
    """

    m: int
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        sa, sb = _block_sizes(self.m)
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        if A.shape != (sa, sa) or B.shape != (sb, sb):
            raise ValueError(
                f"degree {self.m} needs blocks {(sa, sa)} and {(sb, sb)}, "
                f"got {A.shape} and {B.shape}"
            )
        A = A.copy()
        B = B.copy()
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)


def _block_sizes(m: int) -> tuple[int, int]:
    ell = m // 2
    if m % 2 == 0:
        return ell + 1, ell  # B is empty for m = 0
    return ell + 1, ell + 1


def hankel_basis(size: int, k: int) -> np.ndarray:
    """size x size matrix with ones on the antidiagonal i + j = k.

    Zero when k < 0 or k > 2(size-1).
    """
    H = np.zeros((size, size))
    if 0 <= k <= 2 * (size - 1):
        i = np.arange(max(0, k - size + 1), min(size - 1, k) + 1)
        H[i, k - i] = 1.0
    return H


def omega_forward(m: int, q) -> tuple[np.ndarray, np.ndarray]:
    """Images (Omega0(q), Omega1(q)) of a monomial coefficient vector."""
    q = np.asarray(q, dtype=float)
    if q.shape != (m + 1,):
        raise ValueError(f"expected {m + 1} monomial coefficients, got {q.shape}")
    sa, sb = _block_sizes(m)
    ell = m // 2
    O0 = np.zeros((sa, sa))
    O1 = np.zeros((sb, sb))
    if m % 2 == 0:
        for k in range(2 * ell + 1):
            O0 += q[k] * hankel_basis(sa, k)
        for k in range(max(2 * ell - 1, 0)):
            O1 += (q[k + 1] - q[k + 2]) * hankel_basis(sb, k)
    else:
        for k in range(2 * ell + 1):
            O0 += q[k + 1] * hankel_basis(sa, k)
            O1 += (q[k] - q[k + 1]) * hankel_basis(sb, k)
    return O0, O1


def omega_adjoint(point: ConePoint) -> np.ndarray:
    """Monomial coefficients Omega0*(A) + Omega1*(B) of a cone point."""
    m = point.m
    sa, sb = _block_sizes(m)
    ell = m // 2
    q = np.zeros(m + 1)
    if m % 2 == 0:
        for k in range(m + 1):
            q[k] = np.sum(point.A * hankel_basis(sa, k))
            if sb:
                q[k] += np.sum(
                    point.B * (hankel_basis(sb, k - 1) - hankel_basis(sb, k - 2))
                )
    else:
        for k in range(m + 1):
            q[k] = np.sum(point.A * hankel_basis(sa, k - 1)) + np.sum(
                point.B * (hankel_basis(sb, k) - hankel_basis(sb, k - 1))
            )
    return q


def monomial_to_bernstein(m: int) -> np.ndarray:
    """Lower-triangular change of basis: x^j = sum_i C(i,j)/C(m,j) B^m_i.

    Severely ill-conditioned as m grows; see t_condition.
    """
    if m < 0:
        raise ValueError(f"degree must be nonnegative, got {m}")
    T = np.zeros((m + 1, m + 1))
    for i in range(m + 1):
        for j in range(i + 1):
            T[i, j] = binomial_float(i, j) / binomial_float(m, j)
    return T


def t_condition(m: int) -> float:
    """1-norm condition estimate of the monomial-to-Bernstein map."""
    T = monomial_to_bernstein(m)
    return float(np.linalg.cond(T, 1))


def grid_min(p: PolyCoeffs, npoints: int = 10_001) -> float:
    """Minimum of p over a uniform grid on [0, 1]."""
    x = np.linspace(0.0, 1.0, npoints)
    return float(np.min(evaluate(p, x)))


def hull_lower_bound(p: PolyCoeffs, levels: int = 1) -> float:
    """Certified lower bound for min p on [0, 1] by coefficient subdivision.

    Splitting at the midpoint via de Casteljau and taking the smallest
    coefficient across the pieces bounds the true minimum from below
    (convex hull property on each piece).
    """
    pieces = [np.asarray(p.coeffs, dtype=float)]
    for _ in range(levels):
        nxt = []
        for c in pieces:
            deg = c.shape[0] - 1
            left = np.empty_like(c)
            right = np.empty_like(c)
            work = c.copy()
            left[0] = work[0]
            right[-1] = work[-1]
            for r in range(1, deg + 1):
                work = 0.5 * (work[:-1] + work[1:])
                left[r] = work[0]
                right[-1 - r] = work[-1]
            nxt.extend((left, right))
        pieces = nxt
    return float(min(c.min() for c in pieces))


@dataclass(frozen=True)
class ConeResult:
    q: PolyCoeffs
    point: ConePoint
    objective: float
    grad_norm: float
    converged: bool
    condition: float
    restart_index: int
    iterations: int


def _pack(R0, R1):
    return np.concatenate([R0.ravel(), R1.ravel()])


def _unpack(z, sa, sb):
    R0 = z[: sa * sa].reshape(sa, sa)
    R1 = z[sa * sa :].reshape(sb, sb)
    return R0, R1


def _composite(z, m, T, M, target, sa, sb):
    """Objective d_p(T (Omega0*(R0 R0^T) + Omega1*(R1 R1^T))) and its gradient.

    The gradient flows through the chain rule: residual -> Bernstein ->
    monomial (T transpose) -> symmetric blocks (forward Omega maps are the
    adjoints of the adjoint maps) -> factors.
    """
    R0, R1 = _unpack(z, sa, sb)
    point = ConePoint(m=m, A=R0 @ R0.T, B=R1 @ R1.T)
    mono = omega_adjoint(point)
    bern = T @ mono
    r = bern - target
    val = float(r @ M @ r)
    g_mono = T.T @ (2.0 * M @ r)
    GA, GB = omega_forward(m, g_mono)
    g0 = 2.0 * GA @ R0
    g1 = 2.0 * GB @ R1
    return val, _pack(g0, g1)


def solve_cone(
    p: PolyCoeffs,
    restarts: int = 5,
    max_iterations: int = 5000,
    grad_tol: float = 1e-10,
    stall_tol: float = 1e-8,
    seed: int = 1234,
) -> ConeResult:
    """Best approximation of p among degree-m polynomials nonnegative on [0, 1].

    Minimizes over full-rank factorized PSD pairs with seeded random
    restarts; the best objective wins, ties broken by restart index.  The
    optimizer targets grad_tol but line searches routinely terminate a
    shade above it at the double-precision floor, so only a final gradient
    beyond stall_tol is reported as a stall (converged=False, best iterate
    still returned).
    """
    m = p.degree
    if m > CONE_DEGREE_LIMIT:
        raise ValueError(
            f"degree {m} exceeds the conditioning guard ({CONE_DEGREE_LIMIT}) "
            f"on the monomial-to-Bernstein map"
        )
    sa, sb = _block_sizes(m)
    T = monomial_to_bernstein(m)
    M = mass_matrix(m).entries
    target = np.asarray(p.coeffs, dtype=float)
    rng = np.random.default_rng(seed)

    best = None
    for idx in range(restarts):
        z0 = _pack(
            rng.standard_normal((sa, sa)) * 0.5, rng.standard_normal((sb, sb)) * 0.5
        )
        res = optimize.minimize(
            _composite,
            z0,
            args=(m, T, M, target, sa, sb),
            jac=True,
            method="L-BFGS-B",
            options=dict(maxiter=max_iterations, gtol=grad_tol, ftol=1e-18, maxcor=30),
        )
        gnorm = float(np.abs(res.jac).max()) if res.jac is not None else np.inf
        cand = (res.fun, idx, res.x, gnorm, int(res.nit))
        if best is None or cand[0] < best[0]:
            best = cand
    fun, idx, z, gnorm, nit = best
    R0, R1 = _unpack(z, sa, sb)
    point = ConePoint(m=m, A=R0 @ R0.T, B=R1 @ R1.T)
    q = PolyCoeffs(degree=m, coeffs=T @ omega_adjoint(point))
    return ConeResult(
        q=q,
        point=point,
        objective=fun,
        grad_norm=gnorm,
        converged=gnorm <= stall_tol,
        condition=t_condition(m),
        restart_index=idx,
        iterations=nit,
    )


def cone_objective(p: PolyCoeffs, q: PolyCoeffs) -> float:
    """Projection cost (q - p)^T M^m (q - p) at the common degree m."""
    prob = kkt.KktProblem(dim=1, m=p.degree, n=p.degree, target=p.coeffs)
    return kkt.objective(prob, q.coeffs)
