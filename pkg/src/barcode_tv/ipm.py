"""Mehrotra predictor-corrector interior point method for box-bounded LPs.

Solves::

    minimize    c^T x
    subject to  A x = b,  lower <= x <= upper

where bounds may be infinite. Iterates keep ``x`` strictly inside its box;
only the equality constraints are allowed to be violated along the way.

Each Newton step is reduced to a symmetric positive definite system:

* no free variables: the normal equations ``A D^-1 A^T``;
* free variables whose companion bounded columns are unit vectors (the
  slack structure of L1 splitting): the Schur complement
  ``A_F^T S^-1 A_F`` on the free block, with ``S`` diagonal;
* otherwise the regularized quasi-definite augmented system.

Factorizations use dense Cholesky or sparse LU with a symmetric ordering,
plus a small
diagonal regularization that is increased when the factorization breaks
down.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

logger = logging.getLogger(__name__)

__all__ = ["SolverTolerances", "LpSolution", "solve_box_lp", "Status"]


class Status:
    OPTIMAL = "optimal"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class SolverTolerances:
    eps: float = 1e-8
    max_iter: int = 200
    step_fraction: float = 0.9995
    primal_reg: float = 1e-10
    dual_reg: float = 1e-12
    max_reg_retries: int = 6


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float
    status: str
    iterations: int
    primal_residual: float
    dual_residual: float
    duality_gap: float
    y: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status == Status.OPTIMAL


class _Factorization:
    """SPD solve: dense Cholesky for small or dense systems, SuperLU otherwise."""

    def __init__(self, mat, dense_limit: int = 400, dense_fill: float = 0.05):
        n = mat.shape[0]
        nnz = mat.nnz if sp.issparse(mat) else n * n
        if n <= dense_limit or nnz > dense_fill * n * n:
            dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat)
            if not np.all(np.isfinite(dense)):
                raise np.linalg.LinAlgError("non-finite matrix")
            self._chol = la.cho_factor(dense, lower=True, check_finite=False)
            self._solve = lambda r: la.cho_solve(self._chol, r, check_finite=False)
        else:
            lu = spla.splu(sp.csc_matrix(mat), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0)
            self._solve = lu.solve

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        out = self._solve(rhs)
        if not np.all(np.isfinite(out)):
            raise np.linalg.LinAlgError("non-finite solve")
        return out


def _step_length(w: np.ndarray, dw: np.ndarray) -> float:
    neg = dw < 0
    if not neg.any():
        return 1.0
    return float(min(1.0, np.min(-w[neg] / dw[neg])))


def solve_box_lp(a_eq, b_eq, cost, lower, upper, tol: SolverTolerances | None = None) -> LpSolution:
    tol = tol or SolverTolerances()
    A = sp.csr_matrix(a_eq, dtype=float)
    b = np.asarray(b_eq, dtype=float)
    c = np.asarray(cost, dtype=float)
    lo = np.asarray(lower, dtype=float)
    up = np.asarray(upper, dtype=float)
    m, n = A.shape
    At = A.T.tocsr()

    has_lo = np.isfinite(lo)
    has_up = np.isfinite(up)
    free = ~(has_lo | has_up)
    bounded = ~free
    A_F = A[:, free].tocsc()
    A_B = A[:, bounded].tocsc()
    slack_like = bool(free.any()) and bool(np.all(np.diff(A_B.indptr) <= 1))

    # starting point: inside every box, unit slacks and duals
    x = np.zeros(n)
    two = has_lo & has_up
    x[two] = 0.5 * (lo[two] + up[two])
    only_lo = has_lo & ~has_up
    x[only_lo] = lo[only_lo] + 1.0
    only_up = has_up & ~has_lo
    x[only_up] = up[only_up] - 1.0
    y = np.zeros(m)
    zl = np.where(has_lo, 1.0, 0.0)
    zu = np.where(has_up, 1.0, 0.0)

    def slacks(x):
        wl = np.where(has_lo, x - np.where(has_lo, lo, 0.0), 1.0)
        wu = np.where(has_up, np.where(has_up, up, 0.0) - x, 1.0)
        return wl, wu

    n_compl = int(has_lo.sum() + has_up.sum())
    bnorm = 1.0 + np.linalg.norm(b)
    cnorm = 1.0 + np.linalg.norm(c)
    reg_p, reg_d = tol.primal_reg, tol.dual_reg

    def factor_newton(D):
        """Return a solver for ``A dx = r_p``, ``A^T dy - D dx = r_hat``."""
        nonlocal reg_p, reg_d
        for _ in range(tol.max_reg_retries):
            try:
                return _factor_once(D, reg_p, reg_d)
            except (np.linalg.LinAlgError, RuntimeError) as exc:
                logger.debug("factorization failed (%s); raising regularization", exc)
                reg_p *= 100.0
                reg_d *= 100.0
        raise np.linalg.LinAlgError("factorization failed after regularization retries")

    def _factor_once(D, rp, rd):
        Dreg = D + rp
        if not free.any():
            Dinv = 1.0 / Dreg
            N = (A @ sp.diags(Dinv) @ At).tocsc() + rd * sp.identity(m, format="csc")
            fac = _Factorization(N)

            def solve(r_p, r_hat):
                dy = fac.solve(r_p + A @ (Dinv * r_hat))
                dx = Dinv * (At @ dy - r_hat)
                return dx, dy

            return solve
        DB_inv = 1.0 / Dreg[bounded]
        S_diag = None
        if slack_like:
            S_diag = np.asarray((A_B.multiply(A_B) @ DB_inv)).ravel() + rd
        if S_diag is not None:
            Sinv = 1.0 / S_diag
            R = (A_F.T @ sp.diags(Sinv) @ A_F).tocsc() + sp.diags(Dreg[free]).tocsc()
            fac = _Factorization(R)

            def solve(r_p, r_hat):
                q = r_p + A_B @ (DB_inv * r_hat[bounded])
                dxF = fac.solve(A_F.T @ (Sinv * q) - r_hat[free])
                dy = Sinv * (q - A_F @ dxF)
                dx = np.empty(n)
                dx[free] = dxF
                dx[bounded] = DB_inv * (A_B.T @ dy - r_hat[bounded])
                return dx, dy

            return solve
        S = (A_B @ sp.diags(DB_inv) @ A_B.T).tocsc() + rd * sp.identity(m, format="csc")
        K = sp.bmat([[S, A_F], [A_F.T, -sp.diags(Dreg[free])]], format="csc")
        lu = spla.splu(K, permc_spec="MMD_AT_PLUS_A")

        def solve(r_p, r_hat):
            q = r_p + A_B @ (DB_inv * r_hat[bounded])
            sol = lu.solve(np.concatenate((q, r_hat[free])))
            if not np.all(np.isfinite(sol)):
                raise np.linalg.LinAlgError("non-finite solve")
            dy, dxF = sol[:m], sol[m:]
            dx = np.empty(n)
            dx[free] = dxF
            dx[bounded] = DB_inv * (A_B.T @ dy - r_hat[bounded])
            return dx, dy

        return solve

    status = Status.MAX_ITERATIONS
    it = 0
    rel_p = rel_d = gap = np.inf
    for it in range(tol.max_iter + 1):
        wl, wu = slacks(x)
        r_p = b - A @ x
        r_d = c - At @ y - zl + zu
        mu = (np.sum(wl[has_lo] * zl[has_lo]) + np.sum(wu[has_up] * zu[has_up])) / max(n_compl, 1)
        pobj = c @ x
        rel_p = np.linalg.norm(r_p) / bnorm
        rel_d = np.linalg.norm(r_d) / cnorm
        gap = mu * n_compl / (1.0 + abs(pobj))
        if rel_p <= tol.eps and rel_d <= tol.eps and gap <= tol.eps:
            status = Status.OPTIMAL
            break
        if it == tol.max_iter:
            break

        D = np.where(has_lo, zl / wl, 0.0) + np.where(has_up, zu / wu, 0.0)
        try:
            lin_solve = factor_newton(D)
        except np.linalg.LinAlgError:
            status = Status.NUMERICAL_FAILURE
            break

        def direction(rl, ru):
            r_hat = r_d - np.where(has_lo, rl / wl, 0.0) + np.where(has_up, ru / wu, 0.0)
            dx, dy = lin_solve(r_p, r_hat)
            dzl = np.where(has_lo, (rl - zl * dx) / wl, 0.0)
            dzu = np.where(has_up, (ru + zu * dx) / wu, 0.0)
            return dx, dy, dzl, dzu

        def max_steps(dx, dzl, dzu):
            ap = min(_step_length(wl[has_lo], dx[has_lo]), _step_length(wu[has_up], -dx[has_up]))
            ad = min(_step_length(zl[has_lo], dzl[has_lo]), _step_length(zu[has_up], dzu[has_up]))
            return ap, ad

        try:
            # predictor (affine scaling)
            rl = np.where(has_lo, -wl * zl, 0.0)
            ru = np.where(has_up, -wu * zu, 0.0)
            dx, dy, dzl, dzu = direction(rl, ru)
            ap, ad = max_steps(dx, dzl, dzu)
            wl_a = wl + ap * dx
            wu_a = wu - ap * dx
            mu_aff = (
                np.sum(wl_a[has_lo] * (zl + ad * dzl)[has_lo]) + np.sum(wu_a[has_up] * (zu + ad * dzu)[has_up])
            ) / max(n_compl, 1)
            sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0
            sigma = min(sigma, 1.0)
            # corrector with second-order term
            rl = np.where(has_lo, sigma * mu - wl * zl - dx * dzl, 0.0)
            ru = np.where(has_up, sigma * mu - wu * zu + dx * dzu, 0.0)
            dx, dy, dzl, dzu = direction(rl, ru)
        except np.linalg.LinAlgError:
            status = Status.NUMERICAL_FAILURE
            break
        if not (np.all(np.isfinite(dx)) and np.all(np.isfinite(dy))):
            status = Status.NUMERICAL_FAILURE
            break
        ap, ad = max_steps(dx, dzl, dzu)
        ap = min(1.0, tol.step_fraction * ap)
        ad = min(1.0, tol.step_fraction * ad)
        x = x + ap * dx
        y = y + ad * dy
        zl = zl + ad * dzl
        zu = zu + ad * dzu

    return LpSolution(
        x=x,
        objective=float(c @ x),
        status=status,
        iterations=it,
        primal_residual=float(rel_p),
        dual_residual=float(rel_d),
        duality_gap=float(gap),
        y=y,
    )
