"""Linear programs for the discrete restoration functionals.

The L1 objectives ``||M x - b||_1`` are split as ``M x - s+ + s- = b`` with
``s+, s- >= 0`` and cost ``sum(s+) + sum(s-)``. The fidelity rows of ``M``
and ``b`` carry the factor ``lambda_bar``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .degrade import HatKernel, convolution_matrix, hat_kernel
from .functional import aniso_tv, f2_cost, forward_diff_matrices
from .grid import BinaryImage, GridImage
from .ipm import LpSolution, SolverTolerances, Status, solve_box_lp

__all__ = [
    "StandardLp",
    "LpSolution",
    "SolverTolerances",
    "Status",
    "build_f1_lp",
    "build_f2_lp",
    "build_f3_lp",
    "solve",
    "image_from_solution",
    "brute_force_binary",
    "binary_objective",
    "dump_lp",
    "load_lp",
    "MAX_BRUTE_FORCE_PIXELS",
    "ZERO_SNAP",
]

MAX_BRUTE_FORCE_PIXELS = 20
ZERO_SNAP = 1e-9


@dataclass(eq=False)
class StandardLp:
    """``min cost.x`` s.t. ``a_eq x = b_eq``, ``lower <= x <= upper``.

    ``image`` is the slice of ``x`` holding the row-major image of shape
    ``image_shape``; ``rows`` names the row blocks of the split objective.
    """

    a_eq: sp.csr_matrix
    b_eq: np.ndarray
    cost: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    image: slice = slice(0, 0)
    image_shape: tuple[int, int] = (0, 0)
    rows: dict | None = None

    def __post_init__(self):
        self.a_eq = sp.csr_matrix(self.a_eq, dtype=float)
        self.b_eq = np.asarray(self.b_eq, dtype=float)
        self.cost = np.asarray(self.cost, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        m, n = self.a_eq.shape
        if self.b_eq.shape != (m,):
            raise ValueError("b_eq length does not match a_eq rows")
        for name in ("cost", "lower", "upper"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} length does not match a_eq columns")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def n(self) -> int:
        return self.a_eq.shape[1]

    @property
    def m_eq(self) -> int:
        return self.a_eq.shape[0]


def _split_lp(M: sp.spmatrix, rhs: np.ndarray, shape, rows) -> StandardLp:
    m, n = M.shape
    eye = sp.identity(m, format="csr")
    a_eq = sp.hstack([M, -eye, eye], format="csr")
    cost = np.concatenate((np.zeros(n), np.ones(2 * m)))
    lower = np.concatenate((np.full(n, -np.inf), np.zeros(2 * m)))
    upper = np.full(n + 2 * m, np.inf)
    return StandardLp(a_eq, rhs, cost, lower, upper, slice(0, n), shape, rows)


def build_f3_lp(f: GridImage, lambda_bar: float, k: HatKernel) -> StandardLp:
    """Variables ``(x, s+, s-)``; rows ``[Dx; Dy; lambda_bar * K]``."""
    if lambda_bar < 0:
        raise ValueError("lambda_bar must be >= 0")
    h, w = f.shape
    ops = forward_diff_matrices(w, h)
    K = convolution_matrix(k, w, h)
    M = sp.vstack([ops.dx, ops.dy, lambda_bar * K], format="csr")
    m1, m2 = ops.dx.shape[0], ops.dy.shape[0]
    rhs = np.concatenate((np.zeros(m1 + m2), lambda_bar * f.flat()))
    rows = {"dx": slice(0, m1), "dy": slice(m1, m1 + m2), "fidelity": slice(m1 + m2, m1 + m2 + h * w)}
    return _split_lp(M, rhs, (h, w), rows)


def build_f1_lp(f: GridImage, lambda_bar: float) -> StandardLp:
    return build_f3_lp(f, lambda_bar, hat_kernel(1))


def build_f2_lp(f: GridImage, lambda_bar: float) -> StandardLp:
    """Variables ``(v, t+, t-)`` with ``v`` in ``[0, 1]``."""
    if lambda_bar < 0:
        raise ValueError("lambda_bar must be >= 0")
    h, w = f.shape
    n = h * w
    D = forward_diff_matrices(w, h).stacked
    m = D.shape[0]
    eye = sp.identity(m, format="csr")
    a_eq = sp.hstack([D, -eye, eye], format="csr")
    cost = np.concatenate((lambda_bar * f2_cost(f).ravel(), np.ones(2 * m)))
    lower = np.zeros(n + 2 * m)
    upper = np.concatenate((np.ones(n), np.full(2 * m, np.inf)))
    rows = {"dx": slice(0, (w - 1) * h), "dy": slice((w - 1) * h, m)}
    return StandardLp(a_eq, np.zeros(m), cost, lower, upper, slice(0, n), (h, w), rows)


def solve(lp: StandardLp, tol: SolverTolerances | None = None) -> LpSolution:
    return solve_box_lp(lp.a_eq, lp.b_eq, lp.cost, lp.lower, lp.upper, tol)


def image_from_solution(lp: StandardLp, sol: LpSolution, spacing: float = 1.0) -> GridImage:
    """Image slice of the solution with ``|x| < ZERO_SNAP`` set to 0."""
    x = sol.x[lp.image].copy()
    x[np.abs(x) < ZERO_SNAP] = 0.0
    return GridImage(x.reshape(lp.image_shape), spacing)


def _bit_patterns(n: int, start: int, stop: int) -> np.ndarray:
    """Rows are codes ``start..stop-1``; pixel 0 is the most significant bit."""
    codes = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.float64)


def binary_objective(bits: np.ndarray, f: GridImage, lambda_bar: float, k: HatKernel | None = None) -> np.ndarray:
    """Objective of stacked row-major images ``bits`` (one per row)."""
    h, w = f.shape
    u = bits.reshape(-1, h, w)
    tv = np.abs(np.diff(u, axis=2)).sum(axis=(1, 2)) + np.abs(np.diff(u, axis=1)).sum(axis=(1, 2))
    if k is None or k.is_identity:
        ku = bits
    else:
        ku = (convolution_matrix(k, w, h) @ bits.T).T
    return tv + lambda_bar * np.abs(ku - f.flat()).sum(axis=1)


def brute_force_binary(f: GridImage, lambda_bar: float, k: HatKernel | None = None, chunk: int = 1 << 16) -> BinaryImage:
    """Exact binary minimizer by enumeration of all ``2**(W*H)`` images.

    Ties (within 1e-12 relative) go to fewer ones, then to the
    lexicographically smallest row-major bit string.
    """
    h, w = f.shape
    n = h * w
    if n > MAX_BRUTE_FORCE_PIXELS:
        raise ValueError(f"brute force limited to {MAX_BRUTE_FORCE_PIXELS} pixels, got {n}")
    total = 1 << n
    values = np.empty(total)
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        values[start:stop] = binary_objective(_bit_patterns(n, start, stop), f, lambda_bar, k)
    best = values.min()
    tied = np.flatnonzero(values <= best + 1e-12 * max(1.0, abs(best)))
    ones = np.array([bin(int(c)).count("1") for c in tied])
    code = int(tied[ones == ones.min()].min())
    return BinaryImage(_bit_patterns(n, code, code + 1).reshape(h, w).astype(np.uint8))


def dump_lp(lp: StandardLp) -> str:
    """Plain-text form: ``n m_eq`` header, ``nnz`` then COO triplets
    ``row col value``, then sections ``b_eq``, ``cost``, ``lower``, ``upper``
    with one value per line (``inf``/``-inf`` for missing bounds).
    """
    coo = lp.a_eq.tocoo()
    out = io.StringIO()
    out.write(f"{lp.n} {lp.m_eq}\n{coo.nnz}\n")
    for i, j, v in zip(coo.row, coo.col, coo.data):
        out.write(f"{int(i)} {int(j)} {float(v)!r}\n")
    for name in ("b_eq", "cost", "lower", "upper"):
        out.write(f"{name}\n")
        out.writelines(f"{float(v)!r}\n" for v in getattr(lp, name))
    return out.getvalue()


def load_lp(text: str) -> StandardLp:
    lines = iter(text.splitlines())
    n, m = (int(t) for t in next(lines).split())
    nnz = int(next(lines))
    trip = np.array([next(lines).split() for _ in range(nnz)], dtype=float).reshape(nnz, 3)
    a_eq = sp.csr_matrix((trip[:, 2], (trip[:, 0].astype(int), trip[:, 1].astype(int))), shape=(m, n))
    vecs = {}
    for name, size in (("b_eq", m), ("cost", n), ("lower", n), ("upper", n)):
        if next(lines).strip() != name:
            raise ValueError(f"expected section {name}")
        vecs[name] = np.array([float(next(lines)) for _ in range(size)])
    return StandardLp(a_eq, **vecs)
