"""Restoration by exact minimization of the L1-TV functionals."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from . import lp as lpmod
from .degrade import HatKernel, convolve_same, hat_kernel
from .functional import aniso_tv, f2_cost
from .grid import BinaryImage, GridImage, threshold
from .ipm import LpSolution, SolverTolerances

logger = logging.getLogger(__name__)

__all__ = [
    "RestoreReport",
    "SolverFailure",
    "denoise_f1",
    "denoise_f2",
    "deblur_f3",
    "restore",
    "pixel_error",
    "sweep_lambda",
    "sweep_csv",
    "DEFAULT_THRESHOLD",
]

DEFAULT_THRESHOLD = 0.5
METHODS = ("f1", "f2", "f3")


class SolverFailure(RuntimeError):
    def __init__(self, solution: LpSolution):
        super().__init__(f"LP solver stopped with status {solution.status} after {solution.iterations} iterations")
        self.solution = solution


@dataclass
class RestoreReport:
    method: str
    lambda_bar: float
    output: GridImage
    binary_output: BinaryImage
    objective: float
    tv: float
    fidelity: float
    threshold: float = DEFAULT_THRESHOLD
    pixel_error_vs_reference: float | None = None
    iterations: int = 0
    status: str = "optimal"
    solver: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "method": self.method,
            "lambda_bar": self.lambda_bar,
            "objective": self.objective,
            "tv": self.tv,
            "fidelity": self.fidelity,
            "pixel_error": "" if self.pixel_error_vs_reference is None else self.pixel_error_vs_reference,
            "iterations": self.iterations,
            "status": self.status,
        }


def pixel_error(a: BinaryImage, b: BinaryImage) -> float:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.mean(a.bits != b.bits))


def _run(lp, tol):
    sol = lpmod.solve(lp, tol)
    if not sol.optimal:
        raise SolverFailure(sol)
    return sol


def _solver_stats(sol: LpSolution) -> dict:
    return {
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "duality_gap": sol.duality_gap,
    }


def _finish(method, lambda_bar, out, sol, tv, fid, t, reference):
    binary = threshold(out, t)
    err = None if reference is None else pixel_error(binary, reference)
    return RestoreReport(
        method=method,
        lambda_bar=float(lambda_bar),
        output=out,
        binary_output=binary,
        objective=sol.objective,
        tv=tv,
        fidelity=fid,
        threshold=t,
        pixel_error_vs_reference=err,
        iterations=sol.iterations,
        status=sol.status,
        solver=_solver_stats(sol),
    )


def deblur_f3(
    f: GridImage,
    lambda_bar: float,
    k: HatKernel,
    t: float = DEFAULT_THRESHOLD,
    reference: BinaryImage | None = None,
    tol: SolverTolerances | None = None,
) -> RestoreReport:
    return _l1_restore("f3", f, lambda_bar, k, t, reference, tol)


def _l1_restore(method, f, lambda_bar, k, t, reference, tol):
    if not 0 < t < 1:
        raise ValueError("threshold must lie strictly between 0 and 1")
    lp = lpmod.build_f3_lp(f, lambda_bar, k)
    sol = _run(lp, tol)
    out = lpmod.image_from_solution(lp, sol, f.spacing)
    fid = lambda_bar * float(np.abs(convolve_same(out, k).values - f.values).sum())
    return _finish(method, lambda_bar, out, sol, aniso_tv(out), fid, t, reference)


def denoise_f1(
    f: GridImage,
    lambda_bar: float,
    t: float = DEFAULT_THRESHOLD,
    reference: BinaryImage | None = None,
    tol: SolverTolerances | None = None,
) -> RestoreReport:
    return _l1_restore("f1", f, lambda_bar, hat_kernel(1), t, reference, tol)


def denoise_f2(
    f: GridImage,
    lambda_bar: float,
    t: float = DEFAULT_THRESHOLD,
    reference: BinaryImage | None = None,
    tol: SolverTolerances | None = None,
) -> RestoreReport:
    """Relaxed binary denoising; ``binary_output`` is the level set ``{v >= t}``."""
    if not 0 < t < 1:
        raise ValueError("threshold must lie strictly between 0 and 1")
    lp = lpmod.build_f2_lp(f, lambda_bar)
    sol = _run(lp, tol)
    v = sol.x[lp.image].reshape(lp.image_shape)
    out = GridImage(np.clip(v, 0.0, 1.0), f.spacing)
    fid = lambda_bar * float((f2_cost(f) * out.values).sum())
    return _finish("f2", lambda_bar, out, sol, aniso_tv(out), fid, t, reference)


def restore(
    f: GridImage,
    method: str,
    lambda_bar: float,
    k: HatKernel | None = None,
    t: float = DEFAULT_THRESHOLD,
    reference: BinaryImage | None = None,
    tol: SolverTolerances | None = None,
) -> RestoreReport:
    if method == "f1":
        return denoise_f1(f, lambda_bar, t, reference, tol)
    if method == "f2":
        return denoise_f2(f, lambda_bar, t, reference, tol)
    if method == "f3":
        return deblur_f3(f, lambda_bar, k or hat_kernel(1), t, reference, tol)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


@dataclass
class SweepItem:
    lambda_bar: float
    report: RestoreReport | None = None
    error: str | None = None


def sweep_lambda(
    f: GridImage,
    method: str,
    lambdas,
    k: HatKernel | None = None,
    t: float = DEFAULT_THRESHOLD,
    reference: BinaryImage | None = None,
    tol: SolverTolerances | None = None,
) -> list[SweepItem]:
    """Independent restorations, one per ``lambda_bar``; failures are recorded."""
    lambdas = list(lambdas)
    if not lambdas:
        raise ValueError("empty lambda list")
    items = []
    for lam in lambdas:
        try:
            items.append(SweepItem(float(lam), restore(f, method, lam, k, t, reference, tol)))
        except (SolverFailure, ValueError) as exc:
            logger.warning("sweep item lambda_bar=%s failed: %s", lam, exc)
            items.append(SweepItem(float(lam), error=str(exc)))
    return items


SWEEP_COLUMNS = ("lambda_bar", "objective", "tv", "fidelity", "pixel_error", "status")


def sweep_csv(items: list[SweepItem]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for it in items:
        if it.report is None:
            writer.writerow([repr(it.lambda_bar), "", "", "", "", f"error: {it.error}"])
            continue
        r = it.report
        err = "" if r.pixel_error_vs_reference is None else repr(r.pixel_error_vs_reference)
        writer.writerow([repr(r.lambda_bar), repr(r.objective), repr(r.tv), repr(r.fidelity), err, r.status])
    return buf.getvalue()
