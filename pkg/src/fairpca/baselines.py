"""Riemannian subgradient ascent (RSG) baseline for fair PCA.

Maximizes Phi(U) = min_i f_i(U) directly: at each iterate the currently
worst group i* = argmin_i f_i(U_k) supplies a subgradient of Phi, and the
update retracts an ascent step along it with the classical diminishing
stepsize c / sqrt(k):

    U_{k+1} = R_{U_k}((c / sqrt(k)) grad f_{i*}(U_k)).

A run stops once Phi(U) >= (1 - 1e-4) * reference_phi (the reference is
typically another solver's final value) or after max_iters steps.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .arpgda import IterationRecord, SolveResult
from .exceptions import DiagnosticUnavailableError, NumericalError
from .problem import (
    GroupedDataset,
    dist_to_subgradient,
    group_objectives,
    group_riemannian_gradient,
    projections,
)
from .stiefel import orthonormality_error, polar_retract, random_stiefel

# Relative slack of the reference stopping rule.
REFERENCE_SLACK = 1e-4


def rsg_step(
    U: np.ndarray,
    data: GroupedDataset,
    c: float,
    k: int,
    *,
    proj: np.ndarray | None = None,
) -> np.ndarray:
    """One ascent step along the worst group's Riemannian gradient.

    Ties in the worst group are broken toward the lowest index.
    """
    if not c > 0:
        raise ValueError(f"c must be positive, got {c!r}")
    if not k >= 1:
        raise ValueError(f"k must be at least 1, got {k!r}")
    P = projections(data, U) if proj is None else proj
    values = group_objectives(data, U, proj=P)
    i_star = int(np.argmin(values))
    g = group_riemannian_gradient(data, i_star, U, proj=P)
    if not np.all(np.isfinite(g)):
        raise NumericalError(f"non-finite subgradient at iteration {k}")
    return polar_retract(U, (c / math.sqrt(k)) * g)


@dataclass(frozen=True)
class RSGParams:
    """Run parameters for solve_rsg."""

    c: float
    max_iters: int = 100_000
    seed: int = 0
    reference_phi: float | None = None
    trace_stride: int = 100
    record_dist: bool = False
    tol_orth: float = 1e-8

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c!r}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be non-negative, got {self.max_iters!r}")
        if self.trace_stride < 1:
            raise ValueError(f"trace_stride must be at least 1, got {self.trace_stride!r}")


def _dist_or_none(data: GroupedDataset, U: np.ndarray) -> float | None:
    try:
        return dist_to_subgradient(data, U)
    except DiagnosticUnavailableError:
        return None


def solve_rsg(data: GroupedDataset, r: int, params: RSGParams) -> SolveResult:
    """Run RSG from a seeded random start.

    The stopping rule is checked at each iterate before stepping, so on exit
    either Phi >= (1 - 1e-4) * reference_phi held (converged, including at
    the very first iterate with zero steps taken) or exactly max_iters steps
    were applied.  iterations counts the steps actually taken.  The trace
    records Phi (and, when record_dist is set, dist_to_subgradient) every
    trace_stride steps plus the final iterate.
    """

    t0 = time.perf_counter()
    U = random_stiefel(data.d, int(r), params.seed)
    P = projections(data, U)
    values = group_objectives(data, U, proj=P)
    phi = float(values.min())
    max_orth = orthonormality_error(U)
    trace: list[IterationRecord] = []
    last = time.perf_counter()

    def record(steps: int) -> None:
        nonlocal last
        now = time.perf_counter()
        trace.append(
            IterationRecord(
                k=steps,
                phi=phi,
                stationarity=None,
                grad_norm=None,
                gap=None,
                lam=None,
                beta=None,
                zeta=params.c / math.sqrt(steps) if steps >= 1 else None,
                ms=(now - last) * 1e3,
                dist_subgrad=_dist_or_none(data, U) if params.record_dist else None,
            )
        )
        last = now

    record(0)
    steps = 0
    converged = False
    while True:
        if params.reference_phi is not None and phi >= (1.0 - REFERENCE_SLACK) * params.reference_phi:
            converged = True
            break
        if steps >= params.max_iters:
            break
        U = rsg_step(U, data, params.c, steps + 1, proj=P)
        steps += 1
        P = projections(data, U)
        values = group_objectives(data, U, proj=P)
        if not np.all(np.isfinite(values)):
            raise NumericalError(f"non-finite group objectives at step {steps}")
        phi = float(values.min())
        orth = orthonormality_error(U)
        max_orth = max(max_orth, orth)
        if orth > params.tol_orth:
            raise NumericalError(
                f"iterate left the manifold at step {steps}: residual {orth:.3e}"
            )
        if steps % params.trace_stride == 0:
            record(steps)

    if not trace or trace[-1].k != steps:
        record(steps)
    return SolveResult(
        algorithm="rsg",
        U=U,
        y=None,
        phi=phi,
        stationarity=None,
        iterations=steps,
        converged=converged,
        trace=trace,
        violations=[],
        max_orth_error=max_orth,
        time_ms=(time.perf_counter() - t0) * 1e3,
        info={
            "c": params.c,
            "reference_phi": params.reference_phi,
            "reference_slack": REFERENCE_SLACK,
        },
    )
