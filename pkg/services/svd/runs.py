"""Execute decomposition, gap and series requests and shape their JSON payloads.

Shared by the command line, the HTTP routes and the worker task, so every
surface produces byte-identical results for identical parameters.
"""

import hashlib
import json
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from services.config import Settings, get_settings
from services.svd.anneal import (
    AnnealSchedule,
    InitialHamiltonian,
    evolve,
    fidelity,
    hamiltonian_bound,
)
from services.svd.errors import DimensionMismatch
from services.svd.matrix_core import DataMatrix, gauge_fix, gram, normalize_columns
from services.svd.oracle import full_diagonalize
from services.svd.series import series_sum, series_terms
from services.svd.spectrum import (
    SpectrumResult,
    anneal_scale,
    attach_oracle_fidelity,
    default_anneal_time,
    oracle_spectrum,
    top_k,
)
from services.svd.two_level import (
    TwoLevelParams,
    coefficient_profile,
    min_gap,
    min_gap_location,
    reduced_gap_oracle,
    time_scale,
)

logger = logging.getLogger(__name__)

GAP_CSV_HEADER = "x,E_minus,E_plus,gap,a,b"
# reference stepper for series runs: dt * Hbound = 1e-3
STEPPER_DENSITY = 1000.0
STEPPER_MIN_STEPS = 1000


def matrix_from_rows(rows: Sequence[Sequence[float]]) -> DataMatrix:
    if len({len(r) for r in rows}) != 1:
        raise DimensionMismatch("matrix rows have different lengths")
    return DataMatrix(np.array(rows, dtype=float))


def prepare_matrix(a: DataMatrix, normalize: bool) -> DataMatrix:
    return normalize_columns(a) if normalize else a


def initial_hamiltonian(params) -> InitialHamiltonian:
    return InitialHamiltonian(lambda0=params.lambda0, lambda_exc=params.lambda_exc,
                              ground_index=params.ground_index)


def build_schedule(params, n: int, settings: Optional[Settings] = None,
                   trace_stride: int = 0) -> AnnealSchedule:
    settings = settings or get_settings()
    T = params.T
    if T is None:
        T = default_anneal_time(n, params.lambda0, settings.time_prefactor)
    return AnnealSchedule(T=T, steps=params.steps, integrator=params.integrator,
                          trace_stride=trace_stride)


def run_decompose(a: DataMatrix, params, settings: Optional[Settings] = None,
                  trace_stride: int = 0) -> SpectrumResult:
    settings = settings or get_settings()
    a = prepare_matrix(a, params.normalize)
    schedule = build_schedule(params, a.cols, settings, trace_stride)
    tol = params.tol if params.tol is not None else settings.default_tol
    logger.info("[SPECTRUM] decompose %dx%d k=%d T=%g integrator=%s tol=%g",
                a.rows, a.cols, params.k, schedule.T, schedule.integrator, tol)
    result = top_k(a, params.k, schedule, tol=tol, h0=initial_hamiltonian(params),
                   scale=params.scale, gram_mode=params.gram_mode, seed=params.seed,
                   max_restarts=params.max_restarts)
    if params.compare_oracle:
        attach_oracle_fidelity(result, a)
    return result


def run_oracle(a: DataMatrix, params) -> SpectrumResult:
    a = prepare_matrix(a, params.normalize)
    decomposition = full_diagonalize(gram(a, mode="explicit"))
    result = oracle_spectrum(a, params.k, decomposition)
    result.fidelity = [1.0] * result.k
    return result


def matrix_digest(a: DataMatrix, params, method: str = "annealing") -> str:
    """md5 over the method, the matrix bytes and the run parameters."""
    payload = params.model_dump_json(exclude={"matrix"})
    h = hashlib.md5()
    h.update(method.encode("ascii"))
    h.update("{0}x{1}".format(a.rows, a.cols).encode("ascii"))
    h.update(np.ascontiguousarray(a.values).tobytes())
    h.update(payload.encode("utf-8"))
    return h.hexdigest()


def gap_report(p: TwoLevelParams, grid: int = 1001, oracle_grid: int = 10001,
               prefactor: float = 1.0) -> Tuple[dict, str]:
    """Summary JSON and the per-x CSV table of the two-level model."""
    gap = min_gap(p)
    x_star = min_gap_location(p)
    if not 0.0 <= x_star <= 1.0:
        # endpoint minimum: 2 Lambda0 at x=0, K Lambda0 at x=1
        x_star = 0.0 if p.K > 2.0 else 1.0
    rows = coefficient_profile(p, np.linspace(0.0, 1.0, grid))
    lines = [GAP_CSV_HEADER]
    for x, e_minus, e_plus, a, b in rows:
        lines.append("{0!r},{1!r},{2!r},{3!r},{4!r},{5!r}".format(
            float(x), float(e_minus), float(e_plus), float(e_plus - e_minus),
            float(a), float(b)))
    oracle_gap, oracle_x = reduced_gap_oracle(p, oracle_grid)
    summary = {
        "min_gap": gap,
        "argmin_x": x_star,
        "time_scale": time_scale(p, prefactor),
        "oracle_min_gap": oracle_gap,
        "oracle_argmin_x": oracle_x,
        "discrepancy": abs(gap - oracle_gap),
    }
    return summary, "\n".join(lines) + "\n"


def run_series(a: DataMatrix, T: float, h0: InitialHamiltonian, scale="rowsum",
               max_order: int = 400, tail_tol: float = 1e-14) -> dict:
    """Series state at t = T and its fidelity against a midpoint stepper run."""
    g = gram(a, mode="explicit")
    g = g.with_scale(anneal_scale(g, scale))
    expansion = series_terms(g, h0, T, max_order=max_order, tail_tol=tail_tol)
    raw = expansion.raw_sum()
    state = series_sum(expansion)
    steps = max(STEPPER_MIN_STEPS,
                int(math.ceil(STEPPER_DENSITY * T * hamiltonian_bound(g, h0))))
    stepped, _ = evolve(g, h0, AnnealSchedule(T=T, steps=steps, integrator="midpoint"))
    fixed = gauge_fix(state)
    return {
        "order_used": expansion.order,
        "tail_norm": expansion.tail_norm,
        "prenorm_norm": float(np.linalg.norm(raw)),
        "state": [[float(z.real), float(z.imag)] for z in fixed],
        "fidelity_vs_stepper": fidelity(state, stepped),
    }


def result_json(result: SpectrumResult) -> str:
    return json.dumps(result.to_dict(), indent=2) + "\n"
