"""Anneal -> eigenvalue read-out -> left vector -> deflation, one component at a time."""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import ortho_group

from services.svd.anneal import AnnealSchedule, AnnealTrace, InitialHamiltonian, evolve
from services.svd.errors import DimensionMismatch, IndexOutOfRange, InputError, NotConverged
from services.svd.matrix_core import (
    EIGENVALUE_FLOOR,
    DataMatrix,
    GramOperator,
    PrincipalComponent,
    deflate,
    eigen_residual,
    gauge_fix,
    gram,
    left_vector,
    orthogonalize,
)
from services.svd.oracle import EigenDecomposition, full_diagonalize
from services.svd.two_level import TwoLevelParams, min_gap

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-4
DEFAULT_PREFACTOR = 50.0
MIN_ANNEAL_TIME = 1e3

ScaleMode = Union[str, float]


@dataclass
class SpectrumResult:
    components: List[PrincipalComponent]
    fidelity: Optional[List[float]] = None
    restarts: int = 0
    method: str = "annealing"
    anneal_times: List[float] = field(default_factory=list)
    traces: List[AnnealTrace] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def lambdas(self) -> List[float]:
        return [c.lam for c in self.components]

    @property
    def singular_values(self) -> List[float]:
        return [c.sigma for c in self.components]

    def to_dict(self) -> dict:
        def vec(x):
            return None if x is None else [float(t) for t in np.real(x)]

        return {
            "method": self.method,
            "lambda": self.lambdas,
            "singular_values": self.singular_values,
            "v": [vec(c.v) for c in self.components],
            "u": [vec(c.u) for c in self.components],
            "residuals": [c.residual for c in self.components],
            "restarts": self.restarts,
            "fidelity_vs_oracle": self.fidelity,
        }


def residual(g: GramOperator, c: PrincipalComponent) -> float:
    if c.v.shape != (g.n,):
        raise DimensionMismatch(
            "component of length {0} for operator of dimension {1}".format(
                c.v.size, g.n))
    return eigen_residual(g, c.v, c.lam)


def default_anneal_time(n: int, lambda0: float = 1.0,
                        prefactor: float = DEFAULT_PREFACTOR) -> float:
    """prefactor * Lambda0 / gap^2 for the worst guaranteed overlap 1/sqrt(n), K = 1."""
    if n < 2:
        return MIN_ANNEAL_TIME
    gap = min_gap(TwoLevelParams(K=1.0, alpha=1.0 / math.sqrt(n), lambda0=lambda0))
    return max(prefactor * lambda0 / gap ** 2, MIN_ANNEAL_TIME)


def anneal_scale(g: GramOperator, mode: ScaleMode = "rowsum") -> float:
    if mode == "rowsum":
        bound = g.row_sum_bound()
        return bound if bound > 0 else 1.0
    if mode == "none":
        return 1.0
    try:
        value = float(mode)
    except (TypeError, ValueError):
        raise InputError("unknown scale mode {0!r}".format(mode))
    if not value > 0:
        raise InputError("gram scale must be positive")
    return value


def _initial_hamiltonians(h0: InitialHamiltonian, n: int,
                          seed: int) -> Iterator[InitialHamiltonian]:
    """The configured ground index, every other index in turn, then one random basis."""
    for shift in range(n):
        yield replace(h0, ground_index=(h0.ground_index + shift) % n)
    if n > 1:
        basis = ortho_group.rvs(n, random_state=seed)
        yield replace(h0, ground_index=h0.ground_index % n, basis=basis)


def _null_component(a: DataMatrix, accepted: Sequence[np.ndarray]) -> PrincipalComponent:
    n = a.cols
    for j in range(n):
        v = orthogonalize(np.eye(n)[:, j], accepted)
        if np.linalg.norm(v) > 0.5:
            break
    return PrincipalComponent(lam=0.0, v=v, u=np.zeros(a.rows))


def _anneal_component(a: DataMatrix, schedule: AnnealSchedule, tol: float,
                      h0: InitialHamiltonian, accepted: Sequence[np.ndarray],
                      scale: ScaleMode, gram_mode: str, seed: int,
                      max_restarts: Optional[int], index: int
                      ) -> Tuple[PrincipalComponent, int, Optional[AnnealTrace]]:
    g = gram(a, mode=gram_mode)
    if h0.ground_index >= g.n:
        raise IndexOutOfRange(h0.ground_index, g.n)
    if g.row_sum_bound() == 0:
        return _null_component(a, accepted), 0, None
    g_scaled = g.with_scale(anneal_scale(g, scale))
    top_diag = float(g.diagonal().max())
    cap = g.n + 1 if max_restarts is None else min(g.n + 1, max_restarts + 1)

    best = math.inf
    attempts = 0
    for attempt, h in enumerate(_initial_hamiltonians(h0, g.n, seed)):
        if attempt >= cap:
            break
        attempts += 1
        psi, trace = evolve(g_scaled, h, schedule)
        v = np.real(gauge_fix(psi))
        v = orthogonalize(v / np.linalg.norm(v), accepted)
        lam = float(v @ g.apply(v))
        res = eigen_residual(g, v, lam)
        bar = tol * max(lam, 1.0)
        # an exact eigenpair below the largest diagonal entry is not the top one
        shortfall = max(top_diag - bar - lam, 0.0)
        defect = max(res, shortfall)
        logger.debug("[SPECTRUM] component %d attempt %d ground=%d rotated=%s "
                     "lambda=%.6g residual=%.3e", index, attempt, h.ground_index,
                     h.basis is not None, lam, res)
        if res <= bar and shortfall == 0.0:
            if lam > EIGENVALUE_FLOOR:
                u = left_vector(a, v, lam)
                u = u / np.linalg.norm(u)
            else:
                u = np.zeros(a.rows)
            logger.info("[SPECTRUM] component %d accepted: lambda=%.6g residual=%.3e "
                        "restarts=%d", index, lam, res, attempt)
            return PrincipalComponent(lam=lam, v=v, u=u, residual=res), attempt, trace
        best = min(best, defect)
    logger.warning("[SPECTRUM] component %d not converged after %d attempts "
                   "(best residual %.3e)", index, attempts, best)
    raise NotConverged(best, component_index=index, attempts=attempts)


def top_component(a: DataMatrix, schedule: AnnealSchedule, tol: float = DEFAULT_TOL,
                  h0: Optional[InitialHamiltonian] = None, scale: ScaleMode = "rowsum",
                  gram_mode: str = "auto", seed: int = 0,
                  max_restarts: Optional[int] = None) -> PrincipalComponent:
    """Top singular triplet of A by annealing, with the ground-index restart policy."""
    component, _, _ = _anneal_component(
        a, schedule, tol, h0 or InitialHamiltonian(), (), scale, gram_mode, seed,
        max_restarts, 0)
    return component


def top_k(a: DataMatrix, k: int, schedule: AnnealSchedule, tol: float = DEFAULT_TOL,
          h0: Optional[InitialHamiltonian] = None, scale: ScaleMode = "rowsum",
          gram_mode: str = "auto", seed: int = 0,
          max_restarts: Optional[int] = None) -> SpectrumResult:
    if not 1 <= k <= min(a.rows, a.cols):
        raise InputError("k={0} outside [1, {1}]".format(k, min(a.rows, a.cols)))
    h0 = h0 or InitialHamiltonian()
    current = a
    components: List[PrincipalComponent] = []
    restarts = 0
    traces: List[AnnealTrace] = []
    for j in range(k):
        c, tries, trace = _anneal_component(
            current, schedule, tol, h0, [p.v for p in components], scale,
            gram_mode, seed + j, max_restarts, j)
        restarts += tries
        components.append(c)
        if trace is not None and len(trace):
            traces.append(trace)
        if j + 1 < k:
            current = deflate(current, c)
    components.sort(key=lambda c: -c.lam)
    return SpectrumResult(components, restarts=restarts, method="annealing",
                          anneal_times=[float(schedule.T)] * k, traces=traces)


def oracle_spectrum(a: DataMatrix, k: int,
                    decomposition: Optional[EigenDecomposition] = None) -> SpectrumResult:
    """Top-k triplets from dense Jacobi diagonalization of A^T A."""
    if not 1 <= k <= min(a.rows, a.cols):
        raise InputError("k={0} outside [1, {1}]".format(k, min(a.rows, a.cols)))
    g = gram(a, mode="explicit")
    decomposition = decomposition or full_diagonalize(g)
    components = []
    for j in range(k):
        lam = max(float(decomposition.eigenvalues[j]), 0.0)
        v = np.array(decomposition.eigenvectors[:, j])
        if lam > EIGENVALUE_FLOOR:
            u = left_vector(a, v, lam)
        else:
            u = np.zeros(a.rows)
        components.append(PrincipalComponent(lam=lam, v=v, u=u,
                                             residual=eigen_residual(g, v, lam)))
    return SpectrumResult(components, method="oracle")


def attach_oracle_fidelity(result: SpectrumResult, a: DataMatrix,
                           decomposition: Optional[EigenDecomposition] = None
                           ) -> SpectrumResult:
    """Fill per-component |<v_oracle|v>|; within a degenerate eigenspace the
    projection norm onto the whole eigenspace is reported instead."""
    decomposition = decomposition or full_diagonalize(gram(a, mode="explicit"))
    vectors = decomposition.eigenvectors
    fidelities = []
    for j, c in enumerate(result.components):
        group = [i for i in range(decomposition.n) if decomposition.degenerate(i, j)]
        basis = vectors[:, group]
        fidelities.append(float(min(np.linalg.norm(basis.T @ c.v), 1.0)))
    result.fidelity = fidelities
    return result


