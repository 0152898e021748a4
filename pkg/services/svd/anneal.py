"""Schroedinger-equation annealing from the diagonal initial Hamiltonian to -G.

Units: hbar = epsilon = 1, so T is measured in hbar/epsilon.
States are complex numpy vectors; the largest-magnitude amplitude is rotated
real positive (gauge_fix) before anything is reported.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from services.svd.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InputError,
    NormBlowup,
)
from services.svd.matrix_core import GramOperator, gram_apply

logger = logging.getLogger(__name__)

INTEGRATORS = ("euler", "euler-renorm", "midpoint")
STEP_SAFETY = 10.0
# Propagators of systems up to this size are multiplied in batches instead of
# stepping the state vector one step at a time.
BATCH_DIM_LIMIT = 8
BATCH_ELEMENTS = 1 << 20
FIXED_POINT_TOL = 1e-14
FIXED_POINT_MAX_ITER = 100
NORM_WINDOW = (0.5, 2.0)
MAX_LOG_NORM = 700.0

StateVector = np.ndarray


@dataclass(frozen=True)
class InitialHamiltonian:
    """-lambda0 on the ground basis vector, +lambda_exc on all others.

    basis, when given, is an orthogonal n x n matrix whose columns replace the
    computational basis vectors.
    """

    lambda0: float = 1.0
    lambda_exc: float = 1.0
    ground_index: int = 0
    basis: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (self.lambda0 > 0 and self.lambda_exc > 0):
            raise InputError("lambda0 and lambda_exc must be positive")
        if self.ground_index < 0:
            raise IndexOutOfRange(self.ground_index, 0)
        if self.basis is not None:
            q = np.array(self.basis, dtype=float)
            if q.ndim != 2 or q.shape[0] != q.shape[1]:
                raise DimensionMismatch("rotation basis must be square")
            q.setflags(write=False)
            object.__setattr__(self, "basis", q)

    @property
    def bound(self) -> float:
        return max(self.lambda0, self.lambda_exc)

    def diagonal(self, n: int) -> np.ndarray:
        if self.ground_index >= n:
            raise IndexOutOfRange(self.ground_index, n)
        if self.basis is not None and self.basis.shape[0] != n:
            raise DimensionMismatch(
                "rotation basis of size {0} for dimension {1}".format(
                    self.basis.shape[0], n))
        d = np.full(n, float(self.lambda_exc))
        d[self.ground_index] = -float(self.lambda0)
        return d

    def apply(self, psi: np.ndarray) -> np.ndarray:
        d = self.diagonal(psi.shape[0])
        if self.basis is None:
            return d * psi
        q = self.basis
        return q @ (d * (q.T @ psi))

    def to_dense(self, n: int) -> np.ndarray:
        d = self.diagonal(n)
        if self.basis is None:
            return np.diag(d)
        q = self.basis
        return (q * d) @ q.T


@dataclass(frozen=True)
class AnnealSchedule:
    T: float
    steps: Optional[int] = None
    integrator: str = "midpoint"
    trace_stride: int = 0

    def __post_init__(self):
        if not self.T > 0:
            raise InputError("anneal time T must be positive")
        if self.steps is not None and self.steps < 1:
            raise InputError("step count must be positive")
        if self.integrator not in INTEGRATORS:
            raise InputError("unknown integrator {0!r}".format(self.integrator))
        if self.trace_stride < 0:
            raise InputError("trace stride must be nonnegative")

    def step_count(self, h_bound: float) -> int:
        if self.steps is not None:
            return int(self.steps)
        n = int(math.ceil(STEP_SAFETY * self.T * h_bound))
        if self.integrator == "euler":
            # Euler grows the norm by about exp(T * dt * H^2 / 2); keep it <= sqrt(2).
            n = max(n, int(math.ceil((self.T * h_bound) ** 2 / math.log(2.0))))
        return max(n, 1)


@dataclass
class AnnealTrace:
    times: List[float] = field(default_factory=list)
    xs: List[float] = field(default_factory=list)
    rayleigh: List[float] = field(default_factory=list)
    norms: List[float] = field(default_factory=list)
    overlap: List[Optional[float]] = field(default_factory=list)

    HEADER = "t,x,rayleigh,norm,overlap"

    def __len__(self) -> int:
        return len(self.times)

    def to_csv(self) -> str:
        lines = [self.HEADER]
        for t, x, e, nrm, ov in zip(self.times, self.xs, self.rayleigh,
                                    self.norms, self.overlap):
            lines.append("{0!r},{1!r},{2!r},{3!r},{4}".format(
                t, x, e, nrm, "" if ov is None else repr(ov)))
        return "\n".join(lines) + "\n"


def initial_state(h0: InitialHamiltonian, n: int) -> StateVector:
    if not 0 <= h0.ground_index < n:
        raise IndexOutOfRange(h0.ground_index, n)
    psi = np.zeros(n, dtype=complex)
    if h0.basis is None:
        psi[h0.ground_index] = 1.0
    else:
        psi[:] = h0.basis[:, h0.ground_index]
    return psi


def hamiltonian_apply(g: GramOperator, h0: InitialHamiltonian, x: float,
                      psi) -> np.ndarray:
    """H(x) psi = -x G psi + (1 - x) H0 psi, with G carrying its scale."""
    if not 0.0 <= x <= 1.0:
        raise InputError("x={0!r} outside [0, 1]".format(x))
    psi = np.asarray(psi)
    if psi.shape != (g.n,):
        raise DimensionMismatch(
            "state of shape {0} for dimension {1}".format(psi.shape, g.n))
    return -x * gram_apply(g, psi) + (1.0 - x) * h0.apply(psi)


def hamiltonian_bound(g: GramOperator, h0: InitialHamiltonian) -> float:
    return max(h0.bound, g.row_sum_bound() / g.scale)


def rayleigh_quotient(g: GramOperator, psi) -> float:
    """Re<psi|G|psi>/<psi|psi> on the unscaled operator."""
    psi = np.asarray(psi)
    return float(np.real(np.vdot(psi, g.apply(psi))) / np.real(np.vdot(psi, psi)))


def fidelity(psi, ref) -> float:
    psi = np.asarray(psi)
    ref = np.asarray(ref)
    value = abs(np.vdot(ref, psi)) / (np.linalg.norm(ref) * np.linalg.norm(psi))
    return float(min(value, 1.0))


def _energy(g, h0, x, psi) -> float:
    """<H(x)> with G unscaled, so the value at x = 1 is minus the eigenvalue read-out."""
    h0_part = float(np.real(np.vdot(psi, h0.apply(psi))) / np.real(np.vdot(psi, psi)))
    return -x * rayleigh_quotient(g, psi) + (1.0 - x) * h0_part


def _record(trace: AnnealTrace, g, h0, t: float, x: float, psi,
            reference: Optional[np.ndarray]) -> None:
    norm = float(np.linalg.norm(psi))
    trace.times.append(t)
    trace.xs.append(x)
    trace.rayleigh.append(_energy(g, h0, x, psi))
    trace.norms.append(norm)
    trace.overlap.append(None if reference is None else fidelity(psi, reference))


def _check_norm(psi, step: int) -> None:
    norm = float(np.linalg.norm(psi))
    if not NORM_WINDOW[0] <= norm <= NORM_WINDOW[1]:
        raise NormBlowup(norm, step)


def _time_ordered_product(mats: np.ndarray) -> Tuple[np.ndarray, float]:
    """S_{b-1} ... S_1 S_0 for a stack in time order, by pairwise reduction.

    Every partial product is divided by its Frobenius norm; the product is
    returned as (P, log_scale) with S_{b-1} ... S_0 = exp(log_scale) * P.
    """
    logs = np.zeros(mats.shape[0])
    while mats.shape[0] > 1:
        tail = tail_log = None
        if mats.shape[0] % 2:
            tail, tail_log = mats[-1:], logs[-1:]
            mats, logs = mats[:-1], logs[:-1]
        mats = np.matmul(mats[1::2], mats[0::2])
        norms = np.linalg.norm(mats, axis=(1, 2))
        mats = mats / norms[:, None, None]
        logs = logs[1::2] + logs[0::2] + np.log(norms)
        if tail is not None:
            mats = np.concatenate([mats, tail])
            logs = np.concatenate([logs, tail_log])
    return mats[0], float(logs[0])


def _evolve_batched(g_dense, h0_dense, integrator: str, steps: int, dt: float,
                    psi: np.ndarray) -> np.ndarray:
    n = psi.shape[0]
    eye = np.eye(n, dtype=complex)
    coupling = g_dense + h0_dense          # H(x) = H0 - x * coupling
    chunk = max(1, BATCH_ELEMENTS // (n * n))
    done = 0
    while done < steps:
        count = min(chunk, steps - done)
        k = np.arange(done, done + count, dtype=float)
        if integrator == "midpoint":
            x = ((k + 0.5) / steps)[:, None, None]
            lhs = eye + 0.5j * dt * (h0_dense - x * coupling)
            # (I + i dt/2 H)^-1 (I - i dt/2 H) = 2 (I + i dt/2 H)^-1 - I
            mats = 2.0 * np.linalg.inv(lhs) - eye
        else:
            x = (k / steps)[:, None, None]
            mats = eye - 1j * dt * (h0_dense - x * coupling)
        product, log_scale = _time_ordered_product(mats)
        psi = product @ psi
        done += count
        if integrator == "euler-renorm":
            # the per-step renormalizations multiply to one scalar
            psi = psi / np.linalg.norm(psi)
            continue
        log_norm = math.log(np.linalg.norm(psi)) + log_scale
        if integrator == "euler" and not (
                math.log(NORM_WINDOW[0]) <= log_norm <= math.log(NORM_WINDOW[1])):
            raise NormBlowup(math.exp(min(log_norm, MAX_LOG_NORM)), done)
        psi = psi * math.exp(log_scale)
    return psi


def _midpoint_fixed_point(g, h0, x: float, dt: float, psi, step: int):
    """Solve psi' = psi - i dt/2 H (psi + psi') by fixed-point iteration."""
    half = 0.5j * dt
    explicit_part = psi - half * hamiltonian_apply(g, h0, x, psi)
    nxt = explicit_part - half * hamiltonian_apply(g, h0, x, psi)
    scale = np.linalg.norm(psi)
    for _ in range(FIXED_POINT_MAX_ITER):
        new = explicit_part - half * hamiltonian_apply(g, h0, x, nxt)
        if np.linalg.norm(new - nxt) <= FIXED_POINT_TOL * scale:
            return new
        nxt = new
    raise NormBlowup(float(np.linalg.norm(nxt)), step)


def evolve(g: GramOperator, h0: InitialHamiltonian, schedule: AnnealSchedule,
           reference: Optional[np.ndarray] = None
           ) -> Tuple[StateVector, AnnealTrace]:
    """Integrate from the initial ground state at t=0 to t=T."""
    n = g.n
    psi = initial_state(h0, n)
    h_bound = hamiltonian_bound(g, h0)
    steps = schedule.step_count(h_bound)
    T = float(schedule.T)
    dt = T / steps
    stride = schedule.trace_stride
    integrator = schedule.integrator
    trace = AnnealTrace()

    logger.debug("[ANNEAL] n=%d T=%g steps=%d dt=%.3e integrator=%s",
                 n, T, steps, dt, integrator)

    if stride:
        _record(trace, g, h0, 0.0, 0.0, psi, reference)

    if g.explicit and n <= BATCH_DIM_LIMIT and not stride:
        g_dense = g.to_dense() / g.scale
        psi = _evolve_batched(g_dense, h0.to_dense(n), integrator, steps, dt, psi)
    else:
        dense = None
        if g.explicit:
            g_dense = g.to_dense() / g.scale
            h0_dense = h0.to_dense(n)
            dense = (h0_dense, g_dense + h0_dense, np.eye(n, dtype=complex))
        for k in range(steps):
            if integrator == "midpoint":
                x = (k + 0.5) / steps
                if dense is not None:
                    h0_dense, coupling, eye = dense
                    lhs = eye + 0.5j * dt * (h0_dense - x * coupling)
                    psi = np.linalg.solve(lhs, 2.0 * psi - lhs @ psi)
                else:
                    psi = _midpoint_fixed_point(g, h0, x, dt, psi, k)
            else:
                x = k / steps
                psi = psi - 1j * dt * hamiltonian_apply(g, h0, x, psi)
                if integrator == "euler-renorm":
                    psi = psi / np.linalg.norm(psi)
                else:
                    _check_norm(psi, k + 1)
            if stride and ((k + 1) % stride == 0 or k + 1 == steps):
                _record(trace, g, h0, T * (k + 1) / steps, (k + 1) / steps,
                        psi, reference)

    if not np.all(np.isfinite(psi)):
        raise NormBlowup(math.inf, steps)
    logger.debug("[ANNEAL] finished, norm=%.12f", float(np.linalg.norm(psi)))
    return psi, trace
