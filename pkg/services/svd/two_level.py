"""Two-level reduction of the anneal onto span{v0, phi0}.

With K = lambda0 / Lambda0 and alpha = <phi0|v0> the reduced system matrix is

    [[-lambda0 x + (1-x) Lambda0,   -lambda0 x alpha   ],
     [-2 Lambda0 (1-x) alpha,       -(1-x) Lambda0     ]]

acting on the (non-orthogonal) coefficients (a, b) of a v0 + b phi0. Its
eigenvalues are the energy branches E-(x) <= E+(x).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from services.svd.errors import (
    DegenerateOverlap,
    IllConditioned,
    InputError,
    NegativeDiscriminant,
)
from services.svd.matrix_core import GramOperator

logger = logging.getLogger(__name__)

RADICAND_SLACK = 1e-12
OVERLAP_FLOOR = 1e-14
ROW_FLOOR = 1e-300


@dataclass(frozen=True)
class TwoLevelParams:
    K: float
    alpha: float
    lambda0: float = 1.0

    def __post_init__(self):
        if not self.K > 0:
            raise InputError("K must be positive, got {0!r}".format(self.K))
        if not -1.0 <= self.alpha <= 1.0:
            raise InputError("alpha must lie in [-1, 1], got {0!r}".format(self.alpha))
        if not self.lambda0 > 0:
            raise InputError("lambda0 must be positive, got {0!r}".format(self.lambda0))

    @property
    def top_eigenvalue(self) -> float:
        return self.K * self.lambda0


def _check_x(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise InputError("x={0!r} outside [0, 1]".format(x))
    return x


def system_matrix(p: TwoLevelParams, x: float) -> np.ndarray:
    x = _check_x(x)
    lam0, big = p.top_eigenvalue, p.lambda0
    return np.array([
        [-lam0 * x + (1.0 - x) * big, -lam0 * x * p.alpha],
        [-2.0 * big * (1.0 - x) * p.alpha, -(1.0 - x) * big],
    ])


def _radicand(p: TwoLevelParams, x: float) -> float:
    K, c = p.K, 2.0 * p.alpha ** 2 - 1.0
    r = x * x * K * K + 4.0 * (1.0 - x) ** 2 + 4.0 * x * (1.0 - x) * c * K
    if r < 0.0:
        if r < -RADICAND_SLACK:
            raise NegativeDiscriminant(r, x)
        r = 0.0
    return r


def energy_branches(p: TwoLevelParams, x: float) -> Tuple[float, float]:
    x = _check_x(x)
    root = math.sqrt(_radicand(p, x))
    half = 0.5 * p.lambda0
    return half * (-x * p.K - root), half * (-x * p.K + root)


def _branch_vector(m: np.ndarray, energy: float, x: float) -> np.ndarray:
    """Null vector of (M - E) from whichever row is better conditioned."""
    row1 = np.array([m[0, 0] - energy, m[0, 1]])
    row2 = np.array([m[1, 0], m[1, 1] - energy])
    n1, n2 = np.abs(row1).max(), np.abs(row2).max()
    if max(n1, n2) <= ROW_FLOOR:
        raise IllConditioned(x)
    row = row1 if n1 >= n2 else row2
    return np.array([-row[1], row[0]])


def _normalize(vec: np.ndarray, alpha: float, x: float) -> np.ndarray:
    # norm of a v0 + b phi0 with <v0|phi0> = alpha
    a, b = vec
    norm2 = a * a + b * b + 2.0 * a * b * alpha
    if norm2 <= 0.0:
        raise IllConditioned(x)
    return vec / math.sqrt(norm2)


def coefficients(p: TwoLevelParams, x: float) -> Tuple[float, float]:
    """Ground-branch (a, b) with a^2 + b^2 + 2ab alpha = 1.

    Sign convention: b >= 0, or a > 0 where b vanishes; this is the branch
    that starts at (0, 1) and ends at (1, 0).
    """
    x = _check_x(x)
    e_minus, _ = energy_branches(p, x)
    vec = _normalize(_branch_vector(system_matrix(p, x), e_minus, x), p.alpha, x)
    a, b = vec
    if b < 0 or (b == 0 and a < 0):
        a, b = -a, -b
    return float(a), float(b)


def coefficient_profile(p: TwoLevelParams, xs) -> np.ndarray:
    """Rows (x, E-, E+, a, b) with (a, b) tracked by eigenvector continuity."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise InputError("x grid must be a non-empty 1-D sequence")
    if np.any(np.diff(xs) <= 0):
        raise InputError("x grid must be strictly increasing")
    metric = np.array([[1.0, p.alpha], [p.alpha, 1.0]])
    rows = np.empty((xs.size, 5))
    prev: Optional[np.ndarray] = None
    for i, x in enumerate(xs):
        e_minus, e_plus = energy_branches(p, x)
        m = system_matrix(p, x)
        if prev is None:
            vec = np.array(coefficients(p, x))
        else:
            best, best_overlap = None, -1.0
            for energy in (e_minus, e_plus):
                try:
                    cand = _normalize(_branch_vector(m, energy, x), p.alpha, x)
                except IllConditioned:
                    continue
                overlap = float(cand @ metric @ prev)
                if abs(overlap) > best_overlap:
                    best, best_overlap = cand * math.copysign(1.0, overlap), abs(overlap)
            if best is None:
                raise IllConditioned(x)
            vec = best
        rows[i] = (x, e_minus, e_plus, vec[0], vec[1])
        prev = vec
    return rows


def _check_overlap(p: TwoLevelParams) -> None:
    if abs(p.alpha * (1.0 - p.alpha ** 2)) < OVERLAP_FLOOR:
        raise DegenerateOverlap(p.alpha)


def min_gap_location(p: TwoLevelParams) -> float:
    """Vertex of the quadratic radicand; may fall outside [0, 1]."""
    _check_overlap(p)
    K, c = p.K, 2.0 * p.alpha ** 2 - 1.0
    return (4.0 - 2.0 * K * c) / (K * K + 4.0 - 4.0 * K * c)


def min_gap(p: TwoLevelParams) -> float:
    """Smallest E+ - E- on [0, 1].

    The closed form 4 Lambda0 sqrt(K^2 a^2 (1-a^2) / ((2+K)^2 - 8 K a^2)) holds
    when the radicand vertex lies inside [0, 1]; otherwise the minimum sits at an
    endpoint, where the gap is 2 Lambda0 (x=0) or K Lambda0 (x=1).
    """
    _check_overlap(p)
    x_star = min_gap_location(p)
    if 0.0 <= x_star <= 1.0:
        K, a2 = p.K, p.alpha ** 2
        return 4.0 * p.lambda0 * math.sqrt(
            K * K * a2 * (1.0 - a2) / ((2.0 + K) ** 2 - 8.0 * K * a2))
    return p.lambda0 * min(2.0, p.K)


def time_scale(p: TwoLevelParams, prefactor: float = 1.0) -> float:
    """prefactor * Lambda0 / min_gap^2 (hbar = 1)."""
    gap = min_gap(p)
    if gap <= 0.0:
        raise DegenerateOverlap(p.alpha)
    return prefactor * p.lambda0 / gap ** 2


def overlap_time_scale(p: TwoLevelParams, prefactor: float = 1.0) -> float:
    """(2+K)^2 / (16 Lambda0 K^2 alpha^2 (1-alpha^2)), the small-overlap form."""
    _check_overlap(p)
    a2 = p.alpha ** 2
    return prefactor * (2.0 + p.K) ** 2 / (
        16.0 * p.lambda0 * p.K ** 2 * a2 * (1.0 - a2))


def _gap_at(p: TwoLevelParams, x: float) -> float:
    ev = np.sort(np.real(np.linalg.eigvals(system_matrix(p, x))))
    return float(ev[1] - ev[0])


def reduced_gap_oracle(p: TwoLevelParams, grid_size: int = 10001) -> Tuple[float, float]:
    """Minimum of E+ - E- by direct 2x2 diagonalization on an x-grid.

    The grid minimum is polished with a bounded scalar minimization on the
    two neighbouring cells.
    """
    if grid_size < 3:
        raise InputError("grid size must be at least 3")
    xs = np.linspace(0.0, 1.0, grid_size)
    lam0, big, alpha = p.top_eigenvalue, p.lambda0, p.alpha
    mats = np.empty((grid_size, 2, 2))
    mats[:, 0, 0] = -lam0 * xs + (1.0 - xs) * big
    mats[:, 0, 1] = -lam0 * xs * alpha
    mats[:, 1, 0] = -2.0 * big * (1.0 - xs) * alpha
    mats[:, 1, 1] = -(1.0 - xs) * big
    ev = np.sort(np.real(np.linalg.eigvals(mats)), axis=1)
    gaps = ev[:, 1] - ev[:, 0]
    i = int(np.argmin(gaps))
    best_gap, best_x = float(gaps[i]), float(xs[i])

    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, grid_size - 1)]
    polished = minimize_scalar(lambda x: _gap_at(p, x), bounds=(lo, hi),
                               method="bounded", options={"xatol": 1e-12})
    if polished.success and polished.fun < best_gap:
        best_gap, best_x = float(polished.fun), float(polished.x)
    logger.debug("[GAP] K=%g alpha=%g grid=%d min_gap=%.9f at x=%.6f",
                 p.K, p.alpha, grid_size, best_gap, best_x)
    return best_gap, best_x


def matched_instance(p: TwoLevelParams) -> Tuple[GramOperator, np.ndarray]:
    """Rank-1 2x2 Gram operator lambda0 v0 v0^T with <e0|v0> = alpha.

    The two-level reduction is exact on it when the initial Hamiltonian has
    Lambda0 = Lambda = p.lambda0 and ground index 0.
    """
    v0 = np.array([p.alpha, math.sqrt(max(1.0 - p.alpha ** 2, 0.0))])
    return GramOperator.from_dense(p.top_eigenvalue * np.outer(v0, v0)), v0
