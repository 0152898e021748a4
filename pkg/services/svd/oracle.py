"""Classical eigensolvers used as ground truth for annealed results."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from services.svd.errors import DimensionMismatch, MaxIterExceeded, NotSymmetric
from services.svd.matrix_core import (
    DENSE_LIMIT,
    EIGENVALUE_FLOOR,
    GramOperator,
    PrincipalComponent,
    gauge_fix,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
ROTATION_THRESHOLD = 1e-14
MAX_SWEEPS = 100
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues descending, eigenvectors as the matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    iterations: int
    off_diagonal_norm: float

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def component(self, j: int) -> PrincipalComponent:
        return PrincipalComponent(lam=self.eigenvalues[j], v=self.eigenvectors[:, j])

    def degenerate(self, i: int, j: int) -> bool:
        top = max(abs(self.eigenvalues[0]), EIGENVALUE_FLOOR)
        return abs(self.eigenvalues[i] - self.eigenvalues[j]) <= DEGENERACY_TOL * top


def _off_norm(a: np.ndarray) -> float:
    return float(math.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0)))


def full_diagonalize(g: GramOperator) -> EigenDecomposition:
    """Cyclic Jacobi rotations until a sweep finds no off-diagonal entry to remove."""
    if g.n > DENSE_LIMIT:
        raise DimensionMismatch(
            "dense diagonalization limited to n <= {0}".format(DENSE_LIMIT))
    a = np.array(g.to_dense(), dtype=float) / g.scale
    scale = float(np.abs(a).max()) if a.size else 0.0
    asymmetry = float(np.abs(a - a.T).max())
    if asymmetry > SYMMETRY_TOL * max(scale, EIGENVALUE_FLOOR):
        raise NotSymmetric(asymmetry)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    floor = ROTATION_THRESHOLD * max(scale, EIGENVALUE_FLOOR)

    sweeps = 0
    rotating = n > 1
    while rotating:
        if sweeps >= MAX_SWEEPS:
            raise MaxIterExceeded(sweeps, _off_norm(a))
        sweeps += 1
        rotating = False
        for p in range(n):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= floor:
                    continue
                # tan(2 theta) = 2 a_pq / (a_pp - a_qq), kept to |theta| <= pi/4
                theta = 0.5 * math.atan2(2.0 * a[p, q], a[p, p] - a[q, q])
                if theta > math.pi / 4:
                    theta -= math.pi / 2
                elif theta < -math.pi / 4:
                    theta += math.pi / 2
                c, s = math.cos(theta), math.sin(theta)
                rotating = True
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p + s * col_q
                a[:, q] = -s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p + s * row_q
                a[q, :] = -s * row_p + c * row_q
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p + s * vec_q
                v[:, q] = -s * vec_p + c * vec_q

    order = np.argsort(-np.diag(a), kind="stable")
    values = np.diag(a)[order] * g.scale
    vectors = v[:, order]
    for j in range(n):
        vectors[:, j] = np.real(gauge_fix(vectors[:, j]))
    off = _off_norm(a) * g.scale
    logger.debug("[ORACLE] jacobi n=%d sweeps=%d off-diagonal=%.3e", n, sweeps, off)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenDecomposition(values, vectors, sweeps, off)


def power_iteration(g: GramOperator, tol: float = 1e-10, max_iter: int = 100000,
                    seed: int = 0) -> PrincipalComponent:
    """Dominant eigenpair of the unscaled operator.

    Stops once ||G x - lam x|| < tol * max(|lam|, 1).
    """
    rng = np.random.default_rng(seed)
    x = rng.normal(size=g.n)
    x_norm = np.linalg.norm(x)
    if x_norm == 0:
        x[0] = 1.0
        x_norm = 1.0
    x = x / x_norm

    lam, res = 0.0, float("inf")
    for it in range(1, max_iter + 1):
        y = g.apply(x)
        y_norm = np.linalg.norm(y)
        if y_norm == 0:
            if g.row_sum_bound() == 0:
                return PrincipalComponent(lam=0.0, v=x)
            # x is in the nullspace; re-initialize
            x = rng.normal(size=g.n)
            x = x / np.linalg.norm(x)
            continue
        lam = float(x @ y)
        x_new = y / y_norm
        res = float(np.linalg.norm(g.apply(x_new) - lam * x_new))
        x = x_new
        if res < tol * max(abs(lam), 1.0):
            # refresh lambda on the final iterate
            lam = float(x @ g.apply(x))
            v = np.real(gauge_fix(x))
            u = None
            if g.source is not None and lam > EIGENVALUE_FLOOR:
                u = g.source.values @ v
                u = u / np.linalg.norm(u)
            logger.debug("[ORACLE] power iteration converged after %d steps", it)
            return PrincipalComponent(lam=lam, v=v, u=u,
                                      residual=float(np.linalg.norm(g.apply(v) - lam * v)))
    raise MaxIterExceeded(max_iter, res)
