"""Data matrix, Gram operator and singular-triplet algebra."""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from services.svd.errors import (
    ConstantColumn,
    DimensionMismatch,
    InputError,
    MatrixFormatError,
    ZeroSingularValue,
)

logger = logging.getLogger(__name__)

# Explicit (dense) Gram storage only up to this many columns.
DENSE_LIMIT = 4096
VARIANCE_FLOOR = 1e-14
EIGENVALUE_FLOOR = 1e-14

GRAM_MODES = ("explicit", "implicit", "auto")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DataMatrix:
    """Real m x n information matrix."""

    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(
                "data matrix must be 2-D and non-empty, got shape {0}".format(
                    arr.shape))
        if not np.all(np.isfinite(arr)):
            raise MatrixFormatError("data matrix contains non-finite entries")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass(frozen=True)
class GramOperator:
    """The action v -> A^T A v / scale, stored densely or through A."""

    n: int
    dense: Optional[np.ndarray] = None
    source: Optional[DataMatrix] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.dense is None and self.source is None:
            raise DimensionMismatch("gram operator needs a dense array or a source")
        if not self.scale > 0:
            raise InputError("gram scale must be positive")
        if self.dense is not None:
            g = np.array(self.dense, dtype=float)
            if g.shape != (self.n, self.n):
                raise DimensionMismatch(
                    "dense gram has shape {0}, expected ({1}, {1})".format(
                        g.shape, self.n))
            object.__setattr__(self, "dense", _frozen(g))
        elif self.source.cols != self.n:
            raise DimensionMismatch("source has {0} columns, expected {1}".format(
                self.source.cols, self.n))

    @classmethod
    def from_dense(cls, g, scale: float = 1.0) -> "GramOperator":
        g = np.asarray(g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionMismatch("gram matrix must be square")
        return cls(n=g.shape[0], dense=g, scale=scale)

    @property
    def explicit(self) -> bool:
        return self.dense is not None

    def with_scale(self, scale: float) -> "GramOperator":
        return replace(self, scale=float(scale))

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Unscaled product G v."""
        if self.dense is not None:
            return self.dense @ v
        a = self.source.values
        return a.T @ (a @ v)

    def to_dense(self) -> np.ndarray:
        """Unscaled n x n array (materialized on demand for implicit operators)."""
        if self.dense is not None:
            return self.dense
        a = self.source.values
        return a.T @ a

    def diagonal(self) -> np.ndarray:
        if self.dense is not None:
            return np.diag(self.dense).copy()
        return np.sum(self.source.values ** 2, axis=0)

    def row_sum_bound(self) -> float:
        """Max absolute row sum of the unscaled G, an upper bound on lambda_0."""
        if self.dense is not None:
            return float(np.abs(self.dense).sum(axis=1).max())
        abs_a = np.abs(self.source.values)
        return float((abs_a.T @ abs_a.sum(axis=1)).max())


@dataclass(frozen=True)
class PrincipalComponent:
    """Singular triplet (lambda, v, u) with its eigen-residual."""

    lam: float
    v: np.ndarray
    u: Optional[np.ndarray] = None
    residual: float = 0.0
    sigma: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "sigma", float(np.sqrt(max(self.lam, 0.0))))
        object.__setattr__(self, "v", _frozen(np.array(self.v)))
        if self.u is not None:
            object.__setattr__(self, "u", _frozen(np.array(self.u)))
        object.__setattr__(self, "residual", float(self.residual))


def normalize_columns(a: DataMatrix) -> DataMatrix:
    """Center every column and scale it to unit population variance."""
    values = a.values
    mean = values.mean(axis=0)
    centered = values - mean
    variance = (centered ** 2).mean(axis=0)
    flat = np.flatnonzero(variance <= VARIANCE_FLOOR)
    if flat.size:
        j = int(flat[0])
        raise ConstantColumn(j, float(variance[j]))
    return DataMatrix(centered / np.sqrt(variance), normalized=True)


def gram(a: DataMatrix, mode: str = "explicit", scale: float = 1.0) -> GramOperator:
    if mode not in GRAM_MODES:
        raise InputError("unknown gram mode {0!r}".format(mode))
    if mode == "auto":
        mode = "explicit" if a.cols <= DENSE_LIMIT else "implicit"
    if mode == "explicit":
        values = a.values
        g = values.T @ values
        # A^T A is symmetric in exact arithmetic; enforce it bitwise.
        g = 0.5 * (g + g.T)
        return GramOperator(n=a.cols, dense=g, scale=scale)
    return GramOperator(n=a.cols, source=a, scale=scale)


def gram_apply(g: GramOperator, v) -> np.ndarray:
    v = np.asarray(v)
    if v.shape != (g.n,):
        raise DimensionMismatch(
            "vector of shape {0} for operator of dimension {1}".format(
                v.shape, g.n))
    return g.apply(v) / g.scale


def eigen_residual(g: GramOperator, v: np.ndarray, lam: float) -> float:
    """||G v - lam v|| on the unscaled operator."""
    return float(np.linalg.norm(g.apply(v) - lam * v))


def left_vector(a: DataMatrix, v, lam: float) -> np.ndarray:
    if lam <= EIGENVALUE_FLOOR:
        raise ZeroSingularValue(lam)
    v = np.asarray(v)
    if v.shape != (a.cols,):
        raise DimensionMismatch(
            "right vector of length {0} for {1} columns".format(v.size, a.cols))
    return (a.values @ v) / np.sqrt(lam)


def gauge_fix(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    v = np.asarray(v)
    idx = int(np.argmax(np.abs(v)))
    pivot = v[idx]
    if pivot == 0:
        return v.copy()
    return v * (np.abs(pivot) / pivot)


def orthogonalize(v: np.ndarray, basis: Sequence[np.ndarray]) -> np.ndarray:
    """Modified Gram-Schmidt of v against unit vectors in basis, renormalized."""
    w = np.array(v)
    for b in basis:
        w = w - np.vdot(b, w) * b
    norm = np.linalg.norm(w)
    if norm == 0:
        return w
    return w / norm


def _outer_layer(c: PrincipalComponent) -> np.ndarray:
    return c.sigma * np.outer(c.u, np.conj(c.v))


def _check_component(c: PrincipalComponent, shape: Tuple[int, int]) -> None:
    if c.u is None:
        raise DimensionMismatch("component has no left vector")
    if (c.u.size, c.v.size) != tuple(shape):
        raise DimensionMismatch(
            "component of shape ({0}, {1}) for matrix {2}".format(
                c.u.size, c.v.size, tuple(shape)))


def reconstruct(components: List[PrincipalComponent], k: int,
                shape: Optional[Tuple[int, int]] = None) -> DataMatrix:
    """Partial SVD sum over the first k components.

    shape is taken from the first component when omitted; an empty component
    list needs it spelled out (the empty sum is the m x n zero matrix).
    """
    if k < 0 or k > len(components):
        raise DimensionMismatch(
            "k={0} outside [0, {1}]".format(k, len(components)))
    if shape is None:
        if not components or components[0].u is None:
            raise DimensionMismatch("cannot infer shape of an empty sum; pass shape=(m, n)")
        shape = (components[0].u.size, components[0].v.size)
    total = np.zeros(shape, dtype=complex)
    for c in components[:k]:
        _check_component(c, shape)
        total += _outer_layer(c)
    return DataMatrix(np.real(total))


def deflate(a: DataMatrix, c: PrincipalComponent) -> DataMatrix:
    """A - sqrt(lam) u v^dagger."""
    _check_component(c, a.shape)
    return DataMatrix(np.real(a.values - _outer_layer(c)))
