"""Error hierarchy for the decomposition stack.

InputError subclasses mean the request itself is unusable (CLI exit 2, HTTP 422).
ConvergenceError subclasses mean a numerical procedure gave up (CLI exit 1,
HTTP 409).
"""

from typing import Optional


class DecompositionError(Exception):
    """Base class for every error raised by services.svd and services.imaging."""


class InputError(DecompositionError):
    pass


class ConvergenceError(DecompositionError):
    pass


class ConstantColumn(InputError):
    def __init__(self, column: int, variance: float):
        self.column = column
        self.variance = variance
        super().__init__(
            "column {0} has variance {1:.3e} and cannot be normalized".format(
                column, variance))


class DimensionMismatch(InputError):
    pass


class ZeroSingularValue(InputError):
    def __init__(self, value: float):
        self.value = value
        super().__init__(
            "eigenvalue {0:.3e} too small, left vector undefined".format(value))


class IndexOutOfRange(InputError):
    def __init__(self, index: int, dim: int):
        self.index = index
        self.dim = dim
        super().__init__(
            "ground index {0} outside [0, {1})".format(index, dim))


class NotSymmetric(InputError):
    def __init__(self, asymmetry: float):
        self.asymmetry = asymmetry
        super().__init__(
            "operator asymmetry {0:.3e} exceeds tolerance".format(asymmetry))


class DegenerateOverlap(InputError):
    def __init__(self, alpha: float):
        self.alpha = alpha
        super().__init__(
            "overlap alpha={0!r} makes the gap formula degenerate".format(alpha))


class NegativeDiscriminant(InputError):
    def __init__(self, radicand: float, x: float):
        self.radicand = radicand
        self.x = x
        super().__init__(
            "radicand {0:.3e} < 0 at x={1!r}".format(radicand, x))


class IllConditioned(InputError):
    def __init__(self, x: float):
        self.x = x
        super().__init__(
            "both rows of the reduced system vanish at x={0!r}".format(x))


class SeriesRangeError(InputError):
    def __init__(self, product: float, limit: float):
        self.product = product
        self.limit = limit
        super().__init__(
            "T*Hbound={0:.3g} exceeds series range {1:.3g}".format(
                product, limit))


class MatrixFormatError(InputError):
    pass


class MalformedHeader(InputError):
    pass


class TruncatedPixels(InputError):
    def __init__(self, expected: int, found: int):
        self.expected = expected
        self.found = found
        super().__init__(
            "expected {0} pixels, found {1}".format(expected, found))


class UnsupportedMagic(InputError):
    def __init__(self, magic: str):
        self.magic = magic
        super().__init__("unsupported image magic {0!r}".format(magic))


class NotConverged(ConvergenceError):
    def __init__(self, best_residual: float,
                 component_index: Optional[int] = None, attempts: int = 0):
        self.best_residual = best_residual
        self.component_index = component_index
        self.attempts = attempts
        where = "" if component_index is None else " (component {0})".format(
            component_index)
        super().__init__(
            "anneal not converged{0}: best residual {1:.3e} after {2} "
            "attempts".format(where, best_residual, attempts))


class NormBlowup(ConvergenceError):
    def __init__(self, norm: float, step: int):
        self.norm = norm
        self.step = step
        super().__init__(
            "state norm {0:.4g} left [0.5, 2] at step {1}; dt too large".format(
                norm, step))


class TruncationNotReached(ConvergenceError):
    def __init__(self, order: int, tail_norm: float):
        self.order = order
        self.tail_norm = tail_norm
        super().__init__(
            "series tail {0:.3e} above threshold at order {1}".format(
                tail_norm, order))


class MaxIterExceeded(ConvergenceError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            "no convergence after {0} iterations (residual {1:.3e})".format(
                iterations, residual))
