"""Synthetic hierarchical +-1 test image.

The 64 x 64 base image is the Kronecker product of three 4 x 4 sign patterns
acting at block sizes 16, 4 and 1, so its Gram matrix factorizes and its
spectrum is known in closed form: eight distinct leading eigenvalues with
ratios 1, 0.382, 0.333, 0.204, 0.146, 0.127, 0.078, 0.068.
"""

import numpy as np

from services.imaging.pgm import ImageMatrix
from services.svd.errors import InputError
from services.svd.matrix_core import DataMatrix

BASE_SIZE = 64


def _pattern(*flips):
    block = np.ones((4, 4))
    for row, col in flips:
        block[row, col] = -1.0
    return block


COARSE = _pattern((0, 0))
MIDDLE = _pattern((0, 0), (0, 1))
FINE = _pattern((0, 0), (1, 1))


def synthetic_pattern(size: int = BASE_SIZE) -> np.ndarray:
    """size x size array of +-1; size must be a multiple of 64 (pixel replication)."""
    if size < BASE_SIZE or size % BASE_SIZE:
        raise InputError("test image size must be a positive multiple of 64")
    base = np.kron(COARSE, np.kron(MIDDLE, FINE))
    factor = size // BASE_SIZE
    if factor > 1:
        base = np.kron(base, np.ones((factor, factor)))
    return base


def synthetic_matrix(size: int = BASE_SIZE) -> DataMatrix:
    return DataMatrix(synthetic_pattern(size))


def synthetic_image(size: int = BASE_SIZE, maxval: int = 255) -> ImageMatrix:
    pattern = synthetic_pattern(size)
    pixels = np.where(pattern > 0, maxval, 0)
    return ImageMatrix(size, size, maxval, pixels)
