"""Rank-1 layers and partial sums of a decomposition, written as PGM files."""

import logging
import os
from typing import List

from services.cli.matrix_io import atomic_write
from services.imaging.pgm import to_image, write_pgm
from services.svd.errors import InputError
from services.svd.matrix_core import DataMatrix, reconstruct
from services.svd.spectrum import SpectrumResult

logger = logging.getLogger(__name__)


def spectrum_csv(result: SpectrumResult) -> str:
    lines = ["j,lambda,sigma"]
    for j, c in enumerate(result.components):
        lines.append("{0},{1!r},{2!r}".format(j, c.lam, c.sigma))
    return "\n".join(lines) + "\n"


def emit_reconstructions(a: DataMatrix, result: SpectrumResult, out_dir: str,
                         binary: bool = True) -> List[str]:
    """component_j.pgm, partial_j.pgm for every component, then spectrum.csv."""
    if not result.components:
        raise InputError("nothing to emit: the decomposition is empty")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for j in range(result.k):
        layer = reconstruct(result.components[j:j + 1], 1, a.shape)
        partial = reconstruct(result.components, j + 1, a.shape)
        for name, values in (("component_{0}.pgm".format(j), layer.values),
                             ("partial_{0}.pgm".format(j), partial.values)):
            path = os.path.join(out_dir, name)
            atomic_write(path, write_pgm(to_image(values), binary=binary))
            written.append(path)
    path = os.path.join(out_dir, "spectrum.csv")
    atomic_write(path, spectrum_csv(result).encode("utf-8"))
    written.append(path)
    residual = DataMatrix(a.values - partial.values).frobenius()
    logger.info("[IMAGE] wrote %d files to %s (final Frobenius residual %.4g)",
                len(written), out_dir, residual)
    return written
