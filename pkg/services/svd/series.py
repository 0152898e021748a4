"""Power-series propagator psi(t) = sum_n (t/T)^n f_n.

The time-independent terms follow from substituting the series into the
Schroedinger equation (hbar = 1):

    f_0 = phi_0
    f_1 = (T/i) H0 f_0
    f_n = (T/(i n)) [H0 f_{n-1} - (G + H0) f_{n-2}]

Intermediate terms peak near n ~ T * Hbound and the sum cancels them, so the
construction refuses T * Hbound above SERIES_RANGE.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from services.svd.anneal import (
    InitialHamiltonian,
    StateVector,
    hamiltonian_bound,
    initial_state,
)
from services.svd.errors import InputError, SeriesRangeError, TruncationNotReached
from services.svd.matrix_core import GramOperator, gram_apply

logger = logging.getLogger(__name__)

SERIES_RANGE = 30.0
DEFAULT_TAIL_TOL = 1e-14
DEFAULT_MAX_ORDER = 400


@dataclass
class SeriesExpansion:
    terms: List[np.ndarray]
    T: float
    tail_norm: float
    term_norms: List[float] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    def raw_sum(self, order: Optional[int] = None) -> np.ndarray:
        """Unnormalized sum of f_0 .. f_order at t = T."""
        if order is None:
            order = self.order
        if not 0 <= order <= self.order:
            raise InputError("order {0} outside [0, {1}]".format(order, self.order))
        return np.sum(self.terms[:order + 1], axis=0)


def series_terms(g: GramOperator, h0: InitialHamiltonian, T: float,
                 max_order: int = DEFAULT_MAX_ORDER,
                 tail_tol: float = DEFAULT_TAIL_TOL) -> SeriesExpansion:
    if not T > 0:
        raise InputError("anneal time T must be positive")
    if max_order < 2:
        raise InputError("max order must be at least 2")
    product = T * hamiltonian_bound(g, h0)
    if product > SERIES_RANGE:
        raise SeriesRangeError(product, SERIES_RANGE)

    f0 = initial_state(h0, g.n)
    f1 = -1j * T * h0.apply(f0)
    terms = [f0, f1]
    norms = [float(np.linalg.norm(f0)), float(np.linalg.norm(f1))]
    peak = max(norms)
    quiet = 0
    for n in range(2, max_order + 1):
        prev, prev2 = terms[-1], terms[-2]
        f = (T / (1j * n)) * (h0.apply(prev) - gram_apply(g, prev2) - h0.apply(prev2))
        norm = float(np.linalg.norm(f))
        terms.append(f)
        norms.append(norm)
        # both terms feeding the next one are negligible
        quiet = quiet + 1 if norm <= tail_tol * peak else 0
        if quiet >= 2:
            logger.debug("[SERIES] T=%g converged at order %d (tail %.3e)",
                         T, n, norm)
            return SeriesExpansion(terms, float(T), norm, norms)
        peak = max(peak, norm)
    raise TruncationNotReached(max_order, norms[-1])


def series_sum(expansion: SeriesExpansion, order: Optional[int] = None) -> StateVector:
    """Normalized sum at t = T; order 0 gives phi_0."""
    psi = expansion.raw_sum(order)
    return psi / np.linalg.norm(psi)
