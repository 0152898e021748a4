import cmath

import numpy as np
import pytest

from services.svd import runs
from services.svd.anneal import AnnealSchedule, InitialHamiltonian, evolve, fidelity
from services.svd.errors import InputError, SeriesRangeError, TruncationNotReached
from services.svd.matrix_core import DataMatrix, GramOperator, gram, gram_apply
from services.svd.series import series_sum, series_terms


def test_leading_terms(demo_a):
    expansion = series_terms(gram(demo_a), InitialHamiltonian(), 1.0)
    np.testing.assert_array_equal(expansion.terms[0], [1, 0])
    np.testing.assert_allclose(expansion.terms[1], [1j, 0])
    assert expansion.T == 1.0
    assert len(expansion.term_norms) == expansion.order + 1


def test_constant_hamiltonian_gives_exponential():
    # G = -H0 keeps H(x) = -Lambda0 for every x
    g = GramOperator.from_dense(np.array([[1.0]]))
    expansion = series_terms(g, InitialHamiltonian(), 2.0)
    assert expansion.raw_sum()[0] == pytest.approx(cmath.exp(2j), abs=1e-12)
    for n in range(1, 6):
        ratio = expansion.terms[n][0] / expansion.terms[n - 1][0]
        assert ratio == pytest.approx(2j / n, abs=1e-12)


def test_zero_order_is_initial_state(demo_a):
    expansion = series_terms(gram(demo_a), InitialHamiltonian(ground_index=1), 3.0)
    np.testing.assert_array_equal(series_sum(expansion, order=0), [0, 1])
    with pytest.raises(InputError):
        series_sum(expansion, order=expansion.order + 1)


def test_series_matches_stepper_at_short_time(demo_a):
    g = gram(demo_a)
    h0 = InitialHamiltonian()
    state = series_sum(series_terms(g, h0, 1.0))
    stepped, _ = evolve(g, h0, AnnealSchedule(T=1.0, steps=10 ** 5))
    assert np.linalg.norm(state) == pytest.approx(1.0)
    assert fidelity(state, stepped) >= 1 - 1e-8


def test_series_matches_stepper_with_few_terms(demo_a):
    g = gram(demo_a)
    h0 = InitialHamiltonian()
    expansion = series_terms(g, h0, 5.0)
    assert expansion.order <= 60
    assert expansion.tail_norm <= 1e-14 * max(expansion.term_norms)
    stepped, _ = evolve(g, h0, AnnealSchedule(T=5.0, steps=10 ** 5))
    assert fidelity(series_sum(expansion), stepped) >= 1 - 1e-6


def test_series_range_is_enforced(demo_a):
    with pytest.raises(SeriesRangeError) as err:
        series_terms(gram(demo_a), InitialHamiltonian(), 100.0)
    assert err.value.product > err.value.limit


def test_truncation_not_reached(demo_a):
    with pytest.raises(TruncationNotReached) as err:
        series_terms(gram(demo_a), InitialHamiltonian(), 5.0, max_order=3)
    assert err.value.order == 3


def test_series_rejects_bad_arguments(demo_a):
    with pytest.raises(InputError):
        series_terms(gram(demo_a), InitialHamiltonian(), 0.0)
    with pytest.raises(InputError):
        series_terms(gram(demo_a), InitialHamiltonian(), 1.0, max_order=1)


@pytest.mark.slow
def test_series_agrees_with_stepper_on_random_instances():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        a = DataMatrix(rng.normal(size=(n + 2, n)))
        T = float(rng.uniform(1.0, 10.0))
        h0 = InitialHamiltonian(ground_index=int(rng.integers(0, n)))
        payload = runs.run_series(a, T, h0, scale="rowsum")
        assert payload["fidelity_vs_stepper"] >= 1 - 1e-6
        assert len(payload["state"]) == n


def test_truncated_series_solves_the_equation_order_by_order(rng):
    g = gram(DataMatrix(rng.normal(size=(6, 4))))
    g = g.with_scale(g.row_sum_bound())
    h0 = InitialHamiltonian(ground_index=2)
    T = 6.0
    expansion = series_terms(g, h0, T)
    f = expansion.terms
    scale = max(expansion.term_norms)
    # coefficient of (t/T)^m in i d/dt psi - H(t) psi
    for m in range(expansion.order - 1):
        coefficient = 1j * (m + 1) / T * f[m + 1] - h0.apply(f[m])
        if m >= 1:
            coefficient = coefficient + gram_apply(g, f[m - 1]) + h0.apply(f[m - 1])
        assert np.linalg.norm(coefficient) <= 1e-10 * scale


@pytest.mark.parametrize("seed", range(5))
def test_term_norms_stay_under_majorant(seed):
    rng = np.random.default_rng(seed)
    g = gram(DataMatrix(rng.normal(size=(6, 4))))
    g = g.with_scale(g.row_sum_bound())
    h0 = InitialHamiltonian(ground_index=seed % 4)
    T = 8.0
    expansion = series_terms(g, h0, T)
    b0 = h0.bound
    coupling = g.row_sum_bound() / g.scale + b0
    bound = [1.0, T * b0]
    for n in range(2, expansion.order + 1):
        bound.append(T / n * (b0 * bound[-1] + coupling * bound[-2]))
    for norm, limit in zip(expansion.term_norms, bound):
        assert norm <= limit * (1 + 1e-12)
