import numpy as np
import pytest

from services.svd.anneal import (
    AnnealSchedule,
    AnnealTrace,
    InitialHamiltonian,
    evolve,
    fidelity,
    hamiltonian_apply,
    hamiltonian_bound,
    initial_state,
    rayleigh_quotient,
)
from services.svd.errors import IndexOutOfRange, InputError, NormBlowup
from services.svd.matrix_core import DataMatrix, GramOperator, gauge_fix, gram
from services.svd.oracle import full_diagonalize

DIAG = 1.0 / np.sqrt(2.0)


def _dense_hamiltonian(g, h0, x):
    return np.column_stack([hamiltonian_apply(g, h0, x, e) for e in np.eye(g.n)])


def test_initial_state():
    np.testing.assert_array_equal(initial_state(InitialHamiltonian(), 2), [1, 0])
    np.testing.assert_array_equal(
        initial_state(InitialHamiltonian(ground_index=2), 4), [0, 0, 1, 0])
    with pytest.raises(IndexOutOfRange):
        initial_state(InitialHamiltonian(ground_index=5), 3)


def test_initial_hamiltonian_rotated_basis():
    q = np.array([[DIAG, -DIAG], [DIAG, DIAG]])
    h0 = InitialHamiltonian(basis=q)
    np.testing.assert_allclose(initial_state(h0, 2), [DIAG, DIAG])
    np.testing.assert_allclose(h0.apply(np.array([DIAG, DIAG])), [-DIAG, -DIAG], atol=1e-15)
    np.testing.assert_allclose(h0.to_dense(2), [[0.0, -1.0], [-1.0, 0.0]], atol=1e-15)


def test_initial_hamiltonian_validation():
    with pytest.raises(InputError):
        InitialHamiltonian(lambda0=0.0)
    with pytest.raises(IndexOutOfRange):
        InitialHamiltonian(ground_index=-1)


def test_hamiltonian_at_start(demo_g):
    out = hamiltonian_apply(demo_g, InitialHamiltonian(), 0.0, np.array([1.0, 0.0]))
    np.testing.assert_allclose(out, [-1.0, 0.0])


def test_hamiltonian_at_end(demo_g):
    psi = np.array([DIAG, DIAG])
    out = hamiltonian_apply(demo_g, InitialHamiltonian(), 1.0, psi)
    np.testing.assert_allclose(out, -1.43 * psi, atol=1e-12)


def test_hamiltonian_midway_matches_dense_assembly(rng):
    a = DataMatrix(rng.normal(size=(4, 3)))
    g = gram(a)
    h0 = InitialHamiltonian(ground_index=1, lambda_exc=2.0)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    expected = (-0.5 * g.to_dense() + 0.5 * np.diag([2.0, -1.0, 2.0])) @ psi
    out = hamiltonian_apply(g, h0, 0.5, psi)
    assert np.abs(out - expected).max() <= 1e-12


def test_hamiltonian_is_hermitian(rng):
    g = gram(DataMatrix(rng.normal(size=(5, 4))), scale=3.0)
    q = np.linalg.qr(rng.normal(size=(4, 4)))[0]
    for h0 in (InitialHamiltonian(ground_index=3), InitialHamiltonian(basis=q)):
        for x in (0.0, 0.3, 1.0):
            h = _dense_hamiltonian(g, h0, x)
            np.testing.assert_allclose(h, h.conj().T, atol=1e-12)


def test_hamiltonian_rejects_x_outside_unit_interval(demo_g):
    with pytest.raises(InputError):
        hamiltonian_apply(demo_g, InitialHamiltonian(), 1.5, np.ones(2))


def test_rayleigh_quotient(demo_g):
    assert rayleigh_quotient(demo_g, np.array([DIAG, DIAG])) == pytest.approx(1.43)
    assert rayleigh_quotient(demo_g, np.array([1.0, 0.0])) == pytest.approx(1.0)
    eye = GramOperator.from_dense(np.eye(3))
    assert rayleigh_quotient(eye, np.array([0.6, 0.0, 0.8])) == pytest.approx(1.0)


def test_fidelity_is_phase_invariant(rng):
    ref = rng.normal(size=3) + 1j * rng.normal(size=3)
    assert fidelity(np.exp(1.3j) * ref, ref) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0


def test_schedule_step_count():
    assert AnnealSchedule(T=1000.0).step_count(1.0) == 10000
    assert AnnealSchedule(T=1000.0, steps=50).step_count(1.0) == 50
    # plain Euler needs (T H)^2 / ln 2 steps to keep the norm below sqrt(2)
    assert AnnealSchedule(T=1000.0, integrator="euler").step_count(1.0) == 1442696


def test_schedule_validation():
    with pytest.raises(InputError):
        AnnealSchedule(T=0.0)
    with pytest.raises(InputError):
        AnnealSchedule(T=1.0, integrator="rk4")
    with pytest.raises(InputError):
        AnnealSchedule(T=1.0, steps=0)


def test_demo_anneal_reaches_top_component(demo_a):
    g = gram(demo_a)
    psi, trace = evolve(g, InitialHamiltonian(), AnnealSchedule(T=1000.0))
    assert len(trace) == 0
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(np.abs(gauge_fix(psi)), [DIAG, DIAG], atol=5e-3)
    v0 = full_diagonalize(g).eigenvectors[:, 0]
    assert fidelity(psi, v0) >= 0.999


def test_commuting_target_leaves_state_unchanged():
    g = GramOperator.from_dense(np.diag([3.0, 1.0]))
    psi, _ = evolve(g, InitialHamiltonian(), AnnealSchedule(T=100.0))
    assert fidelity(psi, np.array([1.0, 0.0])) >= 1 - 1e-9


@pytest.mark.slow
def test_midpoint_and_renormalized_euler_agree(demo_a):
    g = gram(demo_a)
    h0 = InitialHamiltonian()
    mid, _ = evolve(g, h0, AnnealSchedule(T=1000.0, steps=10 ** 6))
    renorm, _ = evolve(g, h0, AnnealSchedule(T=1000.0, steps=10 ** 6,
                                             integrator="euler-renorm"))
    assert fidelity(mid, renorm) >= 1 - 1e-6


@pytest.mark.slow
def test_plain_euler_reproduces_demo(demo_a):
    g = gram(demo_a)
    psi, _ = evolve(g, InitialHamiltonian(), AnnealSchedule(T=1000.0, integrator="euler"))
    assert 0.5 <= np.linalg.norm(psi) <= 2.0
    v = np.abs(gauge_fix(psi)) / np.linalg.norm(psi)
    np.testing.assert_allclose(v, [DIAG, DIAG], atol=1e-2)


def test_plain_euler_blows_up_with_coarse_steps(demo_g):
    with pytest.raises(NormBlowup) as err:
        evolve(demo_g, InitialHamiltonian(),
               AnnealSchedule(T=1000.0, steps=10, integrator="euler"))
    assert err.value.norm > 2.0


def test_midpoint_preserves_norm_along_trace(rng):
    g = gram(DataMatrix(rng.normal(size=(6, 4))))
    g = g.with_scale(g.row_sum_bound())
    schedule = AnnealSchedule(T=50.0, steps=2000, trace_stride=100)
    _, trace = evolve(g, InitialHamiltonian(ground_index=2), schedule)
    np.testing.assert_allclose(trace.norms, 1.0, atol=1e-10)


def test_trace_records_every_stride(demo_g):
    schedule = AnnealSchedule(T=10.0, steps=1000, trace_stride=100)
    v0 = np.array([DIAG, DIAG])
    _, trace = evolve(demo_g, InitialHamiltonian(), schedule, reference=v0)
    assert len(trace) == 11
    assert trace.times[0] == 0.0 and trace.times[-1] == pytest.approx(10.0)
    assert trace.xs[-1] == pytest.approx(1.0)
    assert trace.overlap[0] == pytest.approx(DIAG)
    csv = trace.to_csv().splitlines()
    assert csv[0] == AnnealTrace.HEADER
    assert len(csv) == 12


def test_trace_final_energy_on_unscaled_gram(demo_g):
    schedule = AnnealSchedule(T=1000.0, trace_stride=1000)
    _, trace = evolve(demo_g, InitialHamiltonian(), schedule)
    assert trace.rayleigh[0] == pytest.approx(-1.0)
    assert trace.rayleigh[-1] == pytest.approx(-1.43, abs=1e-2)


def test_trace_without_reference_leaves_overlap_blank(demo_g):
    _, trace = evolve(demo_g, InitialHamiltonian(), AnnealSchedule(T=1.0, steps=4, trace_stride=2))
    assert trace.overlap == [None, None, None]
    assert trace.to_csv().splitlines()[1].endswith(",")


def test_implicit_operator_matches_explicit(rng):
    a = DataMatrix(rng.normal(size=(6, 4)))
    explicit = gram(a, "explicit")
    scale = explicit.row_sum_bound()
    schedule = AnnealSchedule(T=5.0, steps=500)
    h0 = InitialHamiltonian()
    psi_explicit, _ = evolve(explicit.with_scale(scale), h0, schedule)
    psi_implicit, _ = evolve(gram(a, "implicit", scale=scale), h0, schedule)
    assert fidelity(psi_explicit, psi_implicit) >= 1 - 1e-10


def test_hamiltonian_bound_uses_scaled_row_sum(demo_g):
    assert hamiltonian_bound(demo_g, InitialHamiltonian()) == pytest.approx(1.43)
    assert hamiltonian_bound(demo_g.with_scale(1.43), InitialHamiltonian(lambda0=2.0)) == 2.0


def test_hamiltonian_apply_is_linear(rng):
    g = gram(DataMatrix(rng.normal(size=(5, 3))), scale=2.0)
    h0 = InitialHamiltonian(ground_index=1)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    phi = rng.normal(size=3) + 1j * rng.normal(size=3)
    a, b = 0.7 - 1.2j, -2.5 + 0.3j
    for x in (0.0, 0.4, 1.0):
        combined = hamiltonian_apply(g, h0, x, a * psi + b * phi)
        separate = a * hamiltonian_apply(g, h0, x, psi) + b * hamiltonian_apply(g, h0, x, phi)
        np.testing.assert_allclose(combined, separate, atol=1e-12)


def test_renormalized_euler_stays_finite_on_long_anneal(demo_a):
    g = gram(demo_a)
    g = g.with_scale(g.row_sum_bound())
    psi, _ = evolve(g, InitialHamiltonian(), AnnealSchedule(T=3e4, integrator="euler-renorm"))
    assert np.all(np.isfinite(psi))
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-9)
    v0 = full_diagonalize(g).eigenvectors[:, 0]
    assert fidelity(psi, v0) >= 0.99


def test_long_plain_euler_reports_blowup_instead_of_overflow(demo_a):
    g = gram(demo_a)
    g = g.with_scale(g.row_sum_bound())
    with pytest.raises(NormBlowup) as err:
        evolve(g, InitialHamiltonian(), AnnealSchedule(T=3e4, steps=300000, integrator="euler"))
    assert np.isfinite(err.value.norm)
    assert err.value.norm > 2.0


def test_euler_error_is_first_order(demo_g):
    h0 = InitialHamiltonian()
    reference, _ = evolve(demo_g, h0, AnnealSchedule(T=10.0, steps=10 ** 5))
    errors = []
    for steps in (2000, 8000):
        psi, _ = evolve(demo_g, h0, AnnealSchedule(T=10.0, steps=steps, integrator="euler"))
        errors.append(np.linalg.norm(psi - reference))
    assert 3.6 <= errors[0] / errors[1] <= 4.4


def test_fidelity_grows_with_anneal_time(demo_a):
    g = gram(demo_a)
    v0 = full_diagonalize(g).eigenvectors[:, 0]
    values = []
    for T in (10.0, 30.0, 100.0, 300.0, 1000.0):
        psi, _ = evolve(g, InitialHamiltonian(), AnnealSchedule(T=T))
        values.append(fidelity(psi, v0))
    assert all(later >= earlier - 1e-3 for earlier, later in zip(values, values[1:]))
    assert values[-1] >= 0.999
