import numpy as np
import pytest

from affinekit.errors import DomainOverflow, InvalidInertia
from affinekit.qdesk import (QGrid, WaveFunction, build_hamiltonian_1d,
                             gaussian_packet, hermiticity_check,
                             invariant_distribution, shift_action_check,
                             shift_wavefunction, solve_spectrum)

GRID = QGrid(q_min=-10.0, q_max=10.0, m=4000, hbar=1.0, alpha_eff=1.0)


def harmonic(k):
    return lambda q: 0.5 * k * q * q


# ---------------------------------------------------------------------------
# operator assembly

def test_box_laplacian_action_on_constant_mode():
    """With V = 0 the interior action on a constant vector vanishes except at
    the Dirichlet walls."""
    grid = QGrid(q_min=0.0, q_max=1.0, m=21)
    op = build_hamiltonian_1d(grid, lambda q: np.zeros_like(q))
    out = op.apply(np.ones(grid.m - 2))
    kin = grid.hbar ** 2 / (2 * grid.alpha_eff * grid.h ** 2)
    np.testing.assert_allclose(out[1:-1], 0.0, atol=1e-12)
    assert abs(out[0] - kin) <= 1e-12 and abs(out[-1] - kin) <= 1e-12


def test_operator_exactly_symmetric():
    op = build_hamiltonian_1d(QGrid(-5.0, 5.0, 200), harmonic(1.0))
    assert op.symmetry_defect() == 0.0


def test_invalid_inertia():
    with pytest.raises(InvalidInertia):
        build_hamiltonian_1d(QGrid(-5.0, 5.0, 100, alpha_eff=-1.0), harmonic(1.0))


# ---------------------------------------------------------------------------
# spectra

def test_harmonic_levels():
    op = build_hamiltonian_1d(GRID, harmonic(1.0))
    energies, states = solve_spectrum(op, 5)
    exact = np.arange(5) + 0.5
    assert np.max(np.abs(energies - exact) / exact) <= 1e-4
    # orthonormal in the Haar inner product
    for i, a in enumerate(states):
        for j, b in enumerate(states):
            ip = GRID.inner(a.values, b.values, "haar")
            assert abs(ip - (1.0 if i == j else 0.0)) <= 1e-10


def test_harmonic_ground_state_scaling():
    """E_0 approaches hbar sqrt(k / alpha) / 2 as the grid refines."""
    k, alpha = 2.0, 3.0
    exact = np.sqrt(k / alpha) / 2.0
    errs = []
    for m in (500, 1000, 2000):
        grid = QGrid(-8.0, 8.0, m, alpha_eff=alpha)
        energies, _ = solve_spectrum(build_hamiltonian_1d(grid, harmonic(k)), 1)
        errs.append(abs(energies[0] - exact))
    assert errs[-1] <= 1e-5
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.2)


def test_particle_in_box_levels():
    grid = QGrid(-1.0, 1.0, 2000, alpha_eff=1.0)
    op = build_hamiltonian_1d(grid, lambda q: np.zeros_like(q))
    energies, _ = solve_spectrum(op, 5)
    W = grid.q_max - grid.q_min
    exact = np.pi ** 2 * (np.arange(5) + 1) ** 2 / (2.0 * W ** 2)
    assert np.max(np.abs(energies - exact) / exact) <= 1e-3


def test_spectrum_real_and_bounded_below():
    op = build_hamiltonian_1d(GRID, harmonic(1.0))
    energies, _ = solve_spectrum(op, 10)
    assert np.all(np.isreal(energies))
    assert np.all(np.diff(energies) > 0)
    assert energies[0] > 0


# ---------------------------------------------------------------------------
# Hermiticity of the generators

def test_sigma_hermitian_under_haar():
    assert hermiticity_check(GRID, "Sigma", "haar") <= 1e-10


def test_sigma_defect_under_lebesgue_is_order_one():
    assert hermiticity_check(GRID, "Sigma", "lebesgue") > 1e-3


def test_corrected_sigma_hermitian_under_lebesgue():
    assert hermiticity_check(GRID, "Sigma_corrected", "lebesgue") <= 1e-10


def test_momentum_hermitian_under_lebesgue():
    assert hermiticity_check(GRID, "momentum_p", "lebesgue") <= 1e-10


# ---------------------------------------------------------------------------
# shift exponentials

def test_shift_zero_is_exact():
    psi = gaussian_packet(GRID, center=0.0, width=1.0)
    assert shift_action_check(0.0, psi) <= 1e-14


def test_shift_gaussian_small_error():
    psi = gaussian_packet(GRID, center=0.0, width=1.0)
    assert shift_action_check(0.3, psi) <= 1e-6
    assert shift_action_check(-0.45, psi) <= 1e-6


def test_shift_composition():
    """Two successive shifts equal the single combined shift."""
    psi = gaussian_packet(GRID, center=0.0, width=1.2)
    once = shift_wavefunction(shift_wavefunction(psi, 0.2), 0.3)
    combined = shift_wavefunction(psi, 0.5)
    inside = np.abs(GRID.q) < 5.0
    assert np.max(np.abs(once.values[inside] - combined.values[inside])) <= 1e-6


def test_shift_overflow_raises():
    psi = gaussian_packet(GRID, center=8.0, width=1.0)
    with pytest.raises(DomainOverflow):
        shift_wavefunction(psi, 5.0)


def test_kinetic_operator_commutes_with_translation():
    """With V = 0 the discrete kinetic operator is shift covariant, mirroring
    the free classical dilatational motion."""
    grid = QGrid(-10.0, 10.0, 2001)
    op = build_hamiltonian_1d(grid, lambda q: np.zeros_like(q))
    psi = gaussian_packet(grid, center=-1.0, width=0.8)
    shift_points = 100  # exact grid multiple: no interpolation error at all
    z = shift_points * grid.h
    applied = np.zeros(grid.m, dtype=complex)
    applied[1:-1] = op.apply(psi.values[1:-1])
    shifted_then_applied = np.zeros(grid.m, dtype=complex)
    shifted_then_applied[1:-1] = op.apply(np.roll(psi.values, -shift_points)[1:-1])
    applied_then_shifted = np.roll(applied, -shift_points)
    inside = np.abs(grid.q) < 5.0
    assert np.max(np.abs(shifted_then_applied[inside] - applied_then_shifted[inside])) <= 1e-12


# ---------------------------------------------------------------------------
# distributions

def test_distribution_normalized_and_nonnegative():
    for measure in ("haar", "lebesgue"):
        psi = gaussian_packet(GRID, center=0.5, width=0.8, measure=measure).normalize()
        rho = invariant_distribution(psi)
        assert np.all(rho >= 0.0)
        assert abs(GRID.h * rho.sum() - 1.0) <= 1e-10


def test_harmonic_ground_state_variance():
    """rho of the ground state is Gaussian with variance hbar/(2 sqrt(k alpha))."""
    k, alpha = 1.0, 1.0
    grid = QGrid(-10.0, 10.0, 4000, alpha_eff=alpha)
    _, states = solve_spectrum(build_hamiltonian_1d(grid, harmonic(k)), 1)
    rho = invariant_distribution(states[0])
    var = grid.h * np.sum(grid.q ** 2 * rho)
    exact = 1.0 / (2.0 * np.sqrt(k * alpha))
    assert abs(var - exact) / exact <= 1e-3


def test_wavefunction_normalize_respects_measure():
    vals = np.exp(-0.5 * GRID.q ** 2)
    for measure in ("haar", "lebesgue"):
        psi = WaveFunction(GRID, vals, measure).normalize()
        assert abs(psi.norm_squared() - 1.0) <= 1e-12


def test_classical_quantum_dilatational_frequency_agrees():
    """Cross-module coherence at n = 1: the classical one-body volume
    oscillator (af-af kinetic + log-squared stabilizer) swings at the same
    frequency whose quantum level spacing the grid Hamiltonian produces,
    because both reduce the inertia triple to alpha_eff = I + A + B."""
    from affinekit.dynamics import PhaseState, integrate
    from affinekit.kinematics import SystemConfig
    from affinekit.kinetics import InertiaParams, KineticModel, MomentumState
    from affinekit.potentials import DilatationTerm, PotentialSpec

    A, B, kappa = 2.0, 1.0, 1.0
    alpha_eff = A + B  # I = 0 in the af-af model
    omega = np.sqrt(kappa / alpha_eff)

    # classical: small oscillation of q = ln phi about the stabilizer minimum
    model = KineticModel("dalembert", "af-af")
    params = InertiaParams(M=1.0, A=A, B=B)
    spec = PotentialSpec(dil=DilatationTerm(kappa=kappa, d_ref=1.0))
    q0 = 0.02
    s0 = PhaseState(config=SystemConfig(x=np.zeros((1, 1)),
                                        phi=np.array([[[np.exp(q0)]]])),
                    mom=MomentumState(p=np.zeros((1, 1)), pi=np.zeros((1, 1, 1))))
    period = 2 * np.pi / omega
    traj = integrate(model, params, spec, s0, dt=5e-3, T=4 * period + 0.5)
    q_t = np.log(np.array([c.det_phi[0] for c in traj.charges]))
    t = traj.times
    idx = np.where((q_t[:-1] < 0) & (q_t[1:] >= 0))[0]
    crossings = t[idx] - q_t[idx] * (t[idx + 1] - t[idx]) / (q_t[idx + 1] - q_t[idx])
    measured = np.mean(np.diff(crossings))
    assert abs(measured - period) / period <= 1e-3

    # quantum: level spacing hbar omega from the same inertia reduction
    grid = QGrid(q_min=-10.0, q_max=10.0, m=4000, hbar=1.0, alpha_eff=alpha_eff)
    energies, _ = solve_spectrum(
        build_hamiltonian_1d(grid, lambda q: 0.5 * kappa * q * q), 3)
    spacing = np.diff(energies)
    assert np.max(np.abs(spacing - omega) / omega) <= 1e-4
