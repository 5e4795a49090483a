"""Named verification suites behind the ``affinekit check`` subcommand.

Each suite returns a report dict {"suite", "checks": [...], "passed"}; a
check is {"name", "max_error", "tolerance", "passed"}.  Independent checks
of a suite may run on a thread pool capped by AFFINEKIT_THREADS.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import measures, qdesk
from .dynamics import (PhaseState, poisson_bracket, sigma_component,
                       sigma_hat_component)
from .kinematics import (SystemConfig, VelocityState, act_material, act_spatial,
                         affine_velocity, deformation_tensors, invariants_K,
                         invariants_M, mutual_tensors)
from .kinetics import (InertiaParams, KineticModel, MomentumState,
                       inverse_legendre, kinetic_energy, kinetic_hamiltonian,
                       legendre)
from .matcore import two_polar_decompose
from .potentials import (BinaryTerm, HarmonicFn, PotentialSpec, affine_distance,
                         total_potential)
from .sampling import random_glplus, random_invertible, random_orthogonal, rng_from_seed

SUITES = ("invariance", "brackets", "measures", "legendre", "qdesk")


def max_workers() -> int:
    raw = os.environ.get("AFFINEKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_items(items) -> list:
    """Evaluate (name, tolerance, fn) items, preserving submission order."""
    workers = min(max_workers(), len(items)) if items else 1
    if workers <= 1:
        values = [fn() for _, _, fn in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn) for _, _, fn in items]
            values = [f.result() for f in futures]
    return [
        {"name": name, "max_error": float(err), "tolerance": tol,
         "passed": bool(err <= tol)}
        for (name, tol, _), err in zip(items, values)
    ]


def _report(suite: str, checks: list) -> dict:
    return {"suite": suite, "checks": checks,
            "passed": all(c["passed"] for c in checks)}


def _rel(delta: np.ndarray, ref) -> float:
    scale = 1.0 + float(np.max(np.abs(ref)))
    return float(np.max(np.abs(delta))) / scale


# ---------------------------------------------------------------------------
# legendre suite

def _model_params(n: int):
    """One representative parameter set per kinetic model combination."""
    rng = rng_from_seed(7)
    spd = lambda: (lambda m: m @ m.T + n * np.eye(n))(rng.uniform(-1, 1, (n, n)))
    big = rng.uniform(-0.3, 0.3, (n * n, n * n))
    bilinear = big @ big.T + n * np.eye(n * n)
    params = InertiaParams(M=1.7, J=spd(), I=2.0, A=1.0, B=1.0, H=spd(),
                           Lten=bilinear, Rten=bilinear)
    combos = []
    for tr in ("dalembert", "is-af", "af-is"):
        for it in ("dalembert", "af-J", "af-is", "H-af", "l-af", "r-af", "af-af", "is-af"):
            combos.append((KineticModel(translational=tr, internal=it), params))
    return combos


def legendre_roundtrip_error(samples: int = 1000, seed: int = 11) -> float:
    """Worst relative mismatch of T(v, xi) vs its Hamiltonian round trip,
    plus the velocity round trip through inverse_legendre."""
    worst = 0.0
    for n in (2, 3):
        combos = _model_params(n)
        rng = rng_from_seed(seed + n)
        per_combo = max(1, samples // len(combos))
        for model, params in combos:
            for _ in range(per_combo):
                config = SystemConfig(x=np.zeros((1, n)),
                                      phi=random_glplus(rng, n)[None])
                vel = VelocityState(v=rng.uniform(-1, 1, (1, n)),
                                    xi=rng.uniform(-1, 1, (1, n, n)))
                mom = legendre(model, params, config, vel)
                t_v = kinetic_energy(model, params, config, vel)
                t_p = kinetic_hamiltonian(model, params, config, mom)
                worst = max(worst, abs(t_p - t_v) / max(1.0, abs(t_v)))
                back = inverse_legendre(model, params, config, mom)
                worst = max(worst, _rel(back.v - vel.v, vel.v))
                worst = max(worst, _rel(back.xi - vel.xi, vel.xi))
    return worst


def legendre_suite(samples: int = 1000) -> dict:
    items = [("legendre_hamiltonian_roundtrip", 1e-10,
              lambda: legendre_roundtrip_error(samples))]
    return _report("legendre", _run_items(items))


# ---------------------------------------------------------------------------
# invariance suite

def _deformation_transform_error(samples, seed):
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        phi = random_glplus(rng, n)
        A = random_orthogonal(rng, n, special=False)
        B = random_invertible(rng, n)
        t = deformation_tensors(phi)
        worst = max(worst, _rel(deformation_tensors(A @ phi).G - t.G, t.G))
        worst = max(worst, _rel(deformation_tensors(phi @ A).C - t.C, t.C))
        worst = max(worst, _rel(deformation_tensors(phi @ B).G - B.T @ t.G @ B, t.G))
        Binv = np.linalg.inv(B)
        worst = max(worst, _rel(deformation_tensors(B @ phi).C - Binv.T @ t.C @ Binv, t.C))
    return worst


def _mutual_transform_error(samples, seed):
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        psi, phi = random_invertible(rng, n), random_invertible(rng, n)
        A = random_orthogonal(rng, n, special=False)
        B = random_invertible(rng, n)
        m = mutual_tensors(psi, phi)
        worst = max(worst, _rel(mutual_tensors(A @ psi, A @ phi).Gm - m.Gm, m.Gm))
        worst = max(worst, _rel(mutual_tensors(psi @ A, phi @ A).Cm - m.Cm, m.Cm))
        worst = max(worst, _rel(mutual_tensors(psi @ B, phi @ B).Gm - B.T @ m.Gm @ B, m.Gm))
        Binv = np.linalg.inv(B)
        worst = max(worst, _rel(mutual_tensors(B @ psi, B @ phi).Cm
                                - Binv.T @ m.Cm @ Binv, m.Cm))
        worst = max(worst, _rel(mutual_tensors(B @ psi, B @ phi).Gamma - m.Gamma, m.Gamma))
        worst = max(worst, _rel(mutual_tensors(B @ psi, B @ phi).SigmaM
                                - B @ m.SigmaM @ Binv, m.SigmaM))
        worst = max(worst, _rel(mutual_tensors(psi @ B, phi @ B).Gamma
                                - Binv @ m.Gamma @ B, m.Gamma))
        worst = max(worst, _rel(mutual_tensors(psi @ B, phi @ B).SigmaM - m.SigmaM, m.SigmaM))
    return worst


def _scalar_invariant_error(samples, seed):
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        psi, phi = random_invertible(rng, n), random_invertible(rng, n)
        A = random_orthogonal(rng, n, special=False)
        B = random_orthogonal(rng, n, special=False)
        k0 = invariants_K(psi, phi)
        worst = max(worst, _rel(invariants_K(A @ psi @ B, A @ phi @ B) - k0, k0))
        Ag = random_invertible(rng, n)
        Bg = random_invertible(rng, n)
        m0 = invariants_M(psi, phi)
        worst = max(worst, _rel(invariants_M(Ag @ psi @ Bg, Ag @ phi @ Bg) - m0, m0))
    return worst


def _velocity_transform_error(samples, seed):
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        phi = random_glplus(rng, n)
        xi = rng.uniform(-1, 1, (n, n))
        v = rng.uniform(-1, 1, n)
        A = random_invertible(rng, n)
        om, om_hat, _ = affine_velocity(phi, xi, v)
        om_l, om_hat_l, _ = affine_velocity(A @ phi, A @ xi, A @ v)
        worst = max(worst, _rel(om_l - A @ om @ np.linalg.inv(A), om))
        worst = max(worst, _rel(om_hat_l - om_hat, om_hat))
        om_r, om_hat_r, _ = affine_velocity(phi @ A, xi @ A, v)
        worst = max(worst, _rel(om_r - om, om))
        worst = max(worst, _rel(om_hat_r - np.linalg.inv(A) @ om_hat @ A, om_hat))
    return worst


def _affine_distance_error(samples, seed):
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        xk, xl = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
        pk, pl = random_glplus(rng, n), random_glplus(rng, n)
        A = random_invertible(rng, n)
        d0 = affine_distance(xk, pk, xl, pl)
        d1 = affine_distance(A @ xk, A @ pk, A @ xl, A @ pl)
        worst = max(worst, abs(d1 - d0) / (1.0 + abs(d0)))
    return worst


def _kinetic_invariance_error(samples, seed):
    rng = rng_from_seed(seed)
    worst = 0.0
    params = InertiaParams(M=1.3, I=2.0, A=1.0, B=0.7)
    is_af = KineticModel("dalembert", "is-af")
    af_is = KineticModel("af-is", "af-is")
    af_af = KineticModel("dalembert", "af-af")
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        config = SystemConfig(x=rng.uniform(-1, 1, (1, n)),
                              phi=random_glplus(rng, n)[None])
        vel = VelocityState(v=rng.uniform(-1, 1, (1, n)),
                            xi=rng.uniform(-1, 1, (1, n, n)))
        # GL+ transforms keep the configurations inside the working domain
        B = random_glplus(rng, n)
        O = random_orthogonal(rng, n)
        A = random_glplus(rng, n)

        def moved(cfg, vl, mat, side):
            if side == "spatial":
                return (act_spatial(mat, cfg),
                        VelocityState(v=vl.v @ mat.T, xi=mat @ vl.xi))
            return (act_material(mat, cfg), VelocityState(v=vl.v, xi=vl.xi @ mat))

        t0 = kinetic_energy(is_af, params, config, vel)
        cfg2, vel2 = moved(config, vel, B, "material")
        worst = max(worst, abs(kinetic_energy(is_af, params, cfg2, vel2) - t0)
                    / (1.0 + abs(t0)))
        cfg2, vel2 = moved(config, vel, O, "spatial")
        worst = max(worst, abs(kinetic_energy(is_af, params, cfg2, vel2) - t0)
                    / (1.0 + abs(t0)))

        t0 = kinetic_energy(af_is, params, config, vel)
        cfg2, vel2 = moved(config, vel, A, "spatial")
        worst = max(worst, abs(kinetic_energy(af_is, params, cfg2, vel2) - t0)
                    / (1.0 + abs(t0)))
        mom = legendre(af_is, params, config, vel)
        h0 = kinetic_hamiltonian(af_is, params, config, mom)
        mom2 = legendre(af_is, params, cfg2, vel2)
        worst = max(worst, abs(kinetic_hamiltonian(af_is, params, cfg2, mom2) - h0)
                    / (1.0 + abs(h0)))

        # af-af is an internal-sector statement: drop translational velocity
        vel_int = VelocityState(v=np.zeros((1, n)), xi=vel.xi)
        t0 = kinetic_energy(af_af, params, config, vel_int)
        cfg2, vel2 = moved(config, vel_int, A, "spatial")
        worst = max(worst, abs(kinetic_energy(af_af, params, cfg2, vel2) - t0)
                    / (1.0 + abs(t0)))
        cfg2, vel2 = moved(config, vel_int, B, "material")
        worst = max(worst, abs(kinetic_energy(af_af, params, cfg2, vel2) - t0)
                    / (1.0 + abs(t0)))
    return worst


def _potential_invariance_error(samples, seed):
    rng = rng_from_seed(seed)
    worst = 0.0
    affine_spec = PotentialSpec(binary=(
        BinaryTerm(arg="Mbar:1", fn=HarmonicFn(stiffness=1.0, center=2.0)),
        BinaryTerm(arg="D", fn=HarmonicFn(stiffness=0.5, center=1.0)),
    ))
    generic_spec = PotentialSpec(binary=affine_spec.binary + (
        BinaryTerm(arg="r", fn=HarmonicFn(stiffness=0.3, center=1.0)),
        BinaryTerm(arg="K:1", fn=HarmonicFn(stiffness=0.2, center=2.0)),
    ))
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        config = SystemConfig(
            x=rng.uniform(-1, 1, (2, n)) + np.array([[0.0] * n, [2.0] + [0.0] * (n - 1)]),
            phi=np.stack([random_glplus(rng, n), random_glplus(rng, n)]))
        A = random_glplus(rng, n)
        O = random_orthogonal(rng, n)
        Om = random_orthogonal(rng, n)

        v0 = total_potential(affine_spec, config)
        v1 = total_potential(affine_spec, act_spatial(A, config))
        worst = max(worst, abs(v1 - v0) / (1.0 + abs(v0)))

        v0 = total_potential(generic_spec, config)
        v1 = total_potential(generic_spec, act_material(Om, act_spatial(O, config)))
        worst = max(worst, abs(v1 - v0) / (1.0 + abs(v0)))
    return worst


def invariance_suite(samples: int = 200) -> dict:
    items = [
        ("deformation_tensor_transforms", 1e-10,
         lambda: _deformation_transform_error(samples, 21)),
        ("mutual_tensor_transforms", 1e-10,
         lambda: _mutual_transform_error(samples, 22)),
        ("scalar_invariants", 1e-10, lambda: _scalar_invariant_error(samples, 23)),
        ("gyration_transforms", 1e-10, lambda: _velocity_transform_error(samples, 24)),
        ("affine_distance_invariance", 1e-10, lambda: _affine_distance_error(samples, 25)),
        ("kinetic_energy_invariances", 1e-10, lambda: _kinetic_invariance_error(samples, 26)),
        ("potential_invariances", 1e-10, lambda: _potential_invariance_error(samples, 27)),
    ]
    return _report("invariance", _run_items(items))


# ---------------------------------------------------------------------------
# brackets suite

def _random_state(rng, n: int, N: int = 1) -> PhaseState:
    return PhaseState(
        config=SystemConfig(x=rng.uniform(-1, 1, (N, n)),
                            phi=np.stack([random_glplus(rng, n) for _ in range(N)])),
        mom=MomentumState(p=rng.uniform(-1, 1, (N, n)),
                          pi=rng.uniform(-1, 1, (N, n, n))))


def gl_structure_error(n: int, seed: int = 31, points: int = 3) -> float:
    """Numeric {Sigma, Sigma} brackets against the gl(n) structure constants
    fixed by direct differentiation of Sigma = phi pi."""
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(points):
        state = _random_state(rng, n)
        sig = state.config.phi[0] @ state.mom.pi[0]
        sig_hat = state.mom.pi[0] @ state.config.phi[0]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        num = poisson_bracket(sigma_component(0, a, b),
                                              sigma_component(0, c, d), state)
                        exact = (sig[c, b] if a == d else 0.0) \
                            - (sig[a, d] if c == b else 0.0)
                        worst = max(worst, abs(num - exact))
                        num = poisson_bracket(sigma_hat_component(0, a, b),
                                              sigma_hat_component(0, c, d), state)
                        exact = (sig_hat[a, d] if b == c else 0.0) \
                            - (sig_hat[c, b] if a == d else 0.0)
                        worst = max(worst, abs(num - exact))
    return worst


def sigma_sigma_hat_commute_error(n: int, seed: int = 32, points: int = 3) -> float:
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(points):
        state = _random_state(rng, n)
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        worst = max(worst, abs(poisson_bracket(
                            sigma_component(0, a, b), sigma_hat_component(0, c, d),
                            state)))
    return worst


def brackets_suite() -> dict:
    items = []
    for n in (2, 3):
        items.append((f"gl{n}_structure_constants", 1e-8,
                      lambda n=n: gl_structure_error(n)))
        items.append((f"sigma_sigma_hat_commute_n{n}", 1e-8,
                      lambda n=n: sigma_sigma_hat_commute_error(n)))
    return _report("brackets", _run_items(items))


# ---------------------------------------------------------------------------
# measures suite

def _haar_invariance_error(samples=50, seed=41):
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        phi = random_glplus(rng, n)
        A = random_glplus(rng, n)
        dens = measures.haar_density(phi, "haar_lambda")
        det_a = np.linalg.det(A)
        left = measures.haar_density(A @ phi, "haar_lambda") * det_a ** n
        right = measures.haar_density(phi @ A, "haar_lambda") * det_a ** n
        worst = max(worst, abs(left - dens) / dens, abs(right - dens) / dens)
        dens_a = measures.haar_density(phi, "haar_alpha")
        left_a = measures.haar_density(A @ phi, "haar_alpha") * det_a ** (n + 1)
        worst = max(worst, abs(left_a - dens_a) / dens_a)
    return worst


def _twopolar_ratio_error(samples=50, seed=42):
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        phi = random_glplus(rng, n)
        f = two_polar_decompose(phi)
        haar, lebesgue = measures.twopolar_densities(f)
        if lebesgue == 0.0:
            continue
        expected = np.linalg.det(phi) ** (-n)
        worst = max(worst, abs(haar / lebesgue - expected) / expected)
    return worst


def _oracle_match_error(points=40, seed=43):
    worst = 0.0
    for n in (2, 3):
        report = measures.measure_check_report(n, points=points, seed=seed)
        if report["exponent_e"] != 1:
            return np.inf
        worst = max(worst, report["max_rel_err"],
                    abs(report["constant_c"] / report["expected_constant"] - 1.0))
    return worst


def measures_suite() -> dict:
    items = [
        ("haar_translation_invariance", 1e-12, _haar_invariance_error),
        ("twopolar_haar_lebesgue_ratio", 1e-8, _twopolar_ratio_error),
        ("twopolar_jacobian_oracle", 1e-6, _oracle_match_error),
    ]
    return _report("measures", _run_items(items))


# ---------------------------------------------------------------------------
# qdesk suite

def _harmonic_levels_error():
    grid = qdesk.QGrid(q_min=-10.0, q_max=10.0, m=4000, hbar=1.0, alpha_eff=1.0)
    op = qdesk.build_hamiltonian_1d(grid, lambda q: 0.5 * q * q)
    energies, _ = qdesk.solve_spectrum(op, 5)
    exact = np.arange(5) + 0.5
    return float(np.max(np.abs(energies - exact) / exact))


def _hermiticity_errors():
    grid = qdesk.QGrid(q_min=-8.0, q_max=8.0, m=2000)
    defects = [
        qdesk.hermiticity_check(grid, "Sigma", "haar"),
        qdesk.hermiticity_check(grid, "Sigma_corrected", "lebesgue"),
        qdesk.hermiticity_check(grid, "momentum_p", "lebesgue"),
    ]
    broken = qdesk.hermiticity_check(grid, "Sigma", "lebesgue")
    if broken < 1e-3:
        return np.inf  # the uncorrected generator must visibly fail
    return max(defects)


def _shift_identity_error():
    grid = qdesk.QGrid(q_min=-10.0, q_max=10.0, m=4000)
    psi = qdesk.gaussian_packet(grid, center=0.0, width=1.0)
    return max(qdesk.shift_action_check(0.3, psi),
               qdesk.shift_action_check(-0.45, psi))


def qdesk_suite() -> dict:
    items = [
        ("harmonic_spectrum", 1e-4, _harmonic_levels_error),
        ("generator_hermiticity", 1e-10, _hermiticity_errors),
        ("shift_operator_identity", 1e-6, _shift_identity_error),
    ]
    return _report("qdesk", _run_items(items))


SUITE_RUNNERS = {
    "invariance": invariance_suite,
    "brackets": brackets_suite,
    "measures": measures_suite,
    "legendre": legendre_suite,
    "qdesk": qdesk_suite,
}


def run_suite(name: str) -> dict:
    if name not in SUITE_RUNNERS:
        raise KeyError(name)
    return SUITE_RUNNERS[name]()
