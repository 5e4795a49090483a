"""Canonical Hamilton equations, time integration, brackets, Noether charges.

Phase space per body: (x, p) in R^n x R^n and (phi, pi) in GL+(n) x L(n, R),
with pi[a, i] canonically conjugate to phi[i, a] (the Tr(pi xi) pairing), so
in components

    dx[i]/dt = dH/dp[i]            dp[i]/dt    = -dH/dx[i]
    dphi[i, a]/dt = dH/dpi[a, i]   dpi[a, i]/dt = -dH/dphi[i, a]

In matrix form the velocity block is exactly the inverse Legendre map and
the pi block is -(dH/dphi).T.

The default integrator is the implicit midpoint rule: the affine kinetic
Hamiltonians couple phi and pi, so the system is non-separable and explicit
splitting schemes do not apply.  Midpoint is symplectic and preserves every
quadratic first integral (all the affine-spin charges) to solver tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IterationDiverged, SingularInput, StateInvalid
from .kinematics import SystemConfig
from .kinetics import (KineticModel, MomentumState, inverse_legendre,
                       kinetic_hamiltonian, kinetic_phi_gradient)
from .matcore import two_polar_decompose
from .potentials import PotentialSpec, potential_gradient, total_potential

DET_PHI_FLOOR = 1e-12
MIDPOINT_TOL = 1e-12
MIDPOINT_MAX_ITER = 50


@dataclass(frozen=True)
class PhaseState:
    config: SystemConfig
    mom: MomentumState
    time: float = 0.0

    def __post_init__(self):
        if self.mom.p.shape != self.config.x.shape \
                or self.mom.pi.shape != self.config.phi.shape:
            raise ValueError("momentum shapes do not match the configuration")

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def N(self) -> int:
        return self.config.N


@dataclass(frozen=True)
class ChargeRecord:
    """Conserved-quantity snapshot: totals plus per-body skew charges."""

    energy: float
    p_total: np.ndarray
    sigma_total: np.ndarray
    sigma_hat_total: np.ndarray
    lambda_total: np.ndarray
    j_total: np.ndarray
    spin: np.ndarray            # (N, n, n) per-body S_K
    vorticity: np.ndarray       # (N, n, n) per-body V_K
    det_phi: np.ndarray         # (N,)
    q_log: np.ndarray           # (N, n) two-polar log invariants


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    charges: list
    aborted: bool = False
    abort_reason: str = ""

    def charge_series(self, pick) -> np.ndarray:
        return np.array([pick(c) for c in self.charges])

    def require_complete(self) -> "Trajectory":
        """Raise StateInvalid if the run was cut short at the det-phi floor."""
        if self.aborted:
            raise StateInvalid(self.abort_reason)
        return self


def total_energy(model: KineticModel, params, spec: PotentialSpec,
                 state: PhaseState) -> float:
    return kinetic_hamiltonian(model, params, state.config, state.mom) \
        + total_potential(spec, state.config)


def noether_charges(state: PhaseState, energy: float = np.nan) -> ChargeRecord:
    """Per-body and total generators of the affine symmetry actions."""
    config, mom = state.config, state.mom
    sigma = mom.sigma(config)
    sigma_hat = mom.sigma_hat(config)
    lam = np.einsum("ka,kb->kab", config.x, mom.p)
    det_phi = np.linalg.det(config.phi)
    q_log = np.stack([two_polar_decompose(config.phi[K]).q for K in range(config.N)])
    sigma_total = sigma.sum(axis=0)
    lambda_total = lam.sum(axis=0)
    return ChargeRecord(
        energy=float(energy),
        p_total=mom.p.sum(axis=0),
        sigma_total=sigma_total,
        sigma_hat_total=sigma_hat.sum(axis=0),
        lambda_total=lambda_total,
        j_total=lambda_total + sigma_total,
        spin=sigma - np.transpose(sigma, (0, 2, 1)),
        vorticity=sigma_hat - np.transpose(sigma_hat, (0, 2, 1)),
        det_phi=det_phi,
        q_log=q_log,
    )


# ---------------------------------------------------------------------------
# right-hand side

@dataclass(frozen=True)
class PhaseDerivative:
    x_dot: np.ndarray
    phi_dot: np.ndarray
    p_dot: np.ndarray
    pi_dot: np.ndarray


def hamilton_rhs(model: KineticModel, params, spec: PotentialSpec,
                 state: PhaseState) -> PhaseDerivative:
    """Canonical equations of motion for H = kinetic + potential."""
    config, mom = state.config, state.mom
    vel = inverse_legendre(model, params, config, mom)
    kin_grad = kinetic_phi_gradient(model, params, config, mom)
    if spec.one_body or spec.binary or spec.dil is not None:
        dv_dx, dv_dphi = potential_gradient(spec, config)
    else:
        dv_dx = np.zeros_like(config.x)
        dv_dphi = np.zeros_like(config.phi)
    pi_dot = -np.transpose(kin_grad + dv_dphi, (0, 2, 1))
    return PhaseDerivative(x_dot=vel.v, phi_dot=vel.xi, p_dot=-dv_dx, pi_dot=pi_dot)


# ---------------------------------------------------------------------------
# time integration

def _pack(state: PhaseState) -> np.ndarray:
    return np.concatenate([state.config.x.ravel(), state.config.phi.ravel(),
                           state.mom.p.ravel(), state.mom.pi.ravel()])


def _unpack(z: np.ndarray, N: int, n: int, time: float) -> PhaseState:
    nx = N * n
    nphi = N * n * n
    x = z[:nx].reshape(N, n)
    phi = z[nx:nx + nphi].reshape(N, n, n)
    p = z[nx + nphi:2 * nx + nphi].reshape(N, n)
    pi = z[2 * nx + nphi:].reshape(N, n, n)
    return PhaseState(config=SystemConfig(x=x, phi=phi), mom=MomentumState(p=p, pi=pi),
                      time=time)


def _rhs_vec(model, params, spec, z, N, n, time):
    d = hamilton_rhs(model, params, spec, _unpack(z, N, n, time))
    return np.concatenate([d.x_dot.ravel(), d.phi_dot.ravel(),
                           d.p_dot.ravel(), d.pi_dot.ravel()])


def _midpoint_step(model, params, spec, z, dt, N, n, time):
    # fixed-point iteration on z1 = z + dt f((z + z1)/2); the guaranteed
    # residual is MIDPOINT_TOL but iteration continues while it still improves,
    # which keeps the quadratic charges conserved to near machine precision
    z_next = z + dt * _rhs_vec(model, params, spec, z, N, n, time)
    scale = max(1.0, float(np.max(np.abs(z))))
    prev = np.inf
    best = np.inf
    for _ in range(MIDPOINT_MAX_ITER):
        mid = 0.5 * (z + z_next)
        proposal = z + dt * _rhs_vec(model, params, spec, mid, N, n, time + 0.5 * dt)
        residual = float(np.max(np.abs(proposal - z_next)))
        z_next = proposal
        best = min(best, residual)
        if residual <= 1e-15 * scale:
            return z_next
        if residual <= MIDPOINT_TOL and residual > 0.5 * prev:
            # below the guarantee and no longer contracting: roundoff floor
            return z_next
        prev = residual
    if best > MIDPOINT_TOL:
        raise IterationDiverged(
            f"implicit midpoint residual {best:.3e} > {MIDPOINT_TOL} after "
            f"{MIDPOINT_MAX_ITER} iterations")
    return z_next


def _rk4_step(model, params, spec, z, dt, N, n, time):
    k1 = _rhs_vec(model, params, spec, z, N, n, time)
    k2 = _rhs_vec(model, params, spec, z + 0.5 * dt * k1, N, n, time + 0.5 * dt)
    k3 = _rhs_vec(model, params, spec, z + 0.5 * dt * k2, N, n, time + 0.5 * dt)
    k4 = _rhs_vec(model, params, spec, z + dt * k3, N, n, time + dt)
    return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


INTEGRATION_METHODS = ("implicit_midpoint", "rk4")


def _state_problem(state: PhaseState) -> str:
    if not (np.all(np.isfinite(state.config.x)) and np.all(np.isfinite(state.config.phi))
            and np.all(np.isfinite(state.mom.p)) and np.all(np.isfinite(state.mom.pi))):
        return "non-finite phase-space entries"
    dets = np.linalg.det(state.config.phi)
    if np.min(dets) <= DET_PHI_FLOOR:
        return f"det phi fell to {np.min(dets):.3e} (floor {DET_PHI_FLOOR})"
    return ""


def integrate(model: KineticModel, params, spec: PotentialSpec, s0: PhaseState,
              dt: float, T: float, method: str = "implicit_midpoint") -> Trajectory:
    """Propagate s0 over [0, T], sampling every dt and at T.

    Leaving GL+(n) (det phi at the floor) aborts the run and returns the
    partial trajectory with ``aborted`` set; it is a modeling failure the
    caller must see, not something to regularize away.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if T < 0:
        raise ValueError("T must be non-negative")
    if method not in INTEGRATION_METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {INTEGRATION_METHODS}")
    step = _midpoint_step if method == "implicit_midpoint" else _rk4_step

    N, n = s0.N, s0.n
    energy0 = total_energy(model, params, spec, s0)
    times = [s0.time]
    states = [s0]
    charges = [noether_charges(s0, energy=energy0)]

    problem = _state_problem(s0)
    if problem:
        return Trajectory(np.array(times), states, charges, aborted=True,
                          abort_reason=problem)

    z = _pack(s0)
    t = 0.0
    eps = 1e-12 * max(1.0, T)
    while t < T - eps:
        h = min(dt, T - t)
        try:
            z = step(model, params, spec, z, h, N, n, s0.time + t)
        except (SingularInput, np.linalg.LinAlgError) as exc:
            # the step itself crossed the det floor: flag, keep the partial run
            return Trajectory(np.array(times), states, charges, aborted=True,
                              abort_reason=f"step left GL+(n): {exc}")
        t += h
        state = _unpack(z, N, n, s0.time + t)
        problem = _state_problem(state)
        if problem:
            return Trajectory(np.array(times), states, charges, aborted=True,
                              abort_reason=problem)
        times.append(s0.time + t)
        states.append(state)
        charges.append(noether_charges(
            state, energy=total_energy(model, params, spec, state)))
    return Trajectory(np.array(times), states, charges)


# ---------------------------------------------------------------------------
# Poisson brackets

def _phase_gradient(F, state: PhaseState, h_scale: float = 1e-5):
    """Central-difference gradient of a phase function, or its registered one.

    Returns (dF/dx, dF/dphi, dF/dp, dF/dpi) with the natural array shapes.
    A callable may carry a ``phase_gradient(state)`` attribute returning the
    same tuple analytically.
    """
    analytic = getattr(F, "phase_gradient", None)
    if analytic is not None:
        return analytic(state)
    z0 = _pack(state)
    N, n = state.N, state.n
    grad = np.empty_like(z0)
    for i in range(len(z0)):
        h = h_scale * max(1.0, abs(z0[i]))
        zp = z0.copy(); zp[i] += h
        zm = z0.copy(); zm[i] -= h
        grad[i] = (F(_unpack(zp, N, n, state.time)) - F(_unpack(zm, N, n, state.time))) / (2 * h)
    nx = N * n
    nphi = N * n * n
    return (grad[:nx].reshape(N, n),
            grad[nx:nx + nphi].reshape(N, n, n),
            grad[nx + nphi:2 * nx + nphi].reshape(N, n),
            grad[2 * nx + nphi:].reshape(N, n, n))


def poisson_bracket(F, G, state: PhaseState, h_scale: float = 1e-5) -> float:
    """Canonical bracket {F, G} over all (x, p) and (phi, pi) pairs.

    The (phi, pi) contribution contracts dF/dphi[K, i, a] with
    dG/dpi[K, a, i], matching the Tr(pi xi) pairing.
    """
    fx, fphi, fp, fpi = _phase_gradient(F, state, h_scale)
    gx, gphi, gp, gpi = _phase_gradient(G, state, h_scale)
    val = float(np.sum(fx * gp) - np.sum(fp * gx))
    val += float(np.einsum("kia,kai->", fphi, gpi) - np.einsum("kai,kia->", fpi, gphi))
    return val


def sigma_component(K: int, a: int, b: int):
    """Phase function Sigma_K[a, b] = (phi_K pi_K)[a, b] with analytic gradient."""
    def f(state: PhaseState) -> float:
        return float(state.config.phi[K][a] @ state.mom.pi[K][:, b])

    def grad(state: PhaseState):
        N, n = state.N, state.n
        dphi = np.zeros((N, n, n))
        dpi = np.zeros((N, n, n))
        dphi[K, a, :] = state.mom.pi[K][:, b]
        dpi[K, :, b] = state.config.phi[K][a]
        return np.zeros((N, n)), dphi, np.zeros((N, n)), dpi

    f.phase_gradient = grad
    return f


def sigma_hat_component(K: int, a: int, b: int):
    """Phase function Sigma_hat_K[a, b] = (pi_K phi_K)[a, b] with analytic gradient."""
    def f(state: PhaseState) -> float:
        return float(state.mom.pi[K][a] @ state.config.phi[K][:, b])

    def grad(state: PhaseState):
        N, n = state.N, state.n
        dphi = np.zeros((N, n, n))
        dpi = np.zeros((N, n, n))
        dpi[K, a, :] = state.config.phi[K][:, b]
        dphi[K, :, b] = state.mom.pi[K][a]
        return np.zeros((N, n)), dphi, np.zeros((N, n)), dpi

    f.phase_gradient = grad
    return f
