"""Kinetic-energy models, Legendre transforms, and kinetic Hamiltonians.

Model menu (selected independently per sector):

* translational: ``dalembert`` (= ``is-af``): (M/2) v.v
                 ``af-is``:                   (M/2) v_hat.v_hat, v_hat = phi^-1 v
* internal:      ``dalembert``: (1/2) Tr(xi J xi.T)
                 ``af-J``:      (1/2) Tr(Omega_hat J Omega_hat.T)
                 ``H-af``:      (1/2) Tr(Omega H Omega.T)
                 ``is-af``:     (I/2) Tr(Omega.T Omega) + af-af part in Omega
                 ``af-is``:     same with Omega_hat
                 ``af-af``:     (A/2) Tr(Omega^2) + (B/2) (Tr Omega)^2
                 ``l-af``:      (1/2) vec(Omega_hat).T Lten vec(Omega_hat)
                 ``r-af``:      (1/2) vec(Omega).T   Rten vec(Omega)

Momenta pair with velocities through <p, v> = p.v and <pi, xi> = Tr(pi xi),
so pi is conjugate to xi "transposed": the canonical partner of phi[i, a] is
pi[a, i].  Affine spin in the spatial and co-moving pictures:

    Sigma = phi @ pi        Sigma_hat = pi @ phi

For the (I, A, B) family the forward map is Sigma = I Omega.T + A Omega
+ B Tr(Omega) Id; its inverse uses the reciprocal constants stored in
``TildeConstants``, which stay finite in the pure af-af limit I = 0.
``l-af``/``r-af`` invert their n^2 x n^2 bilinear forms numerically; vec() is
the row-major flattening of the velocity matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetric, MissingParams
from .kinematics import SystemConfig, VelocityState
from .matcore import checked_det

TRANSLATIONAL_MODELS = ("dalembert", "is-af", "af-is")
INTERNAL_MODELS = ("dalembert", "af-J", "af-is", "H-af", "l-af", "r-af", "af-af", "is-af")


@dataclass(frozen=True)
class KineticModel:
    translational: str = "dalembert"
    internal: str = "dalembert"

    def __post_init__(self):
        if self.translational not in TRANSLATIONAL_MODELS:
            raise ValueError(f"unknown translational model {self.translational!r}; "
                             f"choose from {TRANSLATIONAL_MODELS}")
        if self.internal not in INTERNAL_MODELS:
            raise ValueError(f"unknown internal model {self.internal!r}; "
                             f"choose from {INTERNAL_MODELS}")


@dataclass(frozen=True)
class InertiaParams:
    """Inertial constants; only the ones used by the selected model matter.

    M: total mass. J: co-moving quadrupole inertia (symmetric positive
    definite). I, A, B: scalars of the isotropic affine family. H: fixed
    spatial inertia of the H-af model. Lten / Rten: n^2 x n^2 symmetric
    bilinear forms of the general affine models, acting on row-major vec()
    of the velocity matrix.
    """

    M: float = 1.0
    J: np.ndarray | None = None
    I: float | None = None
    A: float | None = None
    B: float | None = None
    H: np.ndarray | None = None
    Lten: np.ndarray | None = None
    Rten: np.ndarray | None = None

    def __post_init__(self):
        for name in ("J", "H", "Lten", "Rten"):
            val = getattr(self, name)
            if val is not None:
                arr = np.asarray(val, dtype=float)
                if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                    raise ValueError(f"{name} must be a square matrix")
                if not np.allclose(arr, arr.T, atol=1e-12):
                    raise ValueError(f"{name} must be symmetric")
                object.__setattr__(self, name, arr)
        if self.M <= 0:
            raise ValueError("M must be positive")


@dataclass(frozen=True)
class TildeConstants:
    """Reciprocals 1/I~, 1/A~, 1/B~ of the inverse-metric constants."""

    recip_I: float
    recip_A: float
    recip_B: float


@dataclass(frozen=True)
class MomentumState:
    """Momenta p (N, n) and pi (N, n, n), conjugate through Tr(pi xi)."""

    p: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "pi", np.asarray(self.pi, dtype=float))

    def p_hat(self, config: SystemConfig) -> np.ndarray:
        """Co-moving momenta phi_K.T p_K, shape (N, n)."""
        return np.einsum("kji,kj->ki", config.phi, self.p)

    def sigma(self, config: SystemConfig) -> np.ndarray:
        """Spatial affine spin phi_K pi_K per body, shape (N, n, n)."""
        return config.phi @ self.pi

    def sigma_hat(self, config: SystemConfig) -> np.ndarray:
        """Co-moving affine spin pi_K phi_K per body."""
        return self.pi @ config.phi

    def spin(self, config: SystemConfig) -> np.ndarray:
        """Skew spin S_K = Sigma_K - Sigma_K.T."""
        s = self.sigma(config)
        return s - np.transpose(s, (0, 2, 1))

    def vorticity(self, config: SystemConfig) -> np.ndarray:
        """Skew vorticity V_K = Sigma_hat_K - Sigma_hat_K.T."""
        s = self.sigma_hat(config)
        return s - np.transpose(s, (0, 2, 1))


def params_for_body(params, K: int) -> InertiaParams:
    """Resolve shared vs per-body inertia parameters."""
    if isinstance(params, InertiaParams):
        return params
    return params[K]


def tilde_constants(I: float, A: float, B: float, n: int) -> TildeConstants:
    """Reciprocal constants of the inverse (I, A, B) kinetic metric.

    Raises DegenerateMetric when I^2 = A^2 or (I + A)(I + A + nB) = 0, where
    the Legendre map is not invertible.  Zero numerator inertias give zero
    reciprocals, so the I = 0 (pure af-af) case is representable.
    """
    d1 = I * I - A * A
    if abs(d1) <= 1e-14 * max(1.0, I * I + A * A):
        raise DegenerateMetric(f"I^2 = A^2 at (I, A) = ({I}, {A})")
    recip_I = 0.0 if I == 0.0 else I / d1
    recip_A = 0.0 if A == 0.0 else -A / d1
    if B == 0.0:
        recip_B = 0.0
    else:
        d2 = (I + A) * (I + A + n * B)
        if abs(d2) <= 1e-14 * max(1.0, (I + A) ** 2, B * B):
            raise DegenerateMetric(f"(I + A)(I + A + nB) = 0 at (I, A, B, n) = ({I}, {A}, {B}, {n})")
        recip_B = -B / d2
    return TildeConstants(recip_I, recip_A, recip_B)


def _require(params: InertiaParams, model_name: str, *names):
    for name in names:
        if getattr(params, name) is None:
            raise MissingParams(f"model {model_name!r} needs inertia parameter {name!r}")


def _iab(params: InertiaParams, internal: str) -> tuple[float, float, float]:
    if internal == "af-af":
        _require(params, internal, "A", "B")
        return 0.0, float(params.A), float(params.B)
    _require(params, internal, "I", "A", "B")
    return float(params.I), float(params.A), float(params.B)


def _vec(m: np.ndarray) -> np.ndarray:
    return m.reshape(-1)


def _unvec(v: np.ndarray, n: int) -> np.ndarray:
    return v.reshape(n, n)


def _solve_bimatrix(form: np.ndarray, rhs: np.ndarray, name: str) -> np.ndarray:
    try:
        sol = np.linalg.solve(form, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetric(f"{name} bilinear form is not invertible") from exc
    if not np.all(np.isfinite(sol)):
        raise DegenerateMetric(f"{name} bilinear form is not invertible")
    return sol


def _spd_inverse(mat: np.ndarray, name: str) -> np.ndarray:
    try:
        out = np.linalg.inv(mat)
    except np.linalg.LinAlgError as exc:
        raise DegenerateMetric(f"{name} is not invertible") from exc
    return out


# ---------------------------------------------------------------------------
# kinetic energy (velocity picture)

def _tr_energy(variant: str, params: InertiaParams, phi: np.ndarray, v: np.ndarray) -> float:
    M = params.M
    if variant in ("dalembert", "is-af"):
        return 0.5 * M * float(v @ v)
    # af-is: the Cauchy tensor plays the spatial metric
    v_hat = np.linalg.solve(phi, v)
    return 0.5 * M * float(v_hat @ v_hat)


def _int_energy(variant: str, params: InertiaParams, phi: np.ndarray, xi: np.ndarray) -> float:
    n = phi.shape[0]
    if variant == "dalembert":
        _require(params, variant, "J")
        return 0.5 * float(np.trace(xi @ params.J @ xi.T))
    phi_inv = np.linalg.inv(phi)
    if variant == "af-J":
        _require(params, variant, "J")
        om_hat = phi_inv @ xi
        return 0.5 * float(np.trace(om_hat @ params.J @ om_hat.T))
    if variant == "H-af":
        _require(params, variant, "H")
        om = xi @ phi_inv
        return 0.5 * float(np.trace(om @ params.H @ om.T))
    if variant == "l-af":
        _require(params, variant, "Lten")
        w = _vec(phi_inv @ xi)
        return 0.5 * float(w @ params.Lten @ w)
    if variant == "r-af":
        _require(params, variant, "Rten")
        w = _vec(xi @ phi_inv)
        return 0.5 * float(w @ params.Rten @ w)
    I, A, B = _iab(params, variant)
    om = xi @ phi_inv if variant in ("is-af", "af-af") else phi_inv @ xi
    val = 0.5 * A * float(np.trace(om @ om)) + 0.5 * B * float(np.trace(om)) ** 2
    if I != 0.0:
        val += 0.5 * I * float(np.trace(om.T @ om))
    return val


def kinetic_energy(model: KineticModel, params, config: SystemConfig,
                   vel: VelocityState, per_body: bool = False):
    """Total kinetic energy, summed over bodies in index order.

    With ``per_body`` the individual body contributions are returned instead.
    """
    out = np.empty(config.N)
    for K in range(config.N):
        pk = params_for_body(params, K)
        phi = config.phi[K]
        checked_det(phi)
        out[K] = _tr_energy(model.translational, pk, phi, vel.v[K]) \
            + _int_energy(model.internal, pk, phi, vel.xi[K])
    return out if per_body else float(out.sum())


# ---------------------------------------------------------------------------
# Legendre transform and its inverse

def _sigma_from_omega(I: float, A: float, B: float, om: np.ndarray) -> np.ndarray:
    n = om.shape[0]
    s = A * om + B * np.trace(om) * np.eye(n)
    if I != 0.0:
        s = s + I * om.T
    return s


def _omega_from_sigma(tc: TildeConstants, sig: np.ndarray) -> np.ndarray:
    n = sig.shape[0]
    om = tc.recip_A * sig + tc.recip_B * np.trace(sig) * np.eye(n)
    if tc.recip_I != 0.0:
        om = om + tc.recip_I * sig.T
    return om


def _legendre_body(model, params, phi, v, xi):
    n = phi.shape[0]
    phi_inv = np.linalg.inv(phi)

    if model.translational in ("dalembert", "is-af"):
        p = params.M * v
    else:  # af-is
        p = params.M * (phi_inv.T @ (phi_inv @ v))

    internal = model.internal
    if internal == "dalembert":
        _require(params, internal, "J")
        pi = params.J @ xi.T
    elif internal == "af-J":
        _require(params, internal, "J")
        om_hat = phi_inv @ xi
        pi = (params.J @ om_hat.T) @ phi_inv
    elif internal == "H-af":
        _require(params, internal, "H")
        om = xi @ phi_inv
        pi = phi_inv @ (params.H @ om.T)
    elif internal == "l-af":
        _require(params, internal, "Lten")
        om_hat = phi_inv @ xi
        sig_hat = _unvec(params.Lten @ _vec(om_hat), n).T
        pi = sig_hat @ phi_inv
    elif internal == "r-af":
        _require(params, internal, "Rten")
        om = xi @ phi_inv
        sig = _unvec(params.Rten @ _vec(om), n).T
        pi = phi_inv @ sig
    else:
        I, A, B = _iab(params, internal)
        tilde_constants(I, A, B, n)  # validate invertibility up front
        if internal in ("is-af", "af-af"):
            om = xi @ phi_inv
            sig = _sigma_from_omega(I, A, B, om)
            pi = phi_inv @ sig
        else:  # af-is
            om_hat = phi_inv @ xi
            sig_hat = _sigma_from_omega(I, A, B, om_hat)
            pi = sig_hat @ phi_inv
    return p, pi


def legendre(model: KineticModel, params, config: SystemConfig,
             vel: VelocityState) -> MomentumState:
    """Map (v, xi) to canonical momenta (p, pi) for the selected model."""
    p = np.empty_like(vel.v)
    pi = np.empty_like(vel.xi)
    for K in range(config.N):
        pk = params_for_body(params, K)
        checked_det(config.phi[K])
        p[K], pi[K] = _legendre_body(model, pk, config.phi[K], vel.v[K], vel.xi[K])
    return MomentumState(p=p, pi=pi)


def _inverse_legendre_body(model, params, phi, p, pi):
    if model.translational in ("dalembert", "is-af"):
        v = p / params.M
    else:  # af-is: p_hat = M v_hat
        v = phi @ (phi.T @ p) / params.M

    internal = model.internal
    if internal == "dalembert":
        _require(params, internal, "J")
        xi = pi.T @ _spd_inverse(params.J, "J")
    elif internal in ("is-af", "af-af", "H-af", "r-af"):
        xi = _omega_spatial(internal, params, phi @ pi) @ phi
    else:
        xi = phi @ _omega_comoving(internal, params, pi @ phi)
    return v, xi


def inverse_legendre(model: KineticModel, params, config: SystemConfig,
                     mom: MomentumState) -> VelocityState:
    """Map canonical momenta back to velocities (exact inverse of legendre)."""
    v = np.empty_like(mom.p)
    xi = np.empty_like(mom.pi)
    for K in range(config.N):
        pk = params_for_body(params, K)
        checked_det(config.phi[K])
        v[K], xi[K] = _inverse_legendre_body(model, pk, config.phi[K], mom.p[K], mom.pi[K])
    return VelocityState(v=v, xi=xi)


# ---------------------------------------------------------------------------
# kinetic Hamiltonian (momentum picture)

def _tr_hamiltonian(variant, params, phi, p):
    M = params.M
    if variant in ("dalembert", "is-af"):
        return 0.5 * float(p @ p) / M
    p_hat = phi.T @ p
    return 0.5 * float(p_hat @ p_hat) / M


def _int_hamiltonian(variant, params, phi, pi):
    n = phi.shape[0]
    if variant == "dalembert":
        _require(params, variant, "J")
        return 0.5 * float(np.trace(pi.T @ _spd_inverse(params.J, "J") @ pi))
    if variant == "af-J":
        _require(params, variant, "J")
        sig_hat = pi @ phi
        return 0.5 * float(np.trace(sig_hat.T @ _spd_inverse(params.J, "J") @ sig_hat))
    if variant == "H-af":
        _require(params, variant, "H")
        sig = phi @ pi
        return 0.5 * float(np.trace(sig.T @ _spd_inverse(params.H, "H") @ sig))
    if variant == "l-af":
        _require(params, variant, "Lten")
        w = _vec((pi @ phi).T)
        return 0.5 * float(w @ _solve_bimatrix(params.Lten, w, "Lten"))
    if variant == "r-af":
        _require(params, variant, "Rten")
        w = _vec((phi @ pi).T)
        return 0.5 * float(w @ _solve_bimatrix(params.Rten, w, "Rten"))
    I, A, B = _iab(params, variant)
    tc = tilde_constants(I, A, B, n)
    sig = phi @ pi if variant in ("is-af", "af-af") else pi @ phi
    val = 0.5 * tc.recip_A * float(np.trace(sig @ sig)) \
        + 0.5 * tc.recip_B * float(np.trace(sig)) ** 2
    if tc.recip_I != 0.0:
        val += 0.5 * tc.recip_I * float(np.trace(sig.T @ sig))
    return val


def kinetic_hamiltonian(model: KineticModel, params, config: SystemConfig,
                        mom: MomentumState, per_body: bool = False):
    """Kinetic Hamiltonian; satisfies T(legendre(v, xi)) = T(v, xi)."""
    out = np.empty(config.N)
    for K in range(config.N):
        pk = params_for_body(params, K)
        phi = config.phi[K]
        checked_det(phi)
        out[K] = _tr_hamiltonian(model.translational, pk, phi, mom.p[K]) \
            + _int_hamiltonian(model.internal, pk, phi, mom.pi[K])
    return out if per_body else float(out.sum())


def _omega_spatial(internal: str, params: InertiaParams, sig: np.ndarray) -> np.ndarray:
    n = sig.shape[0]
    if internal in ("is-af", "af-af"):
        I, A, B = _iab(params, internal)
        return _omega_from_sigma(tilde_constants(I, A, B, n), sig)
    if internal == "H-af":
        _require(params, internal, "H")
        return sig.T @ _spd_inverse(params.H, "H")
    _require(params, internal, "Rten")
    return _unvec(_solve_bimatrix(params.Rten, _vec(sig.T), "Rten"), n)


def _omega_comoving(internal: str, params: InertiaParams, sig_hat: np.ndarray) -> np.ndarray:
    n = sig_hat.shape[0]
    if internal == "af-is":
        I, A, B = _iab(params, internal)
        return _omega_from_sigma(tilde_constants(I, A, B, n), sig_hat)
    if internal == "af-J":
        _require(params, internal, "J")
        return sig_hat.T @ _spd_inverse(params.J, "J")
    _require(params, internal, "Lten")
    return _unvec(_solve_bimatrix(params.Lten, _vec(sig_hat.T), "Lten"), n)


def kinetic_phi_gradient(model: KineticModel, params, config: SystemConfig,
                         mom: MomentumState) -> np.ndarray:
    """d(kinetic Hamiltonian)/d(phi) per body, in phi shape (N, n, n).

    The spatial-picture models contribute (pi Omega).T and the co-moving ones
    (Omega_hat pi).T, with Omega / Omega_hat the inverse-Legendre velocity
    matrices recovered directly from the affine spins; an af-is translational
    sector adds p p_hat.T / M.
    """
    grad = np.zeros_like(config.phi)
    internal = model.internal
    for K in range(config.N):
        pk = params_for_body(params, K)
        phi = config.phi[K]
        pi = mom.pi[K]
        if internal in ("is-af", "af-af", "H-af", "r-af"):
            om = _omega_spatial(internal, pk, phi @ pi)
            grad[K] += (pi @ om).T
        elif internal in ("af-is", "af-J", "l-af"):
            om_hat = _omega_comoving(internal, pk, pi @ phi)
            grad[K] += (om_hat @ pi).T
        # dalembert internal has no configuration dependence
        if model.translational == "af-is":
            p = mom.p[K]
            grad[K] += np.outer(p, phi.T @ p) / pk.M
    return grad


# ---------------------------------------------------------------------------
# diagnostics

def positivity_check(I: float, A: float, B: float, n: int) -> tuple[bool, np.ndarray]:
    """Definiteness of the (I, A, B) internal form on L(n, R).

    Builds the n^2 x n^2 quadratic form of (I/2)Tr(Om.T Om) + (A/2)Tr(Om^2)
    + (B/2)(Tr Om)^2 over vec(Om) and returns (positive_definite, spectrum
    ascending).
    """
    dim = n * n
    Q = np.zeros((dim, dim))
    for i in range(n):
        for j in range(n):
            row = i * n + j
            Q[row, row] += I
            Q[row, j * n + i] += A
            if i == j:
                for k in range(n):
                    Q[row, k * n + k] += B
    Q = 0.5 * (Q + Q.T)
    spectrum = np.linalg.eigvalsh(Q)
    scale = max(1.0, float(np.max(np.abs(spectrum))))
    return bool(spectrum[0] > 1e-12 * scale), spectrum
