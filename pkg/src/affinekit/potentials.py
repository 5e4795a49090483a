"""Invariant potential-energy terms and their analytic gradients.

A potential is assembled from three groups:

* one-body terms: a harmonic well in the center position plus scalar
  functions of the single-body invariants K_a = Tr((phi.T phi)^a)
* binary terms: scalar functions of one of the pair channels
  ``r``     Euclidean center distance |x_K - x_L|
  ``D``     affine distance sqrt(dx.T Cbar dx), Cbar = (C[phi_K] + C[phi_L])/2
  ``K:a``   mutual invariant Tr((phi_K.T phi_L)^a)
  ``Mbar:a`` symmetrized affine invariant (Tr Gamma^a + Tr Gamma^-a)/2 with
             Gamma = phi_K^-1 phi_L
* a dilatation stabilizer (kappa/2) ln(det phi / d_ref)^2 per body

``Mbar`` uses the symmetrized combination because swapping the pair inverts
Gamma; the symmetrization makes every binary term exactly symmetric in
(K, L), which the raw Tr Gamma^a is not.

The total is sum(one-body) + (1/2) sum_{K != L} binary + sum(dilatation);
pair contributions accumulate in ascending (K, L) order for bit determinism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonDifferentiable
from .kinematics import BodyConfig, SystemConfig
from .matcore import checked_det


# ---------------------------------------------------------------------------
# scalar function library: each evaluates to (value, d/ds)

@dataclass(frozen=True)
class PolyFn:
    """sum_j coeffs[j] * (s - shift)^j"""

    coeffs: tuple
    shift: float = 0.0

    def eval(self, s: float) -> tuple[float, float]:
        t = s - self.shift
        val = 0.0
        slope = 0.0
        for j in range(len(self.coeffs) - 1, 0, -1):
            c = self.coeffs[j]
            val = val * t + c
            slope = slope * t + j * c
        if self.coeffs:
            val = val * t + self.coeffs[0]
        return float(val), float(slope)


@dataclass(frozen=True)
class HarmonicFn:
    """(stiffness/2) (s - center)^2"""

    stiffness: float
    center: float = 0.0

    def eval(self, s: float) -> tuple[float, float]:
        d = s - self.center
        return 0.5 * self.stiffness * d * d, self.stiffness * d


@dataclass(frozen=True)
class LogHarmonicFn:
    """(stiffness/2) ln(s / ref)^2, for positive channels"""

    stiffness: float
    ref: float = 1.0

    def eval(self, s: float) -> tuple[float, float]:
        if s <= 0.0:
            raise NonDifferentiable("log-harmonic term needs a positive argument")
        u = np.log(s / self.ref)
        return 0.5 * self.stiffness * u * u, self.stiffness * u / s


@dataclass(frozen=True)
class LennardJonesFn:
    """4 epsilon ((sigma/s)^12 - (sigma/s)^6)"""

    epsilon: float
    sigma: float

    def eval(self, s: float) -> tuple[float, float]:
        if s <= 0.0:
            raise NonDifferentiable("Lennard-Jones term needs a positive argument")
        u6 = (self.sigma / s) ** 6
        val = 4.0 * self.epsilon * (u6 * u6 - u6)
        slope = 4.0 * self.epsilon * (-12.0 * u6 * u6 + 6.0 * u6) / s
        return val, slope


SCALAR_FNS = {
    "poly": PolyFn,
    "harmonic": HarmonicFn,
    "harmonic_log": LogHarmonicFn,
    "lj": LennardJonesFn,
}


# ---------------------------------------------------------------------------
# term and spec containers

@dataclass(frozen=True)
class TranslationalHarmonic:
    """One-body external well (stiffness/2) |x - center|^2."""

    stiffness: float
    center: tuple = ()

    def center_vec(self, n: int) -> np.ndarray:
        if not self.center:
            return np.zeros(n)
        return np.asarray(self.center, dtype=float)


@dataclass(frozen=True)
class InvariantTerm:
    """One-body internal term fn(K_a[phi])."""

    a: int
    fn: object


@dataclass(frozen=True)
class BinaryTerm:
    """Pair term fn(channel) with channel in r / D / K:a / Mbar:a."""

    arg: str
    fn: object


@dataclass(frozen=True)
class DilatationTerm:
    """Volume stabilizer (kappa/2) ln(det phi / d_ref)^2 per body."""

    kappa: float
    d_ref: float = 1.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")


@dataclass(frozen=True)
class PotentialSpec:
    one_body: tuple = ()
    binary: tuple = ()
    dil: DilatationTerm | None = None

    def __post_init__(self):
        object.__setattr__(self, "one_body", tuple(self.one_body))
        object.__setattr__(self, "binary", tuple(self.binary))
        for term in self.binary:
            _parse_channel(term.arg)


def _parse_channel(arg: str) -> tuple[str, int]:
    if arg in ("r", "D"):
        return arg, 0
    kind, _, idx = arg.partition(":")
    if kind in ("K", "Mbar") and idx.isdigit() and int(idx) >= 1:
        return kind, int(idx)
    raise ValueError(f"unknown binary channel {arg!r}")


# ---------------------------------------------------------------------------
# channel values and gradients

def affine_distance(x_K, phi_K, x_L, phi_L) -> float:
    """Spatially affine-invariant distance through the mean Cauchy tensor."""
    checked_det(phi_K, "phi_K")
    checked_det(phi_L, "phi_L")
    dx = np.asarray(x_K, dtype=float) - np.asarray(x_L, dtype=float)
    cbar = _mean_cauchy(np.asarray(phi_K, float), np.asarray(phi_L, float))
    return float(np.sqrt(dx @ cbar @ dx))


def _mean_cauchy(phi_K: np.ndarray, phi_L: np.ndarray) -> np.ndarray:
    ck = np.linalg.inv(phi_K @ phi_K.T)
    cl = np.linalg.inv(phi_L @ phi_L.T)
    return 0.5 * (ck + cl)


def _single_invariants(phi: np.ndarray) -> np.ndarray:
    n = phi.shape[0]
    g = phi.T @ phi
    out = np.empty(n)
    acc = np.eye(n)
    for a in range(n):
        acc = acc @ g
        out[a] = np.trace(acc)
    return out


class _PairChannels:
    """All scalar channels of one ordered pair, with lazy gradients."""

    def __init__(self, x_K, phi_K, x_L, phi_L):
        self.n = phi_K.shape[0]
        self.dx = x_K - x_L
        self.phi_K = phi_K
        self.phi_L = phi_L
        self.inv_K = np.linalg.inv(phi_K)
        self.inv_L = np.linalg.inv(phi_L)
        self.C_K = self.inv_K.T @ self.inv_K
        self.C_L = self.inv_L.T @ self.inv_L
        self.cbar = 0.5 * (self.C_K + self.C_L)
        self.r = float(np.linalg.norm(self.dx))
        self.D = float(np.sqrt(self.dx @ self.cbar @ self.dx))
        self.Gm = phi_K.T @ phi_L
        self.Gamma = self.inv_K @ phi_L
        self.Gamma_inv = np.linalg.inv(self.Gamma)

    def value(self, channel: str, a: int) -> float:
        if channel == "r":
            return self.r
        if channel == "D":
            return self.D
        if channel == "K":
            return float(np.trace(np.linalg.matrix_power(self.Gm, a)))
        gp = np.linalg.matrix_power(self.Gamma, a)
        gm = np.linalg.matrix_power(self.Gamma_inv, a)
        return 0.5 * float(np.trace(gp) + np.trace(gm))

    def grads(self, channel: str, a: int):
        """(d/dx_K, d/dphi_K, d/dphi_L); d/dx_L is the negative of d/dx_K."""
        n = self.n
        zx = np.zeros(n)
        if channel == "r":
            if self.r == 0.0:
                raise NonDifferentiable("binary r-term with coincident centers")
            return self.dx / self.r, np.zeros((n, n)), np.zeros((n, n))
        if channel == "D":
            if self.D == 0.0:
                raise NonDifferentiable("binary D-term with coincident centers")
            gx = (self.cbar @ self.dx) / self.D
            # d(dx.T C dx)/dphi = -2 (C dx)(phi^-1 dx).T for each body's Cauchy tensor
            gk = -0.5 * np.outer(self.C_K @ self.dx, self.inv_K @ self.dx) / self.D
            gl = -0.5 * np.outer(self.C_L @ self.dx, self.inv_L @ self.dx) / self.D
            return gx, gk, gl
        if channel == "K":
            gm_pow = np.linalg.matrix_power(self.Gm, a - 1)
            gk = a * self.phi_L @ gm_pow
            gl = a * self.phi_K @ gm_pow.T
            return zx, gk, gl
        # Mbar: Gamma = phi_K^-1 phi_L, symmetrized over a and -a
        gp = np.linalg.matrix_power(self.Gamma, a - 1)
        gpa = gp @ self.Gamma
        gm = np.linalg.matrix_power(self.Gamma_inv, a)
        gma = gm @ self.Gamma_inv
        # d Tr(Gamma^a): phi_L side a (Gamma^{a-1} phi_K^-1).T, phi_K side -a (Gamma^a phi_K^-1).T
        gl = 0.5 * a * ((gp @ self.inv_K).T - (gma @ self.inv_K).T)
        gk = 0.5 * a * (-(gpa @ self.inv_K).T + (gm @ self.inv_K).T)
        return zx, gk, gl


# ---------------------------------------------------------------------------
# public evaluation

def binary_potential(spec: PotentialSpec, body_K: BodyConfig, body_L: BodyConfig) -> float:
    """Value of the binary interaction for one unordered pair."""
    checked_det(body_K.phi, "phi_K")
    checked_det(body_L.phi, "phi_L")
    ch = _PairChannels(body_K.x, body_K.phi, body_L.x, body_L.phi)
    total = 0.0
    for term in spec.binary:
        channel, a = _parse_channel(term.arg)
        s = ch.value(channel, a)
        if channel == "r" and s == 0.0:
            raise NonDifferentiable("binary r-term with coincident centers")
        total += term.fn.eval(s)[0]
    return total


def dilatation_stabilizer(spec: PotentialSpec, phi) -> float:
    """Stabilizer value for a single body."""
    if spec.dil is None:
        return 0.0
    d = checked_det(phi, require_positive=True)
    u = np.log(d / spec.dil.d_ref)
    return 0.5 * spec.dil.kappa * float(u * u)


def _one_body_value(spec: PotentialSpec, x: np.ndarray, phi: np.ndarray) -> float:
    total = 0.0
    for term in spec.one_body:
        if isinstance(term, TranslationalHarmonic):
            d = x - term.center_vec(len(x))
            total += 0.5 * term.stiffness * float(d @ d)
        else:
            ka = _single_invariants(phi)[term.a - 1]
            total += term.fn.eval(float(ka))[0]
    return total


def total_potential(spec: PotentialSpec, config: SystemConfig) -> float:
    """Full potential: one-body + (1/2) off-diagonal pair sum + stabilizers."""
    total = 0.0
    for K in range(config.N):
        checked_det(config.phi[K])
        total += _one_body_value(spec, config.x[K], config.phi[K])
        total += dilatation_stabilizer(spec, config.phi[K])
    if spec.binary:
        for K in range(config.N):
            for L in range(K + 1, config.N):
                # the half-sum over ordered pairs collapses to one term per
                # unordered pair because every binary term is swap symmetric
                total += binary_potential(spec, config.body(K), config.body(L))
    return total


def potential_gradient(spec: PotentialSpec, config: SystemConfig):
    """Analytic (dV/dx, dV/dphi), shapes (N, n) and (N, n, n)."""
    N, n = config.N, config.n
    dx = np.zeros((N, n))
    dphi = np.zeros((N, n, n))
    for K in range(N):
        phi = config.phi[K]
        det = checked_det(phi)
        for term in spec.one_body:
            if isinstance(term, TranslationalHarmonic):
                dx[K] += term.stiffness * (config.x[K] - term.center_vec(n))
            else:
                g = phi.T @ phi
                ka = _single_invariants(phi)[term.a - 1]
                slope = term.fn.eval(float(ka))[1]
                dphi[K] += slope * 2.0 * term.a * (
                    phi @ np.linalg.matrix_power(g, term.a - 1))
        if spec.dil is not None:
            u = np.log(det / spec.dil.d_ref)
            dphi[K] += spec.dil.kappa * u * np.linalg.inv(phi).T
    for K in range(N):
        for L in range(K + 1, N):
            ch = _PairChannels(config.x[K], config.phi[K], config.x[L], config.phi[L])
            for term in spec.binary:
                channel, a = _parse_channel(term.arg)
                slope = term.fn.eval(ch.value(channel, a))[1]
                gx, gk, gl = ch.grads(channel, a)
                dx[K] += slope * gx
                dx[L] -= slope * gx
                dphi[K] += slope * gk
                dphi[L] += slope * gl
    return dx, dphi
