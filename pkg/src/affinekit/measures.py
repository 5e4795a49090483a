"""Haar and Lebesgue measure densities on GL+(n) and two-polar coordinates.

Density conventions (relative to the flat measure on matrix entries):

* ``lebesgue_l`` / ``lebesgue_a``: 1
* ``haar_lambda`` on GL+(n): (det phi)^-n  (bi-invariant)
* ``haar_alpha`` on R^n x GL+(n): (det phi)^-n-1  (left Haar of the affine
  group; it is not right-invariant because that group is not unimodular)

In two-polar coordinates phi = L diag(e^q) R.T the densities below are taken
with respect to dq^1..dq^n dmu(L) dmu(R), where mu is the SO(n) chart measure
(dtheta for n = 2; sin(beta) dalpha dbeta dgamma for the z-y-z chart at
n = 3).  The numeric chart Jacobian fixes the sinh exponent to 1 over ordered
pairs i < j and the constant to 2^(n(n-1)/2):

    haar     = 2^(n(n-1)/2) prod_{i<j} |sinh(q_i - q_j)|
    lebesgue = haar * (det phi)^n
    chart Jacobian = lebesgue * j_L * j_R

Sampling uses the Philox counter-based generator so every stream is
reproducible from its seed alone.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateSpectrum
from .matcore import TwoPolarFactors, as_matrix, checked_det

MEASURE_KINDS = ("lebesgue_a", "haar_alpha", "lebesgue_l", "haar_lambda")


def haar_density(phi, kind: str) -> float:
    """Density of the selected measure relative to Lebesgue on entries."""
    if kind not in MEASURE_KINDS:
        raise ValueError(f"unknown measure kind {kind!r}; choose from {MEASURE_KINDS}")
    phi = as_matrix(phi)
    d = checked_det(phi, require_positive=True)
    n = phi.shape[0]
    if kind == "haar_lambda":
        return float(d ** (-n))
    if kind == "haar_alpha":
        return float(d ** (-n - 1))
    return 1.0


def _sinh_product(q: np.ndarray) -> float:
    out = 1.0
    n = len(q)
    for i in range(n):
        for j in range(i + 1, n):
            out *= abs(np.sinh(q[i] - q[j]))
    return out


def twopolar_densities(factors: TwoPolarFactors) -> tuple[float, float]:
    """(haar, lebesgue) densities at the given two-polar point.

    Both are relative to dq dmu(L) dmu(R); coincident q gives density zero,
    which is a value, not an error.
    """
    q = np.asarray(factors.q, dtype=float)
    n = len(q)
    c = 2.0 ** (n * (n - 1) // 2)
    haar = c * _sinh_product(q)
    lebesgue = haar * float(np.exp(n * q.sum()))
    return haar, lebesgue


# ---------------------------------------------------------------------------
# SO(n) charts

def rotation_2d(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _rot_z(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_y(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_from_angles(n: int, angles) -> np.ndarray:
    """SO(n) element from chart parameters: () / (theta,) / z-y-z (a, b, g)."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if n == 1:
        return np.eye(1)
    if n == 2:
        return rotation_2d(angles[0])
    if n == 3:
        a, b, g = angles
        return _rot_z(a) @ _rot_y(b) @ _rot_z(g)
    raise ValueError("rotation charts support n <= 3")


def angles_from_rotation(R) -> np.ndarray:
    """Chart parameters of an SO(n) element, n <= 3.

    Raises DegenerateSpectrum at the z-y-z chart boundary (sin beta ~ 0),
    where the three angles are not separately defined.
    """
    R = as_matrix(R, "R")
    n = R.shape[0]
    if n == 1:
        return np.zeros(0)
    if n == 2:
        return np.array([np.arctan2(R[1, 0], R[0, 0])])
    if n == 3:
        cos_b = np.clip(R[2, 2], -1.0, 1.0)
        sin_b = np.sqrt(max(0.0, 1.0 - cos_b * cos_b))
        if sin_b < 1e-8:
            raise DegenerateSpectrum("z-y-z chart degenerate: rotation axis near e3")
        return np.array([np.arctan2(R[1, 2], R[0, 2]),
                         np.arccos(cos_b),
                         np.arctan2(R[2, 1], -R[2, 0])])
    raise ValueError("rotation charts support n <= 3")


def chart_weight(n: int, angles) -> float:
    """Density of the SO(n) chart measure mu w.r.t. the flat angle measure."""
    if n in (1, 2):
        return 1.0
    return float(np.sin(np.atleast_1d(angles)[1]))


def sample_orthogonal(n: int, seed: int, count: int | None = None) -> np.ndarray:
    """Haar-distributed SO(n) samples, n <= 3, Philox stream per seed.

    Returns one (n, n) matrix, or a (count, n, n) stack when count is given.
    """
    if not 1 <= n <= 3:
        raise ValueError("sample_orthogonal supports 1 <= n <= 3")
    rng = np.random.Generator(np.random.Philox(seed))
    m = 1 if count is None else int(count)
    out = np.empty((m, n, n))
    for k in range(m):
        out[k] = _sample_one(n, rng)
    return out[0] if count is None else out


def _sample_one(n: int, rng) -> np.ndarray:
    if n == 1:
        return np.eye(1)
    if n == 2:
        return rotation_2d(rng.uniform(0.0, 2.0 * np.pi))
    while True:
        a = rng.uniform(0.0, 2.0 * np.pi)
        g = rng.uniform(0.0, 2.0 * np.pi)
        b = np.arccos(rng.uniform(-1.0, 1.0))
        if np.sin(b) > 1e-12:  # resample off the chart boundary
            return rotation_from_angles(3, (a, b, g))


# ---------------------------------------------------------------------------
# numeric chart Jacobian

def _chart_map(n: int, params: np.ndarray) -> np.ndarray:
    n_ang = 0 if n == 1 else (1 if n == 2 else 3)
    left = rotation_from_angles(n, params[:n_ang]) if n_ang else np.eye(1)
    q = params[n_ang:n_ang + n]
    right = rotation_from_angles(n, params[n_ang + n:]) if n_ang else np.eye(1)
    return (left @ np.diag(np.exp(q)) @ right.T).ravel()


def jacobian_oracle(factors: TwoPolarFactors, step: float = 1e-6) -> float:
    """|det| of the finite-difference Jacobian of (L-params, q, R-params) -> phi.

    Brute-force validator for the two-polar densities; requires distinct q
    entries (and, at n = 3, factors away from the Euler chart boundary).
    """
    q = np.asarray(factors.q, dtype=float)
    n = len(q)
    if n > 1 and np.min(np.abs(np.subtract.outer(q, q)[np.triu_indices(n, 1)])) < 1e-8:
        raise DegenerateSpectrum("coincident q entries: two-polar chart degenerate")
    n_ang = 0 if n == 1 else (1 if n == 2 else 3)
    params = np.concatenate([
        angles_from_rotation(factors.L) if n_ang else np.zeros(0),
        q,
        angles_from_rotation(factors.R) if n_ang else np.zeros(0),
    ])
    dim = len(params)
    jac = np.empty((n * n, dim))
    for i in range(dim):
        dp = np.zeros(dim)
        dp[i] = step
        jac[:, i] = (_chart_map(n, params + dp) - _chart_map(n, params - dp)) / (2 * step)
    return float(abs(np.linalg.det(jac)))


def chart_density(factors: TwoPolarFactors) -> float:
    """Analytic counterpart of jacobian_oracle: lebesgue density times the
    chart weights of both orthogonal factors."""
    q = np.asarray(factors.q, dtype=float)
    n = len(q)
    _, lebesgue = twopolar_densities(factors)
    if n <= 2:
        return lebesgue
    jl = chart_weight(n, angles_from_rotation(factors.L))
    jr = chart_weight(n, angles_from_rotation(factors.R))
    return lebesgue * jl * jr


def measure_check_report(n: int, points: int = 100, seed: int = 0) -> dict:
    """Fit the sinh exponent and constant of the two-polar Haar density
    against the numeric Jacobian at random points."""
    if not 1 <= n <= 3:
        raise ValueError("measure-check supports 1 <= n <= 3")
    rng = np.random.Generator(np.random.Philox(seed))
    rows = []
    attempts = 0
    while len(rows) < points and attempts < 50 * points:
        attempts += 1
        q = np.sort(rng.uniform(-1.0, 1.0, size=n))[::-1]
        if n > 1 and np.min(-np.diff(q)) < 5e-2:
            continue
        L = _sample_one(n, rng)
        R = _sample_one(n, rng)
        if n == 3:
            try:
                angles_from_rotation(L)
                angles_from_rotation(R)
            except DegenerateSpectrum:
                continue
        factors = TwoPolarFactors(L=L, D=np.diag(np.exp(q)), R=R, q=q)
        base = {
            e: _sinh_product(q) ** e * float(np.exp(n * q.sum()))
            * (chart_weight(n, angles_from_rotation(L)) * chart_weight(n, angles_from_rotation(R))
               if n == 3 else 1.0)
            for e in (1, 2)
        }
        rows.append((jacobian_oracle(factors), base))
    best = None
    for e in (1, 2):
        ratios = np.array([j / b[e] for j, b in rows])
        c = float(np.median(ratios))
        rel = float(np.max(np.abs(ratios / c - 1.0))) if c != 0 else np.inf
        if best is None or rel < best[2]:
            best = (e, c, rel)
    exponent, constant, max_rel_err = best
    return {
        "n": n,
        "exponent_e": exponent,
        "constant_c": constant,
        "expected_constant": 2.0 ** (n * (n - 1) // 2),
        "max_rel_err": max_rel_err,
        "points": len(rows),
    }
