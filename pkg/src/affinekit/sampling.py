"""Seeded matrix samplers shared by the verification suites and tests.

Entries are uniform in [-1, 1] with a determinant floor of 0.1, which keeps
the matrices well enough conditioned for 1e-12-level identity checks.
"""

from __future__ import annotations

import numpy as np


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def random_invertible(rng, n: int, min_abs_det: float = 0.1) -> np.ndarray:
    while True:
        m = rng.uniform(-1.0, 1.0, size=(n, n))
        if abs(np.linalg.det(m)) > min_abs_det:
            return m


def random_glplus(rng, n: int, min_det: float = 0.1) -> np.ndarray:
    while True:
        m = rng.uniform(-1.0, 1.0, size=(n, n))
        if np.linalg.det(m) > min_det:
            return m


def random_orthogonal(rng, n: int, special: bool = True) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if special and np.linalg.det(q) < 0:
        q = q.copy()
        q[:, 0] = -q[:, 0]
    return q
