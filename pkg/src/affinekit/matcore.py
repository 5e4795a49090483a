"""Dense small-matrix kernels: polar and two-polar decompositions.

Everything operates on plain numpy arrays of shape (n, n) with 1 <= n <= 4.
Configuration matrices must lie in GL+(n): positive determinant, with
|det| > 1e-12 as the working invertibility floor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeOrientation, SingularInput

DET_FLOOR = 1e-12
DEGENERACY_TOL = 1e-10
MAX_DIM = 4


def as_matrix(phi, name: str = "phi") -> np.ndarray:
    """Validate and return a square float matrix of supported dimension."""
    m = np.asarray(phi, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"{name} must have dimension 1..{MAX_DIM}, got {n}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def checked_det(phi, name: str = "phi", require_positive: bool = False) -> float:
    """Determinant of ``phi``, raising if it sits at the invertibility floor."""
    m = as_matrix(phi, name)
    d = float(np.linalg.det(m))
    if abs(d) <= DET_FLOOR:
        raise SingularInput(f"{name} is singular (|det| = {abs(d):.3e} <= {DET_FLOOR})")
    if require_positive and d < 0.0:
        raise NegativeOrientation(f"{name} has det = {d:.3e} < 0 (outside GL+)")
    return d


def inv(phi, name: str = "phi") -> np.ndarray:
    """Inverse with the singularity floor enforced."""
    checked_det(phi, name)
    return np.linalg.inv(phi)


@dataclass(frozen=True)
class TwoPolarFactors:
    """Factors of phi = L @ D @ R.T with L, R in SO(n) and D positive diagonal.

    ``q`` holds the logarithms of the diagonal of D, descending.  ``degenerate``
    flags coincident diagonal entries (within 1e-10): the factors are still a
    valid decomposition but L and R are no longer unique.
    """

    L: np.ndarray
    D: np.ndarray
    R: np.ndarray
    q: np.ndarray
    degenerate: bool = False

    @property
    def d(self) -> np.ndarray:
        """Diagonal of D as a vector."""
        return np.diag(self.D)

    def reconstruct(self) -> np.ndarray:
        return self.L @ self.D @ self.R.T


def polar_decompose(phi) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Left/right polar factors (U, A, B) with phi = U A = B U.

    U is special orthogonal, A = sqrt(phi.T phi) and B = U A U^-1 are symmetric
    positive definite.  Input must have positive determinant.
    """
    m = as_matrix(phi)
    checked_det(m, require_positive=True)
    W, s, Vt = np.linalg.svd(m)
    U = W @ Vt
    A = Vt.T @ np.diag(s) @ Vt
    B = W @ np.diag(s) @ W.T
    return U, A, B


def two_polar_decompose(phi) -> TwoPolarFactors:
    """Two-polar factors of phi in GL+(n), singular values descending.

    Both orthogonal factors are forced into SO(n) by flipping one column pair
    when needed (legal because det phi > 0 makes det L = det R).
    """
    m = as_matrix(phi)
    checked_det(m, require_positive=True)
    L, s, Vt = np.linalg.svd(m)
    R = Vt.T
    if np.linalg.det(L) < 0.0:
        L = L.copy()
        R = R.copy()
        L[:, -1] = -L[:, -1]
        R[:, -1] = -R[:, -1]
    # svd returns s descending, so coincidence shows up as an adjacent gap
    # smaller than the tolerance.
    degenerate = bool(len(s) > 1 and np.min(-np.diff(s)) < DEGENERACY_TOL)
    return TwoPolarFactors(L=L, D=np.diag(s), R=R, q=np.log(s), degenerate=degenerate)
