"""Dense complex linear algebra used throughout the package.

Composite basis convention: ``|i, j>`` of ``H1 (x) H2`` maps to the flat index
``i * n2 + j`` (row-major), matching ``np.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BadRank, DimensionMismatch, NoConvergence, NotHermitian

HERMITIAN_TOL = 1e-9


class BipartiteDims(NamedTuple):
    n1: int
    n2: int

    @property
    def total(self) -> int:
        return self.n1 * self.n2

    @classmethod
    def coerce(cls, dims) -> "BipartiteDims":
        n1, n2 = (int(d) for d in dims)
        if n1 < 1 or n2 < 1:
            raise DimensionMismatch(f"subsystem dimensions must be positive, got {dims!r}")
        return cls(n1, n2)


@dataclass(frozen=True)
class StateVector:
    """A possibly subnormalized bipartite vector.

    The squared norm plays the role of the ensemble weight, so no
    normalization is enforced.
    """

    dims: BipartiteDims
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = BipartiteDims.coerce(self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != dims.total:
            raise DimensionMismatch(
                f"vector of length {amps.size} does not match dims {tuple(dims)}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("state amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes as an ``n1 x n2`` coefficient matrix."""
        return self.amplitudes.reshape(self.dims.n1, self.dims.n2)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __mul__(self, scalar):
        return StateVector(self.dims, scalar * self.amplitudes)

    __rmul__ = __mul__

    def __add__(self, other: "StateVector") -> "StateVector":
        if self.dims != other.dims:
            raise DimensionMismatch("cannot add states with different dims")
        return StateVector(self.dims, self.amplitudes + other.amplitudes)


def herm_eig(H, assume_hermitian_tol: float = HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Parameters
    ----------
    H : array_like
        Square complex matrix.
    assume_hermitian_tol : float
        Maximum tolerated ``|H - H^dagger|`` entry.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in descending order. Equal eigenvalues keep the
        order in which the solver returned them.
    eigenvectors : ndarray
        Orthonormal eigenvectors as columns, aligned with ``eigenvalues``.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {H.shape}")
    asym = np.max(np.abs(H - H.conj().T)) if H.size else 0.0
    if asym > assume_hermitian_tol:
        raise NotHermitian(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    try:
        w, v = np.linalg.eigh((H + H.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def singular_values(M) -> np.ndarray:
    """Singular values of ``M`` in descending order."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def cross_reduced(psi_a: StateVector, psi_b: StateVector, traced_subsystem: int = 2) -> np.ndarray:
    """Partial trace of the operator ``|psi_a><psi_b|``.

    With ``traced_subsystem=2`` the result is ``n1 x n1`` with entries
    ``sum_j a[i, j] * conj(b[k, j])``; with ``1`` it is ``n2 x n2``.
    """
    if psi_a.dims != psi_b.dims:
        raise DimensionMismatch(f"dims differ: {tuple(psi_a.dims)} vs {tuple(psi_b.dims)}")
    a = psi_a.as_matrix()
    b = psi_b.as_matrix()
    if traced_subsystem == 2:
        return a @ b.conj().T
    if traced_subsystem == 1:
        return a.T @ b.conj()
    raise ValueError("traced_subsystem must be 1 or 2")


def partial_transpose(rho, dims, subsystem: int = 2) -> np.ndarray:
    """Partial transpose of a bipartite operator (an exact entry permutation)."""
    n1, n2 = BipartiteDims.coerce(dims)
    rho = np.asarray(rho)
    if rho.shape != (n1 * n2, n1 * n2):
        raise DimensionMismatch(f"matrix of shape {rho.shape} does not match dims {(n1, n2)}")
    t = rho.reshape(n1, n2, n1, n2)
    if subsystem == 2:
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == 1:
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError("subsystem must be 1 or 2")
    return t.reshape(n1 * n2, n1 * n2).copy()


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-random ``n x n`` unitary (QR of a complex Ginibre matrix, phase-fixed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(dims, rank: int | None = None, seed=None) -> np.ndarray:
    """Random state from the induced measure ``G G^dagger / tr(G G^dagger)``.

    ``G`` is an ``(n1*n2) x rank`` complex Gaussian matrix; ``rank`` defaults
    to full rank.
    """
    n1, n2 = BipartiteDims.coerce(dims)
    d = n1 * n2
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise BadRank(f"rank must lie in [1, {d}], got {rank}")
    rng = _rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_pure_state(dims, seed=None, normalized: bool = True) -> StateVector:
    dims = BipartiteDims.coerce(dims)
    rng = _rng(seed)
    v = rng.standard_normal(dims.total) + 1j * rng.standard_normal(dims.total)
    if normalized:
        v /= np.linalg.norm(v)
    return StateVector(dims, v)


def random_isometry(n_rows: int, n_cols: int, seed=None) -> np.ndarray:
    """First ``n_cols`` columns of a Haar-random ``n_rows x n_rows`` unitary."""
    if n_rows < n_cols:
        raise ValueError("an isometry needs n_rows >= n_cols")
    return random_unitary(n_rows, seed)[:, :n_cols]


def isometry_defect(V) -> float:
    """``max |V^dagger V - I|``."""
    V = np.asarray(V)
    return float(np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1]))))
