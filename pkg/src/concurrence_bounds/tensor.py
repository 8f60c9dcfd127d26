"""The concurrence tensor and its eigensystem of complex symmetric matrices.

For a decomposition ``rho = sum_j |phi_j><phi_j|`` the four-index tensor

    A[j, k, l, m] = f(phi_j, phi_l, phi_k, phi_m)

encodes the squared concurrence of every state reachable by an isometry ``V``:
for ``psi_i = sum_j V_ij phi_j`` one has ``c(psi_i)**2 = sum V_ij V_ik
conj(V_il V_im) A[j, k, l, m]``. Symmetrizing in ``(j, k)`` gives a positive
semidefinite ``r^2 x r^2`` matrix whose eigenvectors, reshaped to ``r x r``,
are the complex symmetric matrices ``T^alpha`` used by the bounds.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass

import numpy as np

from .errors import NegativeSpectrum, NotIsometry, NotSymmetrized, RankTooLarge
from .linalg import BipartiteDims, StateVector, cross_reduced, herm_eig, isometry_defect
from .states import SubnormalizedDecomposition

MAX_RANK = 64
SPECTRAL_RTOL = 1e-10
# Absolute floor on retained eigenvalues; below it the tensor is treated as zero.
SPECTRAL_ATOL = 1e-14
ISOMETRY_TOL = 1e-9

# Debug hook for mutation testing of the self-check suites.
_faults: set[str] = set()


@contextlib.contextmanager
def injected_fault(name: str):
    """Temporarily corrupt ``f_function`` (``name="f-sign"`` flips its trace term)."""
    _faults.add(name)
    try:
        yield
    finally:
        _faults.discard(name)


@dataclass(frozen=True)
class ConcurrenceTensor:
    entries: np.ndarray
    symmetrized: bool = False

    @property
    def r(self) -> int:
        return self.entries.shape[0]

    def unfolded(self) -> np.ndarray:
        """``r^2 x r^2`` matrix with row index ``(j, k)`` and column ``(l, m)``."""
        r = self.r
        return self.entries.reshape(r * r, r * r)


@dataclass(frozen=True)
class TmatrixSet:
    dims: BipartiteDims
    matrices: np.ndarray  # shape (m_eff, r, r)
    mu: np.ndarray  # retained eigenvalues, descending
    discarded: np.ndarray  # remaining eigenvalues of the unfolding, descending

    @property
    def r(self) -> int:
        return self.matrices.shape[1]

    @property
    def m_eff(self) -> int:
        return self.matrices.shape[0]

    @property
    def m_bound(self) -> int:
        return antisym_dim(self.dims)

    @property
    def is_empty(self) -> bool:
        return self.m_eff == 0

    def combine(self, z) -> np.ndarray:
        """``sum_alpha z_alpha T^alpha``."""
        return np.tensordot(np.asarray(z, dtype=complex), self.matrices, axes=1)


def f_function(psi1: StateVector, psi2: StateVector, psi3: StateVector, psi4: StateVector) -> complex:
    """``<psi2|psi1><psi4|psi3> - tr_1[tr_2(|psi1><psi2|) tr_2(|psi3><psi4|)]``.

    Linear in the first and third argument, antilinear in the second and
    fourth. ``f(psi, psi, psi, psi)`` is the squared concurrence of ``psi``.
    """
    r12 = cross_reduced(psi1, psi2, 2)
    r34 = cross_reduced(psi3, psi4, 2)
    overlap = np.vdot(psi2.amplitudes, psi1.amplitudes) * np.vdot(psi4.amplitudes, psi3.amplitudes)
    trace_term = np.trace(r12 @ r34)
    if "f-sign" in _faults:
        return complex(overlap + trace_term)
    return complex(overlap - trace_term)


def pure_concurrence(psi: StateVector) -> float:
    """Concurrence ``sqrt(<psi|psi>^2 - tr rho_r^2)`` of a (subnormalized) pure state."""
    value = f_function(psi, psi, psi, psi)
    scale = max(1.0, psi.norm_squared() ** 2)
    if abs(value.imag) > 1e-12 * scale:
        raise ArithmeticError(f"f(psi, psi, psi, psi) has imaginary part {value.imag:.3e}")
    return float(np.sqrt(max(0.0, value.real)))


def antisym_dim(dims) -> int:
    """Dimension ``n1(n1-1)n2(n2-1)/4`` of the product of antisymmetric subspaces."""
    n1, n2 = BipartiteDims.coerce(dims)
    return n1 * (n1 - 1) * n2 * (n2 - 1) // 4


def build_A(d: SubnormalizedDecomposition, max_rank: int = MAX_RANK) -> ConcurrenceTensor:
    """Tensor ``A[j, k, l, m] = f(phi_j, phi_l, phi_k, phi_m)`` (not symmetrized)."""
    r = d.r
    if r > max_rank:
        raise RankTooLarge(f"decomposition length {r} exceeds the cap of {max_rank}")
    n1, n2 = d.dims
    X = d.vectors.reshape(r, n1, n2)
    gram = np.einsum("lab,jab->lj", X.conj(), X)  # <phi_l|phi_j>
    # P[j, l] = tr_2 |phi_j><phi_l|, flattened over its n1 x n1 entries
    P = np.einsum("jab,lcb->jlac", X, X.conj())
    trace_term = P.reshape(r * r, n1 * n1) @ P.transpose(0, 1, 3, 2).reshape(r * r, n1 * n1).T
    trace_term = trace_term.reshape(r, r, r, r).transpose(0, 2, 1, 3)  # (j,l,k,m) -> (j,k,l,m)
    overlap = np.einsum("lj,mk->jklm", gram, gram)
    return ConcurrenceTensor(overlap - trace_term, symmetrized=False)


def symmetrize(A: ConcurrenceTensor) -> ConcurrenceTensor:
    """``(A[j,k,l,m] + A[k,j,l,m]) / 2``."""
    if A.symmetrized:
        return A
    return ConcurrenceTensor((A.entries + A.entries.transpose(1, 0, 2, 3)) / 2, symmetrized=True)


def _fix_gauge(T: np.ndarray) -> np.ndarray:
    mods = np.abs(T).ravel()
    idx = int(np.flatnonzero(mods >= mods.max() * (1 - 1e-12))[0])
    pivot = T.ravel()[idx]
    return T * (abs(pivot) / pivot)


def extract_T(A_sym: ConcurrenceTensor, dims, spectral_tol: float | None = None) -> TmatrixSet:
    """Eigensystem ``{T^alpha}`` of the symmetrized tensor.

    Each retained eigenvector of the unfolding is reshaped to ``r x r``,
    symmetrized, scaled by ``sqrt(mu_alpha)`` and rotated so that its
    largest-modulus entry is real positive. ``spectral_tol`` defaults to
    ``max(1e-10 * mu_1, 1e-14)``.
    """
    if not A_sym.symmetrized:
        raise NotSymmetrized("extract_T needs the symmetrized tensor")
    dims = BipartiteDims.coerce(dims)
    r = A_sym.r
    U = A_sym.unfolded()
    mu, vecs = herm_eig(U, assume_hermitian_tol=1e-9 * max(1.0, float(np.abs(U).max())))
    if mu[-1] < -1e-8:
        raise NegativeSpectrum(f"symmetrized tensor has eigenvalue {mu[-1]:.3e}")
    if spectral_tol is None:
        spectral_tol = max(SPECTRAL_RTOL * max(mu[0], 0.0), SPECTRAL_ATOL)
    keep = mu > spectral_tol
    mats = []
    for k in np.flatnonzero(keep):
        X = vecs[:, k].reshape(r, r)
        X = (X + X.T) / 2
        mats.append(_fix_gauge(np.sqrt(mu[k]) * X))
    matrices = np.array(mats) if mats else np.zeros((0, r, r), dtype=complex)
    return TmatrixSet(dims, matrices, mu[keep].copy(), mu[~keep].copy())


def t_matrices(d: SubnormalizedDecomposition, spectral_tol: float | None = None, max_rank: int = MAX_RANK) -> TmatrixSet:
    """Decomposition -> ``A`` -> symmetrized ``A`` -> ``{T^alpha}``."""
    return extract_T(symmetrize(build_A(d, max_rank)), d.dims, spectral_tol)


def reconstruct_unfolded(T: TmatrixSet) -> np.ndarray:
    """``sum_alpha vec(T^alpha) vec(T^alpha)^dagger``; should rebuild the unfolded tensor."""
    flat = T.matrices.reshape(T.m_eff, -1)
    return flat.T @ flat.conj()


def _check_isometry(V, r: int) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    if V.ndim != 2 or V.shape[1] != r or V.shape[0] < r:
        raise NotIsometry(f"expected an N x {r} isometry with N >= {r}, got shape {V.shape}")
    defect = isometry_defect(V)
    if defect > ISOMETRY_TOL:
        raise NotIsometry(f"V^dagger V deviates from identity by {defect:.3e}")
    return V


def term_amplitudes(T: TmatrixSet, V) -> np.ndarray:
    """``W[i, alpha] = [V T^alpha V^T]_ii``."""
    return np.einsum("ij,ajk,ik->ia", V, T.matrices, V)


def capc_C(T: TmatrixSet, V) -> float:
    """Average concurrence ``sum_i (sum_alpha |[V T^alpha V^T]_ii|^2)^(1/2)``."""
    V = _check_isometry(V, T.r)
    W = term_amplitudes(T, V)
    return float(np.sqrt(np.sum(np.abs(W) ** 2, axis=1)).sum())


def capc_via_A(A: ConcurrenceTensor, V) -> float:
    """Same quantity as :func:`capc_C`, contracting the rank-4 tensor directly."""
    V = _check_isometry(V, A.r)
    terms = np.einsum("ij,ik,jklm,il,im->i", V, V, A.entries, V.conj(), V.conj(), optimize=True)
    return float(np.sqrt(np.maximum(terms.real, 0.0)).sum())
