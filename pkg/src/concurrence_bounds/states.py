"""Density matrices, their pure-state decompositions, test states and file I/O."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadParams,
    BadTrace,
    DimensionMismatch,
    NotHermitian,
    NotIsometry,
    NotPSD,
    OutOfRange,
    ParseError,
)
from .linalg import (
    BipartiteDims,
    StateVector,
    _rng,
    herm_eig,
    isometry_defect,
    random_density_matrix,
    random_pure_state,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class DensityMatrix:
    dims: BipartiteDims
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "dims", BipartiteDims.coerce(self.dims))
        object.__setattr__(self, "matrix", m)

    @property
    def rank(self) -> int:
        return int(np.sum(herm_eig(self.matrix)[0] > default_rank_tol(self.dims)))


@dataclass(frozen=True)
class SubnormalizedDecomposition:
    """Vectors ``|phi_j>`` with ``sum_j |phi_j><phi_j| = rho``.

    ``vectors`` is an ``r x (n1*n2)`` array whose rows are the ``|phi_j>``.
    """

    dims: BipartiteDims
    vectors: np.ndarray

    def __post_init__(self):
        dims = BipartiteDims.coerce(self.dims)
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[1] != dims.total:
            raise DimensionMismatch(f"vectors of shape {v.shape} do not match dims {tuple(dims)}")
        v.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "vectors", v)

    @property
    def r(self) -> int:
        return self.vectors.shape[0]

    def states(self) -> list[StateVector]:
        return [StateVector(self.dims, row) for row in self.vectors]

    def density_matrix(self) -> np.ndarray:
        return self.vectors.T @ self.vectors.conj()


def default_rank_tol(dims) -> float:
    n1, n2 = BipartiteDims.coerce(dims)
    return 1e-12 * n1 * n2


def validate(rho_raw, dims, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Check that ``rho_raw`` is a density matrix on ``dims`` and wrap it.

    The Hermitian part ``(M + M^dagger)/2`` is what gets stored, so an
    asymmetry below ``tol`` is silently removed.
    """
    dims = BipartiteDims.coerce(dims)
    m = np.asarray(rho_raw, dtype=complex)
    if m.shape != (dims.total, dims.total):
        raise DimensionMismatch(f"matrix of shape {m.shape} does not match dims {tuple(dims)}")
    if not np.all(np.isfinite(m)):
        raise NotHermitian("matrix has non-finite entries")
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > tol:
        raise NotHermitian(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    m = (m + m.conj().T) / 2
    tr = float(np.trace(m).real)
    if abs(tr - 1) > tol:
        raise BadTrace(f"trace is {tr!r}, expected 1")
    lam_min = herm_eig(m)[0][-1]
    if lam_min < -tol:
        raise NotPSD(f"matrix has negative eigenvalue {lam_min:.3e}")
    return DensityMatrix(dims, m)


def decompose(rho: DensityMatrix, rank_tol: float | None = None) -> SubnormalizedDecomposition:
    """Spectral decomposition into subnormalized vectors ``sqrt(lambda_k) |v_k>``."""
    if rank_tol is None:
        rank_tol = default_rank_tol(rho.dims)
    w, v = herm_eig(rho.matrix)
    keep = w > rank_tol
    vecs = (v[:, keep] * np.sqrt(w[keep])).T
    return SubnormalizedDecomposition(rho.dims, vecs)


def transform_decomposition(d: SubnormalizedDecomposition, V, tol: float = DEFAULT_TOL) -> SubnormalizedDecomposition:
    """Apply an ``N x r`` isometry: ``|psi_i> = sum_j V_ij |phi_j>``."""
    V = np.asarray(V, dtype=complex)
    if V.ndim != 2 or V.shape[1] != d.r:
        raise DimensionMismatch(f"isometry of shape {V.shape} does not act on r = {d.r} vectors")
    if V.shape[0] < V.shape[1]:
        raise NotIsometry("an isometry needs N >= r")
    defect = isometry_defect(V)
    if defect > tol:
        raise NotIsometry(f"V^dagger V deviates from identity by {defect:.3e}")
    return SubnormalizedDecomposition(d.dims, V @ d.vectors)


def horodecki_state(a: float) -> DensityMatrix:
    """The 3x3 PPT entangled family ``rho_a`` of Horodecki (1997)."""
    if not 0 <= a <= 1:
        raise OutOfRange(f"a must lie in [0, 1], got {a!r}")
    beta = (1 + a) / 2
    gamma = math.sqrt(1 - a * a) / 2
    m = a * np.eye(9)
    for i in (0, 4, 8):
        for j in (0, 4, 8):
            m[i, j] = a
    m[6, 6] = beta
    m[8, 8] = beta
    m[6, 8] = m[8, 6] = gamma
    return DensityMatrix(BipartiteDims(3, 3), m / (1 + 8 * a))


def maximally_entangled(n: int) -> StateVector:
    if n < 2:
        raise BadParams("maximally entangled state needs n >= 2")
    v = np.zeros(n * n, dtype=complex)
    v[[i * n + i for i in range(n)]] = 1 / math.sqrt(n)
    return StateVector(BipartiteDims(n, n), v)


def pure_density_matrix(psi: StateVector) -> DensityMatrix:
    v = psi.amplitudes / math.sqrt(psi.norm_squared())
    return DensityMatrix(psi.dims, np.outer(v, v.conj()))


def random_state(dims, rank: int | None = None, seed=None) -> DensityMatrix:
    dims = BipartiteDims.coerce(dims)
    return DensityMatrix(dims, random_density_matrix(dims, rank, seed))


def product_mixture(dims, n_terms: int, seed=None) -> DensityMatrix:
    """Random convex mixture of ``n_terms`` pure product states (separable)."""
    dims = BipartiteDims.coerce(dims)
    if n_terms < 1:
        raise BadParams("n_terms must be >= 1")
    rng = _rng(seed)
    p = rng.dirichlet(np.ones(n_terms))
    rho = np.zeros((dims.total, dims.total), dtype=complex)
    for weight in p:
        a = random_pure_state((dims.n1, 1), rng).amplitudes
        b = random_pure_state((1, dims.n2), rng).amplitudes
        v = np.kron(a, b)
        rho += weight * np.outer(v, v.conj())
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(dims, rho / np.trace(rho).real)


def save_state(rho: DensityMatrix, path) -> None:
    """Write ``rho`` as JSON: ``{"dims": [n1, n2], "matrix": [[[re, im], ...], ...]}``."""
    payload = {
        "dims": [int(rho.dims.n1), int(rho.dims.n2)],
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho.matrix],
    }
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def parse_state(text: str, tol: float = DEFAULT_TOL) -> DensityMatrix:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("state file must contain a JSON object")
    for key in ("dims", "matrix"):
        if key not in obj:
            raise ParseError(f"missing field {key!r}")
    dims_raw, rows = obj["dims"], obj["matrix"]
    if (
        not isinstance(dims_raw, list)
        or len(dims_raw) != 2
        or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims_raw)
    ):
        raise ParseError(f"dims must be two positive integers, got {dims_raw!r}")
    dims = BipartiteDims(*dims_raw)
    if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
        raise ParseError("matrix must be an array of rows")
    size = len(rows)
    if any(len(row) != size for row in rows):
        raise ParseError("matrix rows are not square/rectangular")
    if size != dims.total:
        raise ParseError(f"matrix is {size}x{size} but dims {tuple(dims)} need {dims.total}")
    m = np.empty((size, size), dtype=complex)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
            ):
                raise ParseError(f"entry ({i}, {j}) is not a [re, im] pair of numbers")
            m[i, j] = complex(entry[0], entry[1])
    return validate(m, dims, tol)


def load_state(path, tol: float = DEFAULT_TOL) -> DensityMatrix:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_state(text, tol)
