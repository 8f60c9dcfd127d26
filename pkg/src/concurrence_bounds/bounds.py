"""Lower and upper bounds on the mixed-state concurrence.

Lower bounds come from singular values of ``T(z) = sum_alpha z_alpha T^alpha``
for unit complex vectors ``z``: ``lambda_1 - sum_{i>1} lambda_i`` never exceeds
the average concurrence of any decomposition, so every ``z`` certifies a bound.
Upper bounds come from minimizing the average concurrence over isometries ``V``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import BadOptions, BadZ, OutOfRange, WrongDims
from .linalg import partial_transpose, singular_values
from .states import DensityMatrix, SubnormalizedDecomposition, decompose, default_rank_tol
from .tensor import MAX_RANK, TmatrixSet, capc_C, t_matrices, term_amplitudes

PPT_TOL = 1e-10
Z_NORM_TOL = 1e-12

_SIGMA_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]],
    dtype=complex,
)


@dataclass(frozen=True)
class ZVector:
    """Unit complex vector ``z_alpha = y_alpha exp(i phi_alpha)``.

    The global phase is fixed by making the first nonzero component real
    and nonnegative; it does not affect the singular values of ``T(z)``.
    """

    components: np.ndarray

    def __post_init__(self):
        z = np.array(self.components, dtype=complex).reshape(-1)
        z.setflags(write=False)
        object.__setattr__(self, "components", z)

    @classmethod
    def normalized(cls, z) -> "ZVector":
        z = np.asarray(z, dtype=complex).reshape(-1)
        n = np.linalg.norm(z)
        if n == 0:
            raise BadZ("z must be nonzero")
        z = z / n
        nz = np.flatnonzero(np.abs(z) > 1e-15)
        if nz.size:
            p = z[nz[0]]
            z = z * (abs(p) / p)
        return cls(z)

    @classmethod
    def unit(cls, m: int, alpha: int) -> "ZVector":
        z = np.zeros(m, dtype=complex)
        z[alpha] = 1
        return cls(z)

    def __len__(self):
        return self.components.size


@dataclass
class OptimizerOptions:
    seed: int = 0
    restarts_lower: int = 16
    evals_lower: int = 400
    restarts_upper: int = 8
    evals_upper: int = 12000
    embed_n: int | None = None  # rows N of V; None means 2r
    smoothing_stages: int = 12

    def validate(self, r: int | None = None) -> None:
        if self.restarts_lower < 1 or self.restarts_upper < 1:
            raise BadOptions("restart counts must be >= 1")
        if self.evals_lower < 1 or self.evals_upper < 1:
            raise BadOptions("evaluation budgets must be >= 1")
        if self.smoothing_stages < 1:
            raise BadOptions("smoothing_stages must be >= 1")
        if r is not None and self.embed_n is not None and not r <= self.embed_n <= 2 * r:
            raise BadOptions(f"embed_n must lie in [r, 2r] = [{r}, {2 * r}], got {self.embed_n}")


@dataclass
class BoundReport:
    lower_algebraic: float
    lower_optimized: float
    upper_optimized: float
    z_best: ZVector
    V_best: np.ndarray
    negativity: float
    is_ppt: bool
    no_entanglement_detected: bool
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "lower_algebraic": self.lower_algebraic,
            "lower_optimized": self.lower_optimized,
            "upper_optimized": self.upper_optimized,
            "negativity": self.negativity,
            "is_ppt": self.is_ppt,
            "no_entanglement_detected": self.no_entanglement_detected,
            "z_best": [[float(c.real), float(c.imag)] for c in self.z_best.components],
            "V_shape": list(self.V_best.shape),
            "diagnostics": self.diagnostics,
        }


def _seeded_rng(seed: int, stream: int, restart: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), stream, restart])


# ---------------------------------------------------------------- lower bound


def lower_bound_raw(T: TmatrixSet, z) -> float:
    """Unclamped ``lambda_1 - sum_{i>1} lambda_i`` of ``T(z)``."""
    s = singular_values(T.combine(z))
    return float(s[0] - s[1:].sum())


def lower_bound_for_z(T: TmatrixSet, z) -> float:
    """Certified lower bound ``max(0, lambda_1 - sum_{i>1} lambda_i)`` for one ``z``."""
    comps = z.components if isinstance(z, ZVector) else np.asarray(z, dtype=complex).reshape(-1)
    if comps.size != T.m_eff:
        raise BadZ(f"z has length {comps.size}, expected {T.m_eff}")
    if abs(np.vdot(comps, comps).real - 1) > Z_NORM_TOL:
        raise BadZ("z must have unit norm")
    return max(0.0, lower_bound_raw(T, comps))


def algebraic_lower(T: TmatrixSet) -> float:
    """Bound from the single ``T^alpha`` with the largest eigenvalue; 0 if none retained."""
    if T.is_empty:
        return 0.0
    return lower_bound_for_z(T, ZVector.unit(T.m_eff, 0))


def _lower_objective(x: np.ndarray, T: TmatrixSet):
    """Negated raw bound at ``z = x / |x|`` (x stacks real and imaginary parts) and its gradient."""
    m = T.m_eff
    z = x[:m] + 1j * x[m:]
    n = np.linalg.norm(z)
    zh = z / n
    U, s, Vh = np.linalg.svd(T.combine(zh))
    sign = -np.ones(s.size)
    sign[0] = 1.0
    value = float(sign @ s)
    # d sigma_i = Re(u_i^H dM v_i)
    sens = np.einsum("i,ji,ajk,ik->a", sign, U.conj(), T.matrices, Vh.conj())
    g = np.conj(sens)
    g = (g - zh * np.real(np.vdot(zh, g))) / n
    return -value, -np.concatenate([g.real, g.imag])


def optimize_lower(T: TmatrixSet, opts: OptimizerOptions | None = None):
    """Maximize the lower bound over unit ``z``.

    Restarts from the dominant ``T^alpha``, then each other single ``T^alpha``,
    then random directions; each restart runs BFGS with analytic gradients.
    Returns ``(z_best, bound, diagnostics)``.
    """
    opts = opts or OptimizerOptions()
    opts.validate()
    if T.is_empty:
        return ZVector(np.zeros(0, dtype=complex)), 0.0, {"restarts": 0, "evaluations": 0}
    m = T.m_eff
    best_z = ZVector.unit(m, 0)
    best_raw = lower_bound_raw(T, best_z.components)
    diag = {"restarts": 0, "evaluations": 1, "raw_best": best_raw}
    if m == 1:
        diag["raw_best"] = best_raw
        return best_z, max(0.0, best_raw), diag
    for k in range(opts.restarts_lower):
        if k < m:
            x0 = np.zeros(2 * m)
            x0[k] = 1.0
        else:
            x0 = _seeded_rng(opts.seed, 1, k).standard_normal(2 * m)
        res = scipy.optimize.minimize(
            _lower_objective,
            x0,
            args=(T,),
            jac=True,
            method="BFGS",
            options={"maxiter": opts.evals_lower, "gtol": 1e-12},
        )
        diag["restarts"] += 1
        diag["evaluations"] += int(res.nfev)
        z = ZVector.normalized(res.x[:m] + 1j * res.x[m:])
        raw = lower_bound_raw(T, z.components)
        if raw > best_raw:
            best_raw, best_z = raw, z
    diag["raw_best"] = best_raw
    return best_z, max(0.0, best_raw), diag


# ---------------------------------------------------------------- upper bound


def _upper_value_grad(T: TmatrixSet, V: np.ndarray, eps: float):
    """Smoothed objective ``sum_i sqrt(g_i + eps^2)`` and its Euclidean gradient in ``V``."""
    TV = np.einsum("ajk,ik->iaj", T.matrices, V)
    W = np.einsum("ij,iaj->ia", V, TV)
    g = np.sqrt(np.sum(np.abs(W) ** 2, axis=1) + eps * eps)
    g_safe = np.maximum(g, 1e-300)
    coef = 2 * W.conj() / g_safe[:, None]
    G = np.einsum("ia,iaj->ij", coef, TV).conj()
    return float(g.sum()), G


def _skew_exp(H: np.ndarray):
    """Closure ``t -> exp(-t H)`` for anti-Hermitian ``H``, via one eigendecomposition."""
    w, Q = np.linalg.eigh(1j * H)
    Qh = Q.conj().T
    return lambda t: (Q * np.exp(1j * t * w)) @ Qh


def _retract(V: np.ndarray) -> np.ndarray:
    Q, R = np.linalg.qr(V)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _cg_stage(T, V, eps, budget):
    """Riemannian conjugate gradient on U(N) for a fixed smoothing ``eps``.

    ``V`` is moved by left multiplication with ``exp(-t H)``, ``H`` anti-Hermitian,
    so ``V^dagger V = I`` is preserved exactly up to rounding.
    Returns ``(V, evaluations, iterations)``.
    """
    f, G = _upper_value_grad(T, V, eps)
    evals, iters = 1, 0
    omega = G @ V.conj().T - V @ G.conj().T
    H = omega.copy()
    step = 0.1
    while evals < budget:
        slope = -0.5 * np.real(np.vdot(omega, H))
        if slope >= 0:
            H = omega.copy()
            slope = -0.5 * np.real(np.vdot(omega, H))
        if -slope < 1e-30:
            break
        expo = _skew_exp(H)
        step *= 2
        accepted = False
        while evals < budget:
            Vn = expo(step) @ V
            fn, Gn = _upper_value_grad(T, Vn, eps)
            evals += 1
            if fn <= f + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
            if step < 1e-16:
                break
        if not accepted:
            if np.array_equal(H, omega):
                break
            H = omega.copy()
            step = 0.1
            continue
        iters += 1
        V, f, G = Vn, fn, Gn
        if iters % 50 == 0:
            V = _retract(V)
            f, G = _upper_value_grad(T, V, eps)
        omega_new = G @ V.conj().T - V @ G.conj().T
        denom = np.real(np.vdot(omega, omega))
        beta = max(0.0, np.real(np.vdot(omega_new - omega, omega_new)) / denom) if denom > 0 else 0.0
        H = omega_new + beta * H
        omega = omega_new
    return V, evals, iters


def _capc_unchecked(T: TmatrixSet, V: np.ndarray) -> float:
    W = term_amplitudes(T, V)
    return float(np.sqrt(np.sum(np.abs(W) ** 2, axis=1)).sum())


def optimize_upper(d: SubnormalizedDecomposition, T: TmatrixSet, opts: OptimizerOptions | None = None):
    """Minimize the average concurrence over ``N x r`` isometries ``V``.

    ``V`` is the first ``r`` columns of ``exp(K) U0`` with ``K`` anti-Hermitian;
    restart 0 uses ``U0 = I`` (the spectral decomposition), later restarts
    Haar-random ``U0``. Each restart runs conjugate gradient on a smoothed
    objective ``sum_i sqrt(g_i + eps^2)`` with ``eps`` decreasing geometrically,
    which gets past the kinks where individual terms vanish.
    Returns ``(V_best, value, diagnostics)``.
    """
    opts = opts or OptimizerOptions()
    r = d.r
    if T.r != r:
        raise BadOptions(f"T matrices are {T.r}x{T.r} but the decomposition has r = {r}")
    opts.validate(r)
    N = 2 * r if opts.embed_n is None else opts.embed_n
    eye = np.eye(N, dtype=complex)[:, :r]
    if T.is_empty:
        return eye, 0.0, {"restarts": 0, "evaluations": 0, "iterations": 0, "embed_n": N, "history": [0.0]}

    best_V = eye
    best = _capc_unchecked(T, eye)
    history = [best]
    diag = {"restarts": 0, "evaluations": 1, "iterations": 0, "embed_n": N}
    if r == 1:
        diag["history"] = history
        return best_V, best, diag

    stages = opts.smoothing_stages
    per_stage = max(2, opts.evals_upper // stages)
    for k in range(opts.restarts_upper):
        if k == 0:
            V = eye.copy()
        else:
            z = _seeded_rng(opts.seed, 2, k).standard_normal((N, N, 2))
            q, rr = np.linalg.qr(z[..., 0] + 1j * z[..., 1])
            V = (q * (np.diag(rr) / np.abs(np.diag(rr))))[:, :r]
        scale = max(_capc_unchecked(T, V) / N, 1e-300)
        for eps in scale * np.logspace(-1, -9, stages):
            V, ev, it = _cg_stage(T, V, eps, per_stage)
            diag["evaluations"] += ev
            diag["iterations"] += it
            value = _capc_unchecked(T, V)
            if value < best:
                best, best_V = value, _retract(V)
                best = _capc_unchecked(T, best_V)
            history.append(best)
        diag["restarts"] += 1
    diag["history"] = history
    return best_V, best, diag


# ---------------------------------------------------------------- two qubits, PPT, EOF


def two_qubit_exact(rho: DensityMatrix) -> float:
    """Exact two-qubit concurrence from the single ``T^1`` (in the ``sqrt(1 - tr rho_r^2)`` scale)."""
    if tuple(rho.dims) != (2, 2):
        raise WrongDims(f"two_qubit_exact needs dims (2, 2), got {tuple(rho.dims)}")
    T = t_matrices(decompose(rho))
    if T.is_empty:
        return 0.0
    if T.m_eff != 1:
        raise ArithmeticError(f"expected one T matrix for two qubits, found {T.m_eff}")
    return max(0.0, lower_bound_raw(T, np.ones(1)))


def wootters_reference(rho: DensityMatrix) -> float:
    """Wootters' spin-flip concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the square roots of the eigenvalues of ``rho (sy x sy) rho* (sy x sy)``,
    computed as the singular values of ``sqrt(rho) (sy x sy) sqrt(rho)*``.
    """
    if tuple(rho.dims) != (2, 2):
        raise WrongDims(f"wootters_reference needs dims (2, 2), got {tuple(rho.dims)}")
    w, v = np.linalg.eigh(rho.matrix)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    lam = np.linalg.svd(sqrt_rho @ _SIGMA_YY @ sqrt_rho.conj(), compute_uv=False)
    return max(0.0, float(lam[0] - lam[1:].sum()))


def min_pt_eigenvalue(rho: DensityMatrix) -> float:
    return float(np.linalg.eigvalsh(partial_transpose(rho.matrix, rho.dims, 2))[0])


def negativity(rho: DensityMatrix) -> float:
    """Sum of the moduli of the negative eigenvalues of the partial transpose."""
    w = np.linalg.eigvalsh(partial_transpose(rho.matrix, rho.dims, 2))
    return float(-w[w < 0].sum())


def is_ppt(rho: DensityMatrix, tol: float = PPT_TOL) -> bool:
    return min_pt_eigenvalue(rho) >= -tol


def _binary_entropy(p: float) -> float:
    return -sum(x * math.log2(x) for x in (p, 1 - p) if x > 0)


def eof_lower_2x2(c_value: float) -> float:
    """Entanglement of formation of two qubits from a Wootters-scale concurrence.

    ``E = h((1 + sqrt(1 - c^2)) / 2)``; monotone and convex, so a lower bound on
    ``c`` yields a lower bound on ``E``.
    """
    if not 0 <= c_value <= 1:
        raise OutOfRange(f"concurrence must lie in [0, 1], got {c_value!r}")
    return _binary_entropy((1 + math.sqrt(1 - c_value * c_value)) / 2)


# ---------------------------------------------------------------- orchestration


def bound_report(
    rho: DensityMatrix,
    opts: OptimizerOptions | None = None,
    rank_tol: float | None = None,
    max_rank: int = MAX_RANK,
) -> BoundReport:
    """Decompose, build the tensor and its eigensystem, then run both optimizers."""
    opts = opts or OptimizerOptions()
    start = time.perf_counter()
    d = decompose(rho, default_rank_tol(rho.dims) if rank_tol is None else rank_tol)
    opts.validate(d.r)
    T = t_matrices(d, max_rank=max_rank)
    alg = algebraic_lower(T)
    z_best, low, ldiag = optimize_lower(T, opts)
    V_best, up, udiag = optimize_upper(d, T, opts)
    # the lower optimizer always includes the algebraic start; guard against rounding
    low = max(low, alg)
    diagnostics = {
        "r": d.r,
        "m_eff": T.m_eff,
        "m_bound": T.m_bound,
        "mu": [float(x) for x in T.mu],
        "lower_raw": ldiag.get("raw_best", 0.0),
        "lower_restarts": ldiag["restarts"],
        "lower_evaluations": ldiag["evaluations"],
        "upper_restarts": udiag["restarts"],
        "upper_evaluations": udiag["evaluations"],
        "upper_iterations": udiag["iterations"],
        "embed_n": udiag["embed_n"],
        "upper_spectral": udiag["history"][0],
        "seconds": time.perf_counter() - start,
    }
    return BoundReport(
        lower_algebraic=alg,
        lower_optimized=low,
        upper_optimized=up,
        z_best=z_best,
        V_best=V_best,
        negativity=negativity(rho),
        is_ppt=is_ppt(rho),
        no_entanglement_detected=T.is_empty or low <= 0.0,
        diagnostics=diagnostics,
    )
