"""Randomized oracle suites run by ``concbound selfcheck``.

Each suite compares two independent routes to the same quantity on random
inputs and counts the samples that agree within tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bounds import two_qubit_exact, wootters_reference
from .linalg import StateVector, random_isometry, random_pure_state
from .states import decompose, maximally_entangled, pure_density_matrix, random_state, transform_decomposition
from .tensor import (
    antisym_dim,
    build_A,
    capc_C,
    capc_via_A,
    f_function,
    pure_concurrence,
    reconstruct_unfolded,
    symmetrize,
    t_matrices,
)


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int
    worst: float

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def _rand_vec(dims, rng) -> StateVector:
    return random_pure_state(dims, rng, normalized=False)


def suite_f_linearity(rng, samples):
    dims = (2, 3)
    lam = 2 + 1j
    worst, passed = 0.0, 0
    for _ in range(samples):
        psi = [_rand_vec(dims, rng) for _ in range(4)]
        base = f_function(*psi)
        errs = []
        for slot in range(4):
            scaled = list(psi)
            scaled[slot] = lam * psi[slot]
            factor = lam if slot in (0, 2) else np.conj(lam)
            errs.append(abs(f_function(*scaled) - factor * base) / max(1.0, abs(base)))
            extra = _rand_vec(dims, rng)
            summed = list(psi)
            summed[slot] = psi[slot] + extra
            other = list(psi)
            other[slot] = extra
            errs.append(abs(f_function(*summed) - base - f_function(*other)) / max(1.0, abs(base)))
        err = max(errs)
        worst = max(worst, err)
        passed += err <= 1e-12
    return passed, worst


def suite_reconstruction(rng, samples):
    worst, passed = 0.0, 0
    for k in range(samples):
        dims = [(2, 2), (2, 3), (3, 3)][k % 3]
        d = decompose(random_state(dims, rank=int(rng.integers(1, 5)), seed=rng))
        A_sym = symmetrize(build_A(d))
        T = t_matrices(d)
        err = float(np.max(np.abs(reconstruct_unfolded(T) - A_sym.unfolded())))
        worst = max(worst, err)
        passed += err <= 1e-9
    return passed, worst


def suite_capc_equivalence(rng, samples):
    worst, passed = 0.0, 0
    for k in range(samples):
        dims = [(2, 3), (3, 3), (2, 2)][k % 3]
        d = decompose(random_state(dims, rank=int(rng.integers(1, 5)), seed=rng))
        A = build_A(d)
        T = t_matrices(d)
        N = d.r + int(rng.integers(0, d.r + 1))
        V = random_isometry(N, d.r, rng)
        via_A = capc_via_A(A, V)
        via_T = capc_C(T, V)
        direct = sum(pure_concurrence(s) for s in transform_decomposition(d, V).states())
        err = max(abs(via_A - via_T), abs(via_T - direct), abs(via_A - direct))
        worst = max(worst, err)
        passed += err <= 1e-9
    return passed, worst


def suite_decomposition_invariance(rng, samples):
    worst, passed = 0.0, 0
    for k in range(samples):
        dims = [(2, 2), (2, 3), (3, 3), (3, 4)][k % 4]
        rho = random_state(dims, rank=int(rng.integers(1, min(5, dims[0] * dims[1]) + 1)), seed=rng)
        d = decompose(rho)
        N = [d.r, d.r + 1, 2 * d.r][k % 3]
        moved = transform_decomposition(d, random_isometry(N, d.r, rng))
        err = max(
            float(np.max(np.abs(d.density_matrix() - rho.matrix))),
            float(np.max(np.abs(moved.density_matrix() - rho.matrix))),
        )
        worst = max(worst, err)
        passed += err <= 1e-9
    return passed, worst


def suite_schmidt(rng, samples):
    worst, passed = 0.0, 0
    for k in range(samples):
        dims = [(2, 2), (3, 4), (3, 3), (2, 4)][k % 4]
        psi = random_pure_state(dims, rng)
        s = np.linalg.svd(psi.as_matrix(), compute_uv=False)
        err = abs(pure_concurrence(psi) - np.sqrt(max(0.0, 1 - np.sum(s**4))))
        worst = max(worst, err)
        passed += err <= 1e-10
    return passed, worst


def convention_factor() -> float:
    """Ratio between this package's two-qubit concurrence scale and Wootters'."""
    bell = pure_density_matrix(maximally_entangled(2))
    return two_qubit_exact(bell) / wootters_reference(bell)


def suite_two_qubit(rng, samples):
    kappa = convention_factor()
    worst, passed = 0.0, 0
    for k in range(samples):
        rho = random_state((2, 2), rank=1 + k % 4, seed=rng)
        err = abs(two_qubit_exact(rho) - kappa * wootters_reference(rho))
        worst = max(worst, err)
        passed += err <= 1e-8
    return passed, worst


def suite_rank_bound(rng, samples):
    worst, passed = 0.0, 0
    for k in range(samples):
        dims = [(2, 2), (2, 3), (3, 3)][k % 3]
        rho = random_state(dims, rank=int(rng.integers(1, dims[0] * dims[1] + 1)), seed=rng)
        T = t_matrices(decompose(rho))
        ok = T.m_eff <= antisym_dim(dims)
        if T.m_eff:
            tail = T.discarded.max(initial=0.0) / T.mu[0]
            ok = ok and tail <= 1e-10
            worst = max(worst, tail)
        passed += ok
    return passed, worst


SUITES: dict[str, Callable] = {
    "f-linearity": suite_f_linearity,
    "reconstruction": suite_reconstruction,
    "capc-equivalence": suite_capc_equivalence,
    "decomposition-invariance": suite_decomposition_invariance,
    "schmidt": suite_schmidt,
    "two-qubit": suite_two_qubit,
    "rank-bound": suite_rank_bound,
}


def run_selfcheck(seed: int = 0, samples: int = 20) -> list[SuiteResult]:
    results = []
    for i, (name, suite) in enumerate(SUITES.items()):
        rng = np.random.default_rng([seed, i])
        passed, worst = suite(rng, samples)
        results.append(SuiteResult(name, int(passed), samples, float(worst)))
    return results

