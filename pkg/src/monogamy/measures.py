"""Closed-form concurrence-type measures on qubit registers.

All squared measures are on the "tangle" scale: for a pure bipartition the
squared concurrence equals the linear entropy 2(1 - Tr rho_A^2).

Functions taking pure states accept a single amplitude vector or a stack of
them (shape ``(..., 2**n)``) and return a float or an array accordingly.
"""
from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from .linalg import (
    HERMITIAN_TOL,
    ValidationError,
    as_density_matrix,
    as_pure_state,
    herm_eig,
    herm_eigvals,
    n_qubits_of,
    purity,
    reduce_pure,
    schmidt_matrix,
)

CLAMP_TOL = 1e-10
TANGLE_CLAMP_TOL = 1e-9
# eigenvalues of rho below this (relative to the largest) count as exact zeros
RANK_TOL = 64 * np.finfo(float).eps

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
YY = np.real(np.kron(SIGMA_Y, SIGMA_Y))


class MeasureError(ArithmeticError):
    """A non-negative quantity came out clearly negative (a numerical bug)."""


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def clamp_nonneg(x, tol: float = CLAMP_TOL):
    """Map values in [-tol, 0) to 0; raise on anything more negative."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -tol):
        raise MeasureError(f"squared measure is negative beyond tolerance: {np.min(x):.3e}")
    return _out(np.where(x < 0, 0.0, x))


def nontrivial_subsets(n: int) -> list[tuple[int, ...]]:
    """All non-empty proper subsets of range(n), by size then lexicographically."""
    return [s for k in range(1, n) for s in combinations(range(n), k)]


def linear_entropy(rho):
    """L(rho) = 2(1 - Tr rho^2)."""
    return clamp_nonneg(2.0 * (1.0 - np.asarray(purity(rho))))


def pure_bipartite_c2(phi, part_a: Sequence[int]):
    """Squared concurrence of a pure state across ``part_a`` | rest."""
    phi = as_pure_state(phi)
    n = n_qubits_of(phi.shape[-1])
    part_a = tuple(sorted(set(int(q) for q in part_a)))
    if not part_a or len(part_a) == n:
        raise ValidationError(f"bipartition {part_a} of a {n}-qubit register is trivial")
    if len(part_a) > n - len(part_a):
        # same spectrum on either side; reduce onto the smaller one
        part_a = tuple(q for q in range(n) if q not in part_a)
    return linear_entropy(reduce_pure(phi, part_a))


def _c2_from_factor(w: np.ndarray) -> np.ndarray:
    """Squared Wootters concurrence of rho = W W^dagger for a stack of 4 x k factors.

    The spin-flip spectrum {lambda_i} is the singular spectrum of the complex
    symmetric matrix T = W^T (sy x sy) W. With at most two nonzero singular
    values, C^2 = (s1 - s2)^2 = ||T||_F^2 - 2|det T| which avoids the square
    root of a near-zero eigenvalue.
    """
    t = np.swapaxes(w, -1, -2) @ YY @ w
    k = t.shape[-1]
    if k == 1:
        return np.abs(t[..., 0, 0]) ** 2
    if k == 2:
        det = t[..., 0, 0] * t[..., 1, 1] - t[..., 0, 1] * t[..., 1, 0]
        return np.clip(np.sum(np.abs(t) ** 2, axis=(-2, -1)) - 2.0 * np.abs(det), 0.0, None)
    lam = np.sqrt(np.clip(herm_eigvals(np.conj(np.swapaxes(t, -1, -2)) @ t), 0.0, None))
    c = np.clip(lam[..., 0] - np.sum(lam[..., 1:], axis=-1), 0.0, None)
    return c * c


def wootters_concurrence(rho_2q):
    """Two-qubit concurrence max(0, l1 - l2 - l3 - l4) (unsquared).

    The l_i are the square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy),
    computed through the Hermitian form sqrt(rho) rho~ sqrt(rho).
    """
    rho = as_density_matrix(rho_2q)
    if rho.shape[-1] != 4:
        raise ValidationError(f"expected a two-qubit density matrix, got dim {rho.shape[-1]}")
    mu, v = herm_eig(rho)
    cut = RANK_TOL * np.maximum(mu[..., :1], 1.0)
    mu = np.where(mu > cut, mu, 0.0)
    # sqrt(rho) = V diag(sqrt mu) V^dagger; the trailing V^dagger does not change the spectrum
    w = v * np.sqrt(mu)[..., None, :]
    low_rank = mu[..., 2] == 0.0
    c2 = np.where(low_rank, _c2_from_factor(w[..., :2]), _c2_from_factor(w))
    return _out(np.sqrt(c2))


def pair_c2_pure(phi, i: int, j: int):
    """Squared Wootters concurrence of the (i, j) two-qubit reduction of a pure state."""
    phi = as_pure_state(phi)
    n = n_qubits_of(phi.shape[-1])
    if i == j:
        raise ValidationError("pair needs two distinct qubits")
    m = schmidt_matrix(phi, (i, j))
    if n > 4:
        # factor wider than the 4-dim pair space; rank-reveal through the density route
        return _out(wootters_concurrence(m @ np.conj(np.swapaxes(m, -1, -2))) ** 2)
    return _out(_c2_from_factor(m))


def pairwise_c2_table(phi) -> dict[tuple[int, int], np.ndarray | float]:
    phi = as_pure_state(phi)
    n = n_qubits_of(phi.shape[-1])
    return {(i, j): pair_c2_pure(phi, i, j) for i, j in combinations(range(n), 2)}


def _require_qubits(phi, n_expected: int | None = None, at_least: int | None = None) -> tuple[np.ndarray, int]:
    phi = as_pure_state(phi)
    n = n_qubits_of(phi.shape[-1])
    if n_expected is not None and n != n_expected:
        raise ValidationError(f"expected a {n_expected}-qubit state, got {n} qubits")
    if at_least is not None and n < at_least:
        raise ValidationError(f"expected at least {at_least} qubits, got {n}")
    return phi, n


def _check_pivot(pivot: int, n: int) -> int:
    if not 0 <= pivot < n:
        raise IndexError(f"pivot {pivot} out of range for {n} qubits")
    return int(pivot)


def three_tangle_pure(phi, pivot: int = 0):
    """Residual tangle C^2_{p|rest} - C^2(rho_pj) - C^2(rho_pk) of a pure three-qubit state."""
    phi, n = _require_qubits(phi, n_expected=3)
    p = _check_pivot(pivot, n)
    j, k = (q for q in range(3) if q != p)
    tau = pure_bipartite_c2(phi, (p,)) - pair_c2_pure(phi, p, j) - pair_c2_pure(phi, p, k)
    return clamp_nonneg(tau, TANGLE_CLAMP_TOL)


def residual_tangles(phi) -> np.ndarray:
    """Unclamped residual tangle for pivots 0, 1, 2 of pure three-qubit states, stacked on axis 0."""
    phi, _ = _require_qubits(phi, n_expected=3)
    pairs = pairwise_c2_table(phi)
    out = []
    for p in range(3):
        j, k = (q for q in range(3) if q != p)
        out.append(pure_bipartite_c2(phi, (p,)) - pairs[min(p, j), max(p, j)] - pairs[min(p, k), max(p, k)])
    return np.array(out)


def gen_concurrence_sq_pure(phi):
    """Squared generalized concurrence 2^(2-N) [(2^N - 2) - sum_S Tr rho_S^2].

    The sum runs over all 2^N - 2 non-empty proper subsets S of the register.
    """
    phi, n = _require_qubits(phi, at_least=2)
    total = sum(np.asarray(purity(reduce_pure(phi, s))) for s in nontrivial_subsets(n))
    return clamp_nonneg(2.0 ** (2 - n) * ((2**n - 2) - total))


def mmc_residual(phi):
    """Signed residual C3^2 - C^2(ab) - C^2(ac) - C^2(bc) - (3/2) tau, tau taken with pivot a.

    Zero for every pure three-qubit state.
    """
    phi, _ = _require_qubits(phi, n_expected=3)
    pairs = pairwise_c2_table(phi)
    tau = pure_bipartite_c2(phi, (0,)) - pairs[0, 1] - pairs[0, 2]
    return _out(gen_concurrence_sq_pure(phi) - sum(pairs.values()) - 1.5 * tau)


def ckw_gap_nqubit(phi, pivot: int = 0):
    """Signed CKW gap C^2_{p|rest} - sum_{j != p} C^2(rho_pj); non-negative for all states."""
    phi, n = _require_qubits(phi, at_least=3)
    p = _check_pivot(pivot, n)
    return _out(pure_bipartite_c2(phi, (p,)) - sum(pair_c2_pure(phi, p, j) for j in range(n) if j != p))


def multipartite_gap(phi):
    """Signed gap C_N^2 - sum_{i<j} C^2(rho_ij); can be negative once N >= 4."""
    phi, _ = _require_qubits(phi, at_least=2)
    return _out(gen_concurrence_sq_pure(phi) - sum(pairwise_c2_table(phi).values()))


def reduced_purities(phi) -> dict[tuple[int, ...], np.ndarray | float]:
    phi, n = _require_qubits(phi, at_least=2)
    return {s: purity(reduce_pure(phi, s)) for s in nontrivial_subsets(n)}


__all__ = [
    "CLAMP_TOL",
    "HERMITIAN_TOL",
    "MeasureError",
    "ckw_gap_nqubit",
    "clamp_nonneg",
    "gen_concurrence_sq_pure",
    "linear_entropy",
    "mmc_residual",
    "multipartite_gap",
    "nontrivial_subsets",
    "pair_c2_pure",
    "pairwise_c2_table",
    "pure_bipartite_c2",
    "reduced_purities",
    "residual_tangles",
    "three_tangle_pure",
    "wootters_concurrence",
]
