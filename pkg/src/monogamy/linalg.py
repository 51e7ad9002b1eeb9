"""Dense complex linear algebra for qubit registers.

Every routine accepts stacks of matrices/vectors: leading axes are batch
axes, the trailing one (vectors) or two (matrices) carry the data.

Qubit 0 is the most significant bit of a basis index, i.e. the leftmost
factor of a Kronecker product.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
NORM_TOL = 1e-12
PSD_TOL = 1e-8
MAX_SWEEPS = 60
# off-diagonal entries below this are dropped rather than rotated (avoids subnormal division)
_TINY = 1e-150


class ValidationError(ValueError):
    """Input violates a precondition (shape, norm, Hermiticity, ...)."""


class NotPSDError(ValidationError):
    """Matrix has an eigenvalue below the PSD tolerance."""


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValidationError(f"dimension {dim} is not a power of two")
    return n


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2] or a.shape[-1] < 1:
        raise ValidationError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def as_pure_state(phi, tol: float = NORM_TOL) -> np.ndarray:
    """Validate a (stack of) state vector(s) over qubits and return it as complex."""
    phi = np.asarray(phi, dtype=np.complex128)
    if phi.ndim < 1:
        raise ValidationError("state must be a vector")
    n_qubits_of(phi.shape[-1])
    if not np.all(np.isfinite(phi)):
        raise ValidationError("state has non-finite amplitudes")
    norms = np.linalg.norm(phi, axis=-1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise ValidationError(f"state is not normalized (max |norm-1| = {np.max(np.abs(norms - 1)):.3e})")
    return phi


def as_density_matrix(rho, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return the Hermitized matrix."""
    rho = as_matrix(rho)
    n_qubits_of(rho.shape[-1])
    rho = hermitize(rho, tol)
    tr = np.trace(rho, axis1=-2, axis2=-1).real
    if np.any(np.abs(tr - 1.0) > tol):
        raise ValidationError(f"trace deviates from 1 (max {np.max(np.abs(tr - 1)):.3e})")
    if np.min(herm_eigvals(rho)) < -tol:
        raise NotPSDError("density matrix has a negative eigenvalue")
    return rho


def hermitize(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = as_matrix(h)
    hd = np.conj(np.swapaxes(h, -1, -2))
    if np.max(np.abs(h - hd), initial=0.0) > tol:
        raise ValidationError("matrix is not Hermitian within tolerance")
    return 0.5 * (h + hd)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def kron(*factors) -> np.ndarray:
    """Kronecker product of matrices or vectors, first factor leftmost."""
    out = np.asarray(factors[0], dtype=np.complex128)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=np.complex128))
    return out


def projector(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=np.complex128)
    return phi[..., :, None] * np.conj(phi[..., None, :])


def _check_subsystem(keep: Iterable[int], n: int) -> tuple[int, ...]:
    keep = tuple(sorted(int(q) for q in keep))
    if not keep:
        raise ValidationError("subsystem must be non-empty")
    if len(set(keep)) != len(keep):
        raise ValidationError(f"repeated qubit index in {keep}")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"qubit index out of range for a {n}-qubit register: {keep}")
    return keep


def schmidt_matrix(phi, keep: Sequence[int]) -> np.ndarray:
    """Reshape amplitudes to a (2^|keep|, 2^rest) matrix M so that rho_keep = M M^dagger."""
    phi = np.asarray(phi, dtype=np.complex128)
    n = n_qubits_of(phi.shape[-1])
    keep = _check_subsystem(keep, n)
    rest = tuple(q for q in range(n) if q not in keep)
    batch = phi.shape[:-1]
    nb = len(batch)
    t = phi.reshape(batch + (2,) * n)
    t = np.transpose(t, tuple(range(nb)) + tuple(nb + q for q in keep + rest))
    return t.reshape(batch + (1 << len(keep), 1 << len(rest)))


def reduce_pure(phi, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of a pure state on the qubits in ``keep``."""
    m = schmidt_matrix(phi, keep)
    return m @ dagger(m)


def partial_trace(rho, keep: Sequence[int]) -> np.ndarray:
    """Trace out every qubit not listed in ``keep``.

    Kept qubits stay in increasing index order.
    """
    rho = as_matrix(rho)
    n = n_qubits_of(rho.shape[-1])
    keep = _check_subsystem(keep, n)
    if len(keep) == n:
        return rho.copy()
    rest = tuple(q for q in range(n) if q not in keep)
    batch = rho.shape[:-2]
    nb = len(batch)
    t = rho.reshape(batch + (2,) * (2 * n))
    order = keep + rest
    axes = tuple(range(nb)) + tuple(nb + q for q in order) + tuple(nb + n + q for q in order)
    dk, dr = 1 << len(keep), 1 << len(rest)
    t = np.transpose(t, axes).reshape(batch + (dk, dr, dk, dr))
    return np.einsum("...atbt->...ab", t)


def purity(rho) -> np.ndarray | float:
    """Tr(rho^2) for Hermitian rho."""
    rho = np.asarray(rho, dtype=np.complex128)
    # Tr(rho rho) = sum |rho_ij|^2 when rho is Hermitian
    p = np.sum(np.abs(rho) ** 2, axis=(-2, -1))
    return float(p) if np.ndim(p) == 0 else p


@lru_cache(maxsize=None)
def _tournament(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Round-robin schedule: n-1 rounds of disjoint index pairs covering every pair once."""
    m = n + (n & 1)
    idx = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(idx[i], idx[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p), max(p)) for p in pairs if max(p) < n]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        idx = [idx[0], idx[-1]] + idx[1:-1]
    return tuple(rounds)


def _jacobi(h: np.ndarray, want_vectors: bool):
    """Cyclic Jacobi on a stack of Hermitian matrices (parallel tournament ordering).

    Each round applies n/2 disjoint complex Givens rotations at once, each
    annihilating one off-diagonal pair. Sweeps stop when the off-diagonal
    Frobenius norm falls below 1e-13 * dim (or below roundoff level for
    matrices of large norm) for every matrix in the stack.
    """
    batch = h.shape[:-2]
    n = h.shape[-1]
    a = np.array(h.reshape((-1, n, n)), dtype=np.complex128)
    nb = a.shape[0]
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), (nb, n, n)).copy() if want_vectors else None
    if n > 1:
        diag_mask = np.eye(n, dtype=bool)
        fro = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
        scale = np.maximum(1e-13 * n, 8 * np.finfo(float).eps * fro)
        for _ in range(MAX_SWEEPS):
            off = np.sqrt(np.sum(np.abs(a[:, ~diag_mask]) ** 2, axis=1))
            if np.all(off < scale):
                break
            for p, q in _tournament(n):
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                apq = a[:, p, q]
                mag = np.abs(apq)
                live = mag > _TINY
                safe = np.where(live, mag, 1.0)
                phase = np.where(live, np.conj(apq) / safe, 1.0)
                theta = (aqq - app) / (2.0 * safe)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # block [[c, s], [-s*phase, c*phase]] acting on columns p, q
                upq = s
                uqp = -s * phase
                uqq = c * phase
                cp, cq = a[:, :, p], a[:, :, q]
                a[:, :, p], a[:, :, q] = cp * c[:, None, :] + cq * uqp[:, None, :], cp * upq[:, None, :] + cq * uqq[:, None, :]
                rp, rq = a[:, p, :], a[:, q, :]
                a[:, p, :] = c[:, :, None] * rp + np.conj(uqp)[:, :, None] * rq
                a[:, q, :] = upq[:, :, None] * rp + np.conj(uqq)[:, :, None] * rq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                a[:, p, p] = app - t * mag
                a[:, q, q] = aqq + t * mag
                if want_vectors:
                    vp, vq = v[:, :, p], v[:, :, q]
                    v[:, :, p], v[:, :, q] = vp * c[:, None, :] + vq * uqp[:, None, :], vp * upq[:, None, :] + vq * uqq[:, None, :]
    w = np.real(np.diagonal(a, axis1=1, axis2=2))
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1).reshape(batch + (n,))
    if not want_vectors:
        return w
    v = np.take_along_axis(v, order[:, None, :], axis=2).reshape(batch + (n, n))
    return w, v


def herm_eigvals(h) -> np.ndarray:
    """Eigenvalues of Hermitian matrices, sorted descending."""
    return _jacobi(hermitize(h), want_vectors=False)


def herm_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching eigenvector columns."""
    return _jacobi(hermitize(h), want_vectors=True)


def psd_sqrt(rho) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Negative eigenvalues down to -1e-8 are treated as roundoff and clamped
    to zero; anything more negative raises :class:`NotPSDError`. Positive
    eigenvalues at roundoff scale are zeroed too, since their square roots
    would otherwise be ~1e-8.
    """
    w, v = herm_eig(rho)
    if np.min(w) < -PSD_TOL:
        raise NotPSDError(f"eigenvalue {np.min(w):.3e} below -{PSD_TOL}")
    floor = 16 * np.finfo(float).eps * w.shape[-1] * np.max(np.abs(w), axis=-1, keepdims=True)
    r = np.sqrt(np.where(w > floor, w, 0.0))
    return (v * r[..., None, :]) @ dagger(v)
