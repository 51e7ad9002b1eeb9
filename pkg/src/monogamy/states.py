"""Named states used as fixtures and in the canonical report."""
from __future__ import annotations

import numpy as np

from .linalg import kron


def basis(bits: str) -> np.ndarray:
    """Computational basis ket, e.g. ``basis("010")``; first character is qubit 0."""
    v = np.zeros(1 << len(bits), dtype=np.complex128)
    v[int(bits, 2)] = 1.0
    return v


def zeros(n: int) -> np.ndarray:
    return basis("0" * n)


def ghz(n: int = 3) -> np.ndarray:
    return (basis("0" * n) + basis("1" * n)) / np.sqrt(2)


def w_state(n: int = 3) -> np.ndarray:
    v = sum(basis("0" * k + "1" + "0" * (n - k - 1)) for k in range(n))
    return v / np.sqrt(n)


def bell_phi_plus() -> np.ndarray:
    return (basis("00") + basis("11")) / np.sqrt(2)


def bell_bell() -> np.ndarray:
    """Bell pairs on qubits (0, 1) and (2, 3)."""
    return kron(bell_phi_plus(), bell_phi_plus())
