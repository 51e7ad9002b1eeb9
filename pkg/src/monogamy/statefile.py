"""JSON state files.

::

    {"n_qubits": 2, "kind": "pure", "data": [[0.7071067811865476, 0.0], [0, 0], [0, 0], [0.7071067811865476, 0.0]]}

``data`` is a flat list of ``[re, im]`` pairs: the amplitudes for a pure state,
the row-major matrix entries for a mixed one. Basis indices ascend with
qubit 0 as the most significant bit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import ValidationError, herm_eigvals

FILE_TOL = 1e-8


class StateFileError(ValidationError):
    pass


@dataclass(frozen=True)
class StateFile:
    n_qubits: int
    kind: str
    data: np.ndarray

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, np.conj(self.data))
        return self.data


def _field_error(source: str, field: str, msg: str) -> StateFileError:
    return StateFileError(f"{source}: field '{field}': {msg}")


def parse_state(text: str, source: str = "<string>") -> StateFile:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise StateFileError(f"{source}: top level must be an object")
    for key in ("n_qubits", "kind", "data"):
        if key not in obj:
            raise _field_error(source, key, "missing")

    n = obj["n_qubits"]
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= 10:
        raise _field_error(source, "n_qubits", f"expected an integer in [1, 10], got {n!r}")
    kind = obj["kind"]
    if kind not in ("pure", "mixed"):
        raise _field_error(source, "kind", f"expected 'pure' or 'mixed', got {kind!r}")

    data = obj["data"]
    dim = 1 << n
    expected = dim if kind == "pure" else dim * dim
    if not isinstance(data, list) or len(data) != expected:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise _field_error(source, "data", f"expected {expected} [re, im] pairs, got {got}")
    values = np.empty(expected, dtype=np.complex128)
    for i, pair in enumerate(data):
        ok = isinstance(pair, list) and len(pair) == 2
        ok = ok and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        if not ok:
            raise _field_error(source, "data", f"entry {i} is not a [re, im] pair of numbers: {pair!r}")
        values[i] = complex(pair[0], pair[1])
    if not np.all(np.isfinite(values)):
        raise _field_error(source, "data", "non-finite entry")

    if kind == "pure":
        norm = np.linalg.norm(values)
        if abs(norm - 1.0) > FILE_TOL:
            raise _field_error(source, "data", f"state norm {norm:.12g} differs from 1 by more than {FILE_TOL}")
        return StateFile(n, kind, values / norm)

    rho = values.reshape(dim, dim)
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > FILE_TOL:
        raise _field_error(source, "data", f"matrix is not Hermitian (max deviation {herm_err:.3e})")
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > FILE_TOL:
        raise _field_error(source, "data", f"trace {tr:.12g} differs from 1 by more than {FILE_TOL}")
    low = herm_eigvals(rho)[-1]
    if low < -FILE_TOL:
        raise _field_error(source, "data", f"matrix is not positive semidefinite (eigenvalue {low:.3e})")
    return StateFile(n, kind, rho / tr)


def read_state(path: str | Path) -> StateFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from None
    return parse_state(text, str(path))


def dump_state(state, kind: str | None = None) -> str:
    """Serialize an amplitude vector (pure) or a density matrix (mixed)."""
    arr = np.asarray(state, dtype=np.complex128)
    kind = kind or ("pure" if arr.ndim == 1 else "mixed")
    flat = arr.reshape(-1)
    dim = arr.shape[0]
    n = dim.bit_length() - 1
    pairs = [[float(z.real), float(z.imag)] for z in flat]
    return json.dumps({"n_qubits": n, "kind": kind, "data": pairs})


def write_state(path: str | Path, state, kind: str | None = None) -> None:
    Path(path).write_text(dump_state(state, kind) + "\n")
