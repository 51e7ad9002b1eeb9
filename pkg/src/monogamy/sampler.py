"""Counter-based random states.

Sample ``k`` of a stream is a pure function of ``(seed, k)``: it is built
from a fixed window of the Philox4x64 output keyed by the seed, so sample
ranges can be generated in any order, in shards, or in parallel and always
agree with the unsharded sequence.

Layout: a stream keyed by ``seed`` and a family tag (state kind and size)
hands each sample ``2 * d`` consecutive 64-bit words, where ``d`` is the
number of complex Gaussians the sample needs. Each pair of words becomes
one standard complex Gaussian through Box-Muller.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError

_MASK64 = (1 << 64) - 1
_PURE_TAG = 1
_MIXED_TAG = 2


@dataclass(frozen=True)
class SampleStream:
    seed: int
    counter: int = 0

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.counter < 0:
            raise ValidationError("counter must be non-negative")

    def at(self, k: int) -> "SampleStream":
        return SampleStream(self.seed, k)

    def next(self) -> "SampleStream":
        return SampleStream(self.seed, self.counter + 1)


def _family_key(seed: int, tag: int, dim: int, rank: int = 1) -> int:
    # high 64 bits of the 128-bit Philox key separate state families
    return (seed & _MASK64) | (((tag << 48) | (dim << 16) | rank) << 64)


def complex_gaussians(key: int, start: int, count: int, width: int) -> np.ndarray:
    """``count`` rows of ``width`` standard complex Gaussians, rows ``start .. start+count-1``."""
    words = 2 * width
    bg = np.random.Philox(key=key)
    # Philox advances in blocks of four 64-bit words
    if words % 4:
        raise ValidationError("row width must be even")
    bg.advance(start * words // 4)
    raw = bg.random_raw(count * words)
    raw = raw.reshape(count, width, 2)
    # 53-bit uniforms in (0, 1]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    r = np.sqrt(-2.0 * np.log(u[..., 0]))
    return r * np.exp(2j * np.pi * u[..., 1])


def haar_pure_batch(n_qubits: int, seed: int, start: int, count: int) -> np.ndarray:
    """Haar-random states number ``start`` .. ``start + count - 1`` of the stream ``seed``."""
    if n_qubits < 1:
        raise ValidationError("need at least one qubit")
    dim = 1 << n_qubits
    z = complex_gaussians(_family_key(seed, _PURE_TAG, dim), start, count, dim)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def haar_pure(n_qubits: int, stream: SampleStream) -> np.ndarray:
    return haar_pure_batch(n_qubits, stream.seed, stream.counter, 1)[0]


def random_mixed_batch(n_qubits: int, rank: int, seed: int, start: int, count: int) -> np.ndarray:
    """Density matrices from the induced measure: trace out a rank-dim ancilla of a Haar state."""
    if n_qubits < 1:
        raise ValidationError("need at least one qubit")
    dim = 1 << n_qubits
    if not 1 <= rank <= dim:
        raise ValidationError(f"rank must lie in [1, {dim}], got {rank}")
    z = complex_gaussians(_family_key(seed, _MIXED_TAG, dim, rank), start, count, dim * rank)
    g = z.reshape(count, dim, rank)
    rho = g @ np.conj(np.swapaxes(g, -1, -2))
    rho /= np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]
    return 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))


def random_mixed(n_qubits: int, rank: int, stream: SampleStream) -> np.ndarray:
    return random_mixed_batch(n_qubits, rank, stream.seed, stream.counter, 1)[0]
