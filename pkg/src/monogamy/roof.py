"""Convex-roof extension of pure-state measures.

A decomposition of a rank-r density matrix into m pure states is an m x r
isometry U applied to its weighted eigenvectors: |w_i> = sum_k U_ik sqrt(mu_k)|k>,
p_i = <w_i|w_i>. Every decomposition arises this way, so minimising the
average measure over isometries gives the convex roof. The optimiser walks
the unitary group by random two-row Givens rotations, which keep U an
isometry and only touch two ensemble members at a time.

A ``measure`` is any callable mapping a stack of normalized state vectors of
shape ``(k, dim)`` to ``k`` non-negative values (e.g. the functions in
:mod:`monogamy.measures`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linalg import ValidationError, _tournament, as_density_matrix, herm_eig, n_qubits_of

Measure = Callable[[np.ndarray], np.ndarray]

EIG_DROP = 1e-12
WEIGHT_DROP = 1e-14
ISOMETRY_TOL = 1e-10
_DRAW_CHUNK = 32


class UnsupportedError(ValidationError):
    pass


@dataclass(frozen=True)
class RoofConfig:
    """Optimiser settings; ``ensemble_size=None`` means min(rank^2, rank + 2)."""

    ensemble_size: int | None = None
    restarts: int = 32
    max_iterations: int = 2000
    step_init: float = 0.3
    step_decay: float = 0.9
    tolerance: float = 1e-9
    seed: int = 0

    def resolve_size(self, rank: int) -> int:
        m = min(rank * rank, rank + 2) if self.ensemble_size is None else self.ensemble_size
        if not rank <= m <= rank * rank:
            raise ValidationError(f"ensemble_size {m} outside [rank, rank^2] = [{rank}, {rank * rank}]")
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if not self.step_init > 0:
            raise ValidationError("step_init must be positive")
        if not 0 < self.step_decay < 1:
            raise ValidationError("step_decay must lie in (0, 1)")
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        return m


@dataclass
class Ensemble:
    weights: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.states = np.asarray(self.states, dtype=np.complex128)
        if self.states.ndim != 2 or len(self.weights) != len(self.states):
            raise ValidationError("ensemble needs one state per weight")
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-10:
            raise ValidationError("ensemble weights must be a probability vector")

    def __len__(self) -> int:
        return len(self.weights)

    def density_matrix(self) -> np.ndarray:
        return np.einsum("i,ia,ib->ab", self.weights, self.states, np.conj(self.states))

    def average(self, measure: Measure) -> float:
        return float(np.dot(self.weights, np.asarray(measure(self.states), dtype=float)))

    @classmethod
    def from_unnormalized(cls, rows: np.ndarray) -> "Ensemble":
        p = np.sum(np.abs(rows) ** 2, axis=-1)
        keep = p >= WEIGHT_DROP
        rows, p = rows[keep], p[keep]
        return cls(p / p.sum(), rows / np.sqrt(p)[:, None])

    def unnormalized(self) -> np.ndarray:
        return np.sqrt(self.weights)[:, None] * self.states


@dataclass
class RoofEstimate:
    value: float
    ensemble: Ensemble
    restarts_used: int
    converged: bool
    iterations: int
    restart_values: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)


def eigendecomposition_ensemble(rho) -> Ensemble:
    rho = as_density_matrix(rho)
    mu, v = herm_eig(rho)
    keep = mu >= EIG_DROP
    return Ensemble(mu[keep] / mu[keep].sum(), v[:, keep].T)


def mix_ensemble(base: Ensemble, isometry) -> Ensemble:
    """Re-mix ``base`` with an m x r isometry (Schrodinger-HJW)."""
    u = np.asarray(isometry, dtype=np.complex128)
    r = len(base)
    if u.ndim != 2 or u.shape[1] != r or u.shape[0] < r:
        raise ValidationError(f"isometry must be m x {r} with m >= {r}, got {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(r))) > ISOMETRY_TOL:
        raise ValidationError("columns of the mixing matrix are not orthonormal")
    return Ensemble.from_unnormalized(u @ base.unnormalized())


def random_isometry(m: int, r: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(m, r)) + 1j * rng.normal(size=(m, r))
    q, t = np.linalg.qr(z)
    return q * (np.diag(t) / np.abs(np.diag(t)))


def _row_values(rows: np.ndarray, measure: Measure) -> np.ndarray:
    """p * f(row / sqrt(p)) for unnormalized rows, zero for negligible weight."""
    p = np.sum(np.abs(rows) ** 2, axis=-1)
    out = np.zeros(p.shape)
    live = p >= WEIGHT_DROP
    if np.any(live):
        states = rows[live] / np.sqrt(p[live])[:, None]
        out[live] = p[live] * np.asarray(measure(states), dtype=float).reshape(-1)
    return out


class _Draws:
    """Per-restart random numbers, refilled in fixed-size chunks so each
    restart's sequence depends only on its own sub-seed."""

    def __init__(self, rngs: list[np.random.Generator], m: int):
        self.rngs = rngs
        self.m = m
        self.n_rounds = len(_tournament(m))
        self.width = len(_tournament(m)[0][0])
        self.pos = _DRAW_CHUNK
        self.buf = None

    def sweep(self):
        if self.pos == _DRAW_CHUNK:
            shape = (_DRAW_CHUNK, self.n_rounds, self.width)
            chunk = [
                (g.permuted(np.tile(np.arange(self.m), (_DRAW_CHUNK, 1)), axis=1), g.normal(size=shape), g.random(size=shape))
                for g in self.rngs
            ]
            self.buf = [np.stack(x) for x in zip(*chunk)]
            self.pos = 0
        perm, gauss, unif = (b[:, self.pos] for b in self.buf)
        self.pos += 1
        return perm, gauss, unif


def convex_roof(rho, measure: Measure, config: RoofConfig = RoofConfig()) -> RoofEstimate:
    """Upper estimate of min over decompositions of sum_i p_i measure(psi_i).

    All restarts advance together in vectorized form. Restart 0 starts at the
    eigendecomposition, so the result never exceeds its average; the others
    start at Haar-random isometries. A restart stops once its step size has
    decayed below 1e-2 * sqrt(tolerance) or after ``max_iterations`` sweeps.
    """
    base = eigendecomposition_ensemble(rho)
    r = len(base)
    m = config.resolve_size(r)
    if r == 1:
        value = base.average(measure)
        return RoofEstimate(value, base, 0, True, 0, np.array([value]))

    n_restarts = config.restarts
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(n_restarts)]
    b = base.unnormalized()
    w = np.zeros((n_restarts, m, b.shape[1]), dtype=np.complex128)
    w[0, :r] = b
    for k in range(1, n_restarts):
        w[k] = random_isometry(m, r, rngs[k]) @ b
    g = _row_values(w.reshape(-1, w.shape[-1]), measure).reshape(n_restarts, m)

    step = np.full(n_restarts, config.step_init)
    floor = 1e-2 * np.sqrt(config.tolerance)
    sweeps = np.zeros(n_restarts, dtype=int)
    last_gain = np.full(n_restarts, np.inf)
    draws = _Draws(rngs, m)
    rounds = _tournament(m)
    for _ in range(config.max_iterations):
        act = np.flatnonzero(step >= floor)
        if act.size == 0:
            break
        perm, gauss, unif = draws.sweep()
        before = g[act].sum(axis=1)
        for k, (pp, qq) in enumerate(rounds):
            ip = perm[act][:, pp]
            iq = perm[act][:, qq]
            ra = act[:, None]
            wp, wq = w[ra, ip], w[ra, iq]
            theta = (step[act, None] * gauss[act, k, : len(pp)])[..., None]
            e = np.exp(2j * np.pi * unif[act, k, : len(pp)])[..., None]
            c, s = np.cos(theta), np.sin(theta)
            np_ = c * wp - e * s * wq
            nq = np.conj(e) * s * wp + c * wq
            d = w.shape[-1]
            vals = _row_values(np.concatenate([np_, nq], axis=1).reshape(-1, d), measure)
            vals = vals.reshape(len(act), 2, len(pp))
            old = g[ra, ip] + g[ra, iq]
            acc = vals[:, 0] + vals[:, 1] < old
            if np.any(acc):
                ai, aj = np.nonzero(acc)
                w[act[ai], ip[ai, aj]] = np_[ai, aj]
                w[act[ai], iq[ai, aj]] = nq[ai, aj]
                g[act[ai], ip[ai, aj]] = vals[ai, 0, aj]
                g[act[ai], iq[ai, aj]] = vals[ai, 1, aj]
        gain = before - g[act].sum(axis=1)
        last_gain[act] = gain
        sweeps[act] += 1
        step[act] = np.where(gain < config.tolerance, step[act] * config.step_decay, step[act])

    totals = g.sum(axis=1)
    # lowest value wins; ties within tolerance go to the earliest restart
    best = int(np.flatnonzero(totals <= totals.min() + config.tolerance)[0])
    ens = Ensemble.from_unnormalized(w[best])
    return RoofEstimate(
        value=ens.average(measure),
        ensemble=ens,
        restarts_used=n_restarts,
        converged=bool(step[best] < floor and last_gain[best] < config.tolerance),
        iterations=int(sweeps[best]),
        restart_values=totals,
    )


def _van_der_corput(count: int) -> np.ndarray:
    out = np.zeros(count)
    for i in range(count):
        x, f, k = 0.0, 0.5, i
        while k:
            x += f * (k & 1)
            k >>= 1
            f *= 0.5
        out[i] = x
    return out


def brute_force_roof(rho, measure: Measure, grid_density: int) -> float:
    """Grid minimum over all two-member decompositions of a rank-2 state.

    Two-member ensembles are the rows of a 2 x 2 unitary
    [[cos t, -e^{ia} sin t], [e^{-ia} sin t, cos t]] applied to the weighted
    eigenvectors, t in [0, pi/2), a in [0, 2 pi); row phases do not change
    the ensemble. Both axes use the first ``grid_density`` van der Corput
    points, so grids are nested and the minimum never increases with density.
    """
    base = eigendecomposition_ensemble(rho)
    if n_qubits_of(base.states.shape[1]) > 3:
        raise UnsupportedError("brute-force roof is limited to registers of at most 3 qubits")
    if len(base) == 1:
        return base.average(measure)
    if len(base) > 2:
        raise UnsupportedError(f"brute-force roof needs rank <= 2, got rank {len(base)}")
    if grid_density < 1:
        raise ValidationError("grid_density must be positive")
    v = _van_der_corput(grid_density)
    t, a = np.meshgrid(0.5 * np.pi * v, 2.0 * np.pi * v, indexing="ij")
    t, a = t.reshape(-1, 1), a.reshape(-1, 1)
    b = base.unnormalized()
    e = np.exp(1j * a)
    w1 = np.cos(t) * b[0] - e * np.sin(t) * b[1]
    w2 = np.conj(e) * np.sin(t) * b[0] + np.cos(t) * b[1]
    d = b.shape[1]
    vals = _row_values(np.stack([w1, w2], axis=1).reshape(-1, d), measure).reshape(-1, 2).sum(axis=1)
    return float(vals.min())
