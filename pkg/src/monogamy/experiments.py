"""Numerical checks of the monogamy relations.

Each experiment returns a :class:`Report`: a pass flag, a JSON-ready summary
and per-sample record blocks. Sample ``k`` always comes from the sampler at
counter ``k``, and all aggregates (min, max, counts, histograms) are merged
with commutative reductions, so results do not depend on sharding.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from . import measures as ms
from . import states
from .linalg import partial_trace
from .roof import RoofConfig, convex_roof
from .sampler import haar_pure_batch, random_mixed_batch

CHUNK = 8192
HIST_LO, HIST_HI, HIST_WIDTH = -0.5, 2.0, 0.05
N_BINS = round((HIST_HI - HIST_LO) / HIST_WIDTH)
VIOLATION_TOL = 1e-9
MAX_STORED_VIOLATIONS = 100
CANONICAL_TOL = 1e-10
MIXED_BOUND_TOL = 1e-6


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    sample_index: int
    quantity: str
    value: float
    seed: int


@dataclass
class RecordBlock:
    """Values of one quantity for a run of samples, stored column-wise."""

    quantity: str
    sample_index: np.ndarray
    value: np.ndarray


@dataclass
class Report:
    experiment: str
    passed: bool
    summary: dict
    seed: int = 0
    blocks: list[RecordBlock] = field(default_factory=list)

    def records(self) -> Iterator[ExperimentRecord]:
        for b in self.blocks:
            for k, v in zip(b.sample_index.tolist(), b.value.tolist()):
                yield ExperimentRecord(self.experiment, k, b.quantity, v, self.seed)


def _chunks(start: int, stop: int, size: int = CHUNK):
    for a in range(start, stop, size):
        yield a, min(a + size, stop)


def _violation(index: int, value: float, state: np.ndarray) -> dict:
    return {
        "sample_index": int(index),
        "value": float(value),
        "amplitudes": [[float(z.real), float(z.imag)] for z in state],
    }


# canonical --------------------------------------------------------------


def canonical_report(tol: float = CANONICAL_TOL) -> Report:
    ghz, w, bb, z3 = states.ghz(3), states.w_state(3), states.bell_bell(), states.zeros(3)
    rows = []

    def row(state: str, quantity: str, expected: float, computed: float):
        rows.append(
            {
                "state": state,
                "quantity": quantity,
                "expected": expected,
                "computed": float(computed),
                "ok": bool(abs(computed - expected) < tol),
            }
        )

    for name, phi, c3, tau, pair_sum in (
        ("GHZ", ghz, 1.5, 1.0, 0.0),
        ("W", w, 4 / 3, 0.0, 4 / 3),
        ("000", z3, 0.0, 0.0, 0.0),
    ):
        row(name, "gen_concurrence2", c3, ms.gen_concurrence_sq_pure(phi))
        for p in range(3):
            row(name, f"tau_pivot{p}", tau, ms.three_tangle_pure(phi, p))
        row(name, "sum_pair_concurrence2", pair_sum, sum(ms.pairwise_c2_table(phi).values()))
        row(name, "mmc_residual", 0.0, ms.mmc_residual(phi))
    rho_ghz = np.outer(ghz, ghz.conj())
    for pair in ((0, 1), (0, 2), (1, 2)):
        row("GHZ", f"concurrence_{pair[0]}{pair[1]}", 0.0, ms.wootters_concurrence(partial_trace(rho_ghz, pair)))
    rho_w = np.outer(w, w.conj())
    row("W", "concurrence_01", 2 / 3, ms.wootters_concurrence(partial_trace(rho_w, (0, 1))))

    row("Bell(x)Bell", "gen_concurrence2", 1.75, ms.gen_concurrence_sq_pure(bb))
    row("Bell(x)Bell", "sum_pair_concurrence2", 2.0, sum(ms.pairwise_c2_table(bb).values()))
    row("Bell(x)Bell", "gap4", -0.25, ms.multipartite_gap(bb))
    row("0000", "gap4", 0.0, ms.multipartite_gap(states.zeros(4)))

    passed = all(r["ok"] for r in rows)
    blocks = [
        RecordBlock(f"{r['state']}:{r['quantity']}", np.array([0]), np.array([r["computed"]])) for r in rows
    ]
    return Report("canonical", passed, {"experiment": "canonical", "tol": tol, "passed": passed, "rows": rows}, 0, blocks)


# verify-mmc -------------------------------------------------------------


def verify_mmc(samples: int = 10_000, seed: int = 0, tol: float = 1e-10, inputs: Sequence[np.ndarray] | None = None) -> Report:
    worst, worst_idx = 0.0, -1
    blocks = []
    for a, b, phi in _pure_source(3, samples, seed, inputs):
        r = np.atleast_1d(ms.mmc_residual(phi))
        i = int(np.argmax(np.abs(r)))
        if abs(r[i]) > worst or worst_idx < 0:
            worst, worst_idx = float(abs(r[i])), a + i
        blocks.append(RecordBlock("mmc_residual", np.arange(a, b), r))
    n = blocks[-1].sample_index[-1] + 1 if blocks else 0
    passed = worst < tol
    summary = {
        "experiment": "verify-mmc",
        "samples": int(n),
        "seed": seed,
        "source": "input" if inputs is not None else "haar",
        "tol": tol,
        "max_abs_residual": worst,
        "argmax_sample": worst_idx,
        "passed": passed,
    }
    return Report("verify-mmc", passed, summary, seed, blocks)


def _pure_source(n_qubits: int, samples: int, seed: int, inputs):
    if inputs is not None:
        arr = np.array([np.asarray(s) for s in inputs], dtype=np.complex128)
        yield 0, len(arr), arr
        return
    if samples < 1:
        raise ValueError("samples must be >= 1")
    for a, b in _chunks(0, samples):
        yield a, b, haar_pure_batch(n_qubits, seed, a, b - a)


# verify-ckw -------------------------------------------------------------


def verify_ckw(samples: int = 10_000, seed: int = 0, tol: float = 1e-9, inputs: Sequence[np.ndarray] | None = None) -> Report:
    spread, spread_idx = 0.0, -1
    tau_min, tau_min_idx = np.inf, -1
    blocks = []
    for a, b, phi in _pure_source(3, samples, seed, inputs):
        taus = ms.residual_tangles(phi).reshape(3, -1)
        d = np.ptp(taus, axis=0)
        i = int(np.argmax(d))
        if d[i] > spread or spread_idx < 0:
            spread, spread_idx = float(d[i]), a + i
        lo = taus.min(axis=0)
        j = int(np.argmin(lo))
        if lo[j] < tau_min:
            tau_min, tau_min_idx = float(lo[j]), a + j
        idx = np.arange(a, b)
        blocks += [RecordBlock(f"tau_pivot{p}", idx, taus[p]) for p in range(3)]
    passed = spread < tol and tau_min > -tol
    summary = {
        "experiment": "verify-ckw",
        "samples": int(blocks[-1].sample_index[-1] + 1),
        "seed": seed,
        "source": "input" if inputs is not None else "haar",
        "tol": tol,
        "max_pivot_spread": spread,
        "argmax_spread_sample": spread_idx,
        "min_tau": tau_min,
        "argmin_tau_sample": tau_min_idx,
        "passed": passed,
    }
    return Report("verify-ckw", passed, summary, seed, blocks)


# hunt4 ------------------------------------------------------------------


@dataclass
class HuntTally:
    """Mergeable statistics of a range of four-qubit samples."""

    count: int = 0
    min_gap: float = np.inf
    argmin_gap: int = -1
    violations: int = 0
    stored: list = field(default_factory=list)
    hist: np.ndarray = field(default_factory=lambda: np.zeros(N_BINS + 2, dtype=np.int64))
    ckw_min: np.ndarray = field(default_factory=lambda: np.full(4, np.inf))
    ckw_violations: np.ndarray = field(default_factory=lambda: np.zeros(4, dtype=np.int64))

    def merge(self, other: "HuntTally") -> "HuntTally":
        first = (self.min_gap, self.argmin_gap) <= (other.min_gap, other.argmin_gap)
        stored = sorted(self.stored + other.stored, key=lambda v: v["sample_index"])[:MAX_STORED_VIOLATIONS]
        return HuntTally(
            count=self.count + other.count,
            min_gap=self.min_gap if first else other.min_gap,
            argmin_gap=self.argmin_gap if first else other.argmin_gap,
            violations=self.violations + other.violations,
            stored=stored,
            hist=self.hist + other.hist,
            ckw_min=np.minimum(self.ckw_min, other.ckw_min),
            ckw_violations=self.ckw_violations + other.ckw_violations,
        )


def histogram(values: np.ndarray) -> np.ndarray:
    """Counts in [underflow, N_BINS bins of width 0.05 over [-0.5, 2.0), overflow]."""
    idx = np.floor((values - HIST_LO) / HIST_WIDTH).astype(np.int64) + 1
    idx = np.clip(idx, 0, N_BINS + 1)
    return np.bincount(idx, minlength=N_BINS + 2)


def four_qubit_gaps(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """gap4 = C4^2 - sum_{i<j} C^2(rho_ij) and the four per-pivot CKW gaps."""
    phi = np.atleast_2d(phi)
    pairs = ms.pairwise_c2_table(phi)
    gap4 = ms.gen_concurrence_sq_pure(phi) - sum(pairs.values())
    ckw = np.stack(
        [
            ms.pure_bipartite_c2(phi, (p,)) - sum(pairs[min(p, j), max(p, j)] for j in range(4) if j != p)
            for p in range(4)
        ]
    )
    return np.atleast_1d(gap4), ckw.reshape(4, -1)


def _tally(start: int, phi: np.ndarray, tol: float, keep_records: bool):
    gap4, ckw = four_qubit_gaps(phi)
    i = int(np.argmin(gap4))
    bad = np.flatnonzero(gap4 < -tol)
    t = HuntTally(
        count=len(gap4),
        min_gap=float(gap4[i]),
        argmin_gap=start + i,
        violations=len(bad),
        stored=[_violation(start + k, gap4[k], phi[k]) for k in bad[:MAX_STORED_VIOLATIONS]],
        hist=histogram(gap4),
        ckw_min=ckw.min(axis=1),
        ckw_violations=np.sum(ckw < -tol, axis=1),
    )
    blocks = []
    if keep_records:
        idx = np.arange(start, start + len(gap4))
        blocks = [RecordBlock("gap4", idx, gap4)] + [RecordBlock(f"ckw_gap_pivot{p}", idx, ckw[p]) for p in range(4)]
    return t, blocks


def _hunt_shard(args) -> tuple[HuntTally, list[RecordBlock]]:
    seed, start, stop, tol, keep_records = args
    tally, blocks = HuntTally(), []
    for a, b in _chunks(start, stop):
        t, bl = _tally(a, haar_pure_batch(4, seed, a, b - a), tol, keep_records)
        tally = tally.merge(t)
        blocks += bl
    return tally, blocks


def shard_bounds(samples: int, shards: int) -> list[tuple[int, int]]:
    edges = [samples * k // shards for k in range(shards + 1)]
    return [(edges[k], edges[k + 1]) for k in range(shards) if edges[k] < edges[k + 1]]


def hunt_4q(
    samples: int = 100_000,
    seed: int = 0,
    shards: int = 1,
    tol: float = VIOLATION_TOL,
    workers: int = 1,
    inputs: Sequence[np.ndarray] | None = None,
    keep_records: bool = False,
) -> Report:
    """Search Haar-random four-qubit states for C4^2 < sum_{i<j} C^2_ij."""
    if shards < 1:
        raise ValueError("shards must be >= 1")
    bb_gap = float(ms.multipartite_gap(states.bell_bell()))
    counter_ok = abs(bb_gap + 0.25) < CANONICAL_TOL and bb_gap < -tol

    if inputs is not None:
        arr = np.array([np.asarray(s) for s in inputs], dtype=np.complex128)
        tally, blocks = _tally(0, arr, tol, keep_records)
        source = "input"
    else:
        if samples < 1:
            raise ValueError("samples must be >= 1")
        jobs = [(seed, a, b, tol, keep_records) for a, b in shard_bounds(samples, shards)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_hunt_shard, jobs))
        else:
            parts = [_hunt_shard(j) for j in jobs]
        tally, blocks = HuntTally(), []
        for t, bl in parts:
            tally = tally.merge(t)
            blocks += bl
        source = "haar"

    passed = tally.violations == 0 and int(tally.ckw_violations.sum()) == 0 and counter_ok
    summary = {
        "experiment": "hunt4",
        "samples": tally.count,
        "seed": seed,
        "shards": shards,
        "source": source,
        "tol": tol,
        "min_gap4": tally.min_gap,
        "argmin_gap4_sample": tally.argmin_gap,
        "violations": tally.violations,
        "violating_samples": tally.stored,
        "ckw_min_gap_per_pivot": tally.ckw_min.tolist(),
        "ckw_violations_per_pivot": tally.ckw_violations.tolist(),
        "histogram": {
            "lo": HIST_LO,
            "hi": HIST_HI,
            "width": HIST_WIDTH,
            "underflow": int(tally.hist[0]),
            "counts": tally.hist[1:-1].tolist(),
            "overflow": int(tally.hist[-1]),
        },
        "counterexample": {"state": "Bell(x)Bell", "gap4": bb_gap, "expected": -0.25, "violates": counter_ok},
        "passed": passed,
    }
    return Report("hunt4", passed, summary, seed, blocks)


# mixed-bound ------------------------------------------------------------


def sample_roof_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, k]).generate_state(1, np.uint64)[0])


def pairwise_rhs(rho: np.ndarray) -> float:
    """sum of squared Wootters concurrences over the three qubit pairs of a 3-qubit state."""
    return float(sum(ms.wootters_concurrence(partial_trace(rho, p)) ** 2 for p in ((0, 1), (0, 2), (1, 2))))


def mixed_bound(
    samples: int = 100,
    rank: int = 2,
    seed: int = 0,
    roof_config: RoofConfig = RoofConfig(),
    tol: float = MIXED_BOUND_TOL,
    inputs: Sequence[np.ndarray] | None = None,
) -> Report:
    """One-sided check: roof upper estimate of C3^2(rho) minus the pairwise sum stays >= -tol."""
    if inputs is not None:
        rhos = np.array([np.asarray(r) for r in inputs], dtype=np.complex128)
    else:
        if samples < 1:
            raise ValueError("samples must be >= 1")
        if not 1 <= rank <= 8:
            raise ValueError("rank must lie in [1, 8]")
        rhos = random_mixed_batch(3, rank, seed, 0, samples)
    lhs = np.empty(len(rhos))
    rhs = np.empty(len(rhos))
    unconverged = 0
    for k, rho in enumerate(rhos):
        est = convex_roof(rho, ms.gen_concurrence_sq_pure, replace(roof_config, seed=sample_roof_seed(seed, k)))
        lhs[k], rhs[k] = est.value, pairwise_rhs(rho)
        unconverged += not est.converged
    gap = lhs - rhs
    i = int(np.argmin(gap))
    passed = bool(gap[i] >= -tol)
    idx = np.arange(len(rhos))
    summary = {
        "experiment": "mixed-bound",
        "samples": len(rhos),
        "rank": rank if inputs is None else None,
        "seed": seed,
        "source": "input" if inputs is not None else "random-mixed",
        "tol": tol,
        "roof_config": asdict(replace(roof_config, seed=None)),
        "min_gap": float(gap[i]),
        "argmin_sample": i,
        "mean_gap": float(gap.mean()),
        "unconverged": unconverged,
        "passed": passed,
    }
    blocks = [RecordBlock("lhs_upper", idx, lhs), RecordBlock("rhs", idx, rhs), RecordBlock("gap", idx, gap)]
    return Report("mixed-bound", passed, summary, seed, blocks)


# roof -------------------------------------------------------------------

MEASURES = {
    "concurrence2": lambda s: ms.pure_bipartite_c2(s, (0,)),
    "gen-concurrence2": ms.gen_concurrence_sq_pure,
}


def roof_report(rho: np.ndarray, measure: str, roof_config: RoofConfig = RoofConfig(), show_ensemble: bool = False) -> Report:
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; choose from {sorted(MEASURES)}")
    est = convex_roof(rho, MEASURES[measure], roof_config)
    summary = {
        "experiment": "roof",
        "measure": measure,
        "value": est.value,
        "converged": est.converged,
        "iterations": est.iterations,
        "restarts_used": est.restarts_used,
        "ensemble_size": len(est.ensemble),
        "roof_config": asdict(roof_config),
    }
    if show_ensemble:
        summary["ensemble"] = [
            {"weight": float(p), "amplitudes": [[float(z.real), float(z.imag)] for z in s]}
            for p, s in zip(est.ensemble.weights, est.ensemble.states)
        ]
    blocks = [RecordBlock("roof_value", np.array([0]), np.array([est.value]))]
    return Report("roof", True, summary, roof_config.seed, blocks)
