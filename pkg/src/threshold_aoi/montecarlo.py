"""Seeded slot-by-slot simulator of the sensor, channel and estimator.

Randomness: one ``numpy.random.Generator(PCG64(seed))`` per run, consumed
as 53-bit uniforms from ``Generator.random`` in fixed-size chunks. Each slot
uses one uniform ``u``: ``u < p`` steps up, ``u < p + q`` steps down,
otherwise the walk holds. Cross-implementation agreement is statistical,
not stream-for-stream.

Slot semantics: the walk moves at the start of a slot; if the displacement
from the last reported value reaches +-T the sensor sends an update that is
delivered by the end of the slot, so the estimator error in that slot is 0
and the next slot has AoI 1. The first simulated slot has AoI 1.

Cycle statistics (histogram, cycle means) use completed cycles only.
Time averages (AoI, squared error) use every slot after the warm-up,
including a trailing partial cycle. Standard errors come from the
regenerative ratio estimator over the completed post-warm-up cycles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, EmptyReport
from .model import WalkParams

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

CHUNK = 1 << 20
RNG_ALGORITHM = "numpy.random.PCG64 via Generator.random (float64, 53-bit)"

# kernel state slots
_REL, _AGE, _SLOT, _CYC_START, _CYC_AOI, _CYC_SQ, _DONE = range(7)


@dataclass(frozen=True)
class SimConfig:
    """Exactly one of ``horizon_slots`` / ``target_cycles`` must be given.

    ``warmup_slots`` defaults to 0 for cycle-based runs and to
    ``min(1000, horizon_slots // 10)`` for slot-based runs.
    """

    params: WalkParams
    seed: int
    horizon_slots: int | None = None
    target_cycles: int | None = None
    warmup_slots: int | None = None
    debug: bool = False

    def __post_init__(self):
        if (self.horizon_slots is None) == (self.target_cycles is None):
            raise ValueError("set exactly one of horizon_slots and target_cycles")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.horizon_slots is not None and self.horizon_slots < 1:
            raise ValueError("horizon_slots must be >= 1")
        if self.target_cycles is not None and self.target_cycles < 1:
            raise ValueError("target_cycles must be >= 1")
        if self.warmup_slots is None:
            default = 0 if self.horizon_slots is None else min(1000, self.horizon_slots // 10)
            object.__setattr__(self, "warmup_slots", default)
        if self.warmup_slots < 0:
            raise ValueError("warmup_slots must be >= 0")
        if self.horizon_slots is not None and self.warmup_slots >= self.horizon_slots:
            raise ValueError("warmup_slots must be smaller than horizon_slots")


@dataclass
class SimulationReport:
    seed: int
    slots_run: int
    warmup_slots: int
    measured_slots: int
    cycles_completed: int
    partial_cycle_slots: int
    empirical_update_rate: float
    empirical_nsaoi: float
    empirical_mse: float
    mean_cycle_length: float
    stderr_update_rate: float
    stderr_nsaoi: float
    stderr_mse: float
    stderr_mean_cycle_length: float
    cycle_histogram: dict[int, int] = field(default_factory=dict)


def _run_chunk_py(u, p, pq, T, warmup, max_cycles, state, totals,
                  out_len, out_aoi, out_sq, out_start):
    """Advance the system over the uniforms ``u``.

    Returns ``(slots consumed, cycles completed in this chunk)``.
    """
    rel = state[_REL]
    age = state[_AGE]
    slot = state[_SLOT]
    cyc_start = state[_CYC_START]
    cyc_aoi = state[_CYC_AOI]
    cyc_sq = state[_CYC_SQ]
    done = state[_DONE]
    k = 0
    i = 0
    n = u.shape[0]
    while i < n:
        if max_cycles > 0 and done >= max_cycles:
            break
        x = u[i]
        if x < p:
            rel += 1
        elif x < pq:
            rel -= 1
        hit = rel == T or rel == -T
        if hit:
            rel = 0
        sq = rel * rel
        if slot >= warmup:
            totals[0] += age
            totals[1] += sq
            totals[2] += 1
        cyc_aoi += age
        cyc_sq += sq
        if hit:
            out_len[k] = age
            out_aoi[k] = cyc_aoi
            out_sq[k] = cyc_sq
            out_start[k] = cyc_start
            k += 1
            done += 1
            age = 1
            cyc_aoi = 0
            cyc_sq = 0
            cyc_start = slot + 1
        else:
            age += 1
        slot += 1
        i += 1
    state[_REL] = rel
    state[_AGE] = age
    state[_SLOT] = slot
    state[_CYC_START] = cyc_start
    state[_CYC_AOI] = cyc_aoi
    state[_CYC_SQ] = cyc_sq
    state[_DONE] = done
    return i, k


_run_chunk = njit(cache=True, nogil=True)(_run_chunk_py) if njit else _run_chunk_py


class _CycleStats:
    """Running sums for the regenerative estimators."""

    def __init__(self):
        self.k = 0
        self.s = dict.fromkeys(("L", "LL", "Z", "ZZ", "ZL", "Y", "YY", "YL"), 0.0)
        self.hist = np.zeros(0, dtype=np.int64)
        self.cycles = 0

    def add(self, length, aoi, sq, start, warmup):
        counts = np.bincount(length)
        if len(counts) > len(self.hist):
            counts[: len(self.hist)] += self.hist
            self.hist = counts
        else:
            self.hist[: len(counts)] += counts
        self.cycles += len(length)
        keep = start >= warmup
        L = length[keep].astype(float)
        Z = aoi[keep].astype(float)
        Y = sq[keep].astype(float)
        self.k += len(L)
        s = self.s
        for key, x, y in (("L", L, None), ("LL", L, L), ("Z", Z, None), ("ZZ", Z, Z),
                          ("ZL", Z, L), ("Y", Y, None), ("YY", Y, Y), ("YL", Y, L)):
            s[key] += float(x.sum() if y is None else x @ y)

    def ratio_stderr(self, num: str) -> float:
        """Standard error of ``sum num / sum L`` across cycles."""
        k, s = self.k, self.s
        if k < 2:
            return math.nan
        r = s[num] / s["L"]
        resid = s[num + num] - 2.0 * r * s[num + "L"] + r * r * s["LL"]
        var = max(resid, 0.0) / (k - 1)
        return math.sqrt(var / k) / (s["L"] / k)

    def mean_stderr(self) -> float:
        k, s = self.k, self.s
        if k < 2:
            return math.nan
        mean = s["L"] / k
        var = max(s["LL"] - k * mean * mean, 0.0) / (k - 1)
        return math.sqrt(var / k)


def _thresholds(params: WalkParams) -> tuple[float, float]:
    if params.hold == 0.0:
        # no holding: p + q may round below 1, so close the second branch at 2
        return params.p, 2.0
    return params.p, params.p + params.q


def simulate(config: SimConfig) -> SimulationReport:
    params = config.params
    rng = np.random.Generator(np.random.PCG64(int(config.seed)))
    warmup = int(config.warmup_slots)
    slot_mode = config.horizon_slots is not None
    budget = config.horizon_slots if slot_mode else -1
    max_cycles = 0 if slot_mode else int(config.target_cycles)
    state = np.zeros(7, dtype=np.int64)
    state[_AGE] = 1
    totals = np.zeros(3, dtype=np.int64)
    bufs = [np.empty(CHUNK, dtype=np.int64) for _ in range(4)]
    stats = _CycleStats()
    p, pq = _thresholds(params)
    while True:
        if slot_mode:
            remaining = budget - int(state[_SLOT])
            if remaining <= 0:
                break
            u = rng.random(min(CHUNK, remaining))
        else:
            if state[_DONE] >= max_cycles:
                break
            u = rng.random(CHUNK)
        _, k = _run_chunk(u, p, pq, params.T, warmup, max_cycles, state, totals, *bufs)
        length, aoi, sq, start = (b[:k] for b in bufs)
        if config.debug:
            _check_cycles(params, length, aoi, sq)
        stats.add(length, aoi, sq, start, warmup)

    slots = int(state[_SLOT])
    cycles = int(state[_DONE])
    measured = int(totals[2])
    mean_len = stats.s["L"] / stats.k if stats.k else math.nan
    se_len = stats.mean_stderr()
    hist = {int(l): int(c) for l, c in enumerate(stats.hist) if c}
    if config.debug and sum(hist.values()) != cycles:
        raise ConsistencyError("histogram does not account for every cycle")
    return SimulationReport(
        seed=int(config.seed),
        slots_run=slots,
        warmup_slots=warmup,
        measured_slots=measured,
        cycles_completed=cycles,
        partial_cycle_slots=slots - int(stats.hist @ np.arange(len(stats.hist))),
        empirical_update_rate=cycles / slots,
        empirical_nsaoi=int(totals[0]) / measured,
        empirical_mse=int(totals[1]) / measured,
        mean_cycle_length=mean_len,
        stderr_update_rate=se_len / mean_len**2 if stats.k else math.nan,
        stderr_nsaoi=stats.ratio_stderr("Z"),
        stderr_mse=stats.ratio_stderr("Y"),
        stderr_mean_cycle_length=se_len,
        cycle_histogram=hist,
    )


def _check_cycles(params, length, aoi, sq):
    if np.any(2 * aoi != length * (length + 1)):
        raise ConsistencyError("AoI within a cycle is not 1, 2, ..., l")
    if np.any(length < params.T):
        raise ConsistencyError("cycle shorter than T")
    if np.any(sq > length * (params.T - 1) ** 2):
        raise ConsistencyError("error exceeded (T-1)^2 inside a cycle")


def trace(params: WalkParams, seed: int, n_slots: int) -> dict[str, np.ndarray]:
    """Per-slot reference path in absolute coordinates.

    Plain Python, uses the same uniform stream as :func:`simulate`. Returns
    the sensor state ``S``, the destination estimate ``S_hat``, the AoI
    ``h`` and the update indicator ``u`` for each slot; ``S[0] = S_hat[0]
    = 0`` is the state reported at slot 0 and is not part of the output.
    """
    u = np.random.Generator(np.random.PCG64(int(seed))).random(n_slots)
    p, pq = _thresholds(params)
    S, est, age = 0, 0, 1
    out = {k: np.empty(n_slots, dtype=np.int64) for k in ("S", "S_hat", "h", "u")}
    for n in range(n_slots):
        if u[n] < p:
            S += 1
        elif u[n] < pq:
            S -= 1
        upd = abs(S - est) == params.T
        if upd:
            est = S
        out["S"][n] = S
        out["S_hat"][n] = est
        out["h"][n] = age
        out["u"][n] = upd
        age = 1 if upd else age + 1
    return out


def empirical_cycle_pmf(report: SimulationReport) -> dict[int, float]:
    """Normalised cycle-length histogram, keyed by length."""
    total = sum(report.cycle_histogram.values())
    if total == 0:
        raise EmptyReport("report has no completed cycles")
    return {l: c / total for l, c in sorted(report.cycle_histogram.items())}


def replicate(config: SimConfig, replications: int) -> list[SimulationReport]:
    """Independent runs with seeds derived from ``config.seed``.

    Child seeds come from ``SeedSequence(seed).generate_state``; results are
    ordered by replication index.
    """
    seeds = np.random.SeedSequence(int(config.seed)).generate_state(replications, dtype=np.uint64)
    fields = {k: getattr(config, k) for k in ("params", "horizon_slots", "target_cycles",
                                              "warmup_slots", "debug")}
    return [simulate(SimConfig(seed=int(s), **fields)) for s in seeds]


AGGREGATED = ("empirical_update_rate", "empirical_nsaoi", "empirical_mse", "mean_cycle_length")


def aggregate(reports: list[SimulationReport]) -> dict[str, float]:
    """Mean of each per-run estimate and its standard error across runs."""
    out = {"replications": len(reports)}
    for name in AGGREGATED:
        x = np.array([getattr(r, name) for r in reports])
        out[name] = float(x.mean())
        out["stderr_" + name] = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else math.nan
    return out
