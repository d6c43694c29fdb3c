"""Throughput, delay, per-generation delay components and scaling fits.

All estimators work on the generation records produced by a run
(``RunOutput.records``, columns ``pair, gen, formation, start, last_send,
first_arrival, decode``).  A generation is *measured* when its start slot
lies in the window ``[warmup, horizon)``; every one of its m packets shares
that start and that decode slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

PAIR, GEN, FORM, START, LAST, FIRST, DECODE = range(7)


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class DelayRecord:
    pair: int
    gen: int
    packet: int
    start_slot: int
    decode_slot: int
    formation_slot: int = -1

    def __post_init__(self):
        if self.decode_slot < self.start_slot:
            raise MetricsError("decode before start")

    @property
    def delay(self) -> int:
        return self.decode_slot - self.start_slot


@dataclass
class ThroughputEstimate:
    counts: np.ndarray  # decoded packets per pair inside the window
    window: int
    mean: float

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class DelayStats:
    mean: float
    p50: float
    p95: float
    samples: int
    pairs: int


@dataclass
class Decomposition:
    send_span: np.ndarray
    relay_wait: np.ndarray  # proxy, see ``decompose``
    collect_span: np.ndarray

    def means(self) -> tuple[float, float, float]:
        def _m(a):
            return float(a.mean()) if len(a) else float("nan")

        return _m(self.send_span), _m(self.relay_wait), _m(self.collect_span)


@dataclass
class RunMetrics:
    scheme: str
    n: int
    m: int
    seed: int
    throughput: ThroughputEstimate
    delay: DelayStats | None
    decomposition: Decomposition | None
    unstable: bool
    censored: int
    buffered: int
    decoded_generations: int
    mismatches: int
    duplicates: int
    end_slot: int
    wall_seconds: float
    extra: dict = field(default_factory=dict)

    @property
    def mean_delay(self) -> float:
        return self.delay.mean if self.delay else float("nan")


def _window(output) -> tuple[int, int]:
    cfg = output.config
    return cfg.warmup_slots, cfg.horizon_slots


def measured(output) -> np.ndarray:
    """Records of generations that started inside the measurement window."""
    rec = output.records
    lo, hi = _window(output)
    return rec[(rec[:, START] >= lo) & (rec[:, START] < hi)]


def throughput(output) -> ThroughputEstimate:
    """Decoded packets per slot per pair over the measurement window.

    Counts decodes whose slot falls in the window, m packets each, so that
    ``mean * window * n`` is exactly the number of packets decoded there.
    """
    lo, hi = _window(output)
    n = output.config.n
    win = hi - lo
    rec = output.records
    hit = (rec[:, DECODE] >= lo) & (rec[:, DECODE] < hi)
    counts = np.bincount(rec[hit, PAIR], minlength=n) * output.m
    mean = float(counts.sum()) / (win * n) if win > 0 else 0.0
    return ThroughputEstimate(counts=counts, window=win, mean=mean)


def delay_records(output) -> list[DelayRecord]:
    """Expand decoded, measured generations into one record per packet."""
    out = []
    for row in measured(output):
        if row[DECODE] < 0:
            continue
        for j in range(1, output.m + 1):
            out.append(DelayRecord(int(row[PAIR]), int(row[GEN]), j, int(row[START]),
                                   int(row[DECODE]), int(row[FORM])))
    return out


def delay(records) -> DelayStats:
    """Per-pair mean delay averaged over pairs, plus quantiles over records.

    ``records`` is a sequence of ``DelayRecord`` or an array with columns
    (pair, start, decode[, weight]).  A weight column lets one row stand for
    the m packets of a generation.
    """
    if isinstance(records, np.ndarray):
        arr = records
    else:
        arr = np.array([(r.pair, r.start_slot, r.decode_slot, 1) for r in records],
                       dtype=np.int64).reshape(-1, 4)
    if len(arr) == 0:
        raise MetricsError("no delay records")
    pair = arr[:, 0].astype(np.int64)
    d = (arr[:, 2] - arr[:, 1]).astype(float)
    w = arr[:, 3].astype(float) if arr.shape[1] > 3 else np.ones(len(arr))
    if np.any(d < 0):
        raise MetricsError("decode before start")
    uniq, inv = np.unique(pair, return_inverse=True)
    per_pair = np.bincount(inv, weights=d * w) / np.bincount(inv, weights=w)
    order = np.argsort(d, kind="stable")
    cw = np.cumsum(w[order])

    def q(frac):
        return float(d[order][np.searchsorted(cw, frac * cw[-1])])

    return DelayStats(mean=float(per_pair.mean()), p50=q(0.5), p95=q(0.95),
                      samples=int(w.sum()), pairs=len(uniq))


def decompose(output) -> Decomposition:
    """Per-generation spans for measured generations.

    send_span: first to n-th version emission; collect_span: first arrival
    at the destination to decode.  relay_wait is a proxy for the waiting
    between the two: time from the n-th emission to the first arrival,
    clipped at zero (arrivals usually begin while the source is still
    sending).
    """
    rec = output.records
    if rec is None:
        raise MetricsError("run output has no records")
    rec = measured(output)
    done = rec[rec[:, DECODE] >= 0]
    sent = rec[rec[:, LAST] >= 0]
    both = done[done[:, LAST] >= 0]
    send = (sent[:, LAST] - sent[:, START]).astype(np.int64)
    wait = np.maximum(0, both[:, FIRST] - both[:, LAST]).astype(np.int64)
    collect = (done[:, DECODE] - done[:, FIRST]).astype(np.int64)
    return Decomposition(send_span=send, relay_wait=wait, collect_span=collect)


def summarize(output) -> RunMetrics:
    cfg = output.config
    rec = measured(output)
    done = rec[rec[:, DECODE] >= 0]
    stats = None
    if len(done):
        arr = np.column_stack([done[:, PAIR], done[:, START], done[:, DECODE],
                               np.full(len(done), output.m)])
        stats = delay(arr)
    return RunMetrics(
        scheme=cfg.scheme,
        n=cfg.n,
        m=output.m,
        seed=cfg.seed,
        throughput=throughput(output),
        delay=stats,
        decomposition=decompose(output) if len(rec) else None,
        unstable=output.unstable,
        censored=output.censored,
        buffered=int(output.counters["buffered"]),
        decoded_generations=int(output.counters["decodes"]),
        mismatches=int(output.counters["mismatches"]),
        duplicates=int(output.counters["duplicates"]),
        end_slot=output.end_slot,
        wall_seconds=output.wall_seconds,
    )


# -- scaling fits -----------------------------------------------------------

MODELS = ("n", "n_log_n")


@dataclass
class ScalingFit:
    n: np.ndarray
    delay: np.ndarray
    coef: dict[str, float]
    r2: dict[str, float]
    preferred: str


def _through_origin(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    a = float(x @ y / (x @ x))
    resid = y - a * x
    sst = float(((y - y.mean()) ** 2).sum())
    sse = float(resid @ resid)
    if sst == 0.0:
        r2 = 1.0 if sse == 0.0 else 0.0
    else:
        r2 = 1.0 - sse / sst
    return a, min(1.0, max(0.0, r2))


def fit_scaling(points: Iterable[Sequence[float]]) -> ScalingFit:
    """Fit D = a*n and D = a*n*ln(n) through the origin; higher R^2 wins."""
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(pts) < 3 or len(np.unique(pts[:, 0])) < 3:
        raise MetricsError("need at least 3 points with distinct n")
    if np.any(pts[:, 0] <= 1) or not np.all(np.isfinite(pts)):
        raise MetricsError("degenerate points")
    n, y = pts[:, 0], pts[:, 1]
    feats = {"n": n, "n_log_n": n * np.log(n)}
    coef, r2 = {}, {}
    for name, x in feats.items():
        coef[name], r2[name] = _through_origin(x, y)
    best = max(MODELS, key=lambda k: (r2[k], k == "n"))
    return ScalingFit(n=n, delay=y, coef=coef, r2=r2, preferred=best)


def linear_r2(x: Sequence[float], y: Sequence[float]) -> float:
    """Ordinary least squares (with intercept) coefficient of determination."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    sst = float(((y - y.mean()) ** 2).sum())
    return 1.0 - float(resid @ resid) / sst if sst > 0 else 1.0


def mean_ci(values: Sequence[float], z: float = 1.96) -> tuple[float, float]:
    """Mean and normal-approximation half width across seeds."""
    v = np.asarray([x for x in values if not math.isnan(x)], dtype=float)
    if len(v) == 0:
        return float("nan"), float("nan")
    if len(v) == 1:
        return float(v[0]), float("nan")
    return float(v.mean()), float(z * v.std(ddof=1) / math.sqrt(len(v)))
