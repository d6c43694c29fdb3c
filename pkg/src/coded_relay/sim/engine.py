"""Simulation driver: builds the initial state, feeds draw buffers to a slot
engine (compiled or pure Python) and packages the raw run output."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .. import gf, mobility, scheduler
from .config import CHUNK, ConfigError, EngineSetup, SimConfig, probe_timing
from ._pyengine import PyEngine

try:
    from ._cengine import CEngine
except ImportError:  # extension not built
    CEngine = None

HAVE_COMPILED = CEngine is not None

EVENT_COLUMNS = ("slot", "cell", "sender", "receiver", "role", "pair", "gen", "k", "decoded")
RECORD_COLUMNS = ("pair", "gen", "formation", "start", "last_send", "first_arrival", "decode")
PROBE_COLUMNS = ("pair", "gen", "t1", "t2", "t3", "t4", "M", "M_relays", "holders_t2",
                 "eta_hits", "eta_total", "eta_hold_hits", "complete")


def resolve_backend(name: str = "auto") -> str:
    if name == "auto":
        name = os.environ.get("CODED_RELAY_BACKEND", "auto")
    if name == "auto":
        return "compiled" if HAVE_COMPILED else "python"
    if name == "compiled" and not HAVE_COMPILED:
        raise ConfigError("compiled engine requested but the extension is not built")
    if name not in ("python", "compiled"):
        raise ConfigError(f"unknown backend {name!r}")
    return name


def derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform permutation without fixed points, by rejection."""
    ident = np.arange(n)
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == ident):
            return perm


class Simulation:
    """One run's full state.  ``advance`` moves the clock forward by whole slots."""

    def __init__(self, cfg: SimConfig, backend: str | None = None):
        self.cfg = cfg
        n, L = cfg.n, cfg.side
        spec = scheduler.lattice(cfg.delta)
        cells = scheduler.active_cells(L, spec, ragged=cfg.ragged)
        self.cells = cells
        self.active_fraction = len(cells) / n
        act_idx = scheduler.active_index(L, cells)

        root = np.random.SeedSequence(cfg.seed)
        init_ss, dyn_ss, pay_ss = root.spawn(3)
        init_rng = np.random.default_rng(init_ss)
        walkers = mobility.init_uniform(n, rng=init_rng)
        dest = derangement(n, init_rng)
        src_of = np.empty(n, dtype=np.int64)
        src_of[dest] = np.arange(n)
        self.rng = np.random.default_rng(dyn_ss)
        self.dest = dest

        field_ = gf.smallest_field_for(n)
        ts_slots, mix_slots = probe_timing(cfg, self.active_fraction)
        horizon, warmup = cfg.horizon_slots, cfg.warmup_slots
        self.setup = EngineSetup(
            n=n,
            L=L,
            nbr=mobility.neighbor_table(L),
            act_idx=act_idx,
            cell_of_active=np.array([i * L + j for i, j in cells], dtype=np.int64),
            dest=dest.astype(np.int64),
            src_of=src_of,
            pos0=walkers.positions.copy(),
            scheme=0 if cfg.scheme == "2hrrsc" else 1,
            relay_policy=0 if cfg.relay_policy == "scan" else 1,
            p_s=cfg.p_s,
            m=cfg.m,
            q=field_.q,
            gf_exp=np.ascontiguousarray(field_.exp, dtype=np.int64),
            gf_log=np.ascontiguousarray(field_.log, dtype=np.int64),
            payload_key=int(pay_ss.generate_state(1, np.uint64)[0]),
            verify=cfg.verify,
            event_log=cfg.event_log,
            warmup=warmup,
            horizon=horizon,
            sample_every=max(1, (horizon - warmup) // 256),
            probe_samples=cfg.probe_samples if cfg.scheme == "2hrrsc" else 0,
            probe_ts=ts_slots,
            probe_mix=mix_slots,
            probe_window=cfg.probe_window_slots,
        )
        self.backend = resolve_backend(backend or cfg.backend)
        self.engine = CEngine(self.setup) if self.backend == "compiled" else PyEngine(self.setup)
        self._moves = self._draws = None
        self._cursor = CHUNK

    @property
    def clock(self) -> int:
        return self.engine.clock

    def _refill(self) -> None:
        n, A = self.cfg.n, len(self.cells)
        self._moves = self.rng.integers(0, 4, size=(CHUNK, n), dtype=np.uint8)
        self._draws = self.rng.random((CHUNK, A, 3))
        self._cursor = 0

    def advance(self, slots: int) -> None:
        while slots > 0:
            if self._cursor >= CHUNK:
                self._refill()
            k = min(slots, CHUNK - self._cursor)
            c = self._cursor
            self.engine.advance(self._moves[c : c + k], self._draws[c : c + k], k)
            self._cursor += k
            slots -= k


@dataclass
class RunOutput:
    config: SimConfig
    backend: str
    m: int
    active_fraction: float
    end_slot: int
    records: np.ndarray
    counters: dict
    backlog: np.ndarray
    events: np.ndarray | None
    probes: np.ndarray
    censored: int
    unstable: bool
    wall_seconds: float
    extra: dict = field(default_factory=dict)


def detect_instability(backlog: np.ndarray, n: int) -> bool:
    """Backlog growth test over the measurement window.

    ``backlog`` rows are (slot, pending, buffered) sampled uniformly over the
    window; pending counts started-but-undecoded generations (coded) or
    undelivered packets (uncoded).  With m2, m3, m4 the per-pair pending
    means over the last three quarters and thr = max(0.5, 0.2 * m2), the
    run is flagged when m4 - m2 > thr and each step m3 - m2, m4 - m3
    exceeds thr / 4.  A stable system has a stationary backlog; asking for
    growth in both steps keeps a single jump (all pairs starting their next
    generation together when a generation lasts about a window) unflagged.
    """
    if len(backlog) < 8:
        return False
    per_pair = backlog[:, 1] / n
    q = len(per_pair) // 4
    m2 = per_pair[q : 2 * q].mean()
    m3 = per_pair[2 * q : 3 * q].mean()
    m4 = per_pair[3 * q :].mean()
    thr = max(0.5, 0.2 * m2)
    return bool(m4 - m2 > thr and m3 - m2 > thr / 4 and m4 - m3 > thr / 4)


def run_output(cfg: SimConfig, backend: str | None = None) -> RunOutput:
    """Simulate warmup + measurement slots, then drain measured generations."""
    t0 = time.perf_counter()
    sim = Simulation(cfg, backend)
    sim.advance(cfg.horizon_slots)
    budget = cfg.drain_slots
    while sim.engine.window_open > 0 and budget > 0:
        k = min(CHUNK, budget)
        sim.advance(k)
        budget -= k
    eng = sim.engine
    backlog = eng.backlog_array()
    return RunOutput(
        config=cfg,
        backend=sim.backend,
        m=cfg.m,
        active_fraction=sim.active_fraction,
        end_slot=eng.clock,
        records=eng.records(),
        counters=eng.counters(),
        backlog=backlog,
        events=eng.event_array() if cfg.event_log else None,
        probes=eng.probe_array(),
        censored=int(eng.window_open),
        unstable=detect_instability(backlog, cfg.n),
        wall_seconds=time.perf_counter() - t0,
    )
