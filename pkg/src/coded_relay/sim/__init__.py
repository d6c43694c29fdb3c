"""Slotted two-hop relay simulation (coded and uncoded schemes)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .config import CHUNK, ConfigError, SimConfig
from .engine import (EVENT_COLUMNS, HAVE_COMPILED, PROBE_COLUMNS, RECORD_COLUMNS, RunOutput,
                     Simulation, detect_instability, resolve_backend, run_output)

__all__ = [
    "CHUNK", "ConfigError", "SimConfig", "Simulation", "RunOutput", "HAVE_COMPILED",
    "EVENT_COLUMNS", "RECORD_COLUMNS", "PROBE_COLUMNS", "ProbeResult",
    "sim_new", "slot", "run", "run_output", "probe_phi", "probe_eta", "probe_run",
    "detect_instability", "resolve_backend", "write_event_log", "format_event_log",
]


def sim_new(config: SimConfig, backend: str | None = None) -> Simulation:
    return Simulation(config, backend)


def slot(sim: Simulation) -> Simulation:
    """Advance one slot in place; returns the same object for chaining."""
    sim.advance(1)
    return sim


def run(config: SimConfig, backend: str | None = None):
    from ..metrics import summarize

    return summarize(run_output(config, backend))


# -- probes -----------------------------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    pair: int
    gen: int
    t1: int
    t2: int
    M: int  # distinct receivers from the source in [t1, t2], destination included
    M_relays: int
    holders: int  # nodes holding a version at t2
    phi: float
    eta: float  # share of scheduled senders in [t3, t4) that received from the source
    eta_hold: float  # share of those senders still holding a version
    senders: int
    complete: bool


def probe_config(config: SimConfig, samples: int) -> SimConfig:
    """Extend the horizon so that ``samples`` tags can finish."""
    if config.scheme != "2hrrsc":
        raise ConfigError("probes need the coded scheme")
    from .config import probe_timing
    from .. import scheduler

    spec = scheduler.lattice(config.delta)
    cells = scheduler.active_cells(config.side, spec, ragged=config.ragged)
    ts, mix = probe_timing(config, len(cells) / config.n)
    need = config.warmup_slots + 4 * config.n + ts + mix + config.probe_window_slots + 1
    horizon = max(config.horizon_slots, need)
    return config.replace(probe_samples=samples, horizon=horizon, drain=0)


def probe_run(config: SimConfig, samples: int, backend: str | None = None) -> tuple[list[ProbeResult], int]:
    """(finished probe results, number of skipped unfinished tags)."""
    out = run_output(probe_config(config, samples), backend)
    n = config.n
    res, skipped = [], 0
    for row in out.probes:
        d = dict(zip(PROBE_COLUMNS, (int(x) for x in row)))
        if not d["complete"] or d["holders_t2"] < 0:
            skipped += 1
            continue
        tot = d["eta_total"]
        res.append(ProbeResult(
            pair=d["pair"], gen=d["gen"], t1=d["t1"], t2=d["t2"], M=d["M"],
            M_relays=d["M_relays"], holders=d["holders_t2"], phi=d["M"] / n,
            eta=d["eta_hits"] / tot if tot else math.nan,
            eta_hold=d["eta_hold_hits"] / tot if tot else math.nan,
            senders=tot, complete=True,
        ))
    return res, skipped


def probe_phi(config: SimConfig, samples: int, backend: str | None = None) -> list[ProbeResult]:
    return probe_run(config, samples, backend)[0]


def probe_eta(config: SimConfig, samples: int, backend: str | None = None) -> list[float]:
    return [r.eta for r in probe_phi(config, samples, backend)]


# -- event log --------------------------------------------------------------


def format_event_log(events: np.ndarray) -> str:
    """One line per transmission, space separated, header line first."""
    lines = ["# " + " ".join(EVENT_COLUMNS)]
    lines.extend(" ".join(str(int(x)) for x in row) for row in events)
    return "\n".join(lines) + "\n"


def write_event_log(events: np.ndarray, fh: IO[str]) -> None:
    fh.write(format_event_log(events))
