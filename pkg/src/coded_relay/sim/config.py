"""Run configuration and the flat setup record handed to a slot engine."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .. import scheduler
from ..mobility import side_of

SCHEMES = ("2hrrsc", "2hop")
RELAY_POLICIES = ("scan", "strict")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    n: int = 225
    delta: float = scheduler.DEFAULT_DELTA
    p_s: float = 0.5
    gen_ratio: float = 1 / 9
    scheme: str = "2hrrsc"
    horizon: int | None = None
    warmup: int | None = None
    seed: int = 1
    c0: float = scheduler.DEFAULT_C0
    relay_policy: str = "scan"
    ragged: bool = False
    drain: int | None = None
    verify: bool = True
    event_log: bool = False
    probe_samples: int = 0
    probe_window: int | None = None
    backend: str = "auto"

    def __post_init__(self):
        try:
            L = side_of(self.n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.n < 4:
            raise ConfigError("need at least 4 nodes")
        if not 0.0 < self.p_s < 1.0:
            raise ConfigError(f"p_s must lie in (0, 1), got {self.p_s}")
        if not 0.0 < self.gen_ratio <= 1.0:
            raise ConfigError(f"gen_ratio must lie in (0, 1], got {self.gen_ratio}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if self.relay_policy not in RELAY_POLICIES:
            raise ConfigError(f"relay_policy must be one of {RELAY_POLICIES}")
        if self.delta < 0:
            raise ConfigError("delta must be >= 0")
        if self.horizon_slots < self.warmup_slots or self.warmup_slots < 0:
            raise ConfigError("need horizon >= warmup >= 0")
        if self.probe_samples < 0:
            raise ConfigError("probe_samples must be >= 0")
        if self.backend not in ("auto", "python", "compiled"):
            raise ConfigError("backend must be auto, python or compiled")
        try:
            scheduler.active_cells(L, scheduler.lattice(self.delta), ragged=self.ragged)
        except scheduler.ScheduleError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def side(self) -> int:
        return side_of(self.n)

    @property
    def m(self) -> int:
        if self.scheme == "2hop":
            return 1
        return max(1, min(self.n, round(self.gen_ratio * self.n)))

    @property
    def horizon_slots(self) -> int:
        return 400 * self.n if self.horizon is None else int(self.horizon)

    @property
    def warmup_slots(self) -> int:
        return 40 * self.n if self.warmup is None else int(self.warmup)

    @property
    def drain_slots(self) -> int:
        return self.horizon_slots if self.drain is None else int(self.drain)

    @property
    def probe_window_slots(self) -> int:
        return self.n if self.probe_window is None else int(self.probe_window)

    def replace(self, **changes) -> "SimConfig":
        d = asdict(self)
        d.update(changes)
        return SimConfig(**d)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


# Draw buffers are produced in blocks of this many slots; part of the
# determinism contract, since the block size fixes how the stream is split.
CHUNK = 512


@dataclass
class EngineSetup:
    n: int
    L: int
    nbr: np.ndarray
    act_idx: np.ndarray
    cell_of_active: np.ndarray
    dest: np.ndarray
    src_of: np.ndarray
    pos0: np.ndarray
    scheme: int
    relay_policy: int
    p_s: float
    m: int
    q: int
    gf_exp: np.ndarray
    gf_log: np.ndarray
    payload_key: int
    verify: bool
    event_log: bool
    warmup: int
    horizon: int
    sample_every: int
    probe_samples: int = 0
    probe_ts: int = 0
    probe_mix: int = 0
    probe_window: int = 0
    extra: dict = field(default_factory=dict)


def probe_timing(cfg: SimConfig, active_fraction: float) -> tuple[int, int]:
    """(t_s slots, mixing slots) used to place the probe checkpoints."""
    ts = scheduler.t_s(cfg.n, cfg.p_s, cfg.delta, theta_prime=active_fraction)
    return int(round(ts)), int(math.ceil(cfg.c0 * math.log(cfg.n)))
