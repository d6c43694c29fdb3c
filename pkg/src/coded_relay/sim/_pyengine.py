"""Pure-Python slot engine.

This is the reference semantics; the compiled engine in ``_cengine.pyx``
mirrors it statement for statement and must produce identical outputs for
identical draw buffers.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .. import gf, rs
from .config import EngineSetup
from .payload import payload_symbols

# generation record columns
FORM, START, LAST, FIRST, DECODE = range(5)


class PyEngine:
    backend = "python"

    def __init__(self, s: EngineSetup):
        self.s = s
        n = self.n = s.n
        self.pos = np.array(s.pos0, dtype=np.int64)
        self.nbr = s.nbr
        self.act_idx = s.act_idx
        self.cell_of_active = s.cell_of_active.tolist()
        self.n_active = len(self.cell_of_active)
        self.dest = [int(x) for x in s.dest]
        self.src_of = [int(x) for x in s.src_of]
        self.coded = s.scheme == 0
        self.strict = s.relay_policy == 1
        self.m = s.m
        self.clock = 0

        self.tx_source = 0
        self.tx_relay = 0
        self.scheduled = 0
        self.decodes = 0
        self.mismatches = 0
        self.duplicates = 0
        self.buffered = 0
        self.pending = 0
        self.window_open = 0

        self.queues: dict[tuple[int, int], list] = {}
        self.rec: list[list[list[int]]] = [[] for _ in range(n)]
        self.src_gen = [1] * n
        self.src_k = [1] * n
        self.events: list[tuple] = []
        self.backlog: list[tuple[int, int, int]] = []

        if self.coded:
            field = gf.field_new(int(np.log2(s.q)))
            self.code = rs.code_new(self.m, n, field)
            self.codeword = [self._encode(u, 1) for u in range(n)]
            for u in range(n):
                self.rec[u].append([0, -1, -1, -1, -1])
            self.recv: list[dict[int, dict[int, int]]] = [{} for _ in range(n)]
            self.decoded: list[set[int]] = [set() for _ in range(n)]
            self.low: list[int] = [1] * n

        self.tags: list[list] = []
        self.tag_of: dict[tuple[int, int], list] = {}
        self.open_tags: list[list] = []

    # -- source content -------------------------------------------------
    def _payload(self, u: int, g: int) -> np.ndarray:
        return payload_symbols(self.s.payload_key, u, g, self.m, self.s.q)

    def _encode(self, u: int, g: int) -> list[int]:
        return rs.encode_array(self.code, self._payload(u, g)).tolist()

    # -- 2HRRSC ---------------------------------------------------------
    def _is_decoded(self, p: int, g: int) -> bool:
        return g < self.low[p] or g in self.decoded[p]

    def _deliver(self, p: int, g: int, k: int, sym: int, t: int) -> int:
        if self._is_decoded(p, g):
            return 0
        got = self.recv[p].setdefault(g, {})
        if k in got:
            self.duplicates += 1
            return 0
        got[k] = sym
        r = self.rec[p][g - 1]
        if r[FIRST] < 0:
            r[FIRST] = t
        if len(got) < self.m:
            return 0
        if self.s.verify:
            out = rs.decode(self.code, got)
            if out != self._payload(p, g).tolist():
                self.mismatches += 1
        del self.recv[p][g]
        dec = self.decoded[p]
        dec.add(g)
        low = self.low[p]
        while low in dec:
            dec.discard(low)
            low += 1
        self.low[p] = low
        r[DECODE] = t
        self.decodes += 1
        self.pending -= 1
        if self.s.warmup <= r[START] < self.s.horizon:
            self.window_open -= 1
        return 1

    def _source_coded(self, t: int, cell: int, u: int, v: int) -> None:
        g = self.src_gen[u]
        k = self.src_k[u]
        sym = self.codeword[u][k - 1]
        r = self.rec[u][g - 1]
        if k == 1:
            r[START] = t
            self.pending += 1
            if self.s.warmup <= t < self.s.horizon:
                self.window_open += 1
            if t >= self.s.warmup and len(self.tags) < self.s.probe_samples:
                self._open_tag(u, g, t)
        if k == self.n:
            r[LAST] = t
            self.src_gen[u] = g + 1
            self.src_k[u] = 1
            self.codeword[u] = self._encode(u, g + 1)
            self.rec[u].append([t, -1, -1, -1, -1])
        else:
            self.src_k[u] = k + 1
        tag = self.tag_of.get((u, g))
        if tag is not None and t <= tag[3]:
            tag[6].add(v)
        if v == self.dest[u]:
            dec = self._deliver(u, g, k, sym, t)
        else:
            self.queues.setdefault((v, u), []).append((g, k, sym))
            self.buffered += 1
            dec = 0
        self.tx_source += 1
        if self.s.event_log:
            self.events.append((t, cell, u, v, 0, u, g, k, dec))

    def _relay_coded(self, t: int, cell: int, u: int, v: int) -> None:
        p = self.src_of[v]
        if p == u:
            return
        Q = self.queues.get((u, p))
        if not Q:
            return
        low = self.low[p]
        dec = self.decoded[p]
        held = self.recv[p]
        keep = []
        chosen = None
        for e in Q:
            g = e[0]
            if g < low or g in dec:
                continue
            if e[1] in held.get(g, ()):
                continue
            if chosen is None and (not self.strict or g == low):
                chosen = e
                continue
            keep.append(e)
        self.buffered -= len(Q) - len(keep)
        if keep:
            self.queues[(u, p)] = keep
        else:
            del self.queues[(u, p)]
        if chosen is None:
            return
        g, k, sym = chosen
        d = self._deliver(p, g, k, sym, t)
        self.tx_relay += 1
        if self.s.event_log:
            self.events.append((t, cell, u, v, 1, p, g, k, d))

    # -- uncoded 2-hop --------------------------------------------------
    def _deliver_plain(self, p: int, seq: int, t: int) -> None:
        r = self.rec[p][seq - 1]
        r[FIRST] = r[DECODE] = t
        self.decodes += 1
        self.pending -= 1
        if self.s.warmup <= r[START] < self.s.horizon:
            self.window_open -= 1

    def _source_plain(self, t: int, cell: int, u: int, v: int) -> None:
        seq = self.src_gen[u]
        self.src_gen[u] = seq + 1
        self.rec[u].append([t, t, t, -1, -1])
        self.pending += 1
        if self.s.warmup <= t < self.s.horizon:
            self.window_open += 1
        if v == self.dest[u]:
            self._deliver_plain(u, seq, t)
            dec = 1
        else:
            q = self.queues.get((v, u))
            if q is None:
                q = self.queues[(v, u)] = deque()
            q.append(seq)
            self.buffered += 1
            dec = 0
        self.tx_source += 1
        if self.s.event_log:
            self.events.append((t, cell, u, v, 0, u, seq, 0, dec))

    def _relay_plain(self, t: int, cell: int, u: int, v: int) -> None:
        p = self.src_of[v]
        q = self.queues.get((u, p))
        if not q:
            return
        seq = q.popleft()
        self.buffered -= 1
        self._deliver_plain(p, seq, t)
        self.tx_relay += 1
        if self.s.event_log:
            self.events.append((t, cell, u, v, 1, p, seq, 0, 1))

    # -- probes -----------------------------------------------------------
    def _open_tag(self, u: int, g: int, t: int) -> None:
        s = self.s
        t2 = t + s.probe_ts
        t3 = t2 + s.probe_mix
        # pair, gen, t1, t2, t3, t4, receivers, holders_t2, hits, total, hold_hits, done
        tag = [u, g, t, t2, t3, t3 + s.probe_window, set(), -1, 0, 0, 0, 0]
        self.tags.append(tag)
        self.tag_of[(u, g)] = tag
        self.open_tags.append(tag)

    def _holds(self, w: int, p: int, g: int) -> bool:
        if w == p:
            return False
        if w == self.dest[p]:
            return self.rec[p][g - 1][FIRST] >= 0
        return any(e[0] == g for e in self.queues.get((w, p), ()))

    def _probe_slot(self, t: int, senders: list[int]) -> None:
        still = []
        for tag in self.open_tags:
            p, g = tag[0], tag[1]
            if t == tag[3]:
                tag[7] = sum(1 for w in range(self.n) if self._holds(w, p, g))
            if tag[4] <= t < tag[5]:
                for w in senders:
                    tag[9] += 1
                    if w in tag[6]:
                        tag[8] += 1
                    if self._holds(w, p, g):
                        tag[10] += 1
            if t + 1 >= tag[5]:
                tag[11] = 1
                del self.tag_of[(p, g)]
            else:
                still.append(tag)
        self.open_tags = still

    # -- main loop --------------------------------------------------------
    def advance(self, moves: np.ndarray, draws: np.ndarray, count: int) -> None:
        act_idx = self.act_idx
        A = self.n_active
        p_s = self.s.p_s
        if self.coded:
            src_act, rel_act = self._source_coded, self._relay_coded
        else:
            src_act, rel_act = self._source_plain, self._relay_plain
        warmup, horizon, every = self.s.warmup, self.s.horizon, self.s.sample_every
        for c in range(count):
            t = self.clock
            pos = self.pos
            rank = act_idx[pos]
            nodes = np.flatnonzero(rank >= 0)
            rk = rank[nodes]
            order = np.argsort(rk, kind="stable")
            nodes = nodes[order].tolist()
            counts = np.bincount(rk, minlength=A)
            starts = np.concatenate(([0], np.cumsum(counts))).tolist()
            senders = []
            dr = draws[c]
            for a in np.flatnonzero(counts >= 2).tolist():
                occ = nodes[starts[a] : starts[a + 1]]
                cnt = len(occ)
                u0, u1, u2 = dr[a]
                si = min(int(u0 * cnt), cnt - 1)
                ri = min(int(u1 * (cnt - 1)), cnt - 2)
                if ri >= si:
                    ri += 1
                u, v = occ[si], occ[ri]
                cell = self.cell_of_active[a]
                self.scheduled += 1
                senders.append(u)
                if u2 < p_s:
                    src_act(t, cell, u, v)
                else:
                    rel_act(t, cell, u, v)
            if self.open_tags:
                self._probe_slot(t, senders)
            if warmup <= t < horizon and (t - warmup) % every == 0:
                self.backlog.append((t, self.pending, self.buffered))
            self.pos = self.nbr[pos, moves[c]]
            self.clock = t + 1

    # -- export -----------------------------------------------------------
    def records(self) -> np.ndarray:
        rows = []
        for p in range(self.n):
            for g, r in enumerate(self.rec[p], start=1):
                if r[START] >= 0:
                    rows.append((p, g, *r))
        return np.array(rows, dtype=np.int64).reshape(-1, 7)

    def event_array(self) -> np.ndarray:
        return np.array(self.events, dtype=np.int64).reshape(-1, 9)

    def backlog_array(self) -> np.ndarray:
        return np.array(self.backlog, dtype=np.int64).reshape(-1, 3)

    def probe_array(self) -> np.ndarray:
        rows = []
        for tag in self.tags:
            p, g = tag[0], tag[1]
            recv = tag[6]
            M = len(recv)
            rows.append((p, g, tag[2], tag[3], tag[4], tag[5], M, M - (self.dest[p] in recv),
                         tag[7], tag[8], tag[9], tag[10], tag[11]))
        return np.array(rows, dtype=np.int64).reshape(-1, 13)

    def counters(self) -> dict:
        return {
            "tx_source": self.tx_source,
            "tx_relay": self.tx_relay,
            "scheduled": self.scheduled,
            "decodes": self.decodes,
            "mismatches": self.mismatches,
            "duplicates": self.duplicates,
            "buffered": self.buffered,
            "pending": self.pending,
        }

    def positions(self) -> np.ndarray:
        return np.array(self.pos, dtype=np.int64)

    def relay_entries(self) -> list[tuple[int, int, int, int]]:
        """Every stored (relay, pair, gen, k); used by the conservation checks."""
        out = []
        for (w, p), q in self.queues.items():
            for e in q:
                out.append((w, p, e, 0) if not self.coded else (w, p, e[0], e[1]))
        return sorted(out)
