# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled slot engine; same semantics and outputs as ``_pyengine.PyEngine``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t
from libcpp.vector cimport vector
from libcpp.map cimport map as cmap
from cython.operator cimport dereference as cython_deref

cnp.import_array()

cdef struct Entry:
    int g
    int k
    int sym

cdef struct Rec:
    int64_t form
    int64_t start
    int64_t last
    int64_t first
    int64_t dec

cdef struct GenRecv:
    vector[int] ks
    vector[int] syms
    vector[uint8_t] have

cdef struct Tag:
    int pair
    int gen
    int64_t t1
    int64_t t2
    int64_t t3
    int64_t t4
    int64_t holders
    int64_t hits
    int64_t total
    int64_t hold_hits
    int done


cdef inline uint64_t mix64(uint64_t x) nogil:
    cdef uint64_t z = x + <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline int deref_have(cmap[int, GenRecv].iterator it, int k) noexcept nogil:
    return <int>(cython_deref(it).second.have[k])


cdef class CEngine:
    cdef readonly int n
    cdef readonly int64_t clock
    cdef readonly int64_t window_open
    cdef int L, A, m, q, coded, strict, verify, log_events
    cdef double p_s
    cdef uint64_t key
    cdef int64_t warmup, horizon, every
    cdef int64_t probe_samples, probe_ts, probe_mix, probe_window
    cdef int64_t tx_source, tx_relay, scheduled, decodes, mismatches, duplicates, buffered, pending

    cdef vector[int64_t] pos, nbr, act_idx, cell_of_active, gexp, glog
    cdef vector[int] dest, src_of, src_gen, src_k, low, qhead
    cdef vector[vector[int]] codeword
    cdef vector[vector[Entry]] queues
    cdef vector[vector[Rec]] rec
    cdef vector[cmap[int, GenRecv]] recv
    cdef vector[vector[uint8_t]] decflag
    cdef vector[Tag] tags
    cdef vector[vector[uint8_t]] tag_recv
    cdef vector[int] open_tags, src_tag
    cdef vector[int64_t] events, backlog
    cdef vector[int] counts, starts, nodes, senders
    cdef vector[int] work_x, work_y, work_master, work_q, work_c

    backend = "compiled"

    def __init__(self, s):
        cdef int i
        self.n = s.n
        self.L = s.L
        self.A = len(s.cell_of_active)
        self.m = s.m
        self.q = s.q
        self.coded = 1 if s.scheme == 0 else 0
        self.strict = 1 if s.relay_policy == 1 else 0
        self.verify = 1 if s.verify else 0
        self.log_events = 1 if s.event_log else 0
        self.p_s = s.p_s
        self.key = <uint64_t>int(s.payload_key)
        self.warmup = s.warmup
        self.horizon = s.horizon
        self.every = s.sample_every
        self.probe_samples = s.probe_samples
        self.probe_ts = s.probe_ts
        self.probe_mix = s.probe_mix
        self.probe_window = s.probe_window
        self.clock = 0
        self.window_open = 0
        self.tx_source = self.tx_relay = self.scheduled = 0
        self.decodes = self.mismatches = self.duplicates = 0
        self.buffered = self.pending = 0

        self.pos = np.asarray(s.pos0, dtype=np.int64).tolist()
        self.nbr = np.asarray(s.nbr, dtype=np.int64).ravel().tolist()
        self.act_idx = np.asarray(s.act_idx, dtype=np.int64).tolist()
        self.cell_of_active = np.asarray(s.cell_of_active, dtype=np.int64).tolist()
        self.gexp = np.asarray(s.gf_exp, dtype=np.int64).tolist()
        self.glog = np.asarray(s.gf_log, dtype=np.int64).tolist()
        self.dest = [int(x) for x in s.dest]
        self.src_of = [int(x) for x in s.src_of]
        self.src_gen.assign(self.n, 1)
        self.src_k.assign(self.n, 1)
        self.low.assign(self.n, 1)
        self.src_tag.assign(self.n, -1)
        self.queues.resize(<size_t>self.n * self.n)
        self.qhead.assign(self.n * self.n, 0)
        self.rec.resize(self.n)
        self.recv.resize(self.n)
        self.decflag.resize(self.n)
        self.codeword.resize(self.n)
        self.counts.assign(self.A, 0)
        self.starts.assign(self.A + 1, 0)
        self.nodes.assign(self.n, 0)
        cdef Rec r0
        if self.coded:
            for i in range(self.n):
                self._encode(i, 1)
                r0.form = 0
                r0.start = r0.last = r0.first = r0.dec = -1
                self.rec[i].push_back(r0)

    # -- field arithmetic -------------------------------------------------
    cdef inline int gmul(self, int a, int b) noexcept nogil:
        if a == 0 or b == 0:
            return 0
        return <int>self.gexp[self.glog[a] + self.glog[b]]

    cdef inline int ginv(self, int a) noexcept nogil:
        return <int>self.gexp[(self.q - 1 - self.glog[a]) % (self.q - 1)]

    cdef inline int payload_sym(self, int u, int g, int j) noexcept nogil:
        cdef uint64_t base = self.key ^ (<uint64_t>u << 40) ^ (<uint64_t>g << 20)
        return <int>(mix64(base ^ <uint64_t>j) & <uint64_t>(self.q - 1))

    cdef void _encode(self, int u, int g) noexcept nogil:
        cdef int i, j, acc, x
        cdef vector[int]* w = &self.codeword[u]
        w.assign(self.n, 0)
        for i in range(self.n):
            x = i
            acc = 0
            for j in range(self.m - 1, -1, -1):
                acc = self.gmul(acc, x) ^ self.payload_sym(u, g, j)
            w[0][i] = acc

    cdef int _decode_ok(self, int p, int g, GenRecv* got) noexcept nogil:
        # Lagrange interpolation over the m received points (k ascending)
        cdef int m = self.m
        cdef int i, j, d, carry, denom, scale, xi
        cdef vector[int] order
        order.assign(self.n + 1, -1)
        for i in range(m):
            order[got.ks[i]] = got.syms[i]
        self.work_x.clear()
        self.work_y.clear()
        for i in range(1, self.n + 1):
            if order[i] >= 0:
                self.work_x.push_back(i - 1)
                self.work_y.push_back(order[i])
        self.work_master.assign(m + 1, 0)
        self.work_master[0] = 1
        cdef int deg = 0
        for i in range(m):
            xi = self.work_x[i]
            for d in range(deg + 1, 0, -1):
                self.work_master[d] = self.work_master[d - 1] ^ self.gmul(self.work_master[d], xi)
            self.work_master[0] = self.gmul(self.work_master[0], xi)
            deg += 1
        self.work_c.assign(m, 0)
        self.work_q.assign(m, 0)
        for i in range(m):
            xi = self.work_x[i]
            carry = self.work_master[m]
            self.work_q[m - 1] = carry
            for d in range(m - 1, 0, -1):
                carry = self.work_master[d] ^ self.gmul(carry, xi)
                self.work_q[d - 1] = carry
            denom = 1
            for j in range(m):
                if j != i:
                    denom = self.gmul(denom, xi ^ self.work_x[j])
            scale = self.gmul(self.work_y[i], self.ginv(denom))
            if scale:
                for d in range(m):
                    self.work_c[d] ^= self.gmul(scale, self.work_q[d])
        for d in range(m):
            if self.work_c[d] != self.payload_sym(p, g, d):
                return 0
        return 1

    # -- 2HRRSC ---------------------------------------------------------
    cdef inline int _is_decoded(self, int p, int g) noexcept nogil:
        if g < self.low[p]:
            return 1
        if <size_t>g < self.decflag[p].size():
            return self.decflag[p][g]
        return 0

    cdef int _deliver(self, int p, int g, int k, int sym, int64_t t) noexcept nogil:
        if self._is_decoded(p, g):
            return 0
        cdef GenRecv* got = &self.recv[p][g]
        if got.have.size() == 0:
            got.have.assign(self.n + 1, 0)
        if got.have[k]:
            self.duplicates += 1
            return 0
        got.have[k] = 1
        got.ks.push_back(k)
        got.syms.push_back(sym)
        cdef Rec* r = &self.rec[p][g - 1]
        if r.first < 0:
            r.first = t
        if <int>got.ks.size() < self.m:
            return 0
        if self.verify:
            if not self._decode_ok(p, g, got):
                self.mismatches += 1
        self.recv[p].erase(g)
        if <size_t>g >= self.decflag[p].size():
            self.decflag[p].resize(g + 1, 0)
        self.decflag[p][g] = 1
        cdef int lw = self.low[p]
        while <size_t>lw < self.decflag[p].size() and self.decflag[p][lw]:
            self.decflag[p][lw] = 0
            lw += 1
        self.low[p] = lw
        r.dec = t
        self.decodes += 1
        self.pending -= 1
        if self.warmup <= r.start < self.horizon:
            self.window_open -= 1
        return 1

    cdef void _log(self, int64_t t, int cell, int u, int v, int role, int p, int g, int k, int d) noexcept nogil:
        self.events.push_back(t)
        self.events.push_back(cell)
        self.events.push_back(u)
        self.events.push_back(v)
        self.events.push_back(role)
        self.events.push_back(p)
        self.events.push_back(g)
        self.events.push_back(k)
        self.events.push_back(d)

    cdef void _open_tag(self, int u, int g, int64_t t) noexcept nogil:
        cdef Tag tg
        tg.pair = u
        tg.gen = g
        tg.t1 = t
        tg.t2 = t + self.probe_ts
        tg.t3 = tg.t2 + self.probe_mix
        tg.t4 = tg.t3 + self.probe_window
        tg.holders = -1
        tg.hits = tg.total = tg.hold_hits = 0
        tg.done = 0
        self.tags.push_back(tg)
        self.tag_recv.push_back(vector[uint8_t](self.n, 0))
        self.src_tag[u] = <int>self.tags.size() - 1
        self.open_tags.push_back(<int>self.tags.size() - 1)

    cdef void _source_coded(self, int64_t t, int cell, int u, int v) noexcept nogil:
        cdef int g = self.src_gen[u]
        cdef int k = self.src_k[u]
        cdef int sym = self.codeword[u][k - 1]
        cdef Rec* r = &self.rec[u][g - 1]
        cdef Rec nr
        cdef Entry e
        cdef int d, ti
        if k == 1:
            r.start = t
            self.pending += 1
            if self.warmup <= t < self.horizon:
                self.window_open += 1
            if t >= self.warmup and <int64_t>self.tags.size() < self.probe_samples:
                self._open_tag(u, g, t)
        if k == self.n:
            r.last = t
            self.src_gen[u] = g + 1
            self.src_k[u] = 1
            self._encode(u, g + 1)
            nr.form = t
            nr.start = nr.last = nr.first = nr.dec = -1
            self.rec[u].push_back(nr)
        else:
            self.src_k[u] = k + 1
        ti = self.src_tag[u]
        if ti >= 0 and self.tags[ti].gen == g and self.tags[ti].done == 0 and t <= self.tags[ti].t2:
            self.tag_recv[ti][v] = 1
        if v == self.dest[u]:
            d = self._deliver(u, g, k, sym, t)
        else:
            e.g = g
            e.k = k
            e.sym = sym
            self.queues[<size_t>v * self.n + u].push_back(e)
            self.buffered += 1
            d = 0
        self.tx_source += 1
        if self.log_events:
            self._log(t, cell, u, v, 0, u, g, k, d)

    cdef void _relay_coded(self, int64_t t, int cell, int u, int v) noexcept nogil:
        cdef int p = self.src_of[v]
        if p == u:
            return
        cdef vector[Entry]* Q = &self.queues[<size_t>u * self.n + p]
        if Q.size() == 0:
            return
        cdef int lw = self.low[p]
        cdef size_t i, w = 0, size0 = Q.size()
        cdef int found = 0, g, d
        cdef Entry e, chosen
        cdef cmap[int, GenRecv].iterator it
        for i in range(size0):
            e = Q[0][i]
            g = e.g
            if g < lw or self._is_decoded(p, g):
                continue
            it = self.recv[p].find(g)
            if it != self.recv[p].end() and deref_have(it, e.k):
                continue
            if not found and (not self.strict or g == lw):
                chosen = e
                found = 1
                continue
            Q[0][w] = e
            w += 1
        Q.resize(w)
        self.buffered -= <int64_t>(size0 - w)
        if not found:
            return
        d = self._deliver(p, chosen.g, chosen.k, chosen.sym, t)
        self.tx_relay += 1
        if self.log_events:
            self._log(t, cell, u, v, 1, p, chosen.g, chosen.k, d)

    # -- uncoded 2-hop --------------------------------------------------
    cdef void _deliver_plain(self, int p, int seq, int64_t t) noexcept nogil:
        cdef Rec* r = &self.rec[p][seq - 1]
        r.first = t
        r.dec = t
        self.decodes += 1
        self.pending -= 1
        if self.warmup <= r.start < self.horizon:
            self.window_open -= 1

    cdef void _source_plain(self, int64_t t, int cell, int u, int v) noexcept nogil:
        cdef int seq = self.src_gen[u]
        cdef Rec r
        cdef Entry e
        cdef int d
        self.src_gen[u] = seq + 1
        r.form = r.start = r.last = t
        r.first = r.dec = -1
        self.rec[u].push_back(r)
        self.pending += 1
        if self.warmup <= t < self.horizon:
            self.window_open += 1
        if v == self.dest[u]:
            self._deliver_plain(u, seq, t)
            d = 1
        else:
            e.g = seq
            e.k = 0
            e.sym = 0
            self.queues[<size_t>v * self.n + u].push_back(e)
            self.buffered += 1
            d = 0
        self.tx_source += 1
        if self.log_events:
            self._log(t, cell, u, v, 0, u, seq, 0, d)

    cdef void _relay_plain(self, int64_t t, int cell, int u, int v) noexcept nogil:
        cdef int p = self.src_of[v]
        cdef size_t qi = <size_t>u * self.n + p
        cdef vector[Entry]* Q = &self.queues[qi]
        cdef int h = self.qhead[qi]
        if <size_t>h >= Q.size():
            return
        cdef int seq = Q[0][h].g
        h += 1
        if <size_t>h == Q.size():
            Q.clear()
            h = 0
        elif h > 64 and <size_t>(2 * h) > Q.size():
            Q.erase(Q.begin(), Q.begin() + h)
            h = 0
        self.qhead[qi] = h
        self.buffered -= 1
        self._deliver_plain(p, seq, t)
        self.tx_relay += 1
        if self.log_events:
            self._log(t, cell, u, v, 1, p, seq, 0, 1)

    # -- probes -----------------------------------------------------------
    cdef int _holds(self, int w, int p, int g) noexcept nogil:
        if w == p:
            return 0
        if w == self.dest[p]:
            return 1 if self.rec[p][g - 1].first >= 0 else 0
        cdef size_t qi = <size_t>w * self.n + p
        cdef vector[Entry]* Q = &self.queues[qi]
        cdef size_t i
        for i in range(<size_t>self.qhead[qi], Q.size()):
            if Q[0][i].g == g:
                return 1
        return 0

    cdef void _probe_slot(self, int64_t t) noexcept nogil:
        cdef vector[int] still
        cdef size_t a, b
        cdef int ti, w, p, g
        cdef int64_t cnt
        cdef Tag* tg
        for a in range(self.open_tags.size()):
            ti = self.open_tags[a]
            tg = &self.tags[ti]
            p = tg.pair
            g = tg.gen
            if t == tg.t2:
                cnt = 0
                for w in range(self.n):
                    cnt += self._holds(w, p, g)
                tg.holders = cnt
            if tg.t3 <= t < tg.t4:
                for b in range(self.senders.size()):
                    w = self.senders[b]
                    tg.total += 1
                    if self.tag_recv[ti][w]:
                        tg.hits += 1
                    if self._holds(w, p, g):
                        tg.hold_hits += 1
            if t + 1 >= tg.t4:
                tg.done = 1
            else:
                still.push_back(ti)
        self.open_tags.swap(still)

    # -- main loop --------------------------------------------------------
    def advance(self, const uint8_t[:, ::1] moves, const double[:, :, ::1] draws, int count):
        with nogil:
            self._advance(moves, draws, count)

    cdef void _advance(self, const uint8_t[:, ::1] moves, const double[:, :, ::1] draws, int count) noexcept nogil:
        cdef int c, u, a, r, cnt, si, ri, s, v, cell
        cdef int64_t t
        cdef double u0, u1, u2
        for c in range(count):
            t = self.clock
            for a in range(self.A):
                self.counts[a] = 0
            for u in range(self.n):
                r = <int>self.act_idx[self.pos[u]]
                if r >= 0:
                    self.counts[r] += 1
            self.starts[0] = 0
            for a in range(self.A):
                self.starts[a + 1] = self.starts[a] + self.counts[a]
                self.counts[a] = 0
            for u in range(self.n):
                r = <int>self.act_idx[self.pos[u]]
                if r >= 0:
                    self.nodes[self.starts[r] + self.counts[r]] = u
                    self.counts[r] += 1
            self.senders.clear()
            for a in range(self.A):
                cnt = self.counts[a]
                if cnt < 2:
                    continue
                u0 = draws[c, a, 0]
                u1 = draws[c, a, 1]
                u2 = draws[c, a, 2]
                si = <int>(u0 * cnt)
                if si > cnt - 1:
                    si = cnt - 1
                ri = <int>(u1 * (cnt - 1))
                if ri > cnt - 2:
                    ri = cnt - 2
                if ri >= si:
                    ri += 1
                s = self.nodes[self.starts[a] + si]
                v = self.nodes[self.starts[a] + ri]
                cell = <int>self.cell_of_active[a]
                self.scheduled += 1
                self.senders.push_back(s)
                if u2 < self.p_s:
                    if self.coded:
                        self._source_coded(t, cell, s, v)
                    else:
                        self._source_plain(t, cell, s, v)
                else:
                    if self.coded:
                        self._relay_coded(t, cell, s, v)
                    else:
                        self._relay_plain(t, cell, s, v)
            if self.open_tags.size() > 0:
                self._probe_slot(t)
            if self.warmup <= t < self.horizon and (t - self.warmup) % self.every == 0:
                self.backlog.push_back(t)
                self.backlog.push_back(self.pending)
                self.backlog.push_back(self.buffered)
            for u in range(self.n):
                self.pos[u] = self.nbr[self.pos[u] * 4 + moves[c, u]]
            self.clock = t + 1

    # -- export -----------------------------------------------------------
    def records(self):
        rows = []
        cdef int p
        cdef size_t g
        cdef Rec r
        for p in range(self.n):
            for g in range(self.rec[p].size()):
                r = self.rec[p][g]
                if r.start >= 0:
                    rows.append((p, g + 1, r.form, r.start, r.last, r.first, r.dec))
        return np.array(rows, dtype=np.int64).reshape(-1, 7)

    def event_array(self):
        return np.array(self.events, dtype=np.int64).reshape(-1, 9)

    def backlog_array(self):
        return np.array(self.backlog, dtype=np.int64).reshape(-1, 3)

    def probe_array(self):
        rows = []
        cdef size_t i
        cdef int M, Mr, w
        cdef Tag tg
        for i in range(self.tags.size()):
            tg = self.tags[i]
            M = 0
            for w in range(self.n):
                M += self.tag_recv[i][w]
            Mr = M - self.tag_recv[i][self.dest[tg.pair]]
            rows.append((tg.pair, tg.gen, tg.t1, tg.t2, tg.t3, tg.t4, M, Mr, tg.holders,
                         tg.hits, tg.total, tg.hold_hits, tg.done))
        return np.array(rows, dtype=np.int64).reshape(-1, 13)

    def counters(self):
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

    def positions(self):
        return np.array(self.pos, dtype=np.int64)

    def relay_entries(self):
        out = []
        cdef int w, p
        cdef size_t i, qi
        cdef Entry e
        for w in range(self.n):
            for p in range(self.n):
                qi = <size_t>w * self.n + p
                for i in range(<size_t>self.qhead[qi], self.queues[qi].size()):
                    e = self.queues[qi][i]
                    out.append((w, p, e.g, e.k))
        return sorted(out)
