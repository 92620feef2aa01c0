"""
The four L1 organizations as event-driven request pipelines.

A pipeline owns the memory-side state (L1s, crossbars, L2, memory) and
turns each issued request into a chain of events on the engine's queue.
Every resource is a busy-until reservation, and reservations are made
in event order, so contention resolves in arrival order with ties broken
by (core_id, request_id).

Timing under default parameters, no contention (hop = 1 flit + 5 cycles):

    local hit              t_tag + t_data                       = 32
    ATA remote hit         t_tag + hop + t_data + hop + t_data  = 68
    decoupled hit          hop + t_tag + t_data + hop           = 44
    L2 hit (private/ATA)   t_tag + hop + t_l2 + hop' + t_data   = 235

where hop' is the 4-flit full-line response (4 + 5 cycles).
"""

from __future__ import annotations

from typing import Callable, Optional

from .core import Architecture, Kind, MemRequest, SimConfig
from .l1cache import (
    L1Cache, MshrResult, Route, access_remote, distribute, fill_local,
)
from .l2mem import L2Partition, Memory
from .noc import Crossbar
from .report import SimReport
from .tagarray import presence

# intra-cycle phases
ISSUE, DECIDE, ACCESS, NOC, COMPLETE = range(5)


STAGES = {
    Architecture.PRIVATE: {
        "hit": ("tag", "local_data"),
        "miss": ("tag", "mshr", "l2_xbar", "l2", "l2_xbar", "fill"),
    },
    Architecture.REMOTE: {
        "hit": ("tag", "local_data"),
        "remote": ("tag", "mshr", "probe_xbar", "remote_tag", "probe_xbar", "xbar",
                   "remote_data", "xbar", "fill"),
        "miss": ("tag", "mshr", "probe_xbar", "remote_tag", "probe_xbar", "l2_xbar", "l2",
                 "l2_xbar", "fill"),
    },
    Architecture.DECOUPLED: {
        "hit": ("xbar", "home_tag", "home_data", "xbar"),
        "miss": ("xbar", "home_tag", "mshr", "l2_xbar", "l2", "l2_xbar", "fill", "xbar"),
    },
    Architecture.ATA: {
        "hit": ("aggregated_tag", "distributor", "local_data"),
        "remote": ("aggregated_tag", "distributor", "xbar", "remote_data", "xbar", "fill"),
        "miss": ("aggregated_tag", "distributor", "mshr", "l2_xbar", "l2", "l2_xbar", "fill"),
    },
}


class Pipeline:
    """Shared machinery; subclasses define ``issue`` and ``decide``."""

    variant: Architecture

    def __init__(self, config: SimConfig, queue, stats: SimReport,
                 log: Optional[Callable[..., None]] = None):
        c = config
        self.config = c
        self.q = queue
        self.stats = stats
        self.log = log
        self.t_tag, self.t_data = c.t_tag, c.t_data
        self.cpc = c.cores_per_cluster
        self.caches = [
            L1Cache(i, c.l1_geometry, c.mshr_entries, c.set_hash) for i in range(c.num_cores)
        ]
        self.intra = [
            Crossbar(f"cluster{k}", self.cpc, self.cpc, c.t_xbar_hop, c.flit_bytes)
            for k in range(c.num_clusters)
        ]
        self.l2_req = Crossbar("l2_req", c.num_cores, c.l2_partitions, c.t_xbar_hop, c.flit_bytes)
        self.l2_resp = Crossbar("l2_resp", c.l2_partitions, c.num_cores, c.t_xbar_hop, c.flit_bytes)
        self.memory = Memory()
        self.l2 = [
            L2Partition(p, c.l2_partitions, c.l2_geometry, c.t_l2, c.t_mem, self.memory)
            for p in range(c.l2_partitions)
        ]
        self.on_complete: Callable[[int, MemRequest], None] = lambda now, req: None

    # -- topology helpers

    def cluster_of(self, cache_id: int) -> int:
        return cache_id // self.cpc

    def local_index(self, cache_id: int) -> int:
        return cache_id % self.cpc

    def cluster_caches(self, cache_id: int) -> list[L1Cache]:
        base = cache_id - cache_id % self.cpc
        return self.caches[base:base + self.cpc]

    @property
    def crossbars(self) -> list[Crossbar]:
        return [*self.intra, self.l2_req, self.l2_resp]

    # -- messaging

    def post(self, xbar: Crossbar, src: int, dst: int, nbytes: int, now: int,
             fn: Callable, arg, key: int) -> None:
        """Queue a message; it is arbitrated in this cycle's NoC phase and
        ``fn(delivery, arg)`` runs on arrival."""
        if not xbar._pending:
            self.q.schedule(now, NOC, 0, self._flush, xbar)
        xbar.submit(src, dst, nbytes, (fn, arg, key))

    def _flush(self, now: int, xbar: Crossbar) -> None:
        for delivery, msg in xbar.arbitrate(now):
            fn, arg, key = msg.payload
            self.q.schedule(delivery, ACCESS, key, fn, arg)

    # -- request lifecycle

    def issue(self, cycle: int, req: MemRequest) -> None:
        """Called when the core's issue cycle for ``req`` is known, possibly
        before the clock gets there; must only schedule."""
        self.q.schedule(cycle + self.t_tag, DECIDE, req.order_key, self.decide, req)

    def decide(self, now: int, req: MemRequest) -> None:
        raise NotImplementedError

    def complete(self, req: MemRequest, cycle: int) -> None:
        req.completion_cycle = cycle
        if req.l1_done_cycle is None:
            req.l1_done_cycle = cycle
        self.q.schedule(cycle, COMPLETE, req.order_key, self._finish, req)

    def _finish(self, now: int, req: MemRequest) -> None:
        if self.log:
            if req.is_load:
                self.log(req.l1_done_cycle, "l1done", req.request_id)
            self.log(now, "complete", req.request_id, outcome=req.outcome, value=req.value)
        self.on_complete(now, req)

    def deliver(self, req: MemRequest, cache_id: int, ready: int) -> None:
        """Return data produced at ``cache_id`` to the requesting core."""
        self.complete(req, ready)

    # -- cache-side building blocks

    def bank(self, cache: L1Cache, req: MemRequest, arrival: int) -> int:
        data = cache.data
        b = req.parts.set_index % data.banks
        start = data.reserve(b, arrival)
        self.stats.bank_conflict_cycles += start - arrival
        if self.log:
            self.log(arrival, "bank", req.request_id, cache=cache.cache_id, bank=b, start=start)
        return start

    def local_hit(self, now: int, req: MemRequest, cache: L1Cache, entry) -> int:
        """Serve a load or store from a resident sector; returns data-ready cycle."""
        p = req.parts
        entry.lru_stamp = now
        if req.kind is Kind.LOAD:
            req.value = cache.data.read(p.line_address, p.sector_index)
        else:
            entry.dirty = True
            cache.data.write(p.line_address, p.sector_index, req.request_id)
        return self.bank(cache, req, now) + self.t_data

    def count_hit(self, req: MemRequest, remote: bool) -> None:
        s = self.stats
        if req.kind is Kind.STORE:
            s.store_hits += 1
            req.outcome = "store_hit"
        elif remote:
            s.l1_remote_hits += 1
            req.outcome = "remote_hit"
        else:
            s.l1_local_hits += 1
            req.outcome = "local_hit"

    def count_miss(self, req: MemRequest, now: int) -> None:
        if req.kind is Kind.STORE:
            self.stats.store_misses += 1
            req.outcome = "store_miss"
        else:
            self.stats.l1_misses += 1
            req.outcome = "miss"
        req.l1_done_cycle = now

    def lookup_local(self, cache: L1Cache, req: MemRequest):
        p = req.parts
        entry = cache.tags.find(p.set_index, p.tag)
        if entry is not None and entry.sectors >> p.sector_index & 1:
            return entry
        return None

    def serve(self, now: int, req: MemRequest, cache: L1Cache) -> None:
        """Tag check done at ``cache``: hit locally or fall into the miss path."""
        entry = self.lookup_local(cache, req)
        if entry is not None:
            self.count_hit(req, remote=False)
            self.deliver(req, cache.cache_id, self.local_hit(now, req, cache, entry))
        elif req.kind is Kind.STORE and not self.config.write_allocate:
            self.store_around(now, req, cache)
        else:
            self.miss(now, req, cache)

    def miss(self, now: int, req: MemRequest, cache: L1Cache) -> None:
        line = req.parts.line_address
        result = cache.mshr.request(line, req)
        if result is MshrResult.FULL:
            # retried in the cycle after an entry frees up
            self.stats.mshr_stalls += 1
            cache.mshr.park(line, req)
            return
        self.count_miss(req, now)
        if result is MshrResult.ALLOCATED:
            self.retry(now, cache.mshr.unpark_key(line))
            self.start_miss(now, req, cache)

    def start_miss(self, now: int, req: MemRequest, cache: L1Cache) -> None:
        self.fetch_l2(now, req, cache)

    def fetch_l2(self, now: int, req: MemRequest, cache: L1Cache) -> None:
        p = req.parts
        part = p.line_address % len(self.l2)
        req.l2_depart_cycle = now
        self.stats.l2_departures += 1
        self.stats.l2_departure_delay += now - req.tag_done_cycle
        if self.log:
            self.log(now, "l2depart", req.request_id, cache=cache.cache_id, partition=part)
        self.post(self.l2_req, cache.cache_id, part, self.config.request_bytes, now,
                  self._l2_arrive, (req, cache), req.order_key)

    def _l2_arrive(self, now: int, arg) -> None:
        req, cache = arg
        p = req.parts
        part = p.line_address % len(self.l2)
        res = self.l2[part].access_line(p.line_address, now)
        if res.hit:
            self.stats.l2_hits += 1
        else:
            self.stats.l2_misses += 1
        if self.log:
            self.log(now, "l2", req.request_id, partition=part, hit=int(res.hit), done=res.completion)
        payload = dict(enumerate(res.values))
        self.q.schedule(res.completion, ACCESS, req.order_key, self._l2_respond, (req, cache, payload))

    def _l2_respond(self, now: int, arg) -> None:
        req, cache, _payload = arg
        part = req.parts.line_address % len(self.l2)
        self.post(self.l2_resp, part, cache.cache_id, self.config.l1_geometry.line_size, now,
                  self._l2_fill, arg, req.order_key)

    def _l2_fill(self, now: int, arg) -> None:
        req, cache, payload = arg
        self.fill_and_wake(now, req, cache, payload)

    def fill_and_wake(self, now: int, req: MemRequest, cache: L1Cache, payload: dict[int, int]) -> None:
        """Install returned sectors and complete, in order, every MSHR waiter
        on the line whose sector is now valid. Waiters on other sectors
        (possible after a one-sector remote fill) start over."""
        p = req.parts
        line = p.line_address
        waiters = cache.mshr.release(line)
        self.wake_parked(now, cache, line)
        self.fill(now, req, cache, payload)
        ready = self.bank(cache, req, now) + self.t_data
        data = cache.data
        entry = cache.tags.find(p.set_index, p.tag)
        again = []
        for w in waiters:
            s = w.parts.sector_index
            if not entry.sectors >> s & 1:
                again.append(w)
            elif w.kind is Kind.LOAD:
                w.value = data.read(line, s)
                self.deliver(w, cache.cache_id, ready)
            else:
                entry.dirty = True
                data.write(line, s, w.request_id)
                self.deliver(w, cache.cache_id, ready)
        self.restart(now, again)

    def restart(self, now: int, reqs: list[MemRequest]) -> None:
        """Send merged waiters back to the tag check; their miss is uncounted
        so that the next decision is the one that counts."""
        for r in reqs:
            if r.kind is Kind.STORE:
                self.stats.store_misses -= 1
            else:
                self.stats.l1_misses -= 1
            r.outcome = ""
            r.l1_done_cycle = None
        self.retry(now, reqs)

    def wake_parked(self, now: int, cache: L1Cache, released: int) -> None:
        """Retry, in the next cycle, the parked requests that can now make
        progress (see ``Mshr.unpark``)."""
        self.retry(now, cache.mshr.unpark(released))

    def retry(self, now: int, reqs: list[MemRequest]) -> None:
        for r in reqs:
            self.q.schedule(now + 1, DECIDE, r.order_key, self.decide, r)

    def fill(self, now: int, req: MemRequest, cache: L1Cache, payload: dict[int, int]) -> None:
        evicted, victim_values = fill_local(cache, req.parts, payload, now)
        if self.log:
            self.log(now, "fill", req.request_id, cache=cache.cache_id)
        if evicted is not None and evicted.dirty:
            sectors = {
                s: victim_values[s] for s in range(len(victim_values)) if evicted.sectors >> s & 1
            }
            self.writeback(now, cache, evicted.line_address, sectors, req.order_key)

    def writeback(self, now: int, cache: L1Cache, line: int, sectors: dict[int, int], key: int) -> None:
        part = line % len(self.l2)
        self.stats.l2_writebacks += 1
        if self.log:
            self.log(now, "writeback", 0, cache=cache.cache_id, line=hex(line))
        nbytes = self.config.sector_bytes * len(sectors)
        self.post(self.l2_req, cache.cache_id, part, nbytes, now,
                  self._wb_arrive, (part, line, sectors), key)

    def _wb_arrive(self, now: int, arg) -> None:
        part, line, sectors = arg
        self.l2[part].writeback(line, sectors, now)

    def store_around(self, now: int, req: MemRequest, cache: L1Cache) -> None:
        """No-write-allocate store miss: write the sector into L2, ack back."""
        self.count_miss(req, now)
        p = req.parts
        part = p.line_address % len(self.l2)
        self.post(self.l2_req, cache.cache_id, part, self.config.request_bytes + self.config.sector_bytes,
                  now, self._store_l2, (req, cache), req.order_key)

    def _store_l2(self, now: int, arg) -> None:
        req, cache = arg
        p = req.parts
        part = p.line_address % len(self.l2)
        start = self.l2[part].writeback(p.line_address, {p.sector_index: req.request_id}, now)
        self.q.schedule(start + 1, ACCESS, req.order_key, self._store_ack_send, (req, cache))

    def _store_ack_send(self, now: int, arg) -> None:
        req, cache = arg
        part = req.parts.line_address % len(self.l2)
        self.post(self.l2_resp, part, cache.cache_id, self.config.request_bytes, now,
                  self._store_ack, arg, req.order_key)

    def _store_ack(self, now: int, arg) -> None:
        req, cache = arg
        self.deliver(req, cache.cache_id, now)


class PrivatePipeline(Pipeline):
    """Conventional private L1 per core; misses go straight to L2."""

    variant = Architecture.PRIVATE

    def decide(self, now: int, req: MemRequest) -> None:
        req.tag_done_cycle = now
        self.serve(now, req, self.caches[req.core_id])


class AtaPipeline(Pipeline):
    """Aggregated tag array: one parallel comparison against every tag array
    in the cluster, then the distributor picks local data, a remote data
    array, or L2. Stores are handled in the local cache only."""

    variant = Architecture.ATA

    def decide(self, now: int, req: MemRequest) -> None:
        req.tag_done_cycle = now
        cache = self.caches[req.core_id]
        if req.kind is Kind.STORE:
            self.serve(now, req, cache)
            return
        entry = self.lookup_local(cache, req)
        if entry is not None:
            # local priority: the distributor ignores remote bits
            if self.log:
                pv = presence(req.parts, [c.tags for c in self.cluster_caches(cache.cache_id)])
                self.log(now, "route", req.request_id, presence=str(pv), decision="LocalHit")
            self.count_hit(req, remote=False)
            self.deliver(req, cache.cache_id, self.local_hit(now, req, cache, entry))
            return
        group = self.cluster_caches(cache.cache_id)
        pv = presence(req.parts, [c.tags for c in group])
        li = self.local_index(cache.cache_id)
        queued = None
        if sum(pv.hit_sector) > 1:
            queued = [c.data.queued(now) for c in group]
        decision = distribute(pv, li, queued)
        if self.log:
            self.log(now, "route", req.request_id, presence=str(pv), decision=str(decision))
        if decision.route is Route.REMOTE_HIT:
            target = group[decision.target]
            self.post(self.intra[self.cluster_of(cache.cache_id)], li, decision.target,
                      self.config.request_bytes, now, self._remote_arrive, (req, target),
                      req.order_key)
        else:
            self.miss(now, req, cache)

    def _remote_arrive(self, now: int, arg) -> None:
        req, target = arg
        res = access_remote(req.parts, target, now, self.t_data)
        cache = self.caches[req.core_id]
        xbar = self.intra[self.cluster_of(cache.cache_id)]
        ti, li = self.local_index(target.cache_id), self.local_index(cache.cache_id)
        if res.redirect:
            self.stats.dirty_redirects += 1
            if self.log:
                self.log(now, "redirect", req.request_id, cache=target.cache_id)
            self.post(xbar, ti, li, self.config.request_bytes, now, self._redirected, req, req.order_key)
            return
        start = res.ready_cycle - self.t_data
        self.stats.bank_conflict_cycles += start - now
        if self.log:
            self.log(now, "remote", req.request_id, cache=target.cache_id, start=start)
        req.value = res.value
        self.q.schedule(res.ready_cycle, ACCESS, req.order_key, self._remote_respond, (req, ti, li))

    def _remote_respond(self, now: int, arg) -> None:
        req, ti, li = arg
        xbar = self.intra[self.cluster_of(req.core_id)]
        self.post(xbar, ti, li, self.config.sector_bytes, now, self._remote_fill, req, req.order_key)

    def _remote_fill(self, now: int, req: MemRequest) -> None:
        cache = self.caches[req.core_id]
        self.count_hit(req, remote=True)
        if self.config.remote_fill_local:
            self.fill(now, req, cache, {req.parts.sector_index: req.value})
            self.complete(req, self.bank(cache, req, now) + self.t_data)
        else:
            self.complete(req, now)

    def _redirected(self, now: int, req: MemRequest) -> None:
        self.miss(now, req, self.caches[req.core_id])


class RemoteSharingPipeline(Pipeline):
    """Local miss -> probe every other cache of the cluster over the
    crossbar; only after all replies arrive does the request fetch from
    the lowest-numbered holder or depart for L2."""

    variant = Architecture.REMOTE

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        sets = self.config.l1_geometry.sets
        self.tag_busy = [[0] * sets for _ in self.caches]

    def decide(self, now: int, req: MemRequest) -> None:
        req.tag_done_cycle = now
        self.serve(now, req, self.caches[req.core_id])

    def start_miss(self, now: int, req: MemRequest, cache: L1Cache) -> None:
        if req.kind is Kind.STORE or self.cpc == 1:
            self.fetch_l2(now, req, cache)
            return
        # the L1 stage of a probing miss ends at L2 departure or on the remote hit
        req.l1_done_cycle = None
        li = self.local_index(cache.cache_id)
        xbar = self.intra[self.cluster_of(cache.cache_id)]
        state = [self.cpc - 1, []]  # replies outstanding, holders
        for j in range(self.cpc):
            if j == li:
                continue
            self.stats.probe_messages += 1
            if self.log:
                self.log(now, "probe", req.request_id, dst=j)
            self.post(xbar, li, j, self.config.request_bytes, now,
                      self._probe_arrive, (req, state, j), req.order_key)

    def _probe_arrive(self, now: int, arg) -> None:
        req, state, j = arg
        p = req.parts
        cache = self.cluster_caches(req.core_id)[j]
        busy = self.tag_busy[cache.cache_id]
        start = max(now, busy[p.set_index])
        busy[p.set_index] = start + 1
        holds = cache.tags.probe(p)[1]
        self.q.schedule(start + self.t_tag, ACCESS, req.order_key, self._probe_reply, (req, state, j, holds))

    def _probe_reply(self, now: int, arg) -> None:
        req, state, j, holds = arg
        xbar = self.intra[self.cluster_of(req.core_id)]
        self.post(xbar, j, self.local_index(req.core_id), self.config.request_bytes, now,
                  self._probe_collect, arg, req.order_key)

    def _probe_collect(self, now: int, arg) -> None:
        req, state, j, holds = arg
        state[0] -= 1
        if holds:
            state[1].append(j)
        if self.log:
            self.log(now, "probe_reply", req.request_id, src=j, hit=int(holds))
        if state[0]:
            return
        cache = self.caches[req.core_id]
        if state[1]:
            target = min(state[1])
            li = self.local_index(cache.cache_id)
            self.post(self.intra[self.cluster_of(cache.cache_id)], li, target,
                      self.config.request_bytes, now, self._remote_arrive,
                      (req, self.cluster_caches(req.core_id)[target]), req.order_key)
        else:
            self.fetch_l2(now, req, cache)

    def _remote_arrive(self, now: int, arg) -> None:
        req, target = arg
        res = access_remote(req.parts, target, now, self.t_data)
        cache = self.caches[req.core_id]
        xbar = self.intra[self.cluster_of(cache.cache_id)]
        ti, li = self.local_index(target.cache_id), self.local_index(cache.cache_id)
        if res.redirect:
            self.stats.dirty_redirects += 1
            if self.log:
                self.log(now, "redirect", req.request_id, cache=target.cache_id)
            self.post(xbar, ti, li, self.config.request_bytes, now, self._redirected, req, req.order_key)
            return
        self.stats.bank_conflict_cycles += res.ready_cycle - self.t_data - now
        if self.log:
            self.log(now, "remote", req.request_id, cache=target.cache_id)
        self.q.schedule(res.ready_cycle, ACCESS, req.order_key, self._remote_respond,
                        (req, ti, li, res.value))

    def _remote_respond(self, now: int, arg) -> None:
        req, ti, li, value = arg
        xbar = self.intra[self.cluster_of(req.core_id)]
        self.post(xbar, ti, li, self.config.sector_bytes, now, self._remote_fill, (req, value), req.order_key)

    def _remote_fill(self, now: int, arg) -> None:
        req, value = arg
        cache = self.caches[req.core_id]
        # the head was counted as a miss when it allocated the MSHR entry
        self.stats.l1_misses -= 1
        self.count_hit(req, remote=True)
        p = req.parts
        sector = p.sector_index
        waiters = cache.mshr.entries[p.line_address]
        if self.config.remote_fill_local or any(
            w.kind is Kind.STORE and w.parts.sector_index == sector for w in waiters
        ):
            self.fill_and_wake(now, req, cache, {sector: value})
            return
        again = []
        for w in cache.mshr.release(p.line_address):
            if w.parts.sector_index == sector:
                w.value = value
                self.complete(w, now)
            else:
                again.append(w)
        self.wake_parked(now, cache, p.line_address)
        self.restart(now, again)

    def _redirected(self, now: int, req: MemRequest) -> None:
        self.fetch_l2(now, req, self.caches[req.core_id])

    def fetch_l2(self, now: int, req: MemRequest, cache: L1Cache) -> None:
        if req.l1_done_cycle is None:
            req.l1_done_cycle = now
        super().fetch_l2(now, req, cache)


class DecoupledPipeline(Pipeline):
    """Each line has one home cache per cluster (line mod cluster size);
    every access crosses the cluster crossbar to its home and back."""

    variant = Architecture.DECOUPLED

    def home(self, req: MemRequest) -> L1Cache:
        base = req.core_id - req.core_id % self.cpc
        return self.caches[base + req.parts.line_address % self.cpc]

    def issue(self, cycle: int, req: MemRequest) -> None:
        self.q.schedule(cycle, ISSUE, req.order_key, self._send_home, req)

    def _send_home(self, now: int, req: MemRequest) -> None:
        home = self.home(req)
        nbytes = self.config.request_bytes
        if req.kind is Kind.STORE:
            nbytes += self.config.sector_bytes
        self.post(self.intra[self.cluster_of(req.core_id)], self.local_index(req.core_id),
                  self.local_index(home.cache_id), nbytes, now, self._at_home, req, req.order_key)

    def _at_home(self, now: int, req: MemRequest) -> None:
        self.q.schedule(now + self.t_tag, DECIDE, req.order_key, self.decide, req)

    def decide(self, now: int, req: MemRequest) -> None:
        req.tag_done_cycle = now
        home = self.home(req)
        entry = self.lookup_local(home, req)
        if entry is not None:
            self.count_hit(req, remote=home.cache_id != req.core_id)
            self.deliver(req, home.cache_id, self.local_hit(now, req, home, entry))
        elif req.kind is Kind.STORE and not self.config.write_allocate:
            self.store_around(now, req, home)
        else:
            self.miss(now, req, home)

    def deliver(self, req: MemRequest, cache_id: int, ready: int) -> None:
        self.q.schedule(ready, ACCESS, req.order_key, self._respond, (req, cache_id))

    def _respond(self, now: int, arg) -> None:
        req, cache_id = arg
        nbytes = self.config.sector_bytes if req.kind is Kind.LOAD else self.config.request_bytes
        self.post(self.intra[self.cluster_of(req.core_id)], self.local_index(cache_id),
                  self.local_index(req.core_id), nbytes, now, self._at_core, req, req.order_key)

    def _at_core(self, now: int, req: MemRequest) -> None:
        self.complete(req, now)


PIPELINES = {
    Architecture.PRIVATE: PrivatePipeline,
    Architecture.REMOTE: RemoteSharingPipeline,
    Architecture.DECOUPLED: DecoupledPipeline,
    Architecture.ATA: AtaPipeline,
}


def make_pipeline(config: SimConfig, queue, stats: SimReport, log=None) -> Pipeline:
    return PIPELINES[config.architecture](config, queue, stats, log)
