"""
Deterministic simulation loop.

Events are ordered by (cycle, phase, key, sequence). Phases fix the order
of work inside a cycle: issue, tag decisions, data/NoC/L2 arrivals,
crossbar arbitration, completions. ``key`` is (core_id, request_id) for
request events, so same-cycle contention is resolved in that order; the
sequence number makes everything else first-come first-served.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO

from .arch import Pipeline, make_pipeline
from .core import Kind, MemRequest, SimConfig, address_decoder, validate_config
from .report import SimReport, instruction_latencies, latency_bucket
from .workload import TraceRecord, trace_digest

DEFAULT_MAX_CYCLES = 10**8


class SimulationTimeout(RuntimeError):
    pass


class EventQueue:
    """Min-heap of events ordered by (cycle, phase, key, sequence)."""

    def __init__(self) -> None:
        self._heap: list = []
        self._seq = 0
        self.now = 0

    def schedule(self, cycle: int, phase: int, key: int, fn: Callable, arg=None) -> None:
        if cycle < self.now:
            raise ValueError(f"event at cycle {cycle} scheduled in the past (now={self.now})")
        heapq.heappush(self._heap, (cycle, phase, key, self._seq, fn, arg))
        self._seq += 1

    def __len__(self) -> int:
        return len(self._heap)

    def next_cycle(self) -> Optional[int]:
        return self._heap[0][0] if self._heap else None

    def pop(self) -> tuple[int, Callable, object]:
        """Remove the earliest event; returns (cycle, fn, arg)."""
        cycle, _, _, _, fn, arg = heapq.heappop(self._heap)
        self.now = cycle
        return cycle, fn, arg


@dataclass
class CoreFrontEnd:
    core_id: int
    records: list[tuple[int, TraceRecord]]  # (request_id, record)
    cursor: int = 0
    next_issue: int = 0
    outstanding: int = 0
    blocked: bool = False
    peak_outstanding: int = 0


@dataclass
class SimResult:
    report: SimReport
    requests: list[MemRequest]
    pipeline: Pipeline
    event_log: list[str] = field(default_factory=list)


class Simulator:
    def __init__(self, config: SimConfig, trace: Sequence[TraceRecord],
                 event_log: Optional[TextIO | list] = None, max_cycles: int = DEFAULT_MAX_CYCLES):
        self.config = validate_config(config)
        self.trace = list(trace)
        self.max_cycles = max_cycles
        self.queue = EventQueue()
        self.stats = SimReport(architecture=config.architecture.value, trace_digest=trace_digest(self.trace))
        self._log_sink = event_log
        log = self._log if event_log is not None else None
        self.pipeline = make_pipeline(config, self.queue, self.stats, log)
        self.pipeline.on_complete = self._complete
        per_core: dict[int, list] = {}
        for i, rec in enumerate(self.trace):
            if rec.core_id >= config.num_cores:
                raise ValueError(f"trace record {i + 1} uses core {rec.core_id} "
                                 f"but the machine has {config.num_cores} cores")
            per_core.setdefault(rec.core_id, []).append((i + 1, rec))
        self.cores = [CoreFrontEnd(c, per_core.get(c, [])) for c in range(config.num_cores)]
        self.requests: list[MemRequest] = []
        for rec in self.trace:
            if rec.kind is Kind.LOAD:
                self.stats.loads += 1
            else:
                self.stats.stores += 1
        self.completed = 0
        self._started = False
        self._limit = config.max_outstanding_per_core
        self._decode = address_decoder(config.l1_geometry, config.set_hash)

    def _log(self, cycle: int, ev: str, req: int, **fields) -> None:
        extra = "".join(f" {k}={v}" for k, v in fields.items())
        line = f"cycle={cycle} ev={ev} req={req}{extra}"
        if isinstance(self._log_sink, list):
            self._log_sink.append(line)
        else:
            self._log_sink.write(line + "\n")

    # -- core front end

    def _advance(self, core: CoreFrontEnd) -> None:
        """Issue every request the core is certain to issue from here on.

        A slot freed at cycle c is usable from c + 1, and completions only
        lower the outstanding count, so while the count (which includes
        requests issued at future cycles) stays below the limit the next
        issue cycle is already known. Pipelines only schedule work at
        issue, which makes issuing ahead of the clock safe.
        """
        records = core.records
        n = len(records)
        cursor, outstanding, t = core.cursor, core.outstanding, core.next_issue
        limit = self._limit
        decode, issue, append = self._decode, self.pipeline.issue, self.requests.append
        logging = self._log_sink is not None
        while cursor < n and outstanding < limit:
            rid, rec = records[cursor]
            cursor += 1
            outstanding += 1
            if rec.cycle > t:
                t = rec.cycle
            req = MemRequest(rid, rec.core_id, rec.address, rec.kind, rec.instruction_id, rec.cycle)
            req.issue_cycle = t
            req.parts = decode(rec.address)
            append(req)
            if logging:
                self._log(t, "issue", rid, core=rec.core_id, kind=rec.kind.value,
                          addr=hex(rec.address), inst=rec.instruction_id)
            issue(t, req)
            t += 1
        core.cursor, core.outstanding, core.next_issue = cursor, outstanding, t
        if outstanding > core.peak_outstanding:
            core.peak_outstanding = outstanding
        core.blocked = cursor < n

    def _complete(self, now: int, req: MemRequest) -> None:
        core = self.cores[req.core_id]
        core.outstanding -= 1
        self.completed += 1
        if core.blocked:
            # a slot freed at cycle c is usable from c + 1
            if core.next_issue <= now:
                core.next_issue = now + 1
            self._advance(core)

    # -- loop

    def start(self) -> None:
        if self._started:
            return
        self._started = True
        for core in self.cores:
            self._advance(core)

    def step(self) -> int:
        """Process every event of the next pending cycle; returns how many ran."""
        self.start()
        q = self.queue
        cycle = q.next_cycle()
        if cycle is None:
            return 0
        if cycle > self.max_cycles:
            raise SimulationTimeout(
                f"cycle ceiling {self.max_cycles} reached with {len(q)} events pending, "
                f"{len(self.requests) - self.completed} requests in flight"
            )
        n = 0
        heap = q._heap
        while heap and heap[0][0] == cycle:
            _, fn, arg = q.pop()
            fn(cycle, arg)
            n += 1
        return n

    def run(self) -> SimResult:
        self.start()
        q = self.queue
        heap = q._heap
        pop = heapq.heappop
        limit = self.max_cycles
        while heap:
            cycle, _, _, _, fn, arg = pop(heap)
            if cycle > limit:
                raise SimulationTimeout(
                    f"cycle ceiling {limit} reached with {len(heap) + 1} events pending, "
                    f"{len(self.requests) - self.completed} requests in flight"
                )
            q.now = cycle
            fn(cycle, arg)
        return self.finish()

    def finish(self) -> SimResult:
        if self.completed != len(self.trace) or len(self.requests) != len(self.trace):
            raise RuntimeError(
                f"drain incomplete: {len(self.trace)} records, {len(self.requests)} issued, "
                f"{self.completed} completed"
            )
        s = self.stats
        s.requests = len(self.requests)
        s.total_cycles = max((r.completion_cycle for r in self.requests), default=0)
        inst = instruction_latencies(self.requests)
        s.instructions = len(inst)
        s.l1_latency_sum = sum(inst.values())
        hist: dict[int, int] = {}
        for lat in inst.values():
            b = latency_bucket(lat)
            hist[b] = hist.get(b, 0) + 1
        s.l1_latency_histogram = dict(sorted(hist.items()))
        p = self.pipeline
        s.intra_cluster_flits = sum(x.flits for x in p.intra)
        s.l2_xbar_flits = p.l2_req.flits + p.l2_resp.flits
        s.noc_flits = s.intra_cluster_flits + s.l2_xbar_flits
        s.port_flits = {x.name: list(x.port_flits) for x in p.crossbars}
        log = self._log_sink if isinstance(self._log_sink, list) else []
        return SimResult(s, self.requests, p, log)


def simulate(config: SimConfig, trace: Sequence[TraceRecord], event_log=None,
             max_cycles: int = DEFAULT_MAX_CYCLES) -> SimResult:
    return Simulator(config, trace, event_log, max_cycles).run()


def run(config: SimConfig, trace: Sequence[TraceRecord], event_log=None,
        max_cycles: int = DEFAULT_MAX_CYCLES) -> SimReport:
    """Drain ``trace`` on the configured architecture and return the report."""
    return simulate(config, trace, event_log, max_cycles).report
