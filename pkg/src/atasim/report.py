"""
Run metrics: counters, per-instruction L1 latency, normalization, output.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, TextIO

from .core import MemRequest


def latency_bucket(latency: int) -> int:
    """Exact buckets below 256, then the next power of two, capped at 2**16."""
    if latency < 256:
        return latency
    if latency >= 1 << 16:
        return 1 << 16
    return 1 << (latency - 1).bit_length()


@dataclass
class SimReport:
    architecture: str = ""
    trace_digest: str = ""
    total_cycles: int = 0
    requests: int = 0
    loads: int = 0
    stores: int = 0
    l1_local_hits: int = 0
    l1_remote_hits: int = 0
    l1_misses: int = 0
    store_hits: int = 0
    store_misses: int = 0
    l2_hits: int = 0
    l2_misses: int = 0
    l2_writebacks: int = 0
    dirty_redirects: int = 0
    mshr_stalls: int = 0
    bank_conflict_cycles: int = 0
    noc_flits: int = 0
    intra_cluster_flits: int = 0
    l2_xbar_flits: int = 0
    probe_messages: int = 0
    l2_departures: int = 0
    l2_departure_delay: int = 0
    instructions: int = 0
    l1_latency_sum: int = 0
    l1_latency_histogram: dict[int, int] = field(default_factory=dict)
    port_flits: dict[str, list[int]] = field(default_factory=dict)

    @property
    def l1_hit_rate(self) -> float:
        return (self.l1_local_hits + self.l1_remote_hits) / self.loads if self.loads else 0.0

    @property
    def throughput(self) -> float:
        return self.requests / self.total_cycles if self.total_cycles else 0.0

    @property
    def mean_l1_latency(self) -> float:
        return self.l1_latency_sum / self.instructions if self.instructions else 0.0

    @property
    def mean_l2_departure_delay(self) -> float:
        return self.l2_departure_delay / self.l2_departures if self.l2_departures else 0.0

    def check(self) -> None:
        assert self.l1_local_hits + self.l1_remote_hits + self.l1_misses == self.loads
        assert self.store_hits + self.store_misses == self.stores
        assert self.loads + self.stores == self.requests
        assert sum(self.l1_latency_histogram.values()) == self.instructions
        assert 0.0 <= self.l1_hit_rate <= 1.0

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["l1_latency_histogram"] = {str(k): v for k, v in sorted(self.l1_latency_histogram.items())}
        out["l1_hit_rate"] = round(self.l1_hit_rate, 6)
        out["throughput"] = round(self.throughput, 6)
        out["mean_l1_latency"] = round(self.mean_l1_latency, 6)
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "SimReport":
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {k: v for k, v in data.items() if k in names}
        kwargs["l1_latency_histogram"] = {int(k): v for k, v in data.get("l1_latency_histogram", {}).items()}
        kwargs["port_flits"] = {k: list(v) for k, v in data.get("port_flits", {}).items()}
        return cls(**kwargs)

    def merge(self, other: "SimReport") -> "SimReport":
        """Sum of counters; used to pool independent runs."""
        out = SimReport(architecture=self.architecture or other.architecture)
        for f in dataclasses.fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, int):
                setattr(out, f.name, a + b)
        out.trace_digest = self.trace_digest if self.trace_digest == other.trace_digest else ""
        hist = dict(self.l1_latency_histogram)
        for k, v in other.l1_latency_histogram.items():
            hist[k] = hist.get(k, 0) + v
        out.l1_latency_histogram = dict(sorted(hist.items()))
        ports = {k: list(v) for k, v in self.port_flits.items()}
        for k, v in other.port_flits.items():
            cur = ports.setdefault(k, [0] * len(v))
            ports[k] = [x + y for x, y in zip(cur, v)]
        out.port_flits = ports
        return out


def instruction_l1_latency(requests: Iterable[MemRequest], instruction_id: int) -> int:
    """L1-stage latency of one load instruction: the slowest of its requests,
    measured from each request's own issue to the point its L1 stage ends
    (hit served, or miss handed to the network)."""
    latencies = [
        r.l1_done_cycle - r.issue_cycle
        for r in requests
        if r.instruction_id == instruction_id and r.is_load
    ]
    if not latencies:
        raise KeyError(f"unknown load instruction {instruction_id}")
    return max(latencies)


def instruction_latencies(requests: Iterable[MemRequest]) -> dict[int, int]:
    out: dict[int, int] = {}
    for r in requests:
        if not r.is_load:
            continue
        lat = r.l1_done_cycle - r.issue_cycle
        if lat > out.get(r.instruction_id, -1):
            out[r.instruction_id] = lat
    return out


_LOG_FIELD = re.compile(r"(\w+)=(\S+)")


def parse_event_log(lines: Iterable[str]) -> list[dict[str, str]]:
    return [dict(_LOG_FIELD.findall(line)) for line in lines if line.strip()]


def latencies_from_event_log(lines: Iterable[str]) -> dict[int, int]:
    """Per-instruction L1 latency recomputed from raw ``issue``/``l1done`` events."""
    issue: dict[str, tuple[int, int, bool]] = {}
    out: dict[int, int] = {}
    for ev in parse_event_log(lines):
        if ev.get("ev") == "issue":
            issue[ev["req"]] = (int(ev["cycle"]), int(ev["inst"]), ev["kind"] == "L")
        elif ev.get("ev") == "l1done":
            t0, inst, is_load = issue[ev["req"]]
            if is_load:
                lat = int(ev["cycle"]) - t0
                if lat > out.get(inst, -1):
                    out[inst] = lat
    return out


class NormalizationError(ValueError):
    pass


def normalize(reports: Mapping[str, SimReport], baseline: str = "private") -> dict[str, float]:
    """Performance relative to the baseline: baseline cycles / arch cycles."""
    if baseline not in reports:
        raise NormalizationError(f"baseline {baseline!r} missing from comparison")
    digests = {r.trace_digest for r in reports.values()}
    if len(digests) > 1:
        raise NormalizationError(f"reports come from different traces: {sorted(digests)}")
    base = reports[baseline].total_cycles
    out = {}
    for arch, rep in reports.items():
        if rep.total_cycles == 0:
            out[arch] = 1.0 if base == 0 else float("inf")
        else:
            out[arch] = base / rep.total_cycles
    return out


COMPARISON_COLUMNS = (
    "architecture", "normalized_performance", "total_cycles", "requests", "loads", "stores",
    "l1_local_hits", "l1_remote_hits", "l1_misses", "l1_hit_rate", "mean_l1_latency",
    "l2_hits", "l2_misses", "bank_conflict_cycles", "noc_flits", "probe_messages",
    "dirty_redirects", "throughput",
)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def comparison_rows(reports: Mapping[str, SimReport], baseline: str = "private") -> list[list[str]]:
    ratios = normalize(reports, baseline) if reports else {}
    rows = []
    for arch, rep in reports.items():
        d = rep.to_dict()
        d["architecture"] = arch
        d["normalized_performance"] = ratios[arch]
        d["l1_hit_rate"] = rep.l1_hit_rate
        d["mean_l1_latency"] = rep.mean_l1_latency
        d["throughput"] = rep.throughput
        rows.append([_fmt(d[c]) for c in COMPARISON_COLUMNS])
    return rows


def report_rows(reports: Sequence[SimReport]) -> list[list[str]]:
    rows = []
    for rep in reports:
        d = rep.to_dict()
        d["architecture"] = rep.architecture
        d["normalized_performance"] = 1.0
        d["l1_hit_rate"] = rep.l1_hit_rate
        d["mean_l1_latency"] = rep.mean_l1_latency
        d["throughput"] = rep.throughput
        rows.append([_fmt(d[c]) for c in COMPARISON_COLUMNS])
    return rows


def write_csv(header: Sequence[str], rows: Iterable[Sequence[str]], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def emit(obj, fmt: str = "json", path: "Optional[str | Path]" = None) -> str:
    """Serialize a SimReport or a {arch: SimReport} comparison.

    JSON mirrors the report fields; CSV has one row per architecture with
    the ``COMPARISON_COLUMNS`` header. Writes to ``path`` when given and
    always returns the text.
    """
    if fmt == "json":
        if isinstance(obj, SimReport):
            text = json.dumps(obj.to_dict(), indent=2, sort_keys=True)
        else:
            payload = {
                "normalized": {k: round(v, 6) for k, v in normalize(obj).items()},
                "reports": {k: r.to_dict() for k, r in obj.items()},
            }
            text = json.dumps(payload, indent=2, sort_keys=True)
        text += "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        if isinstance(obj, SimReport):
            write_csv(COMPARISON_COLUMNS, report_rows([obj]), buf)
        else:
            write_csv(COMPARISON_COLUMNS, comparison_rows(obj), buf)
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text
