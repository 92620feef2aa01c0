"""
Trace format, synthetic trace generation and inter-core locality analysis.

Trace text format, one record per line, ``#`` starts a comment::

    <cycle> <core> <L|S> <address> <instruction_id>

The cycle is the earliest cycle the record may issue. Addresses accept
hex (``0x``) or decimal. Files ending in ``.gz`` are read and written
compressed.
"""

from __future__ import annotations

import gzip
import hashlib
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from .core import Kind


class TraceRecord(NamedTuple):
    cycle: int
    core_id: int
    kind: Kind
    address: int
    instruction_id: int

    def format(self) -> str:
        return f"{self.cycle} {self.core_id} {self.kind.value} {self.address:#x} {self.instruction_id}"


class TraceError(ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


def _int(text: str, name: str, line_no: int) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise TraceError(line_no, f"bad {name} {text!r}") from None
    if value < 0:
        raise TraceError(line_no, f"negative {name} {text!r}")
    return value


def parse_trace(lines: Iterable[str]) -> list[TraceRecord]:
    records = []
    last_cycle: dict[int, int] = {}
    for line_no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 5:
            raise TraceError(line_no, f"expected 5 fields, got {len(fields)}")
        cycle = _int(fields[0], "cycle", line_no)
        core = _int(fields[1], "core", line_no)
        kind_text = fields[2].upper()
        if kind_text not in ("L", "S"):
            raise TraceError(line_no, f"unknown kind {fields[2]}")
        address = _int(fields[3], "address", line_no)
        if address >= 1 << 64:
            raise TraceError(line_no, f"address {fields[3]} exceeds 64 bits")
        inst = _int(fields[4], "instruction_id", line_no)
        if cycle < last_cycle.get(core, 0):
            raise TraceError(line_no, f"cycle {cycle} goes backwards for core {core}")
        last_cycle[core] = cycle
        records.append(TraceRecord(cycle, core, Kind(kind_text), address, inst))
    return records


def open_text(path: "str | Path", mode: str = "r") -> IO[str]:
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t")
    return open(path, mode)


def read_trace(path: "str | Path") -> list[TraceRecord]:
    with open_text(path) as fh:
        return parse_trace(fh)


def format_trace(records: Iterable[TraceRecord]) -> str:
    return "".join(r.format() + "\n" for r in records)


def write_trace(records: Iterable[TraceRecord], path: "str | Path") -> None:
    text = format_trace(records)
    if str(path).endswith(".gz"):
        # no name and a fixed mtime keep compressed output byte-identical
        with open(path, "wb") as raw, gzip.GzipFile(filename="", fileobj=raw, mode="wb", mtime=0) as gz:
            gz.write(text.encode())
    else:
        Path(path).write_text(text)


def trace_digest(records: Sequence[TraceRecord]) -> str:
    h = hashlib.sha256()
    for r in records:
        h.update(r.format().encode())
        h.update(b"\n")
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class GeneratorParams:
    cores: int = 10
    lines_private: int = 128
    lines_shared: int = 256
    shared_prob: float = 0.8
    requests_per_core: int = 2000
    zipf_s: float = 0.8
    stride: int = 1
    seed: int = 1
    store_prob: float = 0.0
    line_size: int = 128
    sector_size: int = 32


GENERATOR_FIELDS = tuple(GeneratorParams.__dataclass_fields__)


def generate(params: GeneratorParams) -> list[TraceRecord]:
    """Synthetic multi-core trace with tunable inter-core locality.

    Each instruction walks the sectors of one line (one request per sector,
    so 4 requests for 128B/32B lines). With probability ``shared_prob`` the
    line is drawn Zipf(``zipf_s``) from a region every core shares,
    otherwise it is the next line of the core's strided walk over its own
    private region. Stores only target private lines, so every written
    line has a single writer. Record ``i`` of a core is eligible at cycle
    ``i``.
    """
    p = params
    if not 0.0 <= p.shared_prob <= 1.0:
        raise ValueError(f"shared_prob must be in [0, 1], got {p.shared_prob}")
    if not 0.0 <= p.store_prob <= 1.0:
        raise ValueError(f"store_prob must be in [0, 1], got {p.store_prob}")
    if p.shared_prob > 0 and p.lines_shared <= 0:
        raise ValueError("lines_shared must be positive when shared_prob > 0")
    if p.shared_prob < 1 and p.lines_private <= 0:
        raise ValueError("lines_private must be positive when shared_prob < 1")
    if p.cores <= 0 or p.requests_per_core < 0:
        raise ValueError("cores must be positive and requests_per_core non-negative")

    spl = p.line_size // p.sector_size
    rng = np.random.default_rng(p.seed)
    n_inst = -(-p.requests_per_core // spl)
    if p.lines_shared > 0:
        weights = 1.0 / np.arange(1, p.lines_shared + 1) ** p.zipf_s
        weights /= weights.sum()
    shared_base = 0
    private_base = p.lines_shared

    per_core: list[list[TraceRecord]] = []
    inst_id = 0
    for core in range(p.cores):
        is_shared = rng.random(n_inst) < p.shared_prob
        shared_lines = (
            rng.choice(p.lines_shared, size=n_inst, p=weights) if p.lines_shared > 0 else None
        )
        is_store = rng.random(n_inst) < p.store_prob
        records = []
        walk = 0
        for i in range(n_inst):
            if is_shared[i]:
                line = shared_base + int(shared_lines[i])
                kind = Kind.LOAD
            else:
                line = private_base + core * p.lines_private + (walk * p.stride) % p.lines_private
                walk += 1
                kind = Kind.STORE if is_store[i] else Kind.LOAD
            inst_id += 1
            for s in range(spl):
                if len(records) == p.requests_per_core:
                    break
                records.append(
                    TraceRecord(len(records), core, kind, line * p.line_size + s * p.sector_size, inst_id)
                )
        per_core.append(records)
    # interleave by cycle so the file reads chronologically
    out = [r for recs in zip(*per_core) for r in recs] if per_core else []
    longest = max((len(r) for r in per_core), default=0)
    if any(len(r) != longest for r in per_core):
        out = sorted((r for recs in per_core for r in recs), key=lambda r: (r.cycle, r.core_id))
    return out


@dataclass
class LocalityProfile:
    distinct_lines: int = 0
    replicated_lines: int = 0
    sharing_histogram: dict[int, int] = field(default_factory=dict)
    footprint: dict[int, int] = field(default_factory=dict)

    @property
    def replication_ratio(self) -> float:
        return self.replicated_lines / self.distinct_lines if self.distinct_lines else 0.0

    def label(self, threshold: float = 0.5) -> str:
        return "high" if self.replication_ratio >= threshold else "low"


def analyze_locality(records: Iterable[TraceRecord], line_size: int = 128) -> LocalityProfile:
    """Which lines are touched by more than one core."""
    cores_of: dict[int, set[int]] = defaultdict(set)
    for r in records:
        cores_of[r.address // line_size].add(r.core_id)
    hist = Counter(len(c) for c in cores_of.values())
    footprint: Counter = Counter()
    for cores in cores_of.values():
        for c in cores:
            footprint[c] += 1
    return LocalityProfile(
        distinct_lines=len(cores_of),
        replicated_lines=sum(n for k, n in hist.items() if k >= 2),
        sharing_histogram=dict(sorted(hist.items())),
        footprint=dict(sorted(footprint.items())),
    )


def shared_fraction(records: Iterable[TraceRecord], lines_shared: int, line_size: int = 128) -> float:
    """Fraction of references that fall in the shared region of a generated trace."""
    total = shared = 0
    for r in records:
        total += 1
        if r.address // line_size < lines_shared:
            shared += 1
    return shared / total if total else 0.0
