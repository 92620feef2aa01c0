from __future__ import annotations

from typing import Iterable, Sequence

import pytest

from atasim.core import Architecture, CacheGeometry, Kind, SimConfig
from atasim.workload import TraceRecord

LINE = 128
SECTOR = 32


def addr(line: int, sector: int = 0) -> int:
    return line * LINE + sector * SECTOR


def make_trace(rows: Iterable[Sequence]) -> list[TraceRecord]:
    """Rows of (cycle, core, "L"|"S", address, instruction_id)."""
    return [TraceRecord(c, core, Kind(k), a, i) for c, core, k, a, i in rows]


def small_config(arch: Architecture = Architecture.PRIVATE, cores: int = 2, cpc: int = 2, **kw) -> SimConfig:
    return SimConfig(num_cores=cores, cores_per_cluster=cpc, architecture=arch, **kw)


def tiny_geometry(ways: int = 2, sets: int = 2, banks: int = 1) -> CacheGeometry:
    return CacheGeometry(capacity_bytes=ways * sets * LINE, line_size=LINE, sector_size=SECTOR,
                         ways=ways, data_banks=banks)


def expected_values(trace: Sequence[TraceRecord]) -> dict[int, int]:
    """Flat functional memory: the value every load should observe, keyed by
    request id (trace index + 1). Valid for traces whose written lines are
    only ever touched by their writer."""
    mem: dict[int, int] = {}
    out: dict[int, int] = {}
    for i, r in enumerate(trace):
        key = r.address // SECTOR
        if r.kind is Kind.STORE:
            mem[key] = i + 1
        else:
            out[i + 1] = mem.get(key, 0)
    return out


def value_mismatches(trace, requests) -> list:
    want = expected_values(trace)
    return [r for r in requests if r.is_load and r.value != want[r.request_id]]


ALL_ARCHS = list(Architecture)


@pytest.fixture(params=ALL_ARCHS, ids=lambda a: a.value)
def arch(request) -> Architecture:
    return request.param


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    prev = ACCEPTANCE.get(number)
    if prev is not None:
        passed = passed and prev[0]
        detail = f"{prev[1]}; {detail}"
    ACCEPTANCE[number] = (passed, detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
