"""
Partitioned L2 with fixed hit latency, backed by a fixed-latency memory.

Lines are interleaved over partitions by ``line_address mod partitions``;
within a partition the remaining line bits select set and tag. Each
partition admits one access per cycle. The L2 is non-inclusive and
memory absorbs dirty evictions without timing cost.
"""

from __future__ import annotations

from typing import NamedTuple

from .core import AddressParts, CacheGeometry
from .tagarray import TagArray


class Memory:
    """Flat functional backing store of sector tokens (initial token 0)."""

    def __init__(self) -> None:
        self.values: dict[tuple[int, int], int] = {}

    def read(self, line_address: int, sector: int) -> int:
        return self.values.get((line_address, sector), 0)

    def write(self, line_address: int, sector: int, value: int) -> None:
        self.values[(line_address, sector)] = value


class L2Result(NamedTuple):
    completion: int
    hit: bool
    values: list[int]  # one token per sector of the line; only requested ones are meaningful
    merged: bool = False
    first: int = 0  # lowest requested sector

    @property
    def value(self) -> int:
        """Token of the lowest requested sector (single-sector accesses)."""
        return self.values[self.first]


class L2Partition:
    def __init__(self, partition_id: int, partitions: int, geometry: CacheGeometry,
                 t_l2: int, t_mem: int, memory: Memory):
        self.partition_id = partition_id
        self.partitions = partitions
        self.geometry = geometry
        self.t_l2 = t_l2
        self.t_mem = t_mem
        self.memory = memory
        self.tags = TagArray(partition_id, geometry)
        self.values: dict[int, list[int]] = {}
        self.busy_until = 0
        # line -> (fill completion, sectors being filled) for in-flight misses
        self.pending: dict[int, tuple[int, int]] = {}
        self.full_mask = (1 << geometry.sectors_per_line) - 1
        self.accesses = 0
        self.hits = 0
        self.misses = 0
        self.writebacks = 0

    def _parts(self, line_address: int, sector: int = 0) -> AddressParts:
        local = line_address // self.partitions
        sets = self.geometry.sets
        return AddressParts(local // sets, local % sets, sector, local)

    def _admit(self, now: int) -> int:
        start = now if now >= self.busy_until else self.busy_until
        self.busy_until = start + 1
        return start

    def _evict(self, evicted) -> None:
        global_line = evicted.line_address * self.partitions + self.partition_id
        row = self.values.pop(global_line, None)
        self.pending.pop(global_line, None)
        if evicted.dirty and row is not None:
            for s in range(self.geometry.sectors_per_line):
                if evicted.sectors >> s & 1:
                    self.memory.write(global_line, s, row[s])

    def access(self, line_address: int, sector: int, now: int) -> L2Result:
        """Read one sector."""
        return self.access_sectors(line_address, 1 << sector, now)

    def access_line(self, line_address: int, now: int) -> L2Result:
        """Read every sector of a line (an L1 line fill)."""
        return self.access_sectors(line_address, self.full_mask, now)

    def access_sectors(self, line_address: int, mask: int, now: int) -> L2Result:
        """Read the sectors in ``mask``. It is a hit when all of them are
        resident and none is still on its way from memory; missing sectors
        are filled from memory. An access that only needs sectors already
        being fetched merges with that fill."""
        start = self._admit(now)
        self.accesses += 1
        first = (mask & -mask).bit_length() - 1
        parts = self._parts(line_address)
        entry = self.tags.find(parts.set_index, parts.tag)
        valid = entry.sectors if entry is not None else 0
        pending = self.pending.get(line_address)
        if pending is not None and pending[0] <= start:
            del self.pending[line_address]
            pending = None
        in_flight = pending[1] if pending is not None else 0
        missing = mask & ~valid
        if not missing and not mask & in_flight:
            self.hits += 1
            entry.lru_stamp = start
            return L2Result(start + self.t_l2, True, list(self.values[line_address]), False, first)
        self.misses += 1
        if not missing:
            # everything asked for is already coming from memory
            entry.lru_stamp = start
            return L2Result(pending[0], False, list(self.values[line_address]), True, first)
        evicted = self.tags.install_sectors(parts, missing, start)
        if evicted is not None:
            self._evict(evicted)
        row = self.values.setdefault(line_address, [0] * self.geometry.sectors_per_line)
        for s in range(self.geometry.sectors_per_line):
            if missing >> s & 1:
                row[s] = self.memory.read(line_address, s)
        done = start + self.t_l2 + self.t_mem
        self.pending[line_address] = (done, in_flight | missing)
        return L2Result(done, False, list(row), False, first)

    def writeback(self, line_address: int, sectors: dict[int, int], now: int) -> int:
        """Absorb a dirty L1 victim; resident sectors update in place,
        everything else goes straight to memory. Returns the admit cycle."""
        start = self._admit(now)
        self.writebacks += 1
        local = self._parts(line_address, 0)
        entry = self.tags.find(local.set_index, local.tag)
        for s, value in sectors.items():
            if entry is not None and entry.sectors >> s & 1:
                self.values[line_address][s] = value
                entry.dirty = True
            else:
                self.memory.write(line_address, s, value)
        return start


def partition_of(line_address: int, partitions: int) -> int:
    return line_address % partitions


def l2_access(partition: L2Partition, line_address: int, sector: int, now: int) -> tuple[int, bool]:
    """(completion cycle, hit) of a one-sector read."""
    res = partition.access(line_address, sector, now)
    return res.completion, res.hit


def l2_writeback(partition: L2Partition, line_address: int, sectors: dict[int, int], now: int) -> None:
    partition.writeback(line_address, sectors, now)
