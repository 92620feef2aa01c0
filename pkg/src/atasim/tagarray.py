"""
Decoupled tag arrays and the cluster-wide aggregated tag array.

Tag state lives only here; data arrays hold values keyed by line address
and never consult tags themselves. Every set sits on its own bank, so a
batch of lookups from different cores is resolved in a single tag cycle
no matter which sets the requests select.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .core import AddressParts, CacheGeometry, line_of


@dataclass(slots=True)
class TagEntry:
    tag: int = 0
    sectors: int = 0  # bit i set => sector i valid
    dirty: bool = False
    lru_stamp: int = 0

    @property
    def valid(self) -> bool:
        return self.sectors != 0

    def sector_valid(self, sector: int) -> bool:
        return bool(self.sectors >> sector & 1)

    def bitstring(self, sectors_per_line: int) -> str:
        return "".join("1" if self.sectors >> i & 1 else "0" for i in range(sectors_per_line))


class Eviction(NamedTuple):
    line_address: int
    tag: int
    set_index: int
    way: int
    sectors: int
    dirty: bool


class TagArray:
    """Tag metadata of one cache: ``sets`` x ``ways`` entries, one bank per set."""

    def __init__(self, owner_cache_id: int, geometry: CacheGeometry, set_hash: str = "modulo"):
        self.owner_cache_id = owner_cache_id
        self.geometry = geometry
        self.set_hash = set_hash
        self.sets = [[TagEntry() for _ in range(geometry.ways)] for _ in range(geometry.sets)]
        # per-set tag -> way map for valid entries
        self._where: list[dict[int, int]] = [{} for _ in range(geometry.sets)]

    def find(self, set_index: int, tag: int) -> Optional[TagEntry]:
        way = self._where[set_index].get(tag)
        return None if way is None else self.sets[set_index][way]

    def way_of(self, set_index: int, tag: int) -> Optional[int]:
        return self._where[set_index].get(tag)

    def probe(self, parts: AddressParts) -> tuple[bool, bool]:
        """(line present, requested sector valid)."""
        way = self._where[parts.set_index].get(parts.tag)
        if way is None:
            return False, False
        return True, bool(self.sets[parts.set_index][way].sectors >> parts.sector_index & 1)

    def lru_victim(self, set_index: int) -> int:
        ways = self.sets[set_index]
        best, best_stamp = 0, None
        for i, entry in enumerate(ways):
            if not entry.sectors:
                return i
            if best_stamp is None or entry.lru_stamp < best_stamp:
                best, best_stamp = i, entry.lru_stamp
        return best

    def install_line(self, parts: AddressParts, sector: int, now: int) -> Optional[Eviction]:
        """Make ``sector`` of the line valid, allocating a way if needed.

        Returns the replaced entry when a valid line is evicted; the caller
        decides what to do with it (dirty victims need a write-back).
        """
        return self.install_sectors(parts, 1 << sector, now)

    def install_sectors(self, parts: AddressParts, mask: int, now: int) -> Optional[Eviction]:
        """``install_line`` for every sector set in ``mask``."""
        set_index, tag = parts.set_index, parts.tag
        where = self._where[set_index]
        way = where.get(tag)
        if way is not None:
            entry = self.sets[set_index][way]
            entry.sectors |= mask
            entry.lru_stamp = now
            return None
        way = self.lru_victim(set_index)
        entry = self.sets[set_index][way]
        evicted = None
        if entry.sectors:
            evicted = Eviction(
                line_of(entry.tag, set_index, self.geometry, self.set_hash),
                entry.tag, set_index, way, entry.sectors, entry.dirty,
            )
            del where[entry.tag]
        entry.tag = tag
        entry.sectors = mask
        entry.dirty = False
        entry.lru_stamp = now
        where[tag] = way
        return evicted

    def touch(self, parts: AddressParts, now: int) -> None:
        way = self._where[parts.set_index].get(parts.tag)
        if way is None:
            raise KeyError(
                f"touch of absent line {parts.line_address:#x} in cache {self.owner_cache_id}"
            )
        self.sets[parts.set_index][way].lru_stamp = now

    def mark_dirty(self, parts: AddressParts) -> None:
        entry = self.find(parts.set_index, parts.tag)
        if entry is None:
            raise KeyError(f"dirtying absent line {parts.line_address:#x}")
        entry.dirty = True

    def resident_lines(self) -> set[int]:
        out = set()
        for s, where in enumerate(self._where):
            for tag in where:
                out.add(line_of(tag, s, self.geometry, self.set_hash))
        return out

    def check(self) -> None:
        """Assert the structural invariants (used by tests)."""
        for s, ways in enumerate(self.sets):
            seen = {}
            for w, e in enumerate(ways):
                if e.dirty:
                    assert e.sectors, f"dirty entry without valid sectors at set {s} way {w}"
                if e.sectors:
                    assert e.tag not in seen, f"duplicate tag {e.tag:#x} in set {s}"
                    seen[e.tag] = w
            assert seen == self._where[s], f"index out of sync in set {s}"

    def dump(self) -> list[str]:
        """One line per valid entry in the debug format."""
        spl = self.geometry.sectors_per_line
        lines = []
        for s, ways in enumerate(self.sets):
            for w, e in enumerate(ways):
                if e.sectors:
                    lines.append(
                        f"cache={self.owner_cache_id} set={s} way={w} tag={e.tag:#x} "
                        f"sectors={e.bitstring(spl)} dirty={int(e.dirty)} lru={e.lru_stamp}"
                    )
        return lines


class PresenceVector(NamedTuple):
    bits: tuple[int, ...]
    hit_sector: tuple[bool, ...]

    def __str__(self) -> str:
        return "[" + ",".join(str(b) for b in self.bits) + "]"


def presence(parts: AddressParts, arrays: Sequence[TagArray]) -> PresenceVector:
    set_index, tag, sector = parts.set_index, parts.tag, parts.sector_index
    bits = []
    hits = []
    for array in arrays:
        way = array._where[set_index].get(tag)
        if way is None:
            bits.append(0)
            hits.append(False)
        else:
            bits.append(1)
            hits.append(bool(array.sets[set_index][way].sectors >> sector & 1))
    return PresenceVector(tuple(bits), tuple(hits))


def aggregated_lookup(
    requests: Iterable[tuple[int, AddressParts]], arrays: Sequence[TagArray]
) -> list[PresenceVector]:
    """Compare every request against every tag array of the cluster at once.

    Each request gets its own comparator group and the tag selector routes
    the selected set of every array to it, so requests that share or differ
    in set index are resolved in the same cycle. Lookups do not modify
    state, which makes the result independent of request order.
    """
    return [presence(parts, arrays) for _core, parts in requests]
