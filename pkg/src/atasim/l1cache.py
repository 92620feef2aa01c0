"""
L1 data side: banked sector data array, MSHR, and the request distributor.

Values are opaque integer tokens (the id of the store that wrote them, or
the memory's initial token), which is enough to check functional
correctness without carrying bytes around.
"""

from __future__ import annotations

import enum
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .core import AddressParts, CacheGeometry, MemRequest
from .tagarray import Eviction, PresenceVector, TagArray


class DataArray:
    """Banked data SRAM of one cache. ``bank = set_index mod banks``."""

    def __init__(self, owner_cache_id: int, geometry: CacheGeometry):
        self.owner_cache_id = owner_cache_id
        self.banks = geometry.data_banks
        self.sectors_per_line = geometry.sectors_per_line
        self.busy_until = [0] * self.banks
        self.values: dict[int, list[int]] = {}
        self.conflict_cycles = 0
        self.accesses = 0

    def bank_of(self, parts: AddressParts) -> int:
        return parts.set_index % self.banks

    def reserve(self, bank: int, arrival: int) -> int:
        """Claim the bank for one cycle at or after ``arrival``; return the start cycle."""
        busy = self.busy_until[bank]
        start = arrival if arrival >= busy else busy
        self.busy_until[bank] = start + 1
        self.conflict_cycles += start - arrival
        self.accesses += 1
        return start

    def queued(self, now: int) -> int:
        """Accesses accepted but not yet started (each holds its bank one cycle)."""
        return sum(b - now for b in self.busy_until if b > now)

    def read(self, line_address: int, sector: int) -> int:
        return self.values[line_address][sector]

    def write(self, line_address: int, sector: int, value: int) -> None:
        row = self.values.get(line_address)
        if row is None:
            row = self.values[line_address] = [0] * self.sectors_per_line
        row[sector] = value

    def drop(self, line_address: int) -> list[int]:
        return self.values.pop(line_address, [0] * self.sectors_per_line)


def bank_schedule(
    accesses: Sequence[tuple[MemRequest, AddressParts]], data: DataArray, now: int
) -> list[int]:
    """Start cycles for a batch of same-cycle accesses to one data array.

    Distinct banks start together; accesses sharing a bank are served one
    per cycle in (core_id, request_id) order. Returned list is aligned with
    ``accesses``.
    """
    order = sorted(range(len(accesses)), key=lambda i: (accesses[i][0].core_id, accesses[i][0].request_id))
    starts = [0] * len(accesses)
    for i in order:
        starts[i] = data.reserve(data.bank_of(accesses[i][1]), now)
    return starts


class MshrResult(enum.Enum):
    ALLOCATED = "allocated"
    MERGED = "merged"
    FULL = "full"


class Mshr:
    """Outstanding line fills keyed by line address; every request that
    misses on the line while the fill is in flight waits on the entry."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.entries: dict[int, list[MemRequest]] = {}
        # requests turned away while full, grouped by key in arrival order
        self.parked: dict[int, list[MemRequest]] = {}
        self.peak = 0

    def request(self, key: int, req: MemRequest) -> MshrResult:
        waiters = self.entries.get(key)
        if waiters is not None:
            waiters.append(req)
            return MshrResult.MERGED
        if len(self.entries) >= self.capacity:
            return MshrResult.FULL
        self.entries[key] = [req]
        if len(self.entries) > self.peak:
            self.peak = len(self.entries)
        return MshrResult.ALLOCATED

    def release(self, key: int) -> list[MemRequest]:
        return self.entries.pop(key)

    def park(self, key: int, req: MemRequest) -> None:
        group = self.parked.get(key)
        if group is None:
            self.parked[key] = [req]
        else:
            group.append(req)

    def unpark(self, released: int) -> list[MemRequest]:
        """Parked requests that can make progress once ``released`` is freed:
        those on the released key, then whole groups, oldest first, up to
        the free capacity. Each group then allocates once and merges."""
        parked = self.parked
        if not parked:
            return []
        out = parked.pop(released, [])
        free = self.capacity - len(self.entries)
        while free > 0 and parked:
            key = next(iter(parked))
            out.extend(parked.pop(key))
            free -= 1
        return out

    def unpark_key(self, key: int) -> list[MemRequest]:
        """Parked requests that can merge into a newly allocated entry."""
        return self.parked.pop(key, []) if self.parked else []

    def __contains__(self, key: int) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)


class L1Cache:
    """One L1: its (decoupled) tag array, data array and MSHR."""

    def __init__(self, cache_id: int, geometry: CacheGeometry, mshr_entries: int, set_hash: str = "modulo"):
        self.cache_id = cache_id
        self.tags = TagArray(cache_id, geometry, set_hash)
        self.data = DataArray(cache_id, geometry)
        self.mshr = Mshr(mshr_entries)


class Route(enum.Enum):
    LOCAL_HIT = "LocalHit"
    REMOTE_HIT = "RemoteHit"
    MISS_TO_L2 = "MissToL2"


class RoutingDecision(NamedTuple):
    route: Route
    target: Optional[int] = None  # cluster-local index of the remote cache

    def __str__(self) -> str:
        if self.route is Route.REMOTE_HIT:
            return f"RemoteHit({self.target})"
        return self.route.value


def distribute(
    presence: PresenceVector, local_index: int, queued: Optional[Sequence[int]] = None
) -> RoutingDecision:
    """Pick where a load goes after the aggregated tag comparison.

    The local cache wins whenever it holds the sector. Among several
    remote holders the one with the fewest queued data-array accesses is
    chosen, lowest index first on ties.
    """
    hits = presence.hit_sector
    if hits[local_index]:
        return RoutingDecision(Route.LOCAL_HIT)
    best = None
    for i, ok in enumerate(hits):
        if not ok or i == local_index:
            continue
        if best is None or (queued is not None and queued[i] < queued[best]):
            best = i
    if best is None:
        return RoutingDecision(Route.MISS_TO_L2)
    return RoutingDecision(Route.REMOTE_HIT, best)


class RemoteAccess(NamedTuple):
    redirect: bool
    value: int = 0
    ready_cycle: int = 0


def access_remote(
    parts: AddressParts, target: L1Cache, now: int, t_data: int, touch: bool = True
) -> RemoteAccess:
    """Read a sector from a remote cache after an earlier tag hit.

    The tag is checked again: a line evicted since the lookup, or one whose
    dirty bit was set by its owner, sends the request to L2 instead.
    """
    entry = target.tags.find(parts.set_index, parts.tag)
    if entry is None or entry.dirty or not entry.sectors >> parts.sector_index & 1:
        return RemoteAccess(True)
    if touch:
        entry.lru_stamp = now
    start = target.data.reserve(target.data.bank_of(parts), now)
    return RemoteAccess(False, target.data.read(parts.line_address, parts.sector_index), start + t_data)


def fill_local(
    cache: L1Cache, parts: AddressParts, payload: Mapping[int, int], now: int
) -> tuple[Optional[Eviction], list[int]]:
    """Install returned sectors (``payload`` maps sector -> token) in ``cache``.

    A remote hit brings one sector, an L2 fill the whole line. Sectors that
    became valid in the meantime keep their current value. Returns the
    evicted entry (if any) and the values it held, so that a dirty victim
    can be written back.
    """
    tags, data = cache.tags, cache.data
    entry = tags.find(parts.set_index, parts.tag)
    valid = entry.sectors if entry is not None else 0
    mask = 0
    for s in payload:
        mask |= 1 << s
    evicted = tags.install_sectors(parts, mask, now)
    victim_values: list[int] = []
    if evicted is not None:
        victim_values = data.drop(evicted.line_address)
    for s, value in payload.items():
        if not valid >> s & 1:
            data.write(parts.line_address, s, value)
    return evicted, victim_values


def write_local(cache: L1Cache, parts: AddressParts, token: int, now: int) -> bool:
    """Apply a store to its local cache. Returns False when the sector is not
    resident (the caller then write-allocates or forwards to L2)."""
    entry = cache.tags.find(parts.set_index, parts.tag)
    if entry is None or not entry.sectors >> parts.sector_index & 1:
        return False
    entry.dirty = True
    entry.lru_stamp = now
    cache.data.write(parts.line_address, parts.sector_index, token)
    return True


def dump_caches(caches: Iterable[L1Cache]) -> list[str]:
    out: list[str] = []
    for c in caches:
        out.extend(c.tags.dump())
    return out
