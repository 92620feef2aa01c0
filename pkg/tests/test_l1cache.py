import pytest
from hypothesis import given, strategies as st

from atasim.core import CacheGeometry, Kind, MemRequest, decode_address
from atasim.l1cache import (
    DataArray, L1Cache, Mshr, MshrResult, Route, access_remote, bank_schedule, distribute,
    fill_local, write_local,
)
from atasim.tagarray import PresenceVector

from conftest import addr, tiny_geometry

G = CacheGeometry()


def req(rid, core, line, sector=0, kind=Kind.LOAD):
    r = MemRequest(rid, core, addr(line, sector), kind, rid)
    r.parts = decode_address(r.address, G)
    return r


def pv(*bits):
    return PresenceVector(tuple(bits), tuple(bool(b) for b in bits))


class TestDistribute:
    def test_remote_hit(self):
        # core 1 is local index 0 and cache 2 holds the line
        assert str(distribute(pv(0, 1), 0)) == "RemoteHit(1)"

    def test_local_priority(self):
        assert distribute(pv(1, 1), 0).route is Route.LOCAL_HIT

    def test_all_miss(self):
        assert distribute(pv(0, 0), 0).route is Route.MISS_TO_L2

    def test_fewest_queued_then_lowest_index(self):
        assert distribute(pv(0, 1, 1, 1), 0, queued=[0, 3, 1, 1]).target == 2
        assert distribute(pv(0, 1, 1, 1), 0, queued=[0, 0, 0, 0]).target == 1

    def test_line_present_without_sector_is_not_a_hit(self):
        p = PresenceVector((0, 1), (False, False))
        assert distribute(p, 0).route is Route.MISS_TO_L2


def bank_oracle(banks_of: list[int], now: int) -> list[int]:
    """Independent per-bank FIFO replay: the i-th arrival at a bank starts i cycles late."""
    seen: dict[int, int] = {}
    out = []
    for b in banks_of:
        out.append(now + seen.get(b, 0))
        seen[b] = seen.get(b, 0) + 1
    return out


class TestBankSchedule:
    def test_distinct_banks_start_together(self):
        data = DataArray(0, G)
        accesses = [(req(i + 1, i, line), req(i + 1, i, line).parts) for i, line in enumerate([0, 1, 2, 3])]
        assert bank_schedule(accesses, data, 10) == [10, 10, 10, 10]

    @pytest.mark.parametrize("k", [2, 4, 8])
    def test_same_bank_serializes(self, k):
        data = DataArray(0, G)
        accesses = [(req(i + 1, i, 4 * i), req(i + 1, i, 4 * i).parts) for i in range(k)]
        starts = bank_schedule(accesses, data, 0)
        assert sorted(starts) == list(range(k))

    @given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 63)), min_size=1, max_size=20, unique_by=lambda t: t[0]))
    def test_matches_queue_oracle(self, picks):
        data = DataArray(0, G)
        accesses = [(req(i + 1, core, line), req(i + 1, core, line).parts) for i, (core, line) in enumerate(picks)]
        starts = bank_schedule(accesses, data, 5)
        order = sorted(range(len(accesses)), key=lambda i: (accesses[i][0].core_id, accesses[i][0].request_id))
        want = bank_oracle([accesses[i][1].set_index % 4 for i in order], 5)
        assert [starts[i] for i in order] == want


class TestMshr:
    def test_allocate_merge_full(self):
        m = Mshr(2)
        assert m.request(10, req(1, 0, 10)) is MshrResult.ALLOCATED
        assert m.request(10, req(2, 0, 10, 1)) is MshrResult.MERGED
        assert m.request(11, req(3, 0, 11)) is MshrResult.ALLOCATED
        assert m.request(12, req(4, 0, 12)) is MshrResult.FULL
        assert [r.request_id for r in m.release(10)] == [1, 2]
        assert len(m) == 1

    def test_unpark_wakes_released_key_then_oldest_groups(self):
        m = Mshr(1)
        m.request(1, req(1, 0, 1))
        for rid, line in [(2, 5), (3, 1), (4, 6), (5, 5)]:
            m.park(line, req(rid, 0, line))
        m.release(1)
        woken = [r.request_id for r in m.unpark(1)]
        # key 1 itself, then the oldest group (line 5, both requests)
        assert woken == [3, 2, 5]
        assert list(m.parked) == [6]


class TestRemoteAccess:
    def setup_method(self):
        self.cache = L1Cache(1, G, 4)
        self.r = req(1, 0, 9, 2)
        fill_local(self.cache, self.r.parts, {2: 77}, 0)

    def test_clean_line_returns_data_after_bank_and_t_data(self):
        res = access_remote(self.r.parts, self.cache, 10, 24)
        assert (res.redirect, res.value, res.ready_cycle) == (False, 77, 34)
        # a second access in the same cycle waits one cycle for the bank
        assert access_remote(self.r.parts, self.cache, 10, 24).ready_cycle == 35

    def test_dirty_line_redirects(self):
        w = req(2, 1, 9, 2, Kind.STORE)
        assert write_local(self.cache, w.parts, 2, 5)
        assert access_remote(self.r.parts, self.cache, 10, 24).redirect

    def test_evicted_line_redirects(self):
        g = tiny_geometry(ways=1, sets=1)
        cache = L1Cache(0, g, 4)
        a = decode_address(addr(1), g)
        fill_local(cache, a, {0: 5}, 0)
        fill_local(cache, decode_address(addr(2), g), {0: 6}, 1)
        assert access_remote(a, cache, 2, 24).redirect

    def test_remote_read_touches_lru(self):
        access_remote(self.r.parts, self.cache, 50, 24)
        assert self.cache.tags.find(self.r.parts.set_index, self.r.parts.tag).lru_stamp == 50


class TestFill:
    def test_fill_keeps_valid_sector(self):
        cache = L1Cache(0, G, 4)
        p = req(1, 0, 3, 1).parts
        fill_local(cache, p, {1: 10}, 0)
        write_local(cache, p, 42, 1)
        fill_local(cache, p, {0: 1, 1: 2, 2: 3, 3: 4}, 2)
        assert cache.data.read(3 * 1, 1) == 42
        assert cache.data.read(3, 0) == 1

    def test_sector_fill_leaves_neighbours_invalid(self):
        cache = L1Cache(0, G, 4)
        fill_local(cache, req(1, 0, 3, 2).parts, {2: 1}, 0)
        assert cache.tags.probe(req(2, 0, 3, 3).parts) == (True, False)

    def test_dirty_victim_is_reported(self):
        g = tiny_geometry(ways=1, sets=1)
        cache = L1Cache(0, g, 4)
        a = decode_address(addr(1, 0), g)
        fill_local(cache, a, {0: 5}, 0)
        write_local(cache, a, 9, 1)
        ev, values = fill_local(cache, decode_address(addr(2), g), {0: 6}, 2)
        assert ev.dirty and ev.line_address == 1 and values[0] == 9

    def test_write_local_miss_reports_false(self):
        cache = L1Cache(0, G, 4)
        assert not write_local(cache, req(1, 0, 3).parts, 1, 0)
