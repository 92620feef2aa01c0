import gzip

import pytest
from hypothesis import given, settings, strategies as st

from atasim.core import Kind
from atasim.workload import (
    GeneratorParams, TraceError, TraceRecord, analyze_locality, format_trace, generate,
    parse_trace, read_trace, shared_fraction, trace_digest, write_trace,
)

from conftest import addr, make_trace


class TestParse:
    def test_load_and_store(self):
        got = parse_trace(["0 0 L 0x1080 1", "5 2 S 0x20 7  # trailing comment", "", "# only a comment"])
        assert got == [TraceRecord(0, 0, Kind.LOAD, 0x1080, 1), TraceRecord(5, 2, Kind.STORE, 0x20, 7)]

    @pytest.mark.parametrize("line,msg", [
        ("0 0 X 0x0 1", "unknown kind X"),
        ("0 0 L 0x0", "expected 5 fields"),
        ("0 0 L zz 1", "bad address 'zz'"),
        ("-1 0 L 0 1", "negative cycle"),
        ("0 0 L 0x10000000000000000 1", "exceeds 64 bits"),
    ])
    def test_errors_name_line_and_field(self, line, msg):
        with pytest.raises(TraceError, match=msg) as exc:
            parse_trace(["0 0 L 0 1", line])
        assert exc.value.line_no == 2

    def test_cycle_must_not_go_backwards_per_core(self):
        parse_trace(["5 0 L 0 1", "3 1 L 0 2"])
        with pytest.raises(TraceError, match="goes backwards"):
            parse_trace(["5 0 L 0 1", "3 0 L 0 2"])

    @pytest.mark.parametrize("name", ["t.trace", "t.trace.gz"])
    def test_file_round_trip(self, tmp_path, name):
        trace = generate(GeneratorParams(cores=3, requests_per_core=50, store_prob=0.3, seed=4))
        path = tmp_path / name
        write_trace(trace, path)
        assert read_trace(path) == trace
        if name.endswith(".gz"):
            assert gzip.decompress(path.read_bytes()).decode() == format_trace(trace)
            first = path.read_bytes()
            write_trace(trace, path)
            assert path.read_bytes() == first


class TestGenerate:
    def test_same_seed_same_trace(self):
        p = GeneratorParams(cores=4, requests_per_core=500, store_prob=0.2, seed=7)
        assert generate(p) == generate(p)
        assert trace_digest(generate(p)) != trace_digest(generate(GeneratorParams(seed=8)))

    def test_instruction_walks_sectors(self):
        trace = generate(GeneratorParams(cores=1, requests_per_core=8, seed=1))
        first = [r for r in trace if r.instruction_id == trace[0].instruction_id]
        assert [r.address % 128 for r in first] == [0, 32, 64, 96]
        assert len({r.address // 128 for r in first}) == 1
        assert [r.cycle for r in trace] == list(range(8))

    def test_shared_fraction_tracks_probability(self):
        p = GeneratorParams(cores=10, requests_per_core=10_000, shared_prob=0.8, seed=3)
        assert abs(shared_fraction(generate(p), p.lines_shared) - 0.8) <= 0.02

    def test_stores_only_hit_private_lines(self):
        p = GeneratorParams(cores=4, requests_per_core=2000, shared_prob=0.5, store_prob=0.5, seed=2)
        trace = generate(p)
        writers: dict[int, set] = {}
        for r in trace:
            if r.kind is Kind.STORE:
                assert r.address // 128 >= p.lines_shared
                writers.setdefault(r.address // 128, set()).add(r.core_id)
        assert all(len(w) == 1 for w in writers.values())
        touched = {}
        for r in trace:
            touched.setdefault(r.address // 128, set()).add(r.core_id)
        assert all(touched[line] == w for line, w in writers.items())

    @pytest.mark.parametrize("kw,msg", [
        ({"shared_prob": 1.5}, "shared_prob"),
        ({"shared_prob": 0.5, "lines_shared": 0}, "lines_shared"),
        ({"shared_prob": 0.5, "lines_private": 0}, "lines_private"),
    ])
    def test_bad_params(self, kw, msg):
        with pytest.raises(ValueError, match=msg):
            generate(GeneratorParams(**kw))

    def test_zero_sharing_has_no_replication(self):
        prof = analyze_locality(generate(GeneratorParams(cores=5, shared_prob=0.0, seed=1)))
        assert prof.replication_ratio == 0 and prof.label() == "low"

    def test_full_sharing_replicates_reused_lines(self):
        trace = generate(GeneratorParams(cores=10, shared_prob=1.0, lines_shared=64, seed=1))
        counts: dict[int, int] = {}
        for r in trace:
            counts[r.address // 128] = counts.get(r.address // 128, 0) + 1
        prof = analyze_locality(trace)
        assert prof.replicated_lines == sum(1 for n in counts.values() if n >= 2 * 4)
        assert prof.label() == "high"


class TestLocality:
    def test_disjoint_cores(self):
        prof = analyze_locality(make_trace([(0, 0, "L", addr(1), 1), (0, 1, "L", addr(2), 2)]))
        assert prof.replication_ratio == 0
        assert prof.footprint == {0: 1, 1: 1}

    def test_one_shared_line(self):
        prof = analyze_locality(make_trace([(0, 0, "L", addr(3), 1), (0, 1, "L", addr(3, 2), 2)]))
        assert prof.replication_ratio == 1 and prof.sharing_histogram == {2: 1}

    @settings(max_examples=50)
    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 30)), max_size=80))
    def test_matches_independent_recount(self, pairs):
        trace = make_trace([(0, c, "L", addr(line), i) for i, (c, line) in enumerate(pairs)])
        prof = analyze_locality(trace)
        assert prof == analyze_locality(trace[::-1])
        cores_of: dict[int, set] = {}
        for c, line in pairs:
            cores_of.setdefault(line, set()).add(c)
        assert prof.distinct_lines == len(cores_of)
        assert prof.replicated_lines == sum(len(s) > 1 for s in cores_of.values())
