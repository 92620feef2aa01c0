import json

import pytest
from hypothesis import given, strategies as st

from atasim.core import (
    AddressParts, Architecture, CacheGeometry, ConfigError, MemRequest, SimConfig, Kind,
    compose_address, config_from_dict, config_to_dict, decode_address, load_config, validate_config,
)

GEOMETRIES = [
    CacheGeometry(),
    CacheGeometry(capacity_bytes=32768, ways=4, data_banks=2),
    CacheGeometry(capacity_bytes=4096, line_size=64, sector_size=16, ways=2, data_banks=1),
]


class TestDecode:
    def test_default_geometry_shape(self):
        g = CacheGeometry()
        assert (g.sets, g.ways, g.sectors_per_line, g.data_banks) == (8, 64, 4, 4)

    def test_known_address(self):
        # line 0x21 -> set 1, tag 4; offset 0x20 -> sector 1
        p = decode_address(0x1080 + 0x20, CacheGeometry())
        assert p == AddressParts(tag=4, set_index=1, sector_index=1, line_address=0x21, offset=0x20)

    def test_xor_hash_spreads_same_low_bits(self):
        g = CacheGeometry()
        a = decode_address(0 * 128, g, "xor")
        b = decode_address(8 * 128, g, "xor")
        assert a.set_index != b.set_index

    @pytest.mark.parametrize("set_hash", ["modulo", "xor"])
    @pytest.mark.parametrize("g", GEOMETRIES, ids=str)
    @given(address=st.integers(min_value=0, max_value=2**64 - 1))
    def test_round_trip(self, g, set_hash, address):
        parts = decode_address(address, g, set_hash)
        assert compose_address(parts, g, set_hash) == address
        assert 0 <= parts.set_index < g.sets
        assert 0 <= parts.sector_index < g.sectors_per_line

    @given(line=st.integers(min_value=0, max_value=2**40), sector=st.integers(0, 3))
    def test_sector_key_is_injective(self, line, sector):
        p = decode_address(line * 128 + sector * 32, CacheGeometry())
        assert p.sector_key >> 8 == line and p.sector_key & 0xFF == sector


class TestConfig:
    def test_defaults_are_valid(self):
        cfg = validate_config(SimConfig())
        assert cfg.num_clusters == 3
        assert cfg.t_tag + cfg.t_data == cfg.t_l1_local == 32

    def test_reports_every_problem(self):
        with pytest.raises(ConfigError) as exc:
            validate_config(SimConfig(num_cores=31, t_tag=10))
        msgs = exc.value.problems
        assert any("not divisible" in m for m in msgs)
        assert any("t_tag + t_data ≠ t_l1_local" in m for m in msgs)

    def test_non_power_of_two_sets_rejected(self):
        with pytest.raises(ConfigError, match="power of two"):
            validate_config(SimConfig(l1_geometry=CacheGeometry(capacity_bytes=3 * 128 * 64)))

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown configuration keys"):
            config_from_dict({"num_cores": 30, "l3_size": 1})

    def test_partial_dict_keeps_defaults(self):
        cfg = config_from_dict({"num_cores": 10, "architecture": "AtaCache",
                                "l1_geometry": {"data_banks": 2}})
        assert cfg.architecture is Architecture.ATA
        assert cfg.l1_geometry.data_banks == 2 and cfg.l1_geometry.ways == 64
        assert cfg.l2_partitions == 24

    def test_json_round_trip(self, tmp_path):
        cfg = SimConfig(num_cores=20, architecture=Architecture.DECOUPLED, t_xbar_hop=3)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(config_to_dict(cfg)))
        assert load_config(path) == cfg

    def test_bad_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{nope")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_architecture_aliases(self):
        assert Architecture.parse("remote-sharing") is Architecture.REMOTE
        assert Architecture.parse("DecoupledSharing") is Architecture.DECOUPLED
        with pytest.raises(ValueError):
            Architecture.parse("mesh")


def test_request_order_key():
    r = MemRequest(7, 3, 0, Kind.LOAD, 1)
    assert r.order_key == (3 << 40) | 7
    assert r.is_load
