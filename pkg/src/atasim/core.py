"""
Domain types, address arithmetic and configuration.

Everything in here is a value type: geometries and configs are frozen
dataclasses and can be shared freely between independent simulations.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, NamedTuple, Optional


class Kind(enum.Enum):
    LOAD = "L"
    STORE = "S"


class Architecture(enum.Enum):
    PRIVATE = "private"
    REMOTE = "remote"
    DECOUPLED = "decoupled"
    ATA = "ata"

    @classmethod
    def parse(cls, name: "str | Architecture") -> "Architecture":
        if isinstance(name, Architecture):
            return name
        key = str(name).strip().lower().replace("_", "").replace("-", "")
        aliases = {
            "private": cls.PRIVATE,
            "remote": cls.REMOTE,
            "remotesharing": cls.REMOTE,
            "decoupled": cls.DECOUPLED,
            "decoupledsharing": cls.DECOUPLED,
            "ata": cls.ATA,
            "atacache": cls.ATA,
        }
        if key not in aliases:
            raise ValueError(f"unknown architecture {name!r}")
        return aliases[key]


SET_HASHES = ("modulo", "xor")


@dataclass(frozen=True)
class CacheGeometry:
    """Sector cache shape. Defaults describe one 64KB L1."""

    capacity_bytes: int = 65536
    line_size: int = 128
    sector_size: int = 32
    ways: int = 64
    data_banks: int = 4

    @property
    def sets(self) -> int:
        return self.capacity_bytes // (self.ways * self.line_size)

    @property
    def sectors_per_line(self) -> int:
        return self.line_size // self.sector_size

    @property
    def set_bits(self) -> int:
        return self.sets.bit_length() - 1

    def problems(self, prefix: str = "") -> list[str]:
        out = []
        for name in ("capacity_bytes", "line_size", "sector_size", "ways", "data_banks"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                out.append(f"{prefix}{name}: must be a positive integer, got {value!r}")
        if out:
            return out
        if self.line_size % self.sector_size:
            out.append(
                f"{prefix}line_size: {self.line_size} not divisible by "
                f"sector_size {self.sector_size}"
            )
        if self.capacity_bytes % (self.ways * self.line_size):
            out.append(
                f"{prefix}capacity_bytes: {self.capacity_bytes} is not a multiple of "
                f"ways*line_size = {self.ways * self.line_size}"
            )
        else:
            sets = self.sets
            if sets & (sets - 1):
                out.append(f"{prefix}capacity_bytes: implies {sets} sets, expected a power of two")
        return out


class AddressParts(NamedTuple):
    tag: int
    set_index: int
    sector_index: int
    line_address: int
    offset: int = 0

    @property
    def sector_key(self) -> int:
        """Identity of the (line, sector) pair; the fill and MSHR granule."""
        return (self.line_address << 8) | self.sector_index


def address_decoder(geometry: CacheGeometry, set_hash: str = "modulo") -> Callable[[int], AddressParts]:
    """``decode_address`` specialized to one geometry, for hot loops."""
    line_size, sector_size = geometry.line_size, geometry.sector_size
    bits, mask = geometry.set_bits, geometry.sets - 1
    xor = set_hash == "xor"

    def decode(address: int) -> AddressParts:
        line, offset = divmod(address, line_size)
        tag = line >> bits
        low = line & mask
        if xor:
            low ^= tag & mask
        return AddressParts(tag, low, offset // sector_size, line, offset)

    return decode


def decode_address(address: int, geometry: CacheGeometry, set_hash: str = "modulo") -> AddressParts:
    return address_decoder(geometry, set_hash)(address)


def line_of(tag: int, set_index: int, geometry: CacheGeometry, set_hash: str = "modulo") -> int:
    """Inverse of the set/tag split."""
    low = set_index
    if set_hash == "xor":
        low ^= tag & (geometry.sets - 1)
    return (tag << geometry.set_bits) | low


def compose_address(parts: AddressParts, geometry: CacheGeometry, set_hash: str = "modulo") -> int:
    line = line_of(parts.tag, parts.set_index, geometry, set_hash)
    return line * geometry.line_size + parts.offset


@dataclass(slots=True)
class MemRequest:
    """One memory access from a core.

    The identifying fields never change after construction. The engine
    fills in the timestamps and the observed value as the request moves
    through the hierarchy; ``completion_cycle`` is written exactly once.
    """

    request_id: int
    core_id: int
    address: int
    kind: Kind
    instruction_id: int
    trace_cycle: int = 0
    issue_cycle: int = -1
    completion_cycle: Optional[int] = None
    tag_done_cycle: Optional[int] = None
    l1_done_cycle: Optional[int] = None
    l2_depart_cycle: Optional[int] = None
    outcome: str = ""
    value: int = 0
    parts: Optional[AddressParts] = None
    # (core_id, request_id) packed into one int: the same-cycle tie-break
    order_key: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.order_key = (self.core_id << 40) | self.request_id

    @property
    def is_load(self) -> bool:
        return self.kind is Kind.LOAD


L2_DEFAULT = CacheGeometry(capacity_bytes=131072, line_size=128, sector_size=32, ways=16, data_banks=1)


@dataclass(frozen=True)
class SimConfig:
    num_cores: int = 30
    cores_per_cluster: int = 10
    l1_geometry: CacheGeometry = field(default_factory=CacheGeometry)
    l2_partitions: int = 24
    l2_geometry: CacheGeometry = L2_DEFAULT
    t_l1_local: int = 32
    t_tag: int = 8
    t_data: int = 24
    t_xbar_hop: int = 5
    t_l2: int = 188
    t_mem: int = 300
    flit_bytes: int = 40
    max_outstanding_per_core: int = 64
    mshr_entries: int = 32
    architecture: Architecture = Architecture.PRIVATE
    seed: int = 1
    # message sizes on the crossbars
    request_bytes: int = 8
    sector_bytes: int = 32
    # extension points
    set_hash: str = "modulo"
    write_allocate: bool = True
    remote_fill_local: bool = True

    @property
    def num_clusters(self) -> int:
        return self.num_cores // self.cores_per_cluster

    def with_(self, **changes: Any) -> "SimConfig":
        return dataclasses.replace(self, **changes)


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


_POSITIVE = (
    "num_cores", "cores_per_cluster", "l2_partitions", "t_l1_local", "t_l2",
    "flit_bytes", "max_outstanding_per_core", "mshr_entries", "request_bytes", "sector_bytes",
)
_NON_NEGATIVE = ("t_tag", "t_data", "t_xbar_hop", "t_mem")


def validate_config(config: SimConfig) -> SimConfig:
    """Return ``config`` unchanged if it is consistent, else raise ConfigError
    listing every violated invariant."""
    problems: list[str] = []
    for name in _POSITIVE:
        value = getattr(config, name)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            problems.append(f"{name}: must be a positive integer, got {value!r}")
    for name in _NON_NEGATIVE:
        value = getattr(config, name)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            problems.append(f"{name}: must be a non-negative integer, got {value!r}")
    if problems:
        raise ConfigError(problems)

    if config.num_cores % config.cores_per_cluster:
        problems.append(
            f"num_cores: {config.num_cores} not divisible by cores_per_cluster "
            f"{config.cores_per_cluster}"
        )
    if config.t_tag + config.t_data != config.t_l1_local:
        problems.append(
            f"t_tag + t_data ≠ t_l1_local: {config.t_tag} + {config.t_data} = "
            f"{config.t_tag + config.t_data}, expected {config.t_l1_local}"
        )
    problems += config.l1_geometry.problems("l1_geometry.")
    problems += config.l2_geometry.problems("l2_geometry.")
    if not problems and config.l1_geometry.line_size != config.l2_geometry.line_size:
        problems.append(
            f"l2_geometry.line_size: {config.l2_geometry.line_size} differs from "
            f"l1 line size {config.l1_geometry.line_size}"
        )
    if not problems and config.l1_geometry.sector_size != config.l2_geometry.sector_size:
        problems.append(
            f"l2_geometry.sector_size: {config.l2_geometry.sector_size} differs from "
            f"l1 sector size {config.l1_geometry.sector_size}"
        )
    if config.set_hash not in SET_HASHES:
        problems.append(f"set_hash: {config.set_hash!r} not in {SET_HASHES}")
    if not isinstance(config.architecture, Architecture):
        problems.append(f"architecture: {config.architecture!r} is not an Architecture")
    if problems:
        raise ConfigError(problems)
    return config


_GEOMETRY_FIELDS = {f.name for f in dataclasses.fields(CacheGeometry)}
_CONFIG_FIELDS = {f.name for f in dataclasses.fields(SimConfig)}


def _geometry_from(data: Any, name: str, problems: list[str]) -> Optional[CacheGeometry]:
    if not isinstance(data, dict):
        problems.append(f"{name}: expected an object")
        return None
    unknown = sorted(set(data) - _GEOMETRY_FIELDS)
    if unknown:
        problems.append(f"{name}: unknown keys {unknown}")
        return None
    base = CacheGeometry() if name == "l1_geometry" else L2_DEFAULT
    return dataclasses.replace(base, **data)


def config_from_dict(data: dict) -> SimConfig:
    """Build a config from a JSON-like mapping; missing keys keep their defaults."""
    problems = []
    unknown = sorted(set(data) - _CONFIG_FIELDS)
    if unknown:
        problems.append(f"unknown configuration keys: {unknown}")
    kwargs = {k: v for k, v in data.items() if k in _CONFIG_FIELDS}
    for name in ("l1_geometry", "l2_geometry"):
        if name in kwargs:
            kwargs[name] = _geometry_from(kwargs[name], name, problems)
    if "architecture" in kwargs:
        try:
            kwargs["architecture"] = Architecture.parse(kwargs["architecture"])
        except ValueError as exc:
            problems.append(f"architecture: {exc}")
    if problems:
        raise ConfigError(problems)
    return validate_config(SimConfig(**kwargs))


def config_to_dict(config: SimConfig) -> dict:
    out = dataclasses.asdict(config)
    out["architecture"] = config.architecture.value
    return out


def load_config(path: "str | Path") -> SimConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}: not valid JSON ({exc})"]) from None
    if not isinstance(data, dict):
        raise ConfigError([f"{path}: top level must be a JSON object"])
    return config_from_dict(data)
