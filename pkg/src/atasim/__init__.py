"""Trace-driven simulator of clustered GPU L1/L2 hierarchies with a shared
L1 built on an aggregated tag array."""

from .core import (
    AddressParts, Architecture, CacheGeometry, ConfigError, Kind, MemRequest, SimConfig,
    decode_address, load_config, validate_config,
)
from .engine import SimulationTimeout, Simulator, run, simulate
from .report import SimReport, normalize
from .workload import GeneratorParams, TraceRecord, analyze_locality, generate, parse_trace

__version__ = "0.1.0"

__all__ = [
    "AddressParts", "Architecture", "CacheGeometry", "ConfigError", "GeneratorParams", "Kind",
    "MemRequest", "SimConfig", "SimReport", "SimulationTimeout", "Simulator", "TraceRecord",
    "analyze_locality", "decode_address", "generate", "load_config", "normalize", "parse_trace",
    "run", "simulate", "validate_config",
]
