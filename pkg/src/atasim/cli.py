"""
Command-line entry point.

    atasim run      --trace T [--config C] [--arch A] [--format json|csv] [--out P] [--event-log P]
    atasim compare  --trace T [--config C] [--archs a,b,...]
    atasim gen      --out P [--cores N ...]
    atasim analyze  --trace T [--threshold F]
    atasim sweep    --param NAME --values v1,v2,... [--archs ...] [--trace T | --gen k=v ...]

Exit status: 0 on success, 1 on a configuration, trace or usage error, 2
when a run hits the cycle ceiling. ``ATASIM_SEED`` overrides the seed
taken from the configuration file.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import os
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from . import __version__
from .core import Architecture, ConfigError, SimConfig, config_from_dict, config_to_dict, load_config
from .engine import DEFAULT_MAX_CYCLES, SimulationTimeout, run as run_sim
from .report import COMPARISON_COLUMNS, SimReport, comparison_rows, emit, write_csv
from .workload import (
    GENERATOR_FIELDS, GeneratorParams, TraceError, analyze_locality, format_trace, generate,
    read_trace, trace_digest, write_trace,
)

SEED_ENV = "ATASIM_SEED"
BASELINE = Architecture.PRIVATE

# SimConfig fields a sweep may vary; geometries are structured and not swept
SWEEP_CONFIG_FIELDS = tuple(
    f.name for f in dataclasses.fields(SimConfig)
    if f.name not in ("l1_geometry", "l2_geometry", "architecture")
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors share the config-error status
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_identity() -> str:
    return f"atasim {__version__} (python {platform.python_version()})"


# -- shared helpers

def _env_seed() -> Optional[int]:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw, 0)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _config(path: Optional[str]) -> SimConfig:
    cfg = load_config(path) if path else SimConfig()
    seed = _env_seed()
    return cfg.with_(seed=seed) if seed is not None else cfg


def _archs(text: Optional[str], include_baseline: bool) -> list[Architecture]:
    names = [n for n in (text or "").split(",") if n.strip()] if text else [a.value for a in Architecture]
    out: list[Architecture] = []
    for name in names:
        try:
            arch = Architecture.parse(name)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if arch in out:
            print(f"warning: architecture {arch.value} listed more than once; running it once",
                  file=sys.stderr)
            continue
        out.append(arch)
    if include_baseline and BASELINE not in out:
        out.insert(0, BASELINE)
    return out


def _number(text: str):
    try:
        return int(text, 0)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    lowered = text.strip().lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    return text


def _gen_params(pairs: Sequence[str], seed: Optional[int]) -> GeneratorParams:
    values = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in GENERATOR_FIELDS:
            raise UsageError(f"bad generator setting {pair!r}; known keys: {', '.join(GENERATOR_FIELDS)}")
        values[key] = _number(raw)
    if seed is not None and "seed" not in values:
        values["seed"] = seed
    return GeneratorParams(**values)


def _write(text: str, out: Optional[str]) -> None:
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc.strerror or exc}") from None
    else:
        sys.stdout.write(text)


def _read_trace(path: str):
    try:
        return read_trace(path)
    except TraceError as exc:
        raise TraceError(exc.line_no, f"{path}: {exc.args[0].split(': ', 1)[-1]}") from None
    except OSError as exc:
        raise OSError(f"cannot read trace {path}: {exc.strerror or exc}") from None


# -- subcommands

def cmd_run(args) -> int:
    cfg = _config(args.config)
    if args.arch:
        try:
            cfg = cfg.with_(architecture=Architecture.parse(args.arch))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    trace = _read_trace(args.trace)
    if args.event_log:
        with open(args.event_log, "w") as log:
            report = run_sim(cfg, trace, event_log=log, max_cycles=args.max_cycles)
    else:
        report = run_sim(cfg, trace, max_cycles=args.max_cycles)
    text = emit(report, args.format)
    _write(text, args.out)
    return 0


def cmd_compare(args) -> int:
    cfg = _config(args.config)
    trace = _read_trace(args.trace)
    reports: dict[str, SimReport] = {}
    for arch in _archs(args.archs, include_baseline=True):
        reports[arch.value] = run_sim(cfg.with_(architecture=arch), trace, max_cycles=args.max_cycles)
    _write(emit(reports, args.format), args.out)
    return 0


def cmd_gen(args) -> int:
    pairs = list(args.gen or [])
    seed = _env_seed()
    if args.config:
        cfg_seed = load_config(args.config).seed
        seed = seed if seed is not None else cfg_seed
    params = _gen_params(pairs, seed)
    trace = generate(params)
    if args.out:
        write_trace(trace, args.out)
    else:
        sys.stdout.write(format_trace(trace))
    print(f"{len(trace)} records, digest {trace_digest(trace)}", file=sys.stderr)
    return 0


def cmd_analyze(args) -> int:
    trace = _read_trace(args.trace)
    line_size = load_config(args.config).l1_geometry.line_size if args.config else 128
    prof = analyze_locality(trace, line_size)
    payload = {
        "distinct_lines": prof.distinct_lines,
        "replicated_lines": prof.replicated_lines,
        "replication_ratio": round(prof.replication_ratio, 6),
        "locality": prof.label(args.threshold),
        "threshold": args.threshold,
        "sharing_histogram": {str(k): v for k, v in prof.sharing_histogram.items()},
        "footprint": {str(k): v for k, v in prof.footprint.items()},
    }
    _write(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _sweep_cell(task: tuple) -> tuple:
    """Worker body: one whole simulation. Module-level so it pickles."""
    cfg_dict, arch, trace_path, gen_dict, max_cycles = task
    cfg = config_from_dict({**cfg_dict, "architecture": arch})
    trace = read_trace(trace_path) if trace_path else generate(GeneratorParams(**gen_dict))
    return arch, run_sim(cfg, trace, max_cycles=max_cycles).to_dict()


def cmd_sweep(args) -> int:
    cfg = _config(args.config)
    name = args.param.replace("-", "_")
    is_gen = name in GENERATOR_FIELDS and name not in SWEEP_CONFIG_FIELDS
    if name == "seed" and not args.trace:
        is_gen = True  # seed sweeps regenerate the trace
    if not is_gen and name not in SWEEP_CONFIG_FIELDS:
        raise UsageError(
            f"unknown sweep parameter {args.param!r}; choose a config field "
            f"({', '.join(SWEEP_CONFIG_FIELDS)}) or a generator field ({', '.join(GENERATOR_FIELDS)})"
        )
    if is_gen and args.trace:
        raise UsageError(f"{name} is a generator parameter; drop --trace to regenerate traces")
    values = [_number(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise UsageError("--values is empty")
    archs = _archs(args.archs, include_baseline=False)
    base_gen = dataclasses.asdict(_gen_params(args.gen or [], cfg.seed))
    if args.trace:
        _read_trace(args.trace)  # fail early on a bad trace
    base_cfg = config_to_dict(cfg)

    tasks = []
    for value in values:
        cfg_dict, gen_dict = dict(base_cfg), dict(base_gen)
        if is_gen:
            gen_dict[name] = value
        else:
            cfg_dict[name] = value
            config_from_dict(cfg_dict)  # validate before spawning workers
        for arch in archs:
            tasks.append((value, (cfg_dict, arch.value, args.trace, gen_dict, args.max_cycles)))

    jobs = args.jobs or os.cpu_count() or 1
    cells = [t for _, t in tasks]
    if jobs == 1 or len(cells) == 1:
        results = [_sweep_cell(t) for t in cells]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cells))) as pool:
            results = list(pool.map(_sweep_cell, cells))

    by_value: dict = {}
    for (value, _), (arch, rep) in zip(tasks, results):
        by_value.setdefault(value, {})[arch] = SimReport.from_dict(rep)
    keyed = []
    for value, reports in by_value.items():
        if BASELINE.value in reports:
            table = comparison_rows(reports)
        else:
            table = comparison_rows(reports, baseline=next(iter(reports)))
            for row in table:
                row[1] = ""  # no private baseline in this sweep
        for row in table:
            keyed.append(((value, row[0]), [name, str(value), *row]))
    # byte-identical output whatever order the workers finished in
    keyed.sort(key=lambda item: item[0])
    rows = [row for _, row in keyed]
    buf = io.StringIO()
    write_csv(("param", "value", *COMPARISON_COLUMNS), rows, buf)
    _write(buf.getvalue(), args.out)
    return 0


# -- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="atasim", description="Clustered GPU L1/L2 hierarchy simulator.")
    p.add_argument("--version", action="version", version=build_identity())
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, trace_required=True):
        sp.add_argument("--config", help="JSON file with SimConfig fields")
        sp.add_argument("--trace", required=trace_required, help="trace file (.gz accepted)")
        sp.add_argument("--max-cycles", type=int, default=DEFAULT_MAX_CYCLES)

    r = sub.add_parser("run", help="simulate one architecture")
    common(r)
    r.add_argument("--arch", help="private, remote, decoupled or ata (default: from config)")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("--out")
    r.add_argument("--event-log", help="write one line per event to this file")
    r.set_defaults(fn=cmd_run)

    c = sub.add_parser("compare", help="run several architectures on one trace")
    common(c)
    c.add_argument("--archs", help="comma separated (default: all); private is always included")
    c.add_argument("--format", choices=("json", "csv"), default="csv")
    c.add_argument("--out")
    c.set_defaults(fn=cmd_compare)

    g = sub.add_parser("gen", help="generate a synthetic trace")
    g.add_argument("--config", help="take the seed from this config")
    g.add_argument("--gen", action="append", metavar="KEY=VALUE",
                   help=f"generator setting, repeatable; keys: {', '.join(GENERATOR_FIELDS)}")
    g.add_argument("--out", help="trace path (.gz compresses); stdout if omitted")
    g.set_defaults(fn=cmd_gen)

    a = sub.add_parser("analyze", help="inter-core locality of a trace")
    a.add_argument("--trace", required=True)
    a.add_argument("--config", help="take the line size from this config")
    a.add_argument("--threshold", type=float, default=0.5,
                   help="replication ratio at or above which a trace counts as high locality")
    a.add_argument("--out")
    a.set_defaults(fn=cmd_analyze)

    s = sub.add_parser("sweep", help="parameter x architecture grid, CSV out")
    common(s, trace_required=False)
    s.add_argument("--param", required=True)
    s.add_argument("--values", required=True, help="comma separated")
    s.add_argument("--archs", help="comma separated (default: all)")
    s.add_argument("--gen", action="append", metavar="KEY=VALUE",
                   help="generator settings when no --trace is given")
    s.add_argument("--jobs", type=int, default=0, help="worker processes (default: CPU count)")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SimulationTimeout as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, TraceError, UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
