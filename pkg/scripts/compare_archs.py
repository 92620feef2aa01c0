"""Run all four organizations on a high-sharing and a zero-sharing workload
and print performance, hit rate and per-instruction L1 latency."""

import argparse

from atasim import GeneratorParams, SimConfig, generate, run
from atasim.core import Architecture
from atasim.report import normalize

WORKLOADS = {
    "high-sharing": dict(cores=10, shared_prob=0.95, lines_shared=128, lines_private=1_000_000,
                         requests_per_core=8000),
    "no-sharing": dict(cores=10, shared_prob=0.0, lines_private=256, requests_per_core=4000),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=1)
    ap.add_argument("--requests", type=int, help="override requests per core")
    args = ap.parse_args()
    print(f"{'workload':13} {'seed':>4} {'arch':10} {'perf':>7} {'hit':>6} {'lat':>7} {'flits':>8}")
    for name, params in WORKLOADS.items():
        if args.requests:
            params = {**params, "requests_per_core": args.requests}
        for seed in range(1, args.seeds + 1):
            trace = generate(GeneratorParams(seed=seed, **params))
            reports = {a.value: run(SimConfig(architecture=a), trace) for a in Architecture}
            perf = normalize(reports)
            for arch, rep in reports.items():
                print(f"{name:13} {seed:4d} {arch:10} {perf[arch]:7.3f} {rep.l1_hit_rate:6.3f} "
                      f"{rep.mean_l1_latency:7.1f} {rep.noc_flits:8d}")


if __name__ == "__main__":
    main()
