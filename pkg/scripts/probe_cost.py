"""L2 departure delay after the tag check, remote-sharing vs ATA, as the
cluster grows. Uses an all-miss streaming trace."""

import argparse

from atasim import GeneratorParams, SimConfig, generate, run
from atasim.core import Architecture


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cluster-sizes", default="2,5,10,15,30")
    ap.add_argument("--requests", type=int, default=1000)
    args = ap.parse_args()
    trace = generate(GeneratorParams(cores=30, shared_prob=0.0, lines_private=1_000_000,
                                     requests_per_core=args.requests, seed=1))
    print("cores/cluster  remote delay  ata delay  probes")
    for cpc in (int(v) for v in args.cluster_sizes.split(",")):
        rem = run(SimConfig(cores_per_cluster=cpc, architecture=Architecture.REMOTE), trace)
        ata = run(SimConfig(cores_per_cluster=cpc, architecture=Architecture.ATA), trace)
        print(f"{cpc:13d}  {rem.mean_l2_departure_delay:12.1f}  {ata.mean_l2_departure_delay:9.1f}  "
              f"{rem.probe_messages:6d}")


if __name__ == "__main__":
    main()
