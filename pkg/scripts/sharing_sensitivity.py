"""How the ATA advantage and its latency cost move with the size of the
shared region (lines drawn Zipf from ``lines_shared``)."""

import argparse

from atasim import GeneratorParams, SimConfig, generate, run
from atasim.core import Architecture


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lines-shared", default="64,128,256,512")
    ap.add_argument("--shared-prob", type=float, default=0.95)
    ap.add_argument("--requests", type=int, default=8000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    print("lines_shared  ata/private perf  hit(private,ata)  latency(private,ata,decoupled)  ata/private lat")
    for n in (int(v) for v in args.lines_shared.split(",")):
        trace = generate(GeneratorParams(cores=10, shared_prob=args.shared_prob, lines_shared=n,
                                         lines_private=1_000_000, requests_per_core=args.requests,
                                         seed=args.seed))
        r = {a: run(SimConfig(architecture=a), trace)
             for a in (Architecture.PRIVATE, Architecture.ATA, Architecture.DECOUPLED)}
        p, a, d = r[Architecture.PRIVATE], r[Architecture.ATA], r[Architecture.DECOUPLED]
        print(f"{n:12d}  {p.total_cycles / a.total_cycles:16.3f}  "
              f"({p.l1_hit_rate:.3f},{a.l1_hit_rate:.3f})     "
              f"({p.mean_l1_latency:.1f},{a.mean_l1_latency:.1f},{d.mean_l1_latency:.1f})"
              f"{a.mean_l1_latency / p.mean_l1_latency:22.3f}")


if __name__ == "__main__":
    main()
