"""Time the functional-oracle workload: 20 seeded 4-core traces of 10^4
requests under every organization, checking every load value."""

import time

from atasim import GeneratorParams, SimConfig, generate, simulate
from atasim.core import Architecture, Kind


def expected(trace):
    mem, out = {}, {}
    for i, r in enumerate(trace):
        key = r.address // 32
        if r.kind is Kind.STORE:
            mem[key] = i + 1
        else:
            out[i + 1] = mem.get(key, 0)
    return out


def main() -> None:
    total, bad = 0.0, 0
    for seed in range(1, 21):
        trace = generate(GeneratorParams(cores=4, requests_per_core=2500, shared_prob=0.5, lines_shared=256,
                                         lines_private=256, store_prob=0.3, seed=seed))
        want = expected(trace)
        for arch in Architecture:
            t0 = time.perf_counter()
            res = simulate(SimConfig(num_cores=4, cores_per_cluster=4, architecture=arch), trace)
            total += time.perf_counter() - t0
            bad += sum(r.is_load and r.value != want[r.request_id] for r in res.requests)
    print(f"mismatches {bad}, simulation time {total:.1f}s")


if __name__ == "__main__":
    main()
