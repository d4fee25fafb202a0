#!/usr/bin/env python3
"""Compare the compiled step kernel against the pure-Python one.

Runs the same seeded campaign through both kernels, checks that the final
configurations agree, and reports steps/second."""

import argparse
import importlib
import time

from snapfwd import daemon
from snapfwd.engine import kernel
from snapfwd.faults import arbitrary_config
from snapfwd.model import config_hash, topology


def drive(kmod, n, seeds, horizon):
    t0 = time.perf_counter()
    steps = 0
    hashes = []
    for seed in seeds:
        cfg = arbitrary_config(n, seed, "FULL")
        sched = daemon.Scheduler(daemon.Schedule("RANDOM_FAIR", seed), n)
        topo = topology(n)
        wl = daemon.Workload(0.05, seed, active_until=horizon - 200)
        for _ in range(horizon):
            cfg = wl.inject(cfg)
            enabled = kmod.compute_enabled(cfg, topo, kmod.NO_MUT)
            selected = sched.select(enabled)
            if selected:
                cfg, _ = kmod.apply_step(cfg, topo, selected, enabled, kmod.NO_MUT)
            else:
                cfg = cfg.copy()
                cfg.t += 1
            steps += 1
        hashes.append(config_hash(cfg))
    return time.perf_counter() - t0, steps, hashes


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--horizon", type=int, default=3000)
    args = ap.parse_args()

    pure = importlib.import_module("snapfwd._kernel")
    try:
        compiled = importlib.import_module("snapfwd._kernel_c")
    except ImportError:
        compiled = None

    seeds = range(args.seeds)
    t_pure, steps, h_pure = drive(pure, args.n, seeds, args.horizon)
    print(f"pure python : {steps / t_pure:10.0f} steps/s  ({t_pure:.2f}s)")
    if compiled is None:
        print("compiled    : not built (install without SNAPFWD_NO_EXT=1)")
        return
    t_c, steps, h_c = drive(compiled, args.n, seeds, args.horizon)
    print(f"compiled    : {steps / t_c:10.0f} steps/s  ({t_c:.2f}s)")
    print(f"speedup     : {t_pure / t_c:.2f}x")
    if h_pure != h_c:
        raise SystemExit("MISMATCH: kernels disagree on final configurations")
    print(f"active kernel at import time: {kernel.__name__}")
    print("final configurations agree across kernels")


if __name__ == "__main__":
    main()
