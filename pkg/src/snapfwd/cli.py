"""Command-line front end: run / fuzz / explore.

A single JSON config document drives everything; every field has a CLI
override.  Exit codes: 0 PASS, 1 FAIL, 2 INCONCLUSIVE (or budget hit for
explore), >2 usage or config errors.  Traces are JSONL: the first line is
the full initial configuration, then one step report per line."""

from __future__ import annotations

import argparse
import json
import os
import sys

from snapfwd import daemon, dynamics, faults
from snapfwd.explorer import explore
from snapfwd.model import Configuration, config_from_dict, config_to_dict, new_chain
from snapfwd.monitor import Bounds, FAIL, INCONCLUSIVE, Monitor, PASS

EXIT_USAGE = 3

DEFAULTS = {
    "n": 4,
    "profile": faults.CLEAN,
    "strategy": daemon.RANDOM_FAIR,
    "seed": 0,
    "horizon": 5000,
    "t_stab": 0,
    "workload": {"rate": 0.0, "active_until": None},
    "dynamics": {"enabled": False, "events": [], "min_gap": None},
    "bounds": {},
}


class ConfigError(Exception):
    pass


def load_config(path, overrides) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS))  # deep copy
    if path:
        try:
            with open(path) as f:
                user = json.load(f)
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read config {path}: {e}")
        for k, v in user.items():
            if k not in DEFAULTS:
                raise ConfigError(f"unknown config key {k!r}")
            if isinstance(DEFAULTS[k], dict):
                cfg[k].update(v)
            else:
                cfg[k] = v
    for k, v in overrides.items():
        if v is None:
            continue
        if k == "rate":
            cfg["workload"]["rate"] = v
        elif k == "active_until":
            cfg["workload"]["active_until"] = v
        else:
            cfg[k] = v
    if cfg["n"] < 2:
        raise ConfigError("n must be at least 2")
    if cfg["profile"] not in faults.PROFILES:
        raise ConfigError(f"unknown profile {cfg['profile']!r}")
    if cfg["strategy"] not in daemon.STRATEGIES:
        raise ConfigError(f"unknown strategy {cfg['strategy']!r}")
    if cfg["horizon"] < 1:
        raise ConfigError("horizon must be positive")
    return cfg


def build_bounds(cfg: dict, n: int) -> Bounds:
    b = cfg["bounds"]
    round_len = b.get("round_len")
    if round_len is None:
        round_len = n if cfg["strategy"] == daemon.ADVERSARY else 1
    return Bounds(n, l_gen=b.get("L_gen"), l_del=b.get("L_del"),
                  l_ext=b.get("L_ext"), b_prog=b.get("B_prog"),
                  fairness=b.get("F"), round_len=round_len)


def drain_window(cfg: dict) -> int:
    """Default request cut-off: stop injecting early enough that in-flight
    messages can land before the horizon, so clean runs end PASS rather
    than INCONCLUSIVE."""
    wl = cfg["workload"]
    if wl.get("active_until") is not None:
        return wl["active_until"]
    round_len = cfg["n"] if cfg["strategy"] == daemon.ADVERSARY else 1
    return max(cfg["horizon"] - 128 * cfg["n"] * round_len, cfg["horizon"] // 2)


def build_initial(cfg: dict) -> Configuration:
    return faults.arbitrary_config(
        cfg["n"], cfg["seed"], cfg["profile"], t_stab=cfg["t_stab"],
        ext_mode=cfg["dynamics"]["enabled"])


def _verdict_exit(status: str) -> int:
    return {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}[status]


def do_run(cfg: dict, args) -> int:
    initial = build_initial(cfg)
    monitor = Monitor(initial, build_bounds(cfg, initial.n))
    wl_cfg = cfg["workload"]
    workload = None
    if wl_cfg["rate"] > 0:
        workload = daemon.Workload(wl_cfg["rate"], cfg["seed"],
                                   drain_window(cfg))
    scenario = None
    if cfg["dynamics"]["enabled"] and cfg["dynamics"]["events"]:
        scenario = dynamics.Scenario(events=cfg["dynamics"]["events"],
                                     min_gap=cfg["dynamics"]["min_gap"])
        scenario.validate(initial.n)
    replay = None
    if getattr(args, "replay", None):
        with open(args.replay) as f:
            lines = [json.loads(line) for line in f if line.strip()]
        replay = [r["selected"] for r in lines[1:]]
        sched = daemon.Schedule(daemon.REPLAY, cfg["seed"], replay=replay)
    else:
        sched = daemon.Schedule(cfg["strategy"], cfg["seed"])
    trace_writer = None
    trace_file = None
    if getattr(args, "trace", None):
        trace_file = open(args.trace, "w")
        trace_file.write(json.dumps(config_to_dict(initial), sort_keys=True) + "\n")
        trace_writer = lambda rec: trace_file.write(
            json.dumps(rec, sort_keys=True) + "\n")
    try:
        report = daemon.run(initial, sched, cfg["horizon"], workload=workload,
                            monitor=monitor, scenario=scenario,
                            trace_writer=trace_writer)
    finally:
        if trace_file:
            trace_file.close()
    v = report.verdict
    summary = {"verdict": v.to_dict(), "steps": report.steps,
               "seed": cfg["seed"], "strategy": sched.strategy,
               "profile": cfg["profile"], "n": cfg["n"]}
    print(json.dumps(summary, sort_keys=True) if args.json else
          f"{v.status}: {v.prop or 'ok'} {v.detail}".strip())
    return _verdict_exit(v.status)


def do_fuzz(cfg: dict, args) -> int:
    runs = args.runs
    profiles = [cfg["profile"]] if not args.all_profiles else list(faults.PROFILES)
    fail_seeds = []
    counts = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
    for i in range(runs):
        seed = cfg["seed"] + i
        for profile in profiles:
            initial = faults.arbitrary_config(cfg["n"], seed, profile,
                                              t_stab=cfg["t_stab"])
            monitor = Monitor(initial, build_bounds(cfg, initial.n))
            workload = daemon.Workload(
                cfg["workload"]["rate"], seed, drain_window(cfg)) \
                if cfg["workload"]["rate"] > 0 else None
            report = daemon.run(initial, daemon.Schedule(cfg["strategy"], seed),
                                cfg["horizon"], workload=workload, monitor=monitor)
            v = report.verdict
            counts[v.status] += 1
            if v.status == FAIL:
                fail_seeds.append({"seed": seed, "profile": profile,
                                   "strategy": cfg["strategy"], "n": cfg["n"],
                                   "prop": v.prop, "detail": v.detail})
    if fail_seeds and args.fail_file:
        with open(args.fail_file, "w") as f:
            json.dump(fail_seeds, f, indent=1, sort_keys=True)
    summary = {"runs": runs * len(profiles), "counts": counts,
               "failures": fail_seeds}
    print(json.dumps(summary, sort_keys=True) if args.json else
          f"{summary['runs']} runs: {counts[PASS]} PASS, {counts[FAIL]} FAIL, "
          f"{counts[INCONCLUSIVE]} INCONCLUSIVE")
    return 1 if fail_seeds else 0


def do_explore(cfg: dict, args) -> int:
    t_stab = cfg["t_stab"] if cfg["t_stab"] in (None, 0) else 0
    initial = faults.arbitrary_config(cfg["n"], cfg["seed"], cfg["profile"],
                                      t_stab=t_stab)
    report = explore([initial], depth=args.depth,
                     full_subsets=args.full_subsets, budget=args.budget)
    print(report.to_json() if args.json else
          f"{report.states} states, {report.transitions} transitions, "
          f"depth {report.depth}, {len(report.violations)} violations"
          + ("" if report.exhausted else " (budget or depth hit)"))
    if report.violations:
        for v in report.violations[:10]:
            print(json.dumps(v, sort_keys=True), file=sys.stderr)
        return 1
    return 0 if report.exhausted else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="snapfwd",
        description="Simulate, fuzz and explore a snap-stabilizing "
                    "chain-forwarding protocol.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--n", type=int)
        p.add_argument("--profile", choices=faults.PROFILES)
        p.add_argument("--strategy", choices=daemon.STRATEGIES)
        p.add_argument("--seed", type=int,
                       default=int(os.environ.get("SNAPFWD_SEED", 0)) or None)
        p.add_argument("--horizon", type=int)
        p.add_argument("--rate", type=float, help="workload request rate")
        p.add_argument("--active-until", type=int, dest="active_until",
                       help="stop injecting requests after this step")
        p.add_argument("--json", action="store_true", help="JSON summary")

    p_run = sub.add_parser("run", help="one seeded monitored run")
    common(p_run)
    p_run.add_argument("--trace", help="write a JSONL trace here")
    p_run.add_argument("--replay", help="replay selections from a JSONL trace")

    p_fuzz = sub.add_parser("fuzz", help="many seeded runs, aggregate verdicts")
    common(p_fuzz)
    p_fuzz.add_argument("--runs", type=int, default=50)
    p_fuzz.add_argument("--all-profiles", action="store_true")
    p_fuzz.add_argument("--fail-file", default="snapfwd-failures.json",
                        help="where FAIL seeds are persisted")

    p_ex = sub.add_parser("explore", help="bounded exhaustive search")
    common(p_ex)
    p_ex.add_argument("--depth", type=int)
    p_ex.add_argument("--budget", type=int, default=1_000_000)
    p_ex.add_argument("--full-subsets", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    overrides = {k: getattr(args, k, None)
                 for k in ("n", "profile", "strategy", "seed", "horizon",
                           "rate", "active_until")}
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.cmd == "run":
            return do_run(cfg, args)
        if args.cmd == "fuzz":
            return do_fuzz(cfg, args)
        return do_explore(cfg, args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
