"""Distributed-daemon step semantics and scheduling strategies.

A step evaluates every guard on the snapshot, selects a nonempty subset of
enabled nodes, and lets each selected node execute all its enabled actions
of both protocols (reads from the snapshot, writes to the next
configuration).  Strategies: synchronous, seeded random weakly-fair, seeded
adversary, and replay of a recorded selection sequence."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from snapfwd.engine import kernel
from snapfwd.model import Configuration, config_hash, topology

SYNC = "SYNC"
RANDOM_FAIR = "RANDOM_FAIR"
ADVERSARY = "ADVERSARY"
REPLAY = "REPLAY"

STRATEGIES = (SYNC, RANDOM_FAIR, ADVERSARY, REPLAY)


@dataclass
class Schedule:
    strategy: str = SYNC
    seed: int = 0
    fairness_bound: Optional[int] = None  # defaults to 2n at run time
    replay: Optional[list] = None  # list of selected-node lists, REPLAY only

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == REPLAY and self.replay is None:
            raise ValueError("REPLAY needs a recorded selection sequence")


@dataclass
class StepReport:
    step: int
    selected: list
    actions: list        # (node, protocol, action, link)
    deliveries: list     # (ghost, node)
    deletions: list      # (ghost, node, rule)
    generated: list      # (ghost, node, dest, slot, suitable)
    route_changes: list
    waves: list          # ("B", valid) / ("C", out_free)

    def to_dict(self):
        return {
            "step": self.step,
            "selected": self.selected,
            "actions": [list(a) for a in self.actions],
            "deliveries": [list(d) for d in self.deliveries],
            "deletions": [list(d) for d in self.deletions],
            "generated": [list(g) for g in self.generated],
            "route_changes": list(self.route_changes),
            "waves": [list(w) for w in self.waves],
        }


class Scheduler:
    """Strategy state: RNG, fairness ages, replay cursor."""

    def __init__(self, sched: Schedule, n: int):
        self.sched = sched
        self.rng = random.Random(sched.seed)
        self.fairness_bound = sched.fairness_bound or 2 * n
        self.ages = [0] * n
        self._replay_pos = 0

    def resize(self, n: int):
        self.ages = [0] * n

    def select(self, enabled: dict) -> list:
        """Pick a nonempty subset of the enabled nodes."""
        nodes = sorted(enabled)
        if not nodes:
            return []
        strat = self.sched.strategy
        if strat == SYNC:
            picked = nodes
        elif strat == REPLAY:
            if self._replay_pos >= len(self.sched.replay):
                picked = nodes
            else:
                picked = [p for p in self.sched.replay[self._replay_pos] if p in enabled]
                self._replay_pos += 1
        else:
            forced = [p for p in nodes if self.ages[p] >= self.fairness_bound]
            if strat == RANDOM_FAIR:
                picked = [p for p in nodes if self.rng.random() < 0.5]
            else:  # ADVERSARY: starve node 0 and small ids when possible
                others = [p for p in nodes if p != 0]
                if others:
                    if self.rng.random() < 0.3:
                        picked = [self.rng.choice(others)]
                    else:
                        picked = [max(others)]
                else:
                    picked = [0]
            picked = sorted(set(picked) | set(forced))
            if not picked:
                picked = [self.rng.choice(nodes)]
        for p in range(len(self.ages)):
            if p in enabled and p not in picked:
                self.ages[p] += 1
            else:
                self.ages[p] = 0
        return picked


def step(cfg: Configuration, scheduler: Scheduler, mutations=kernel.NO_MUT):
    """One daemon step. Returns (next configuration, StepReport)."""
    topo = topology(cfg.n)
    enabled = kernel.compute_enabled(cfg, topo, mutations)
    selected = scheduler.select(enabled)
    if not selected:
        # Terminal configuration: state is unchanged, the clock still ticks
        # so that the table stabilizer and the workload keep their timing.
        new = cfg.copy()
        new.t = cfg.t + 1
        if cfg.t_stab is not None and new.t >= cfg.t_stab:
            from snapfwd.model import correct_routing

            new.routing = correct_routing(cfg.n)
        report = StepReport(cfg.t, [], [], [], [], [], [], [])
        return new, report
    new, ev = kernel.apply_step(cfg, topo, selected, enabled, mutations)
    report = StepReport(
        step=cfg.t,
        selected=selected,
        actions=ev["fired"],
        deliveries=ev["deliveries"],
        deletions=ev["deletions"],
        generated=ev["generated"],
        route_changes=ev["route_changes"],
        waves=ev["waves"],
    )
    return new, report


class Workload:
    """Seeded request driver: per-node Bernoulli arrivals, uniform
    destinations over the other present nodes.  Never re-requests while a
    request is pending (the request flag is a single boolean)."""

    def __init__(self, rate: float, seed: int, active_until: Optional[int] = None,
                 active_from: int = 0):
        self.rate = rate
        self.rng = random.Random(seed)
        self.active_until = active_until
        self.active_from = active_from

    def inject(self, cfg: Configuration) -> Configuration:
        if self.rate <= 0 or cfg.t < self.active_from:
            return cfg
        if self.active_until is not None and cfg.t >= self.active_until:
            return cfg
        new = None
        for p in range(cfg.n):
            if p == cfg.departing:
                continue
            if cfg.request[p] is None and self.rng.random() < self.rate:
                dests = [d for d in range(cfg.n) if d != p and d != cfg.departing]
                if not dests:
                    continue
                if new is None:
                    new = cfg.copy()
                new.request[p] = self.rng.choice(dests)
        return new if new is not None else cfg


@dataclass
class RunReport:
    verdict: object
    steps: int
    final: Configuration
    seed: int
    strategy: str


def run(cfg: Configuration, sched: Schedule, horizon: int, *,
        workload: Optional[Workload] = None, monitor=None,
        mutations=kernel.NO_MUT,
        scenario=None,
        trace_writer: Optional[Callable[[dict], None]] = None) -> RunReport:
    """Drive a full seeded run: inject workload, step, feed the monitor.

    Stops at the horizon, at a terminal configuration with no workload,
    or as soon as the monitor reports a failure."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    scheduler = Scheduler(sched, cfg.n)
    steps = 0
    for _ in range(horizon):
        if scenario is not None:
            cfg2 = scenario.apply(cfg)
            if cfg2.n != cfg.n:
                scheduler.resize(cfg2.n)
                if monitor is not None:
                    monitor.on_resize(cfg2)
            cfg = cfg2
        if workload is not None:
            cfg = workload.inject(cfg)
        prev = cfg
        cfg, report = step(cfg, scheduler, mutations)
        steps += 1
        if trace_writer is not None:
            trace_writer(report.to_dict())
        if monitor is not None:
            monitor.on_step(prev, report, cfg)
            if monitor.failed:
                break
        if not report.selected and workload is None and scenario is None:
            break
    verdict = monitor.finalize(cfg) if monitor is not None else None
    return RunReport(verdict=verdict, steps=steps, final=cfg,
                     seed=sched.seed, strategy=sched.strategy)
