"""Bounded exhaustive exploration of the step relation for small chains.

Breadth-first search over (configuration, wave-validity) states.  Successors
are generated per daemon selection; for tractability the default coverage
policy explores every singleton selection plus the synchronous (all-enabled)
selection — full subset enumeration is available behind a flag to validate
the policy at n=2.  Safety properties are evaluated on every transition.

The monitored properties are local to a transition, which keeps the search
memoryless: "a delivered ghost leaves no live copy behind" is the witness
for exactly-once delivery (re-delivery would require a surviving copy), so
no delivered-set needs to ride along in the state."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from snapfwd.engine import kernel
from snapfwd.model import Configuration, config_to_json, topology


@dataclass
class ExploreReport:
    states: int
    transitions: int
    depth: int
    violations: list
    budget: int
    mode: str
    exhausted: bool

    def to_dict(self):
        return {"states": self.states, "transitions": self.transitions,
                "depth": self.depth, "violations": self.violations,
                "budget": self.budget, "mode": self.mode,
                "exhausted": self.exhausted}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _ghosts(cfg):
    return {m[3] for m in cfg.slots if m is not None}


def prop_no_duplicate_delivery(prev, selection, ev, nxt, wave_valid):
    seen = set()
    live = _ghosts(nxt)
    for g, node in ev["deliveries"]:
        if g in seen:
            return f"ghost {g} delivered twice in one step"
        seen.add(g)
        if g in live:
            return f"ghost {g} delivered with a live copy left behind"
    return None


def prop_no_valid_deletion(prev, selection, ev, nxt, wave_valid):
    delivered = {g for g, _ in ev["deliveries"]}
    for g in _ghosts(prev) - _ghosts(nxt):
        if g > 0 and g not in delivered:
            return f"generated ghost {g} vanished undelivered"
    return None


def prop_r12_deletes_only_initial(prev, selection, ev, nxt, wave_valid):
    for g, node, rule in ev["deletions"]:
        if rule in ("R10", "R12") and g > 0:
            return f"{rule} deleted generated ghost {g}"
    return None


def prop_valid_wave_postcondition(prev, selection, ev, nxt, wave_valid):
    for kind, flag in ev["waves"]:
        if kind == "C" and wave_valid and not flag:
            return "valid wave cleaned with unfree initiator output buffer"
    return None


DEFAULT_PROPS = (
    prop_no_duplicate_delivery,
    prop_no_valid_deletion,
    prop_r12_deletes_only_initial,
    prop_valid_wave_postcondition,
)


def _normalize(cfg: Configuration) -> Configuration:
    cfg.t = 0
    return cfg

def _state_key(cfg: Configuration, wave_valid: bool) -> str:
    return ("V" if wave_valid else "-") + config_to_json(cfg)


def _selections(enabled: dict, full_subsets: bool):
    nodes = sorted(enabled)
    if full_subsets:
        for r in range(1, len(nodes) + 1):
            for combo in itertools.combinations(nodes, r):
                yield list(combo)
        return
    for p in nodes:
        yield [p]
    if len(nodes) > 1:
        yield nodes


def explore(initial_set, depth=None, props=DEFAULT_PROPS, *,
            full_subsets=False, budget=1_000_000):
    """BFS from every initial configuration.  Returns an ExploreReport;
    report.exhausted is False when the depth cutoff or state budget stopped
    the search first."""
    seen = {}
    frontier = []
    violations = []
    for cfg in initial_set:
        if cfg.t_stab not in (None, 0):
            raise ValueError("explorer states must not carry a stabilizer clock")
        c = _normalize(cfg.copy())
        key = _state_key(c, False)
        if key not in seen:
            seen[key] = None
            frontier.append((c, False))
    d = 0
    transitions = 0
    truncated = False
    while frontier and (depth is None or d < depth):
        nxt_frontier = []
        for cfg, wave_valid in frontier:
            topo = topology(cfg.n)
            enabled = kernel.compute_enabled(cfg, topo, kernel.NO_MUT)
            if not enabled:
                continue
            for sel in _selections(enabled, full_subsets):
                new, ev = kernel.apply_step(cfg, topo, sel, enabled, kernel.NO_MUT)
                _normalize(new)
                transitions += 1
                wv = wave_valid
                for kind, flag in ev["waves"]:
                    wv = bool(flag) if kind == "B" else False
                # a generation may legally occupy the escorted free slot
                if ev["generated"] and not any(k == "C" for k, _ in ev["waves"]):
                    wv = False
                for prop in props:
                    msg = prop(cfg, sel, ev, new, wave_valid)
                    if msg:
                        violations.append({
                            "prop": prop.__name__, "detail": msg,
                            "depth": d, "selection": sel,
                        })
                key = _state_key(new, wv)
                if key not in seen:
                    if len(seen) >= budget:
                        truncated = True
                        continue
                    seen[key] = None
                    nxt_frontier.append((new, wv))
        frontier = nxt_frontier
        d += 1
    exhausted = not truncated and (depth is None or not frontier)
    return ExploreReport(states=len(seen), transitions=transitions, depth=d,
                         violations=violations, budget=budget,
                         mode="full-subsets" if full_subsets else "reduced",
                         exhausted=exhausted)
