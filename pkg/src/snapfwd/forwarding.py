"""Forwarding rule API: predicates, color choice, enabled-rule query,
rule application and the intra-node selection policy.

Thin front over the selected kernel; the rule semantics live in
snapfwd._kernel."""

from __future__ import annotations

from snapfwd.engine import kernel
from snapfwd.model import Configuration, topology

RULE_NAMES = kernel.RULE_NAMES
R1, R2, R3, R4, R5, R6, R7 = kernel.R1, kernel.R2, kernel.R3, kernel.R4, kernel.R5, kernel.R6, kernel.R7
R8, R9, R10, R11, R12, R13, R14 = kernel.R8, kernel.R9, kernel.R10, kernel.R11, kernel.R12, kernel.R13, kernel.R14
R5P, RD = kernel.R5P, kernel.RD


def pred_consumption(cfg: Configuration, p: int, q: int) -> bool:
    return kernel.pred_consumption(cfg, topology(cfg.n), p, q)


def pred_no_pif(cfg: Configuration, p: int) -> bool:
    return kernel.pred_no_pif(cfg, topology(cfg.n), p)


def pred_inter_trans(cfg: Configuration, p: int, q: int) -> bool:
    return kernel.pred_inter_trans(cfg, topology(cfg.n), p, q)


def pred_road_change(cfg: Configuration, p: int) -> bool:
    return kernel.pred_road_change(cfg, topology(cfg.n), p)


def pred_pif_synchro(cfg: Configuration, p: int, q: int) -> bool:
    act = kernel.pif_action(cfg, topology(cfg.n), p)
    return kernel.pif_synchro(act, q)


def choice_color(cfg: Configuration, target_idx: int, source_idx=None) -> int:
    return kernel.choice_color(cfg, topology(cfg.n), target_idx, source_idx)


def enabled_rules(cfg: Configuration, p: int):
    """All forwarding rules enabled at p as (rule, link) bindings."""
    topo = topology(cfg.n)
    act = kernel.pif_action(cfg, topo, p)
    return kernel.enabled_rules(cfg, topo, p, act)


def select_rules(cfg: Configuration, p: int, rules):
    """Intra-node firing order: consumption, then the fair-pointer pick
    between generation and internal transmission, then listing order.
    Write-set conflicts are resolved at application time."""
    return kernel._order_rules(cfg, topology(cfg.n), p, rules)


def apply_rule(cfg: Configuration, p: int, rule) -> Configuration:
    """Apply a single enabled rule in isolation (test/inspection helper;
    full steps go through the daemon)."""
    topo = topology(cfg.n)
    act = kernel.pif_action(cfg, topo, p)
    if rule not in kernel.enabled_rules(cfg, topo, p, act):
        raise ValueError(f"rule {rule} is not enabled at {p}")
    new = cfg.copy()
    ev = {"fired": [], "deliveries": [], "deletions": [], "generated": [],
          "route_changes": [], "waves": []}
    writes = kernel._fire_rule(cfg, topo, p, rule[0], rule[1], new, kernel.NO_MUT, ev)
    for key, value in writes:
        if key[0] == "s":
            new.slots[key[1]] = value
        elif key[0] == "req":
            new.request[key[1]] = value
        else:
            new.pif_request = value
    if rule[0] == kernel.R1:
        new.next_ghost += 1
    return new
