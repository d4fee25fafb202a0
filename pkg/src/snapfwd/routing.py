"""Routing-table access and the abstracted table stabilizer.

The real table-building protocol is replaced by a stub: tables start in an
arbitrary (direction-corrupted) state and are overwritten with correct chain
routing once the step clock reaches t_stab.  t_stab=None means the tables
are never repaired."""

from __future__ import annotations

from snapfwd.model import Configuration, correct_routing, topology


def next_hop(cfg: Configuration, p: int, d: int) -> int:
    """Neighbor of p given by p's routing table for destination d."""
    if d == p:
        raise ValueError("a node never routes to itself")
    q = cfg.routing[p][d]
    if q not in topology(cfg.n).neighbors[p]:
        raise ValueError(f"routing table of {p} points to non-neighbor {q}")
    return q


def stabilizer_tick(cfg: Configuration) -> Configuration:
    """Advance the table-stabilizer clock on a configuration copy."""
    new = cfg.copy()
    new.t = cfg.t + 1
    if cfg.t_stab is not None and new.t >= cfg.t_stab:
        new.routing = correct_routing(cfg.n)
    return new


def tables_correct(cfg: Configuration) -> bool:
    return cfg.routing == correct_routing(cfg.n)
