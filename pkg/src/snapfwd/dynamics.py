"""Chain growth and shrink (extension mode): scripted topology events.

The extension keeps the network a chain and keeps node 0 pinned (it owns the
extra buffer and the wave initiator role): joins happen at the right end,
and only the rightmost node may leave.  A leave is scheduled, not
instantaneous — the node is marked departing, stops generating, and detaches
once every slot that would vanish is drained (empty, a copy that survives
elsewhere, or a message addressed to the leaving node itself).  Each
topology change restarts the routing-table stabilizer clock."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from snapfwd.model import (
    GENERATE,
    MSG_DEST,
    MSG_GHOST,
    PHASE_C,
    PTR_NULL,
    Configuration,
    correct_routing,
    topology,
)

JOIN = "join"
LEAVE = "leave"

# Steps between a topology change and trusted routing tables again.
RESETTLE_FACTOR = 2


def _remap(old: Configuration, new: Configuration):
    """Copy slot contents and fair pointers between configurations of
    different sizes, matching slots by their (node, kind, link) identity."""
    src = topology(old.n)
    dst = topology(new.n)
    index = {meta: i for i, meta in enumerate(src.slot_meta)}
    for j, meta in enumerate(dst.slot_meta):
        i = index.get(meta)
        if i is not None:
            new.slots[j] = old.slots[i]
            new.fair_ptr[j] = old.fair_ptr[i]


def join(cfg: Configuration, side: str = "RIGHT") -> Configuration:
    """Attach a fresh extremity with empty buffers and quiescent wave state."""
    if side != "RIGHT":
        raise ValueError("joins happen at the right end; node 0 is pinned")
    n = cfg.n + 1
    topo = topology(n)
    new = cfg.copy()
    new.n = n
    new.slots = [None] * topo.n_slots
    new.fair_ptr = [GENERATE] * topo.n_slots
    _remap(cfg, new)
    new.pif_phase = cfg.pif_phase + [PHASE_C]
    new.pif_ptr = cfg.pif_ptr + [PTR_NULL]
    new.request = cfg.request + [None]
    # Stale tables until the stabilizer clock runs out again.
    new.routing = [row + [p + 1 if p < cfg.n else -1]
                   for p, row in enumerate(cfg.routing)]
    new.routing.append(correct_routing(n)[n - 1])
    new.t_stab = new.t + RESETTLE_FACTOR * n
    return new


def can_detach(cfg: Configuration) -> bool:
    """The rightmost node's link is drained: every slot that disappears with
    it is empty, holds a copy whose ghost survives in a remaining slot, or
    holds a message addressed to the leaving node."""
    leaver = cfg.n - 1
    topo = topology(cfg.n)
    vanishing = {i for i, (p, kind, q) in enumerate(topo.slot_meta)
                 if p == leaver or q == leaver}
    survivors = {m[MSG_GHOST] for i, m in enumerate(cfg.slots)
                 if m is not None and i not in vanishing}
    for i in vanishing:
        m = cfg.slots[i]
        if m is None or m[MSG_DEST] == leaver or m[MSG_GHOST] in survivors:
            continue
        return False
    return True


def leave(cfg: Configuration) -> Configuration:
    """Mark the rightmost node as departing, or detach it if already drained.
    Only the rightmost node may leave (interior removal breaks the chain and
    node 0 is pinned)."""
    if cfg.n <= 2:
        raise ValueError("cannot shrink below 2 nodes")
    leaver = cfg.n - 1
    if not can_detach(cfg):
        new = cfg.copy()
        new.departing = leaver
        new.request[leaver] = None
        return new
    n = cfg.n - 1
    topo = topology(n)
    new = cfg.copy()
    new.n = n
    new.slots = [None] * topo.n_slots
    new.fair_ptr = [GENERATE] * topo.n_slots
    _remap(cfg, new)
    new.pif_phase = cfg.pif_phase[:n]
    new.pif_ptr = [PTR_NULL if v == leaver else v for v in cfg.pif_ptr[:n]]
    new.request = cfg.request[:n]
    new.routing = [row[:n] for row in cfg.routing[:n]]
    # A row may still point at the vanished node; clamp to a real neighbor.
    for p in range(n):
        for d in range(n):
            if new.routing[p][d] == leaver:
                new.routing[p][d] = topo.neighbors[p][-1]
    new.departing = None
    new.t_stab = new.t + RESETTLE_FACTOR * n
    return new


@dataclass
class Event:
    step: int
    op: str
    side: str = "RIGHT"

    @classmethod
    def from_dict(cls, d: dict) -> "Event":
        if d["op"] not in (JOIN, LEAVE):
            raise ValueError(f"unknown topology op {d['op']!r}")
        return cls(step=int(d["step"]), op=d["op"], side=d.get("side", "RIGHT"))

    def to_dict(self) -> dict:
        return {"step": self.step, "op": self.op, "side": self.side}


@dataclass
class Scenario:
    """Timed topology events, applied between steps.  A pending leave whose
    drain is not complete retries every step until the node detaches."""

    events: list = field(default_factory=list)
    min_gap: Optional[int] = None  # defaults to 64n against the initial size

    def __post_init__(self):
        self.events = [e if isinstance(e, Event) else Event.from_dict(e)
                       for e in self.events]
        self.events.sort(key=lambda e: e.step)
        self._cursor = 0
        self._detach_pending = False

    def validate(self, n: int):
        gap = self.min_gap if self.min_gap is not None else 64 * n
        for a, b in zip(self.events, self.events[1:]):
            if b.step - a.step < gap:
                raise ValueError(
                    f"topology events at steps {a.step} and {b.step} violate "
                    f"the minimum gap of {gap}")

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        d = json.loads(text)
        return cls(events=[Event.from_dict(e) for e in d.get("events", [])],
                   min_gap=d.get("min_gap"))

    def apply(self, cfg: Configuration) -> Configuration:
        if not cfg.ext_mode:
            raise ValueError("topology scenarios need extension mode")
        if self._detach_pending:
            new = leave(cfg)
            self._detach_pending = new.n == cfg.n
            return new
        if self._cursor >= len(self.events):
            return cfg
        ev = self.events[self._cursor]
        if cfg.t < ev.step:
            return cfg
        self._cursor += 1
        if ev.op == JOIN:
            return join(cfg, ev.side)
        new = leave(cfg)
        self._detach_pending = new.n == cfg.n
        return new
