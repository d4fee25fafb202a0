"""Chain topology, buffer layout, buffer graph and the global configuration.

A chain of n nodes (ids 0..n-1, node 0 is the designated extremity that owns
the extra buffer).  Every node has one input and one output buffer per link;
node 0 additionally owns the extra buffer, for a total of 4n-3 slots.  The
buffer graph over the IN/OUT slots forms two disjoint directed chains, one
per travel direction.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

# PIF phases
PHASE_C = 0
PHASE_B = 1
PHASE_F = 2
PHASE_NAMES = {PHASE_C: "C", PHASE_B: "B", PHASE_F: "F"}
PHASE_CODES = {v: k for k, v in PHASE_NAMES.items()}

# PIF pointer sentinels (INIT is the initiator's own marker, -1 in the paper)
PTR_NULL = -2
PTR_INIT = -1

# Slot kinds
IN = 0
OUT = 1
EXT = 2
KIND_NAMES = {IN: "IN", OUT: "OUT", EXT: "EXT"}

# Fair pointer states (per output slot)
GENERATE = 0
TRANSMIT = 1

# Message tuple layout: (payload, dest, color, ghost, flipped).
# ghost and flipped are invisible to guards: guard equality uses [0:3] only.
MSG_PAYLOAD = 0
MSG_DEST = 1
MSG_COLOR = 2
MSG_GHOST = 3
MSG_FLIPPED = 4


def make_message(payload, dest, color, ghost, flipped=False):
    return (payload, dest, color, ghost, flipped)


def guard_eq(a, b):
    """Message equality as seen by guards: (payload, dest, color) only."""
    if a is None or b is None:
        return a is b or (a is None and b is None)
    return a[0] == b[0] and a[1] == b[1] and a[2] == b[2]


class Topology:
    """Static slot table and buffer graph for a chain of n nodes."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("a chain needs at least 2 nodes")
        self.n = n
        self.neighbors = [[q for q in (p - 1, p + 1) if 0 <= q < n] for p in range(n)]
        self.in_idx: dict = {}
        self.out_idx: dict = {}
        meta = []
        for p in range(n):
            for q in self.neighbors[p]:
                self.in_idx[(p, q)] = len(meta)
                meta.append((p, IN, q))
                self.out_idx[(p, q)] = len(meta)
                meta.append((p, OUT, q))
        self.ext_idx = len(meta)
        meta.append((0, EXT, -1))
        self.slot_meta = meta
        self.n_slots = len(meta)
        assert self.n_slots == 4 * n - 3

        # Buffer graph: OUT_p(q) -> IN_q(p); IN_p(q) -> OUT_p(q') at internal
        # nodes (per the data flow of the internal-transmission rule); IN at an
        # extremity has no forward edge.  EXT is outside the graph.
        nxt = [-1] * self.n_slots
        for (p, q), i in self.out_idx.items():
            nxt[i] = self.in_idx[(q, p)]
        for (p, q), i in self.in_idx.items():
            others = [q2 for q2 in self.neighbors[p] if q2 != q]
            if others:
                nxt[i] = self.out_idx[(p, others[0])]
        self.bg_next = nxt
        prv = [-1] * self.n_slots
        for i, j in enumerate(nxt):
            if j >= 0:
                prv[j] = i
        self.bg_prev = prv

    def buffer_graph_next(self, idx: int) -> int:
        """Successor slot in the buffer graph, or -1. Rejects the extra buffer."""
        if self.slot_meta[idx][1] == EXT:
            raise ValueError("the extra buffer is outside the buffer graph")
        return self.bg_next[idx]

    def rightward(self, idx: int) -> bool:
        """True if the slot belongs to the rightward chain (toward n-1)."""
        p, kind, q = self.slot_meta[idx]
        if kind == EXT:
            raise ValueError("the extra buffer is on neither chain")
        if kind == OUT:
            return q > p
        return q < p  # IN_p(p-1) carries rightward traffic

    def suitable(self, idx: int, dest: int) -> bool:
        """Is the slot on the directed chain leading toward dest?"""
        p, kind, q = self.slot_meta[idx]
        if kind == EXT:
            return False
        if kind == OUT:
            return dest > p if q > p else dest < p
        # IN slot: the node itself is still ahead on the path
        return dest >= p if q < p else dest <= p

    def slot_name(self, idx: int) -> str:
        p, kind, q = self.slot_meta[idx]
        if kind == EXT:
            return "EXT_0"
        return f"{KIND_NAMES[kind]}_{p}({q})"


@lru_cache(maxsize=None)
def topology(n: int) -> Topology:
    return Topology(n)


@dataclass
class Configuration:
    """Global protocol state. Steps consume one and produce a fresh copy."""

    n: int
    slots: list  # Optional message tuple per slot index
    pif_phase: list
    pif_ptr: list
    routing: list  # routing[p][d] = neighbor of p; routing[p][p] unused (-1)
    request: list  # pending destination per node, or None
    pif_request: bool
    fair_ptr: list  # per slot index; meaningful for OUT slots only
    t: int = 0
    t_stab: Optional[int] = 0  # None encodes "never stabilizes"
    next_ghost: int = 1
    c_max: int = 4
    payload_domain: int = 4
    ext_mode: bool = False
    departing: Optional[int] = None

    def copy(self) -> "Configuration":
        return Configuration(
            n=self.n,
            slots=list(self.slots),
            pif_phase=list(self.pif_phase),
            pif_ptr=list(self.pif_ptr),
            routing=[list(r) for r in self.routing],
            request=list(self.request),
            pif_request=self.pif_request,
            fair_ptr=list(self.fair_ptr),
            t=self.t,
            t_stab=self.t_stab,
            next_ghost=self.next_ghost,
            c_max=self.c_max,
            payload_domain=self.payload_domain,
            ext_mode=self.ext_mode,
            departing=self.departing,
        )


def correct_routing(n: int) -> list:
    """Direction-correct chain routing tables."""
    tables = []
    for p in range(n):
        row = []
        for d in range(n):
            if d == p:
                row.append(-1)
            elif d < p:
                row.append(p - 1)
            else:
                row.append(p + 1)
        tables.append(row)
    return tables


def new_chain(n: int, *, c_max: int = 4, payload_domain: int = 4,
              t_stab: Optional[int] = 0, ext_mode: bool = False) -> Configuration:
    """Clean configuration: empty buffers, quiescent PIF, correct routing."""
    if n < 2:
        raise ValueError("a chain needs at least 2 nodes")
    if c_max < 4:
        raise ValueError("the color domain must have at least 4 values")
    topo = topology(n)
    return Configuration(
        n=n,
        slots=[None] * topo.n_slots,
        pif_phase=[PHASE_C] * n,
        pif_ptr=[PTR_NULL] * n,
        routing=correct_routing(n),
        request=[None] * n,
        pif_request=False,
        fair_ptr=[GENERATE] * topo.n_slots,
        t_stab=t_stab,
        c_max=c_max,
        payload_domain=payload_domain,
        ext_mode=ext_mode,
    )


def is_free(cfg: Configuration, idx: int) -> bool:
    """Free slot: empty, or an OUT buffer whose content was already copied
    into the successor input buffer."""
    content = cfg.slots[idx]
    if content is None:
        return True
    topo = topology(cfg.n)
    p, kind, q = topo.slot_meta[idx]
    if kind != OUT:
        return False
    return guard_eq(content, cfg.slots[topo.bg_next[idx]])


# --- canonical JSON serialization -----------------------------------------

SCHEMA_VERSION = 1


def _ptr_to_json(v):
    if v == PTR_NULL:
        return "NULL"
    if v == PTR_INIT:
        return "INIT"
    return v


def _ptr_from_json(v):
    if v == "NULL":
        return PTR_NULL
    if v == "INIT":
        return PTR_INIT
    return int(v)


def config_to_dict(cfg: Configuration) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "n": cfg.n,
        "slots": [list(m) if m is not None else None for m in cfg.slots],
        "pif": [
            {"phase": PHASE_NAMES[cfg.pif_phase[p]], "ptr": _ptr_to_json(cfg.pif_ptr[p])}
            for p in range(cfg.n)
        ],
        "routing": [list(r) for r in cfg.routing],
        "request": list(cfg.request),
        "pif_request": cfg.pif_request,
        "fair_ptr": list(cfg.fair_ptr),
        "t": cfg.t,
        "t_stab": cfg.t_stab,
        "next_ghost": cfg.next_ghost,
        "c_max": cfg.c_max,
        "payload_domain": cfg.payload_domain,
        "ext_mode": cfg.ext_mode,
        "departing": cfg.departing,
    }


def config_from_dict(d: dict) -> Configuration:
    n = d["n"]
    return Configuration(
        n=n,
        slots=[tuple(m) if m is not None else None for m in d["slots"]],
        pif_phase=[PHASE_CODES[e["phase"]] for e in d["pif"]],
        pif_ptr=[_ptr_from_json(e["ptr"]) for e in d["pif"]],
        routing=[list(r) for r in d["routing"]],
        request=list(d["request"]),
        pif_request=d["pif_request"],
        fair_ptr=list(d["fair_ptr"]),
        t=d["t"],
        t_stab=d["t_stab"],
        next_ghost=d["next_ghost"],
        c_max=d["c_max"],
        payload_domain=d["payload_domain"],
        ext_mode=d["ext_mode"],
        departing=d.get("departing"),
    )


def config_to_json(cfg: Configuration) -> str:
    return json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))


def config_from_json(s: str) -> Configuration:
    return config_from_dict(json.loads(s))


def config_hash(cfg: Configuration) -> str:
    return hashlib.sha1(config_to_json(cfg).encode()).hexdigest()
