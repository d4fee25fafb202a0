"""Arbitrary initial configurations, by corruption class.

Snap-stabilization quantifies over *any* starting state, so the simulator
needs a generator of arbitrary configurations.  Corruption is split into
profiles so campaigns can attribute failures: buffers only, wave state only,
routing only, everything at once, and the adversarial full-buffers case
where every slot (extra buffer included) holds a distinct message that
cannot be consumed where it sits."""

from __future__ import annotations

import random

from snapfwd.model import (
    EXT,
    GENERATE,
    IN,
    PHASE_B,
    PHASE_C,
    PHASE_F,
    PTR_INIT,
    PTR_NULL,
    TRANSMIT,
    Configuration,
    make_message,
    new_chain,
    topology,
)

CLEAN = "CLEAN"
BUFFERS_ONLY = "BUFFERS_ONLY"
PIF_ONLY = "PIF_ONLY"
ROUTING_ONLY = "ROUTING_ONLY"
FULL = "FULL"
WORST_CASE_FULL_BUFFERS = "WORST_CASE_FULL_BUFFERS"

PROFILES = (CLEAN, BUFFERS_ONLY, PIF_ONLY, ROUTING_ONLY, FULL,
            WORST_CASE_FULL_BUFFERS)


def _corrupt_buffers(cfg: Configuration, rng: random.Random):
    topo = topology(cfg.n)
    ghost = -1  # negative ids mark pre-existing (invalid) messages
    for i in range(topo.n_slots):
        if rng.random() < 0.6:
            dest = rng.randrange(cfg.n)
            cfg.slots[i] = make_message(
                rng.randrange(cfg.payload_domain), dest,
                rng.randrange(cfg.c_max), ghost)
            ghost -= 1
        else:
            cfg.slots[i] = None
        cfg.fair_ptr[i] = rng.choice((GENERATE, TRANSMIT))
    cfg.request = [rng.choice([None] + [d for d in range(cfg.n) if d != p])
                   if rng.random() < 0.5 else None for p in range(cfg.n)]


def _corrupt_pif(cfg: Configuration, rng: random.Random):
    for p in range(cfg.n):
        cfg.pif_phase[p] = rng.choice((PHASE_C, PHASE_B, PHASE_F))
        # Pointers stay within their type: a neighbor id, NULL, or INIT.
        cfg.pif_ptr[p] = rng.choice(
            [PTR_NULL, PTR_INIT] + topology(cfg.n).neighbors[p])
    cfg.pif_request = rng.random() < 0.5


def _corrupt_routing(cfg: Configuration, rng: random.Random):
    for p in range(cfg.n):
        for d in range(cfg.n):
            if d != p:
                cfg.routing[p][d] = rng.choice(topology(cfg.n).neighbors[p])


def _worst_case(cfg: Configuration):
    """Every slot holds a distinct message; no input buffer can consume in
    place (dest differs from the owner), so nothing frees up until the
    road-change machinery clears the extra buffer."""
    topo = topology(cfg.n)
    ghost = -1
    for i in range(topo.n_slots):
        p, kind, _q = topo.slot_meta[i]
        dest_pool = [d for d in range(cfg.n) if d != p] if kind != EXT \
            else list(range(1, cfg.n))
        dest = dest_pool[(-ghost) % len(dest_pool)]
        # A unique payload per slot keeps every message guard-distinct, so
        # no output buffer ever looks already-copied.  Payloads are opaque;
        # the domain size only bounds the random generators.
        color = (-ghost - 1) % cfg.c_max
        cfg.slots[i] = make_message(-ghost - 1, dest, color, ghost)
        ghost -= 1


def arbitrary_config(n: int, seed: int, profile: str = FULL, *,
                     c_max: int = 4, payload_domain: int = 4,
                     t_stab=0, ext_mode: bool = False) -> Configuration:
    """Deterministic seeded sample from the given corruption class."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    cfg = new_chain(n, c_max=c_max, payload_domain=payload_domain,
                    t_stab=t_stab, ext_mode=ext_mode)
    rng = random.Random((seed, profile, n).__repr__())
    if profile == CLEAN:
        return cfg
    if profile == WORST_CASE_FULL_BUFFERS:
        _worst_case(cfg)
        return cfg
    if profile in (BUFFERS_ONLY, FULL):
        _corrupt_buffers(cfg, rng)
    if profile in (PIF_ONLY, FULL):
        _corrupt_pif(cfg, rng)
    if profile in (ROUTING_ONLY, FULL):
        _corrupt_routing(cfg, rng)
    return cfg
