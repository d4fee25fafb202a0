"""Hot step kernel: guard evaluation and rule application for one daemon step.

Everything here is a pure function of a configuration snapshot.  A step reads
guards on the snapshot, then writes into a fresh copy (two-phase semantics):
no guard ever observes a write made in the same step.  This module is plain
Python and is also compiled with Cython as snapfwd._kernel_c when available;
see snapfwd.engine for the import-time selection.
"""

from __future__ import annotations

from snapfwd.model import (
    EXT,
    GENERATE,
    IN,
    MSG_DEST,
    MSG_FLIPPED,
    MSG_GHOST,
    OUT,
    PHASE_B,
    PHASE_C,
    PHASE_F,
    PTR_INIT,
    PTR_NULL,
    TRANSMIT,
    correct_routing,
    guard_eq,
    make_message,
)

# PIF action codes
B_INITIATOR = 0
C_INITIATOR = 1
F_LEAF = 2
C_LEAF = 3
B_INTERNAL = 4
F_INTERNAL = 5
C_INTERNAL = 6
CORR_BC = 7
CORR_LEAF = 8
CORR_PTR = 9

PIF_NAMES = {
    B_INITIATOR: "B_INITIATOR",
    C_INITIATOR: "C_INITIATOR",
    F_LEAF: "F_LEAF",
    C_LEAF: "C_LEAF",
    B_INTERNAL: "B_INTERNAL",
    F_INTERNAL: "F_INTERNAL",
    C_INTERNAL: "C_INTERNAL",
    CORR_BC: "CORR_BC",
    CORR_LEAF: "CORR_LEAF",
    CORR_PTR: "CORR_PTR",
}

# Forwarding rule codes
R1, R2, R3, R4, R5, R6, R7, R8, R9, R10, R11, R12, R13, R14 = range(1, 15)
R5P = 15  # R5' (extremities)
RD = 16  # flip-or-delete at an extremity (dynamics extension only)

RULE_NAMES = {
    R1: "R1", R2: "R2", R3: "R3", R4: "R4", R5: "R5", R6: "R6", R7: "R7",
    R8: "R8", R9: "R9", R10: "R10", R11: "R11", R12: "R12", R13: "R13",
    R14: "R14", R5P: "R5'", RD: "RD",
}

NO_MUT = frozenset()


# --- predicates ------------------------------------------------------------

def pred_consumption(cfg, topo, p, q, mut=NO_MUT):
    """IN_p(q) holds a message for p that is not a lingering copy of OUT_q(p)."""
    m = cfg.slots[topo.in_idx[(p, q)]]
    if m is None or m[MSG_DEST] != p:
        return False
    if "r2_no_copy_guard" in mut:
        return True
    return not guard_eq(cfg.slots[topo.out_idx[(q, p)]], m)


def pred_leaf(cfg, topo, p, q, mut=NO_MUT):
    """Dynamic-leaf predicate: q broadcasts and p can terminate the wave."""
    if cfg.pif_phase[q] != PHASE_B:
        return False
    cons = pred_consumption(cfg, topo, p, q, mut)
    for q2 in topo.neighbors[p]:
        if q2 == q:
            continue
        if cfg.pif_phase[q2] == PHASE_B and cfg.pif_ptr[q2] == p:
            return False
        out = cfg.slots[topo.out_idx[(p, q2)]]
        if not (cons or out is None or guard_eq(out, cfg.slots[topo.in_idx[(q2, p)]])):
            return False
    return True


def pred_no_pif(cfg, topo, p):
    if cfg.pif_phase[p] != PHASE_C or cfg.pif_ptr[p] != PTR_NULL:
        return False
    for q in topo.neighbors[p]:
        if cfg.pif_phase[q] == PHASE_B:
            return False
    return True


def pred_init_pif(cfg, topo, p):
    if p != 0 or not cfg.pif_request:
        return False
    if cfg.pif_phase[p] != PHASE_C or cfg.pif_ptr[p] != PTR_NULL:
        return False
    for q in topo.neighbors[p]:
        if cfg.pif_phase[q] != PHASE_C or cfg.pif_ptr[q] != PTR_NULL:
            return False
    return True


def pred_inter_trans(cfg, topo, p, q):
    """Message in IN_p(q) can move on to the opposite output buffer."""
    m = cfg.slots[topo.in_idx[(p, q)]]
    if m is None or m[MSG_DEST] == p:
        return False
    if guard_eq(cfg.slots[topo.out_idx[(q, p)]], m):
        return False
    for q2 in topo.neighbors[p]:
        if q2 == q:
            continue
        out = cfg.slots[topo.out_idx[(p, q2)]]
        if out is None or guard_eq(out, cfg.slots[topo.in_idx[(q2, p)]]):
            return True
    return False


def pred_road_change(cfg, topo, p):
    """A wrongly-directed message sits in the input buffer of node 0."""
    if p != 0 or cfg.slots[topo.ext_idx] is not None:
        return False
    q = topo.neighbors[0][0]
    m = cfg.slots[topo.in_idx[(0, q)]]
    if m is None or m[MSG_DEST] == 0:
        return False
    if cfg.ext_mode and m[MSG_FLIPPED]:
        return False  # flip-or-delete handles already-reversed messages
    return not guard_eq(cfg.slots[topo.out_idx[(q, 0)]], m)


def pif_synchro(pif_act, q):
    """Forwarding may move together with the processor's own broadcast or
    feedback action.  The neighbor binding is deliberately ignored: the wave
    escorts the free slot only if the rule reading the *non-parent* side
    fires together with the wave action, so the gate opens for every link
    while the processor moves its wave phase."""
    if pif_act is None:
        return False
    code, bound = pif_act
    # CORR_LEAF is the feedback action of a broadcaster that became a leaf
    # mid-wave (the wave switches to escorting a nearer free slot), so it
    # carries forwarding along exactly like the other feedback actions.
    return code in (B_INTERNAL, F_INTERNAL, F_LEAF, CORR_LEAF)


# --- PIF action selection ---------------------------------------------------

def pif_action(cfg, topo, p, mut=NO_MUT):
    """The single enabled PIF action at p (guards are mutually exclusive),
    as (action code, bound neighbor or -1), or None."""
    ph = cfg.pif_phase[p]
    pt = cfg.pif_ptr[p]
    nbrs = topo.neighbors[p]
    if p == 0:
        if pred_init_pif(cfg, topo, p):
            return (B_INITIATOR, -1)
        if ph == PHASE_B and pt == PTR_INIT:
            if all(cfg.pif_phase[q] == PHASE_F for q in nbrs):
                return (C_INITIATOR, -1)
        # Recovery from a corrupted F state: the initiator has no F role, so
        # it clears like any other processor once no neighbor broadcasts.
        if ph == PHASE_F and all(cfg.pif_phase[q] != PHASE_B for q in nbrs):
            return (C_INTERNAL, -1)
    else:
        leaf_q = -1
        for q in nbrs:
            if pred_leaf(cfg, topo, p, q, mut):
                leaf_q = q
                break
        if leaf_q >= 0:
            if ph == PHASE_C and pt == PTR_NULL:
                return (F_LEAF, leaf_q)
        elif len(nbrs) == 1:
            if ph == PHASE_F and cfg.pif_phase[nbrs[0]] != PHASE_B:
                return (C_LEAF, -1)
        else:
            b_nbrs = [q for q in nbrs if cfg.pif_phase[q] == PHASE_B]
            if len(b_nbrs) == 1 and ph == PHASE_C:
                bq = b_nbrs[0]
                if all(cfg.pif_phase[q] == PHASE_C for q in nbrs if q != bq):
                    return (B_INTERNAL, bq)
            if ph == PHASE_B and pt in nbrs and cfg.pif_phase[pt] == PHASE_B:
                if all(cfg.pif_phase[q] == PHASE_F for q in nbrs if q != pt):
                    return (F_INTERNAL, pt)
            if ph == PHASE_F and all(cfg.pif_phase[q] != PHASE_B for q in nbrs):
                return (C_INTERNAL, -1)
    # Corrections (any processor)
    if ph == PHASE_B and pt in nbrs:
        if cfg.pif_phase[pt] in (PHASE_F, PHASE_C):
            return (CORR_BC, pt)
        if p != 0 and pred_leaf(cfg, topo, p, pt, mut):
            return (CORR_LEAF, pt)
    # Pointer normalization for states no algorithm action can ever write:
    # (C, ptr != NULL) and B with an untyped pointer would otherwise wedge.
    if ph == PHASE_C and pt != PTR_NULL:
        return (CORR_PTR, -1)
    if ph == PHASE_B:
        if p == 0 and pt == PTR_NULL:
            return (CORR_PTR, -1)
        if p != 0 and pt not in nbrs:
            return (CORR_PTR, -1)
    return None


# --- forwarding rule guards -------------------------------------------------

def choice_color(cfg, topo, target_idx, source_idx, mut=NO_MUT):
    """Smallest color unused in the buffers adjacent to the target slot."""
    if "no_recolor" in mut:
        if source_idx is not None and cfg.slots[source_idx] is not None:
            return cfg.slots[source_idx][2]
        return 0
    used = set()
    for j in (topo.bg_prev[target_idx], topo.bg_next[target_idx]):
        if j >= 0 and cfg.slots[j] is not None:
            used.add(cfg.slots[j][2])
    if source_idx is not None and cfg.slots[source_idx] is not None:
        used.add(cfg.slots[source_idx][2])
    for c in range(cfg.c_max):
        if c not in used:
            return c
    raise AssertionError("no free color: the color domain is too small")


def enabled_rules(cfg, topo, p, pif_act, mut=NO_MUT):
    """All forwarding rules whose guards hold at p, as (rule code, link)."""
    out = []
    nbrs = topo.neighbors[p]
    slots = cfg.slots
    nop = pred_no_pif(cfg, topo, p)

    def gate(q):
        return nop or pif_synchro(pif_act, q)

    # R1: generation
    d = cfg.request[p]
    if d is not None and d != p and cfg.departing != p and nop:
        q = cfg.routing[p][d]
        oi = topo.out_idx[(p, q)]
        if slots[oi] is None or guard_eq(slots[oi], slots[topo.in_idx[(q, p)]]):
            out.append((R1, q))
    # R2: consumption
    for q in nbrs:
        if pred_consumption(cfg, topo, p, q, mut):
            out.append((R2, q))
    if len(nbrs) == 2:
        for q in nbrs:
            q2 = nbrs[0] if q == nbrs[1] else nbrs[1]
            # R3: internal transmission
            if pred_inter_trans(cfg, topo, p, q) and gate(q):
                out.append((R3, q))
            # R4: transmission from q to p
            if (slots[topo.in_idx[(p, q)]] is None
                    and slots[topo.out_idx[(q, p)]] is not None and gate(q)):
                out.append((R4, q))
            # R5: erase after transmission, refilling whichever input buffers
            # have room.  The erase needs nothing besides the successor copy:
            # demanding an empty opposite input buffer lets both chains
            # saturate with sender/receiver copy pairs and deadlock.
            op = slots[topo.out_idx[(p, q)]]
            oq2 = slots[topo.out_idx[(q2, p)]]
            refill = slots[topo.in_idx[(p, q2)]] is None and oq2 is not None
            if (guard_eq(op, slots[topo.in_idx[(q, p)]])
                    and gate(q) and (op is not None or refill)):
                out.append((R5, q))
    else:
        q = nbrs[0]
        op = slots[topo.out_idx[(p, q)]]
        oq = slots[topo.out_idx[(q, p)]]
        # R5': erase after transmission at an extremity, refilling the input
        # buffer only when it is empty (same relaxation as R5).
        refill = slots[topo.in_idx[(p, q)]] is None and oq is not None
        if (guard_eq(op, slots[topo.in_idx[(q, p)]])
                and (p != 0 or slots[topo.ext_idx] is None
                     or "r5p_skip_ext_guard" in mut)
                and gate(q) and (op is not None or refill)):
            out.append((R5P, q))
        # R4 at an extremity: plain receive into the empty input buffer.
        # Without it a lone hole at an extremity input slot is unreachable
        # (the erase rule insists on a free output buffer) and the free
        # slot stays trapped there forever.
        if slots[topo.in_idx[(p, q)]] is None and oq is not None and gate(q):
            out.append((R4, q))
        m = slots[topo.in_idx[(p, q)]]
        # RD: flip-or-delete (dynamics extension)
        if (cfg.ext_mode and m is not None and m[MSG_DEST] != p
                and m[MSG_FLIPPED] and not guard_eq(oq, m)):
            out.append((RD, q))
        if p == 0:
            rc = pred_road_change(cfg, topo, p)
            out_free = op is None or guard_eq(op, slots[topo.in_idx[(q, p)]])
            if rc and out_free:
                out.append((R6, q))
            if rc and op is not None and not cfg.pif_request:
                out.append((R7, q))
            if (rc and op is not None and cfg.pif_request
                    and pif_act is not None and pif_act[0] == B_INITIATOR):
                out.append((R8, q))
            ext = slots[topo.ext_idx]
            c_init = pif_act is not None and pif_act[0] == C_INITIATOR
            if ext is not None and out_free and c_init:
                out.append((R9, q))
            if (ext is not None and op is not None
                    and not guard_eq(op, slots[topo.in_idx[(q, p)]]) and c_init):
                out.append((R10, q))
            if ext is not None and (
                    "r12_eager" in mut
                    or not (cfg.pif_phase[0] == PHASE_B and cfg.pif_ptr[0] == PTR_INIT)):
                out.append((R12, q))
            if cfg.pif_phase[0] == PHASE_B and cfg.pif_request:
                out.append((R13, q))
            if (cfg.pif_phase[0] == PHASE_C and cfg.pif_request
                    and (m is None or m[MSG_DEST] == 0)):
                out.append((R14, q))
        else:
            # R11: road change at the other extremity.  Accepts a free
            # (already-copied) output buffer like its initiator-side twin;
            # demanding a literally empty buffer wedges the extremity against
            # the erase rule, which in turn demands an empty input buffer.
            if (m is not None and m[MSG_DEST] != p
                    and (op is None or guard_eq(op, slots[topo.in_idx[(q, p)]]))
                    and not guard_eq(oq, m)
                    and not (cfg.ext_mode and m[MSG_FLIPPED])):
                out.append((R11, q))
    return out


def compute_enabled(cfg, topo, mut=NO_MUT):
    """Phase 1 of a step: evaluate every guard on the snapshot.

    Returns {p: (pif_action or None, [rule bindings])} for enabled nodes."""
    enabled = {}
    for p in range(cfg.n):
        act = pif_action(cfg, topo, p, mut)
        rules = enabled_rules(cfg, topo, p, act, mut)
        if act is not None or rules:
            enabled[p] = (act, rules)
    return enabled


# --- statement application --------------------------------------------------

def _r3_target(topo, p, q):
    nbrs = topo.neighbors[p]
    q2 = nbrs[0] if q == nbrs[1] else nbrs[1]
    return topo.out_idx[(p, q2)]


def _order_rules(cfg, topo, p, rules):
    """Intra-node firing order: consumption first, then the fair-pointer
    arbitration between generation and internal transmission, then the rest
    in listing order."""
    r2s, r1 = [], None
    r3s, rest = [], []
    for r in rules:
        code = r[0]
        if code == R2:
            r2s.append(r)
        elif code == R1:
            r1 = r
        elif code == R3:
            r3s.append(r)
        else:
            rest.append(r)
    # Road changes go first: a leaf moves the escorted free slot with its
    # feedback action, and the erase rule would otherwise burn the same
    # output buffer one step too early (overwriting the copy erases it just
    # as well).  Then erase-and-receive before plain receive on the same
    # input slot; the conflict check drops the weaker rule.
    rest.sort(key=lambda r: (-1 if r[0] in (R6, R9, R11) else
                             0 if r[0] == R5 else
                             1 if r[0] == R5P else
                             2 if r[0] == R4 else
                             3 if r[0] == RD else
                             r[0] - 2))
    if r1 is not None:
        gen_slot = topo.out_idx[(p, r1[1])]
        clash = [r for r in r3s if _r3_target(topo, p, r[1]) == gen_slot]
        if clash:
            if cfg.fair_ptr[gen_slot] == GENERATE:
                picked = [r1] + [r for r in r3s if r not in clash]
            else:
                picked = r3s
        else:
            picked = [r1] + r3s
        # At an extremity the transmit-class competitor for the output
        # buffer is the road-change rule, not internal transmission.
        rc = next((r for r in rest if r[0] in (R6, R11)), None)
        if rc is not None and r1 in picked:
            if cfg.fair_ptr[gen_slot] == GENERATE:
                rest = [r for r in rest if r is not rc]
            else:
                picked = [r for r in picked if r is not r1]
    else:
        picked = r3s
    return r2s + picked + rest


def _fire_rule(cfg, topo, p, code, q, new, mut):
    """Writes and events for one rule, reading the snapshot.
    Returns (write list, event list); nothing is committed here — the caller
    applies writes and records events only if the rule survives the
    write-conflict check, so skipped rules leave no trace."""
    slots = cfg.slots
    ii = topo.in_idx.get((p, q))
    oi = topo.out_idx.get((p, q))
    writes = []
    evs = []
    if code == R1:
        g = new.next_ghost
        d = cfg.request[p]
        color = choice_color(cfg, topo, oi, None, mut)
        msg = make_message(g % cfg.payload_domain, d, color, g, False)
        writes.append((("s", oi), msg))
        writes.append((("req", p), None))
        evs.append(("generated", (g, p, d, oi, topo.suitable(oi, d))))
    elif code == R2:
        m = slots[ii]
        evs.append(("deliveries", (m[MSG_GHOST], p)))
        writes.append((("s", ii), slots[topo.out_idx[(q, p)]]))
    elif code == R3:
        q2 = topo.neighbors[p][0] if q == topo.neighbors[p][1] else topo.neighbors[p][1]
        ti = topo.out_idx[(p, q2)]
        m = slots[ii]
        color = choice_color(cfg, topo, ti, ii, mut)
        writes.append((("s", ti), (m[0], m[1], color, m[MSG_GHOST], m[MSG_FLIPPED])))
        writes.append((("s", ii), slots[topo.out_idx[(q, p)]]))
    elif code == R4:
        writes.append((("s", ii), slots[topo.out_idx[(q, p)]]))
    elif code == R5:
        q2 = topo.neighbors[p][0] if q == topo.neighbors[p][1] else topo.neighbors[p][1]
        writes.append((("s", oi), None))
        src = slots[topo.out_idx[(q2, p)]]
        if src is not None and slots[topo.in_idx[(p, q2)]] is None:
            writes.append((("s", topo.in_idx[(p, q2)]), src))
    elif code == R5P:
        writes.append((("s", oi), None))
        if slots[ii] is None:
            writes.append((("s", ii), slots[topo.out_idx[(q, p)]]))
    elif code == RD:
        m = slots[ii]
        evs.append(("deletions", (m[MSG_GHOST], p, "RD")))
        writes.append((("s", ii), slots[topo.out_idx[(q, p)]]))
    elif code == R6:
        m = slots[ii]
        color = choice_color(cfg, topo, oi, ii, mut)
        flipped = True if cfg.ext_mode else m[MSG_FLIPPED]
        writes.append((("s", oi), (m[0], m[1], color, m[MSG_GHOST], flipped)))
        writes.append((("s", ii), slots[topo.out_idx[(q, p)]]))
        evs.append(("route_changes", m[MSG_GHOST]))
    elif code == R7:
        writes.append((("pr",), True))
    elif code == R8:
        m = slots[ii]
        flipped = True if cfg.ext_mode else m[MSG_FLIPPED]
        writes.append((("s", topo.ext_idx), (m[0], m[1], m[2], m[MSG_GHOST], flipped)))
        if "r8_no_refill" not in mut:
            writes.append((("s", ii), slots[topo.out_idx[(q, p)]]))
    elif code == R9:
        ext = slots[topo.ext_idx]
        writes.append((("s", oi), ext))
        writes.append((("s", topo.ext_idx), None))
        evs.append(("route_changes", ext[MSG_GHOST]))
    elif code in (R10, R12):
        ext = slots[topo.ext_idx]
        evs.append(("deletions", (ext[MSG_GHOST], p, RULE_NAMES[code])))
        writes.append((("s", topo.ext_idx), None))
    elif code == R11:
        m = slots[ii]
        color = choice_color(cfg, topo, oi, ii, mut)
        flipped = True if cfg.ext_mode else m[MSG_FLIPPED]
        writes.append((("s", oi), (m[0], m[1], color, m[MSG_GHOST], flipped)))
        writes.append((("s", ii), slots[topo.out_idx[(q, p)]]))
        evs.append(("route_changes", m[MSG_GHOST]))
    elif code in (R13, R14):
        writes.append((("pr",), False))
    return writes, evs


def _apply_pif(cfg, p, code, q, new):
    if code == B_INITIATOR:
        new.pif_phase[p] = PHASE_B
        new.pif_ptr[p] = PTR_INIT
        new.pif_request = False
        return True  # wrote pif_request
    if code in (C_INITIATOR, C_LEAF, C_INTERNAL, CORR_BC, CORR_PTR):
        if code == CORR_PTR and cfg.pif_phase[p] == PHASE_C:
            new.pif_ptr[p] = PTR_NULL
            return False
        new.pif_phase[p] = PHASE_C
        new.pif_ptr[p] = PTR_NULL
        return False
    if code == B_INTERNAL:
        new.pif_phase[p] = PHASE_B
        new.pif_ptr[p] = q
        return False
    if code in (F_LEAF, F_INTERNAL, CORR_LEAF):
        new.pif_phase[p] = PHASE_F
        new.pif_ptr[p] = q
        return False
    raise AssertionError(f"unknown PIF action {code}")


def apply_step(cfg, topo, selection, enabled, mut=NO_MUT):
    """Phase 2 of a step: every selected node fires its enabled PIF action and
    the selected forwarding rules.  Returns (next config, events)."""
    new = cfg.copy()
    ev = {
        "fired": [],        # (node, protocol, action name, link)
        "deliveries": [],   # (ghost, node)
        "deletions": [],    # (ghost, node, rule)
        "generated": [],    # (ghost, node, dest, slot, suitable)
        "route_changes": [],
        "waves": [],        # ("B", r8_fired) / ("C", out_was_free)
    }
    for p in sorted(selection):
        pif_act, rules = enabled[p]
        written = set()
        r8_here = False
        if pif_act is not None:
            code, q = pif_act
            if _apply_pif(cfg, p, code, q, new):
                written.add(("pr",))
            ev["fired"].append((p, "pif", PIF_NAMES[code], q))
        ordered = _order_rules(cfg, topo, p, rules)
        for code, q in ordered:
            writes, evs = _fire_rule(cfg, topo, p, code, q, new, mut)
            keys = [w[0] for w in writes]
            if any(k in written for k in keys):
                continue
            for channel, item in evs:
                ev[channel].append(item)
            for key, value in writes:
                written.add(key)
                if key[0] == "s":
                    new.slots[key[1]] = value
                elif key[0] == "req":
                    new.request[key[1]] = value
                else:
                    new.pif_request = value
            if code == R8:
                r8_here = True
            elif code == R1:
                new.next_ghost += 1
            ev["fired"].append((p, "fwd", RULE_NAMES[code], q))
            # The fair pointer flips exactly when its designated action fires.
            if "fair_ptr_stuck" not in mut:
                if code == R1:
                    s = topo.out_idx[(p, q)]
                    if cfg.fair_ptr[s] == GENERATE:
                        new.fair_ptr[s] = TRANSMIT
                elif code == R3:
                    s = _r3_target(topo, p, q)
                    if cfg.fair_ptr[s] == TRANSMIT:
                        new.fair_ptr[s] = GENERATE
                elif code in (R6, R11):
                    s = topo.out_idx[(p, q)]
                    if cfg.fair_ptr[s] == TRANSMIT:
                        new.fair_ptr[s] = GENERATE
        if pif_act is not None:
            if pif_act[0] == B_INITIATOR:
                ev["waves"].append(("B", r8_here))
            elif pif_act[0] == C_INITIATOR:
                q0 = topo.neighbors[0][0]
                op = cfg.slots[topo.out_idx[(0, q0)]]
                free = op is None or guard_eq(op, cfg.slots[topo.in_idx[(q0, 0)]])
                ev["waves"].append(("C", free))
    new.t = cfg.t + 1
    if cfg.t_stab is not None and new.t >= cfg.t_stab:
        new.routing = correct_routing(cfg.n)
    return new, ev
