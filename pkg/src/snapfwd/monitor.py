"""Trace monitor: ghost ledger plus safety and liveness verdicts.

The ledger tracks every ghost id (invisible message identity): where it came
from (present at step 0 vs generated during the run), where its copies are,
how often it was delivered, deleted or reversed.  Safety violations fail the
run immediately; "finite time" clauses become bounded-horizon checks with an
INCONCLUSIVE band for items still younger than their threshold at the end of
the run."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from snapfwd.model import (
    EXT,
    MSG_DEST,
    MSG_GHOST,
    Configuration,
    PHASE_B,
    is_free,
    topology,
)

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Verdict:
    status: str
    prop: Optional[str] = None
    detail: str = ""
    step: Optional[int] = None

    def to_dict(self):
        return {"status": self.status, "prop": self.prop,
                "detail": self.detail, "step": self.step}


@dataclass
class GhostRecord:
    origin: tuple  # ("INITIAL",) or ("GENERATED", step, node)
    dest: Optional[int]
    deliveries: list = field(default_factory=list)   # (step, node)
    deletions: list = field(default_factory=list)    # (step, node, rule)
    route_changes: int = 0
    dest_left: bool = False  # destination departed (extension mode)


class Bounds:
    """Monitor thresholds, expressed in steps and scaled by n.

    The liveness bounds are per round; round_len converts them to daemon
    steps.  A synchronous or coin-flip daemon completes a round in O(1)
    steps (round_len=1); a serializing adversary daemon activates one node
    per step, so a round costs up to n steps (pass round_len=n)."""

    def __init__(self, n: int, *, l_gen=None, l_del=None, l_ext=None,
                 b_prog=None, fairness=None, round_len: int = 1):
        self.l_gen = (l_gen if l_gen is not None else 32 * n) * round_len
        self.l_del = (l_del if l_del is not None else 64 * n) * round_len
        self.l_ext = (l_ext if l_ext is not None else 32 * n) * round_len
        self.b_prog = (b_prog if b_prog is not None else 16 * n) * round_len
        self.fairness = fairness if fairness is not None else 2 * n


def default_bounds(cfg, strategy: str) -> "Bounds":
    """Bounds matched to the daemon strategy's round length."""
    return Bounds(cfg.n, round_len=cfg.n if strategy == "ADVERSARY" else 1)


def ghosts_in(cfg: Configuration) -> set:
    return {m[MSG_GHOST] for m in cfg.slots if m is not None}


class Monitor:
    """One monitor per run.  Feed with on_step(prev, report, next); query
    .failed to stop early; finalize() returns the run verdict."""

    def __init__(self, cfg0: Configuration, bounds: Optional[Bounds] = None,
                 *, check_suitability: bool = True):
        self.n0 = cfg0.n
        self.bounds = bounds or Bounds(cfg0.n)
        self.ext_mode = cfg0.ext_mode
        self.check_suitability = check_suitability and not cfg0.ext_mode
        self.ledger: dict = {}
        for g in ghosts_in(cfg0):
            self.ledger[g] = GhostRecord(("INITIAL",), None)
        self.invalid_deliveries = 0
        self.verdicts: list = []
        self.failed = False
        # onset of post-stabilization obligations (suitability, generation)
        if cfg0.t_stab is None:
            self.onset = None
        else:
            self.onset = cfg0.t_stab + 64 * cfg0.n
        self.pending_since = [None] * cfg0.n
        for p in range(cfg0.n):
            if cfg0.request[p] is not None:
                self.pending_since[p] = cfg0.t
        self.ext_since = cfg0.t if cfg0.slots[topology(cfg0.n).ext_idx] is not None else None
        self.wave_open = False       # B seen, C pending
        self.wave_valid = False      # the open wave started together with R8
        self.wave_since = None
        self.phase_b_since = [None] * cfg0.n

    # -- helpers -----------------------------------------------------------

    def _fail(self, prop, detail, step):
        self.failed = True
        self.verdicts.append(Verdict(FAIL, prop, detail, step))

    # -- dynamics hooks ----------------------------------------------------

    def on_resize(self, cfg: Configuration):
        """Topology changed between steps (extension mode)."""
        if cfg.n < self.n0 or len(self.pending_since) > cfg.n:
            # rightmost node left; its id no longer exists
            gone = len(self.pending_since) - cfg.n
            if gone > 0:
                departed = range(cfg.n, cfg.n + gone)
                for rec in self.ledger.values():
                    if rec.dest in departed:
                        rec.dest_left = True
                self.pending_since = self.pending_since[:cfg.n]
                self.phase_b_since = self.phase_b_since[:cfg.n]
        while len(self.pending_since) < cfg.n:
            self.pending_since.append(None)
            self.phase_b_since.append(None)

    # -- per-step checking -------------------------------------------------

    def on_step(self, prev: Configuration, report, nxt: Configuration):
        step = prev.t
        # generations
        for g, node, dest, slot, suitable in report.generated:
            if g in self.ledger:
                self._fail("ghost-reuse", f"ghost {g} generated twice", step)
                return
            self.ledger[g] = GhostRecord(("GENERATED", step, node), dest)
            # A generation ahead of the broadcast front may occupy the free
            # slot the wave escorts (the guard that forbids generating near
            # a wave only sees direct neighbors), so the valid-wave
            # postcondition is only owed for generation-free waves.
            if self.wave_open:
                self.wave_valid = False
        # deliveries
        for g, node in report.deliveries:
            rec = self.ledger.get(g)
            if rec is None:
                self._fail("unknown-ghost", f"delivery of untracked ghost {g}", step)
                return
            if rec.deliveries:
                self._fail("duplication", f"ghost {g} delivered twice", step)
                return
            rec.deliveries.append((step, node))
            if rec.origin[0] == "INITIAL":
                self.invalid_deliveries += 1
                if self.invalid_deliveries > 4 * self.n0 - 3:
                    self._fail("invalid-bound",
                               f"{self.invalid_deliveries} invalid deliveries "
                               f"exceed 4n-3 = {4 * self.n0 - 3}", step)
                    return
        # explicit deletions (EXT clearing, flip-or-delete)
        for g, node, rule in report.deletions:
            rec = self.ledger.get(g)
            if rec is None:
                self._fail("unknown-ghost", f"deletion of untracked ghost {g}", step)
                return
            rec.deletions.append((step, node, rule))
            if rec.origin[0] == "GENERATED" and not rec.deliveries:
                if not (self.ext_mode and rec.dest_left):
                    self._fail("deletion",
                               f"{rule} deleted generated ghost {g} undelivered", step)
                    return
        # silent disappearance of a generated, undelivered ghost
        vanished = ghosts_in(prev) - ghosts_in(nxt)
        for g in vanished:
            rec = self.ledger.get(g)
            if (rec is not None and rec.origin[0] == "GENERATED"
                    and not rec.deliveries and not rec.deletions
                    and not (self.ext_mode and rec.dest_left)):
                self._fail("deletion", f"generated ghost {g} vanished undelivered", step)
                return
        # route changes
        for g in report.route_changes:
            rec = self.ledger.get(g)
            if rec is None:
                continue
            rec.route_changes += 1
            # A generated message reverses at most once.  A message already
            # in the system at step 0 can need two reversals: junk in the
            # extra buffer addressed to node 0 is re-injected rightward,
            # bounces at the far extremity and travels back.
            limit = 1 if rec.origin[0] == "GENERATED" else 2
            if rec.route_changes > limit:
                self._fail("route-change",
                           f"ghost {g} reversed {rec.route_changes} times "
                           f"(limit {limit})", step)
                return
        # wave pairing and the valid-wave postcondition
        for kind, flag in report.waves:
            if kind == "B":
                if self.wave_open:
                    self._fail("wave-interleave", "second broadcast before feedback closed", step)
                    return
                self.wave_open = True
                self.wave_valid = bool(flag)
                self.wave_since = step
            else:  # "C"
                if self.wave_open and self.wave_valid and not flag:
                    self._fail("wave-postcondition",
                               "initiator cleaned a valid wave with unfree output buffer", step)
                    return
                self.wave_open = False
                self.wave_valid = False
                self.wave_since = None
        # liveness thresholds, checked incrementally so FAIL replays cheaply
        t = nxt.t
        self._check_pending(prev, nxt, t)
        self._check_delivery_age(t)
        self._check_ext(nxt, t)
        self._check_wave_age(nxt, t)
        if self.check_suitability and self.onset is not None and t >= self.onset:
            self._check_suitability(nxt, t)

    def _check_pending(self, prev, nxt, t):
        for p in range(min(nxt.n, len(self.pending_since))):
            if nxt.request[p] is None:
                self.pending_since[p] = None
                continue
            if self.pending_since[p] is None:
                self.pending_since[p] = prev.t
            if self.onset is None:
                continue
            start = max(self.pending_since[p], self.onset)
            if t - start > self.bounds.l_gen:
                self._fail("generation-starvation",
                           f"request at node {p} pending {t - start} steps", t)
                return

    def _check_delivery_age(self, t):
        for g, rec in self.ledger.items():
            if (rec.origin[0] == "GENERATED" and not rec.deliveries
                    and not rec.deletions and not rec.dest_left):
                if t - rec.origin[1] > self.bounds.l_del:
                    self._fail("delivery-latency",
                               f"ghost {g} undelivered {t - rec.origin[1]} steps "
                               f"after generation", t)
                    return

    def _check_ext(self, nxt, t):
        occupied = nxt.slots[topology(nxt.n).ext_idx] is not None
        if not occupied:
            self.ext_since = None
            return
        if self.ext_since is None:
            self.ext_since = t
        elif t - self.ext_since > self.bounds.l_ext:
            self._fail("ext-stuck",
                       f"extra buffer occupied {t - self.ext_since} steps", t)

    def _check_wave_age(self, nxt, t):
        if self.wave_open and t - self.wave_since > self.bounds.l_ext:
            self._fail("wave-stuck",
                       f"broadcast wave open {t - self.wave_since} steps", t)
            return
        for p in range(nxt.n):
            if nxt.pif_phase[p] == PHASE_B:
                if self.phase_b_since[p] is None:
                    self.phase_b_since[p] = t
                elif t - self.phase_b_since[p] > self.bounds.b_prog:
                    self._fail("wave-progress",
                               f"node {p} stuck in broadcast {t - self.phase_b_since[p]} steps", t)
                    return
            else:
                self.phase_b_since[p] = None

    def _check_suitability(self, nxt, t):
        topo = topology(nxt.n)
        for i, m in enumerate(nxt.slots):
            if m is None:
                continue
            if topo.slot_meta[i][1] == EXT:
                self._fail("suitability", "extra buffer occupied after onset", t)
                return
            if not topo.suitable(i, m[MSG_DEST]):
                self._fail("suitability",
                           f"slot {topo.slot_name(i)} holds message for "
                           f"{m[MSG_DEST]} after onset", t)
                return

    # -- end of run --------------------------------------------------------

    def finalize(self, cfg_final: Configuration) -> Verdict:
        if self.failed:
            return self.verdicts[-1]
        t = cfg_final.t
        inconclusive = None
        for p in range(min(cfg_final.n, len(self.pending_since))):
            if cfg_final.request[p] is not None and self.pending_since[p] is not None:
                inconclusive = Verdict(INCONCLUSIVE, "generation-pending",
                                       f"request at node {p} still pending", t)
        for g, rec in self.ledger.items():
            if (rec.origin[0] == "GENERATED" and not rec.deliveries
                    and not rec.deletions and not rec.dest_left):
                inconclusive = Verdict(INCONCLUSIVE, "delivery-pending",
                                       f"ghost {g} still in flight", t)
        if self.ext_since is not None or self.wave_open:
            inconclusive = Verdict(INCONCLUSIVE, "machinery-pending",
                                   "extra buffer or wave still busy", t)
        if inconclusive is not None:
            self.verdicts.append(inconclusive)
            return inconclusive
        v = Verdict(PASS)
        self.verdicts.append(v)
        return v
