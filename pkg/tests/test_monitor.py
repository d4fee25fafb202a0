"""Monitor unit tests with synthetic step reports."""

import pytest

from snapfwd.daemon import StepReport
from snapfwd.model import new_chain
from snapfwd.monitor import (
    Bounds,
    FAIL,
    INCONCLUSIVE,
    Monitor,
    PASS,
    default_bounds,
    GhostRecord,
)


def _report(step, **kw):
    base = dict(selected=[0], actions=[], deliveries=[], deletions=[],
                generated=[], route_changes=[], waves=[])
    base.update(kw)
    return StepReport(step=step, **base)


def _pair(n=3, t=0):
    prev = new_chain(n)
    prev.t = t
    nxt = prev.copy()
    nxt.t = t + 1
    return prev, nxt


def test_duplicate_delivery_fails():
    prev, nxt = _pair()
    mon = Monitor(prev)
    mon.ledger[7] = GhostRecord(("GENERATED", 0, 0), 2)
    mon.on_step(prev, _report(0, deliveries=[(7, 2)]), nxt)
    assert not mon.failed
    mon.on_step(prev, _report(1, deliveries=[(7, 2)]), nxt)
    assert mon.failed
    assert mon.verdicts[-1].prop == "duplication"


def test_deletion_of_generated_fails():
    prev, nxt = _pair()
    mon = Monitor(prev)
    mon.ledger[7] = GhostRecord(("GENERATED", 0, 0), 2)
    mon.on_step(prev, _report(0, deletions=[(7, 0, "R12")]), nxt)
    assert mon.failed
    assert mon.verdicts[-1].prop == "deletion"


def test_deletion_of_initial_is_allowed():
    prev, nxt = _pair()
    mon = Monitor(prev)
    mon.ledger[-4] = GhostRecord(("INITIAL",), None)
    mon.on_step(prev, _report(0, deletions=[(-4, 0, "R12")]), nxt)
    assert not mon.failed


def test_invalid_delivery_bound():
    prev, nxt = _pair(n=3)
    mon = Monitor(prev)
    limit = 4 * 3 - 3
    for g in range(1, limit + 2):
        mon.ledger[-g] = GhostRecord(("INITIAL",), None)
    for g in range(1, limit + 1):
        mon.on_step(prev, _report(g, deliveries=[(-g, 1)]), nxt)
    assert not mon.failed
    mon.on_step(prev, _report(limit + 1, deliveries=[(-(limit + 1), 1)]), nxt)
    assert mon.failed
    assert mon.verdicts[-1].prop == "invalid-bound"


def test_route_change_limits():
    prev, nxt = _pair()
    mon = Monitor(prev)
    mon.ledger[5] = GhostRecord(("GENERATED", 0, 1), 2)
    mon.ledger[-1] = GhostRecord(("INITIAL",), None)
    mon.on_step(prev, _report(0, route_changes=[5, -1]), nxt)
    assert not mon.failed
    mon.on_step(prev, _report(1, route_changes=[-1]), nxt)
    assert not mon.failed  # a pre-existing message may reverse twice
    mon.on_step(prev, _report(2, route_changes=[5]), nxt)
    assert mon.failed
    assert mon.verdicts[-1].prop == "route-change"


def test_route_change_third_reversal_of_initial_fails():
    prev, nxt = _pair()
    mon = Monitor(prev)
    mon.ledger[-1] = GhostRecord(("INITIAL",), None)
    for step in range(2):
        mon.on_step(prev, _report(step, route_changes=[-1]), nxt)
    assert not mon.failed
    mon.on_step(prev, _report(2, route_changes=[-1]), nxt)
    assert mon.failed


def test_wave_interleaving_and_postcondition():
    prev, nxt = _pair()
    mon = Monitor(prev)
    mon.on_step(prev, _report(0, waves=[("B", True)]), nxt)
    mon.on_step(prev, _report(1, waves=[("C", False)]), nxt)
    assert mon.failed
    assert mon.verdicts[-1].prop == "wave-postcondition"

    mon = Monitor(prev)
    mon.on_step(prev, _report(0, waves=[("B", True)]), nxt)
    mon.on_step(prev, _report(1, waves=[("B", True)]), nxt)
    assert mon.verdicts[-1].prop == "wave-interleave"

    mon = Monitor(prev)
    mon.on_step(prev, _report(0, waves=[("B", True)]), nxt)
    mon.on_step(prev, _report(1, waves=[("C", True)]), nxt)
    assert not mon.failed


def test_generation_during_open_wave_voids_postcondition():
    prev, nxt = _pair()
    mon = Monitor(prev)
    mon.on_step(prev, _report(0, waves=[("B", True)]), nxt)
    mon.on_step(prev, _report(1, generated=[(9, 2, 0, 4, True)]), nxt)
    mon.on_step(prev, _report(2, waves=[("C", False)]), nxt)
    assert not mon.failed


def test_delivery_latency_bound():
    prev, nxt = _pair()
    mon = Monitor(prev, Bounds(3))
    mon.on_step(prev, _report(0, generated=[(9, 0, 2, 1, True)]), nxt)
    late = prev.copy()
    late.t = 64 * 3 + 2
    nxt2 = late.copy()
    nxt2.t = late.t + 1
    mon.on_step(late, _report(late.t), nxt2)
    assert mon.failed
    assert mon.verdicts[-1].prop == "delivery-latency"


def test_generation_starvation_bound():
    prev, nxt = _pair()
    prev.request[1] = 2
    nxt.request[1] = 2
    mon = Monitor(prev, Bounds(3))
    mon.on_step(prev, _report(0), nxt)
    # the clock only counts from the suitable-state onset (t_stab + 64n)
    late = nxt.copy()
    late.t = 64 * 3 + 32 * 3 + 3
    nxt2 = late.copy()
    nxt2.t = late.t + 1
    mon.on_step(late, _report(late.t), nxt2)
    assert mon.failed
    assert mon.verdicts[-1].prop == "generation-starvation"


def test_finalize_pass_and_inconclusive():
    prev, nxt = _pair()
    mon = Monitor(prev)
    assert mon.finalize(nxt).status == PASS

    mon = Monitor(prev)
    mon.ledger[3] = GhostRecord(("GENERATED", 0, 0), 2)
    v = mon.finalize(nxt)
    assert v.status == INCONCLUSIVE
    assert v.prop == "delivery-pending"


def test_default_bounds_scale_with_strategy():
    cfg = new_chain(5)
    assert default_bounds(cfg, "SYNC").l_del == 64 * 5
    assert default_bounds(cfg, "ADVERSARY").l_del == 64 * 5 * 5


def test_verdict_serializes():
    prev, nxt = _pair()
    mon = Monitor(prev)
    v = mon.finalize(nxt)
    assert v.to_dict()["status"] == PASS
