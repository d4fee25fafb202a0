"""Chain growth/shrink (extension mode) tests."""

import pytest

from snapfwd import daemon, dynamics
from snapfwd.faults import arbitrary_config
from snapfwd.model import make_message, new_chain, topology
from snapfwd.monitor import Monitor, PASS


def test_join_grows_chain_and_preserves_content():
    cfg = arbitrary_config(3, 2, "BUFFERS_ONLY", ext_mode=True)
    cfg.t = 100
    grown = dynamics.join(cfg)
    assert grown.n == 4
    src, dst = topology(3), topology(4)
    for meta, i in ((m, j) for j, m in enumerate(src.slot_meta)):
        assert grown.slots[dst.slot_meta.index(meta)] == cfg.slots[i]
    # the new extremity starts quiescent and empty
    for j, (p, kind, q) in enumerate(dst.slot_meta):
        if p == 3 or q == 3:
            assert grown.slots[j] is None
    assert grown.pif_phase[3] == 0 and grown.request[3] is None
    assert grown.t_stab == 100 + dynamics.RESETTLE_FACTOR * 4


def test_join_left_rejected():
    with pytest.raises(ValueError):
        dynamics.join(new_chain(3, ext_mode=True), side="LEFT")


def test_leave_detaches_only_when_drained():
    cfg = new_chain(4, ext_mode=True)
    topo = topology(4)
    # undrained: a foreign message sits in a vanishing slot
    cfg.slots[topo.in_idx[(3, 2)]] = make_message(1, 0, 0, 5)
    assert not dynamics.can_detach(cfg)
    marked = dynamics.leave(cfg)
    assert marked.n == 4 and marked.departing == 3

    # drained variants: empty, addressed to the leaver, or surviving copy
    cfg.slots[topo.in_idx[(3, 2)]] = make_message(1, 3, 0, 5)
    assert dynamics.can_detach(cfg)
    cfg.slots[topo.in_idx[(3, 2)]] = make_message(1, 0, 0, 5)
    cfg.slots[topo.in_idx[(1, 2)]] = make_message(1, 0, 0, 5)
    assert dynamics.can_detach(cfg)
    shrunk = dynamics.leave(cfg)
    assert shrunk.n == 3 and shrunk.departing is None
    # routing rows no longer reference the vanished node
    assert all(hop != 3 for row in shrunk.routing for hop in row)


def test_leave_below_two_rejected():
    with pytest.raises(ValueError):
        dynamics.leave(new_chain(2, ext_mode=True))


def test_scenario_min_gap_validation():
    sc = dynamics.Scenario(events=[{"step": 100, "op": "join"},
                                   {"step": 150, "op": "leave"}])
    with pytest.raises(ValueError):
        sc.validate(4)
    ok = dynamics.Scenario(events=[{"step": 100, "op": "join"},
                                   {"step": 100 + 64 * 4, "op": "leave"}])
    ok.validate(4)


def test_scenario_requires_extension_mode():
    sc = dynamics.Scenario(events=[{"step": 0, "op": "join"}])
    with pytest.raises(ValueError):
        sc.apply(new_chain(3))


def test_scenario_run_join_then_leave_passes():
    for seed in range(3):
        cfg = arbitrary_config(4, seed, "FULL", t_stab=40, ext_mode=True)
        sc = dynamics.Scenario(events=[{"step": 800, "op": "join"},
                                       {"step": 1800, "op": "leave"}])
        sc.validate(4)
        mon = Monitor(cfg)
        wl = daemon.Workload(0.05, seed, active_until=3200, active_from=40)
        rep = daemon.run(cfg, daemon.Schedule(daemon.RANDOM_FAIR, seed), 4500,
                         workload=wl, monitor=mon, scenario=sc)
        assert rep.verdict.status == PASS, rep.verdict
        assert rep.final.n == 4


def test_event_round_trip_and_validation():
    ev = dynamics.Event.from_dict({"step": 5, "op": "join"})
    assert ev.to_dict() == {"step": 5, "op": "join", "side": "RIGHT"}
    with pytest.raises(ValueError):
        dynamics.Event.from_dict({"step": 5, "op": "explode"})
