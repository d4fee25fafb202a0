"""Forwarding-layer tests on clean configurations."""

import pytest

from snapfwd import daemon
from snapfwd import _kernel as kernel
from snapfwd.model import make_message, new_chain, topology
from snapfwd.monitor import Monitor, PASS


def _collect(cfg, strategy, seed, horizon, monitor=None):
    reports = []
    rep = daemon.run(cfg, daemon.Schedule(strategy, seed), horizon,
                     monitor=monitor, trace_writer=lambda r: reports.append(r))
    return rep, reports


@pytest.mark.parametrize("src,dst", [(0, 3), (3, 0), (1, 2), (2, 0)])
def test_single_request_delivered_exactly_once(src, dst):
    cfg = new_chain(4)
    cfg.request[src] = dst
    mon = Monitor(cfg)
    rep, reports = _collect(cfg, daemon.SYNC, 0, 500, mon)
    deliveries = [tuple(d) for r in reports for d in r["deliveries"]]
    assert len(deliveries) == 1
    ghost, node = deliveries[0]
    assert node == dst and ghost > 0
    assert rep.verdict.status == PASS
    assert rep.final.request[src] is None


def test_delivery_to_each_destination_random_daemon():
    for seed in range(5):
        cfg = new_chain(5)
        cfg.request[2] = 4
        cfg.request[4] = 0
        mon = Monitor(cfg)
        rep, reports = _collect(cfg, daemon.RANDOM_FAIR, seed, 2000, mon)
        delivered_at = sorted(d[1] for r in reports for d in r["deliveries"])
        assert delivered_at == [0, 4]
        assert rep.verdict.status == PASS


def test_generation_respects_occupied_output():
    """A request does not overwrite a live (uncopied) message in the output
    buffer it would use."""
    cfg = new_chain(3)
    topo = topology(3)
    cfg.request[1] = 2
    cfg.slots[topo.out_idx[(1, 2)]] = make_message(0, 2, 0, -1)
    enabled = kernel.compute_enabled(cfg, topo)
    assert all(code != kernel.R1 for code, _ in enabled.get(1, (None, []))[1])


def test_consumption_beats_plain_receive_on_same_slot():
    """When consumption and a receiving rule target the same input buffer,
    consumption fires and the other rule is conflict-dropped."""
    cfg = new_chain(2)
    topo = topology(2)
    # message for node 1 already transmitted into IN_1(0), sender copy gone
    cfg.slots[topo.in_idx[(1, 0)]] = make_message(3, 1, 0, 5)
    cfg.slots[topo.out_idx[(0, 1)]] = make_message(2, 0, 1, 6)
    enabled = kernel.compute_enabled(cfg, topo)
    codes = [code for code, _ in enabled[1][1]]
    assert kernel.R2 in codes
    new, ev = kernel.apply_step(cfg, topo, [1], enabled)
    assert [g for g, _ in ev["deliveries"]] == [5]
    # the receive did not clobber the consumed slot in the same step
    fired = [a[2] for a in ev["fired"] if a[0] == 1]
    assert "R2" in fired and "R4" not in fired


def test_wrong_direction_message_reversed_once():
    """A message planted against its direction reaches the near extremity,
    is reversed there, and is then delivered."""
    cfg = new_chain(4)
    topo = topology(4)
    # leftward-traveling message whose destination lies to the right
    cfg.slots[topo.in_idx[(0, 1)]] = make_message(1, 3, 0, -1)
    reports = []
    rep = daemon.run(cfg, daemon.Schedule(daemon.SYNC, 0), 500,
                     trace_writer=lambda r: reports.append(r))
    reversals = [g for r in reports for g in r["route_changes"]]
    deliveries = [tuple(d) for r in reports for d in r["deliveries"]]
    assert reversals.count(-1) == 1
    assert (-1, 3) in deliveries
