"""Topology, buffer graph, message and serialization unit tests."""

import pytest

from snapfwd.model import (
    EXT,
    IN,
    OUT,
    Configuration,
    config_from_json,
    config_hash,
    config_to_json,
    correct_routing,
    guard_eq,
    is_free,
    make_message,
    new_chain,
    topology,
)
from snapfwd.faults import arbitrary_config, PROFILES


def test_slot_count():
    for n in range(2, 9):
        topo = topology(n)
        assert topo.n_slots == 4 * n - 3
        kinds = [meta[1] for meta in topo.slot_meta]
        assert kinds.count(EXT) == 1
        assert kinds.count(IN) == kinds.count(OUT) == 2 * n - 2


def test_buffer_graph_two_disjoint_chains():
    for n in (2, 3, 5):
        topo = topology(n)
        # every non-EXT slot is on exactly one directed chain; following
        # bg_next from the chain heads visits all IN/OUT slots exactly once
        heads = [i for i in range(topo.n_slots - 1)
                 if topo.bg_prev[i] == -1]
        assert len(heads) == 2
        visited = set()
        for h in heads:
            i = h
            direction = topo.rightward(h)
            while i != -1:
                assert i not in visited
                assert topo.rightward(i) == direction
                visited.add(i)
                i = topo.bg_next[i]
        assert visited == set(range(topo.n_slots - 1))


def test_ext_outside_buffer_graph():
    topo = topology(3)
    with pytest.raises(ValueError):
        topo.buffer_graph_next(topo.ext_idx)
    with pytest.raises(ValueError):
        topo.rightward(topo.ext_idx)


def test_suitability_direction():
    topo = topology(4)
    # OUT_1(2) carries rightward traffic: suitable for dests 2,3 only
    i = topo.out_idx[(1, 2)]
    assert topo.suitable(i, 2) and topo.suitable(i, 3)
    assert not topo.suitable(i, 0) and not topo.suitable(i, 1)
    # IN_2(1) rightward: node 2 itself is still ahead
    j = topo.in_idx[(2, 1)]
    assert topo.suitable(j, 2) and topo.suitable(j, 3)
    assert not topo.suitable(j, 1)
    assert not topo.suitable(topo.ext_idx, 0)


def test_guard_eq_ignores_ghost_and_flip():
    a = make_message(1, 2, 3, ghost=7)
    b = make_message(1, 2, 3, ghost=-9, flipped=True)
    c = make_message(1, 2, 0, ghost=7)
    assert guard_eq(a, b)
    assert not guard_eq(a, c)
    assert guard_eq(None, None)
    assert not guard_eq(a, None)


def test_is_free_semantics():
    cfg = new_chain(3)
    topo = topology(3)
    oi = topo.out_idx[(0, 1)]
    ii = topo.in_idx[(1, 0)]
    assert is_free(cfg, oi)
    m = make_message(1, 2, 0, -1)
    cfg.slots[oi] = m
    assert not is_free(cfg, oi)
    cfg.slots[ii] = make_message(1, 2, 0, -2)  # guard-equal copy downstream
    assert is_free(cfg, oi)
    # an IN buffer is only free when empty
    assert not is_free(cfg, ii)


def test_correct_routing_points_toward_dest():
    n = 5
    tables = correct_routing(n)
    for p in range(n):
        for d in range(n):
            if d == p:
                continue
            assert tables[p][d] == (p - 1 if d < p else p + 1)


def test_new_chain_validation():
    with pytest.raises(ValueError):
        new_chain(1)
    with pytest.raises(ValueError):
        new_chain(3, c_max=3)


def test_serialization_round_trip():
    for profile in PROFILES:
        cfg = arbitrary_config(4, 7, profile)
        back = config_from_json(config_to_json(cfg))
        assert back == cfg
        assert config_hash(back) == config_hash(cfg)


def test_copy_is_deep_enough():
    cfg = arbitrary_config(3, 0, "FULL")
    cp = cfg.copy()
    cp.slots[0] = "sentinel"
    cp.routing[0][1] = 99
    cp.request[0] = 2
    assert cfg.slots[0] != "sentinel"
    assert cfg.routing[0][1] != 99
