"""Bounded exhaustive explorer tests."""

import pytest

from snapfwd.explorer import (
    DEFAULT_PROPS,
    explore,
    prop_no_duplicate_delivery,
)
from snapfwd.faults import arbitrary_config
from snapfwd.model import new_chain


def test_clean_chain_exhausts_with_zero_violations():
    rep = explore([new_chain(2)], full_subsets=True)
    assert rep.exhausted
    assert rep.violations == []
    assert rep.states >= 1


def test_request_variants_exhaust_n2_full_subsets():
    initial = []
    for p, d in ((0, 1), (1, 0)):
        cfg = new_chain(2)
        cfg.request[p] = d
        initial.append(cfg)
    rep = explore(initial, full_subsets=True)
    assert rep.exhausted
    assert rep.violations == []
    assert rep.mode == "full-subsets"
    assert rep.transitions >= rep.states - len(initial)


def test_reduced_mode_visits_subset_of_full_mode():
    cfg = new_chain(2)
    cfg.request[0] = 1
    full = explore([cfg], full_subsets=True)
    red = explore([cfg])
    assert red.states <= full.states
    assert red.violations == [] and full.violations == []


def test_worst_case_n3_reduced_exhausts():
    cfg = arbitrary_config(3, 0, "WORST_CASE_FULL_BUFFERS", payload_domain=2)
    rep = explore([cfg])
    assert rep.exhausted
    assert rep.violations == []


def test_budget_truncation_reported():
    cfg = arbitrary_config(3, 0, "WORST_CASE_FULL_BUFFERS")
    rep = explore([cfg], budget=10)
    assert not rep.exhausted
    assert rep.states <= 10 + 1


def test_depth_cutoff_reported():
    cfg = arbitrary_config(3, 1, "WORST_CASE_FULL_BUFFERS")
    rep = explore([cfg], depth=2)
    assert rep.depth == 2
    assert not rep.exhausted or rep.states < 10


def test_rejects_stabilizer_clock():
    cfg = new_chain(2, t_stab=50)
    with pytest.raises(ValueError):
        explore([cfg])


def test_property_violation_is_reported():
    """A deliberately inverted property fires on a real transition, proving
    violations are surfaced rather than swallowed."""
    def bad_prop(prev, selection, ev, nxt, wave_valid):
        if ev["deliveries"]:
            return "delivery observed"
        return None

    cfg = new_chain(2)
    cfg.request[0] = 1
    rep = explore([cfg], props=(bad_prop,), full_subsets=True)
    assert rep.violations
    assert rep.violations[0]["prop"] == "bad_prop"


def test_report_round_trips_to_json():
    rep = explore([new_chain(2)])
    assert '"states"' in rep.to_json()
