"""Arbitrary-configuration generator tests."""

import pytest

from snapfwd import _kernel as kernel
from snapfwd.faults import (
    CLEAN,
    PROFILES,
    WORST_CASE_FULL_BUFFERS,
    arbitrary_config,
)
from snapfwd.model import MSG_DEST, config_hash, guard_eq, new_chain, topology


def test_deterministic_per_seed():
    for profile in PROFILES:
        a = arbitrary_config(4, 3, profile)
        b = arbitrary_config(4, 3, profile)
        c = arbitrary_config(4, 4, profile)
        assert config_hash(a) == config_hash(b)
        # CLEAN and the worst case are constructions, not samples
        if profile not in (CLEAN, WORST_CASE_FULL_BUFFERS):
            assert config_hash(a) != config_hash(c)


def test_clean_profile_is_clean():
    assert config_hash(arbitrary_config(3, 5, CLEAN)) == config_hash(new_chain(3))


@pytest.mark.parametrize("n", [3, 5, 8])
def test_worst_case_every_slot_full_and_guard_distinct(n):
    cfg = arbitrary_config(n, 0, WORST_CASE_FULL_BUFFERS)
    topo = topology(n)
    assert all(m is not None for m in cfg.slots)
    for i in range(topo.n_slots):
        for j in range(i + 1, topo.n_slots):
            assert not guard_eq(cfg.slots[i], cfg.slots[j])
    # no input buffer can consume in place
    for (p, q), idx in topo.in_idx.items():
        assert cfg.slots[idx][MSG_DEST] != p


def test_worst_case_no_consumption_enabled_at_start():
    cfg = arbitrary_config(4, 0, WORST_CASE_FULL_BUFFERS)
    topo = topology(4)
    enabled = kernel.compute_enabled(cfg, topo)
    for p, (act, rules) in enabled.items():
        for code, q in rules:
            assert code != kernel.R2


def test_unknown_profile_rejected():
    with pytest.raises(ValueError):
        arbitrary_config(3, 0, "NOPE")
