"""Wave protocol API: predicates, enabled-action query, action application.

Thin front over the selected kernel; the wave state machine itself lives in
snapfwd._kernel."""

from __future__ import annotations

from snapfwd.engine import kernel
from snapfwd.model import Configuration, topology

PIF_NAMES = kernel.PIF_NAMES
B_INITIATOR = kernel.B_INITIATOR
C_INITIATOR = kernel.C_INITIATOR
F_LEAF = kernel.F_LEAF
C_LEAF = kernel.C_LEAF
B_INTERNAL = kernel.B_INTERNAL
F_INTERNAL = kernel.F_INTERNAL
C_INTERNAL = kernel.C_INTERNAL
CORR_BC = kernel.CORR_BC
CORR_LEAF = kernel.CORR_LEAF
CORR_PTR = kernel.CORR_PTR


def pred_leaf(cfg: Configuration, p: int, q: int) -> bool:
    return kernel.pred_leaf(cfg, topology(cfg.n), p, q)


def enabled_pif(cfg: Configuration, p: int):
    """The enabled wave action at p as (action, bound neighbor), or None.
    Guards are mutually exclusive, so at most one action is enabled."""
    return kernel.pif_action(cfg, topology(cfg.n), p)


def apply_pif(cfg: Configuration, p: int, action) -> Configuration:
    """Apply one wave action, reading cfg and writing a fresh copy."""
    if kernel.pif_action(cfg, topology(cfg.n), p) != action:
        raise ValueError(f"action {action} is not enabled at {p}")
    new = cfg.copy()
    kernel._apply_pif(cfg, p, action[0], action[1], new)
    return new
