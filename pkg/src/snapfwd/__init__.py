"""Executable model of a snap-stabilizing chain message-forwarding protocol
(four buffers per link) composed with a snap-stabilizing wave, plus a
fault-injecting simulator, property monitor, bounded explorer and CLI."""

__version__ = "0.1.0"

from snapfwd.model import Configuration, Topology, new_chain, topology  # noqa: F401
