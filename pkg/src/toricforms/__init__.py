"""Exact per-weight invariants of toric varieties."""

__version__ = "0.1.0"
