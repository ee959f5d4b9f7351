"""Exact invariant-level toolkit for holomorphic p-contact geometry on Lie algebras."""

__version__ = "0.1.0"
