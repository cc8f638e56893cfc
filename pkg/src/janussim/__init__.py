"""Deterministic microchamber simulator and hybrid magnetic/electric
control stack for Janus-particle microrobots."""

__version__ = "0.1.0"
