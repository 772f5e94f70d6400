"""Proof-complexity workbench: counting principles, decision-tree evaluations and Nullstellensatz proofs."""

__version__ = "0.1.0"
