"""Desk-scale laboratory for composition operators on sequence-space balls."""

__version__ = "0.1.0"
