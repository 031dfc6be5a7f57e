"""Simulation and analysis of sequential 3->1 qubit random access codes."""

__version__ = "0.1.0"
