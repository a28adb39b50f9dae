"""Routing and fidelity simulation for networks that ship surface codes."""

__version__ = "0.1.0"
