"""Capacity planning and duty-cycle simulation for LPWA seismic telemetry networks."""

__version__ = "0.1.0"
