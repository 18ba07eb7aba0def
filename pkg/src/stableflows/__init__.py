"""Simulation and Monte Carlo verification of heavy-tailed stationary
processes driven by conservative flows, and of their self-similar stable
limits."""

__version__ = "0.1.0"
