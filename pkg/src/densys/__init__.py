"""densys: density-function dynamics, barrier-aware simulation, and
density-shaped control loops (known-parameter and adaptive)."""

__version__ = "0.1.0"
