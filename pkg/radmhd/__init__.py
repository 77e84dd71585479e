"""Free-boundary radiative magnetohydrodynamics in Lagrangian mass coordinates."""

__version__ = "1.0.0"
