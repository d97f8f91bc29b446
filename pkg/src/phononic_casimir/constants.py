"""CODATA constants used throughout (SI units)."""
from scipy.constants import Boltzmann, c, hbar

HBAR = hbar  # J s
KB = Boltzmann  # J / K
C_LIGHT = c  # m / s

__all__ = ["HBAR", "KB", "C_LIGHT"]
