"""Physical constants for the silicon nuclear-spin device models.

All values are SI.  The gyromagnetic ratio is stored as a magnitude: every
formula in this package uses gamma squared or a frequency magnitude, so the
sign of the 29Si moment never enters.
"""

from dataclasses import dataclass
import math


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants entering the spin, mechanics, and noise formulas.

    Attributes:
        gamma: 29Si gyromagnetic ratio magnitude, rad s^-1 T^-1.
        mu0: vacuum permeability, T m A^-1.
        hbar: reduced Planck constant, J s.
        kB: Boltzmann constant, J K^-1.
    """

    gamma: float = 2 * math.pi * 8.465e6
    mu0: float = 4e-7 * math.pi
    hbar: float = 1.054571817e-34
    kB: float = 1.380649e-23

    def __post_init__(self):
        for name in ("gamma", "mu0", "hbar", "kB"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


CONSTANTS = PhysicalConstants()
