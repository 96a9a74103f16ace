"""Physical constants (CODATA, via scipy) used throughout the package.

All energies in this package are expressed as frequencies, E/h in Hz.
"""

import scipy
from scipy.constants import c, h, hbar, physical_constants

mu_B = physical_constants["Bohr magneton"][0]          # J/T
mu_N = physical_constants["nuclear magneton"][0]       # J/T

# Recorded in output metadata so results can be traced to a constant set.
CONSTANTS_VERSION = f"scipy-{scipy.__version__}-codata"

__all__ = ["c", "h", "hbar", "mu_B", "mu_N", "CONSTANTS_VERSION"]
