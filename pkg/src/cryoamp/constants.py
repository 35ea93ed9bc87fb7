"""Physical constants (CODATA 2018, via scipy.constants) used across the package."""

from scipy import constants as _c

H = _c.h
HBAR = _c.hbar
K_B = _c.k
C_LIGHT = _c.c
E_CHARGE = _c.e
# h / 2e, about 2.0678e-15 Wb
PHI0 = _c.h / (2 * _c.e)
