"""Unit conventions and conversions.

All internal computation uses SI: angular frequency in rad/s, lengths in
meters, time in seconds. Configs and CLI flags accept nanometers and
femtoseconds; conversion happens at the boundary.
"""

import math

import numpy as np

#: Speed of light in vacuum (m/s, exact).
C_VACUUM = 299_792_458.0

#: Converts an intensity FWHM to the standard deviation of the intensity
#: distribution, 1 / (2 sqrt(2 ln 2)).
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))

NM = 1e-9
FS = 1e-15


def omega_from_wavelength(wavelength):
    """Angular frequency (rad/s) for a vacuum wavelength (m)."""
    return 2.0 * math.pi * C_VACUUM / np.asarray(wavelength)


def wavelength_from_omega(omega):
    """Vacuum wavelength (m) for an angular frequency (rad/s)."""
    return 2.0 * math.pi * C_VACUUM / np.asarray(omega)


def sigma_omega_from_fwhm(center_wavelength: float, fwhm_wavelength: float) -> float:
    """Intensity standard deviation in angular frequency for a Gaussian line.

    ``fwhm_wavelength`` is the intensity full width at half maximum measured
    at ``center_wavelength``; the first-order wavelength-to-frequency mapping
    d(omega) = 2 pi c d(lambda) / lambda^2 is applied before converting FWHM
    to sigma.
    """
    d_omega_fwhm = 2.0 * math.pi * C_VACUUM * fwhm_wavelength / center_wavelength**2
    return d_omega_fwhm * FWHM_TO_SIGMA
