"""Measuring-cell physics: flux-qubit spectrum, thermal photons, brightness temperature."""

from cryoamp.physics.qubit import (
    DOUBLE_WELL_QUBIT,
    Grid,
    QubitParams,
    SpectrumResult,
    build_hamiltonian,
    eigensolve,
    flux_jump,
    spectrum,
    transition_scan,
)
from cryoamp.physics.radiation import (
    PhotonBudget,
    brightness_temperature,
    photon_rate,
    radiance_reduction,
    spectral_radiance,
)

__all__ = [
    "DOUBLE_WELL_QUBIT",
    "Grid",
    "QubitParams",
    "SpectrumResult",
    "build_hamiltonian",
    "eigensolve",
    "flux_jump",
    "spectrum",
    "transition_scan",
    "PhotonBudget",
    "brightness_temperature",
    "photon_rate",
    "radiance_reduction",
    "spectral_radiance",
]
