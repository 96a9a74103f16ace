"""latticeclock: ground-state hyperfine transitions of optically trapped
alkali atoms under simultaneous magnetic fields and trapping light.

Locates magic magnetic fields, zero-differential-light-shift operating
points and near-magic trapping wavelengths, and simulates the resulting
Ramsey coherence.
"""

__version__ = "0.1.0"

from .atoms import AtomSpec, SpectralLine, fine_structure_splitting, load_atom, recoil_energy
from .dressed import DressedSystem, dnu_dI, dress, dressed_transition, sensitivity_ratio
from .lattice import (
    BeamSet,
    LatticeParams,
    depth_to_intensity,
    double_well_beamset,
    field_at,
    folded_retro_beamset,
    unit_cell_map,
    zero_point_slope_correction,
)
from .polarizability import LightConfig, ShiftCoefficients, eq1_sensitivity, shift_coefficients
from .ramsey import (
    PulseSpec,
    RamseyEnsemble,
    TwoPhotonDrive,
    effective_rabi,
    ensemble_contrast,
    extract_frequency,
    ramsey_probability,
)
from .solver import ScanResult, SensitivityReport, find_magic_field, find_zero_dls_field, scan_field, scan_wavelength
from .spinham import (
    CLOCK,
    TWO_PHOTON,
    StateLabel,
    TransitionSpec,
    ZeemanEigensystem,
    breit_rabi_energy,
    build_hf_zeeman,
    diagonalize,
    dnu_dB,
    solve_bare,
    transition_frequency,
)

__all__ = [
    "AtomSpec", "SpectralLine", "load_atom", "recoil_energy", "fine_structure_splitting",
    "StateLabel", "TransitionSpec", "ZeemanEigensystem", "CLOCK", "TWO_PHOTON",
    "build_hf_zeeman", "diagonalize", "solve_bare", "breit_rabi_energy",
    "transition_frequency", "dnu_dB",
    "LightConfig", "ShiftCoefficients", "shift_coefficients", "eq1_sensitivity",
    "DressedSystem", "dress", "dressed_transition", "dnu_dI", "sensitivity_ratio",
    "ScanResult", "SensitivityReport", "find_magic_field", "find_zero_dls_field",
    "scan_wavelength", "scan_field",
    "BeamSet", "LatticeParams", "folded_retro_beamset", "double_well_beamset",
    "field_at", "unit_cell_map", "depth_to_intensity", "zero_point_slope_correction",
    "PulseSpec", "TwoPhotonDrive", "RamseyEnsemble", "effective_rabi",
    "ramsey_probability", "ensemble_contrast", "extract_frequency",
]
