"""Non-perturbative light-dressed spin Hamiltonian and intensity slopes.

The trapping light adds to the bare hyperfine + Zeeman Hamiltonian a
scalar term that shifts each zero-field F manifold as a whole and a vector
term that acts like a magnetic field coupled to the electron spin only:

    H_light/h = I * sum_F kappa_s(F) P_F
              + I * A * [ sum_F kappa_v(F) P_F (2 J_z) P_F
                          + kappa_v_centroid (P_1 (2 J_z) P_2 + h.c.) ]

P_F projects on the zero-field F manifolds (F mixing at the operating
fields is O(1e-3), so the induced error is second order). The F-diagonal
blocks carry the hyperfine-resolved vector coefficients; the F-changing
block keeps the centroid coefficient (its choice only matters at second
order in intensity). Diagonalizing the full matrix captures the
interplay between the Zeeman mixing and the electron-only vector coupling
that leaves a nuclear-moment-sized vector shift alive at the magic field.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .atoms import AtomSpec, recoil_energy
from .exceptions import DomainError
from .polarizability import LightConfig, ShiftCoefficients, shift_coefficients
from .spinham import (
    CLOCK,
    TWO_PHOTON,
    TransitionSpec,
    ZeemanEigensystem,
    _basis_and_ops,
    build_hf_zeeman,
    diagonalize,
    solve_bare,
    transition_frequency,
    zero_field_basis,
)

DEFAULT_CLOCK_BIAS = 20e-6        # T, bias field for the single-photon clock
DEFAULT_TWO_PHOTON_FIELD = 0.323e-3  # T, operating field of the two-photon pair


@lru_cache(maxsize=8)
def _f_projectors(nuclear_spin: float) -> dict[int, np.ndarray]:
    labels, vecs = zero_field_basis(nuclear_spin)
    out: dict[int, np.ndarray] = {}
    for F in sorted({lab.F for lab in labels}):
        cols = [k for k, lab in enumerate(labels) if lab.F == F]
        V = vecs[:, cols]
        out[F] = V @ V.T
    return out


@lru_cache(maxsize=8)
def _vector_operator_parts(nuclear_spin: float):
    _, ops = _basis_and_ops(nuclear_spin)
    two_jz = 2 * ops["Jz"]
    proj = _f_projectors(nuclear_spin)
    f_lo, f_up = sorted(proj)
    diag = {F: proj[F] @ two_jz @ proj[F] for F in proj}
    cross = proj[f_lo] @ two_jz @ proj[f_up] + proj[f_up] @ two_jz @ proj[f_lo]
    return diag, cross


def build_light_hamiltonian(
    atom: AtomSpec,
    B: float,
    light: LightConfig,
    coeffs: ShiftCoefficients | None = None,
    uniform_vector: bool = False,
) -> np.ndarray:
    """Full (H_HF + H_Z + H_light)/h matrix in the product basis, Hz.

    ``uniform_vector=True`` replaces the hyperfine-resolved vector
    coefficients by the centroid value everywhere; this is the
    lowest-order model in which the vector light shift is exactly an
    effective field on the electron spin (used by the identity checks).
    """
    if coeffs is None:
        coeffs = shift_coefficients(atom, light.wavelength)
    H = build_hf_zeeman(atom, B)
    proj = _f_projectors(atom.nuclear_spin)
    diag, cross = _vector_operator_parts(atom.nuclear_spin)
    I = light.intensity
    for F, P in proj.items():
        H = H + I * coeffs.kappa_s[F] * P
    if light.circularity != 0.0:
        kvc = coeffs.kappa_v_centroid
        if uniform_vector:
            vop = kvc * (sum(diag.values()) + cross)
        else:
            vop = sum(coeffs.kappa_v[F] * diag[F] for F in diag) + kvc * cross
        H = H + I * light.circularity * vop
    return H


@dataclass(frozen=True)
class DressedSystem:
    """Light-dressed eigensystem plus the ingredients that produced it."""

    atom: AtomSpec
    B: float
    light: LightConfig
    eigensystem: ZeemanEigensystem
    coeffs: ShiftCoefficients


def dress(
    atom: AtomSpec,
    B: float,
    light: LightConfig,
    coeffs: ShiftCoefficients | None = None,
    uniform_vector: bool = False,
) -> DressedSystem:
    """Diagonalize the dressed Hamiltonian, labels seeded from the bare
    system at the same field."""
    if coeffs is None:
        coeffs = shift_coefficients(atom, light.wavelength)
    bare = solve_bare(atom, B)
    H = build_light_hamiltonian(atom, B, light, coeffs, uniform_vector)
    sys = diagonalize(H, atom.nuclear_spin, B, reference=bare)
    return DressedSystem(atom=atom, B=B, light=light, eigensystem=sys, coeffs=coeffs)


def dressed_transition(
    atom: AtomSpec,
    B: float,
    light: LightConfig,
    t: TransitionSpec,
    coeffs: ShiftCoefficients | None = None,
    uniform_vector: bool = False,
) -> float:
    """Transition frequency of the dressed system, Hz."""
    d = dress(atom, B, light, coeffs, uniform_vector)
    return transition_frequency(d.eigensystem, t)


def intensity_for_depth(atom: AtomSpec, coeffs: ShiftCoefficients, depth_er: float) -> float:
    """Peak intensity of the lambda/2 lattice of the given depth, W/m^2."""
    if coeffs.kappa_s_avg >= 0:
        raise DomainError("conversion defined for attractive (red-detuned) light only")
    return depth_er * recoil_energy(atom, coeffs.wavelength) / abs(coeffs.kappa_s_avg)


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares slope of transition frequency vs intensity.

    ``per_intensity`` is in Hz/(W/m^2), ``per_recoil`` in Hz per E_R of
    lambda/2-equivalent lattice depth. ``nonlinearity`` is the maximum
    fit residual over the fitted span; ``noisy`` flags a residual above
    the documented tolerance of the linear model.
    """

    per_intensity: float
    per_recoil: float
    nonlinearity: float
    noisy: bool
    intensities: tuple[float, ...]


def dnu_dI(
    atom: AtomSpec,
    B: float,
    light: LightConfig,
    t: TransitionSpec,
    coeffs: ShiftCoefficients | None = None,
    n_points: int = 3,
    nonlinearity_tol: float = 1e-2,
    uniform_vector: bool = False,
) -> SlopeFit:
    """Slope of the dressed transition frequency vs intensity.

    Mirrors the experimental procedure: evaluate on a grid {0, ..., I_max}
    (default three points) and fit a straight line. ``light.intensity``
    sets I_max; the grid must resolve the shift above numerical noise.
    """
    if n_points < 3:
        raise DomainError("need at least 3 intensities for a slope with residual")
    if light.intensity <= 0:
        raise DomainError("slope extraction needs a positive maximum intensity")
    if coeffs is None:
        coeffs = shift_coefficients(atom, light.wavelength)
    bare = solve_bare(atom, B)
    nu0 = transition_frequency(bare, t)

    xs = np.linspace(0.0, light.intensity, n_points)
    ys = np.empty_like(xs)
    ys[0] = 0.0
    for k, Ik in enumerate(xs[1:], start=1):
        lk = LightConfig(light.wavelength, Ik, light.circularity)
        H = build_light_hamiltonian(atom, B, lk, coeffs, uniform_vector)
        sys = diagonalize(H, atom.nuclear_spin, B, reference=bare)
        ys[k] = transition_frequency(sys, t) - nu0

    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    span = max(abs(ys[-1] - ys[0]), 1e-30)
    nonlin = float(np.abs(resid).max() / span)
    i_one_er = recoil_energy(atom, light.wavelength) / abs(coeffs.kappa_s_avg)
    return SlopeFit(
        per_intensity=float(slope),
        per_recoil=float(slope * i_one_er),
        nonlinearity=nonlin,
        noisy=nonlin > nonlinearity_tol,
        intensities=tuple(xs),
    )


def sensitivity_ratio(
    atom: AtomSpec,
    wavelength: float,
    circularity: float = 0.99,
    B_two_photon: float = DEFAULT_TWO_PHOTON_FIELD,
    B_clock: float = DEFAULT_CLOCK_BIAS,
    depth_er: float = 40.0,
    two_photon: TransitionSpec = TWO_PHOTON,
    clock: TransitionSpec = CLOCK,
) -> tuple[float, SlopeFit, SlopeFit]:
    """Ratio of two-photon to clock intensity sensitivities.

    Both slopes are evaluated on the identical intensity grid spanning the
    given lambda/2-equivalent depth. Returns (ratio, two-photon fit,
    clock fit).
    """
    coeffs = shift_coefficients(atom, wavelength)
    i_max = depth_er * recoil_energy(atom, wavelength) / abs(coeffs.kappa_s_avg)
    light = LightConfig(wavelength, i_max, circularity)
    fit2 = dnu_dI(atom, B_two_photon, light, two_photon, coeffs)
    fitc = dnu_dI(atom, B_clock, light, clock, coeffs)
    if fitc.per_intensity == 0.0:
        raise DomainError("clock slope vanished; ratio undefined")
    return fit2.per_intensity / fitc.per_intensity, fit2, fitc
