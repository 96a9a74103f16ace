"""Scalar and vector light-shift coefficients from the two D lines.

The far-detuned level shift of ground hyperfine level F for light of
intensity I, circularity A and electron projection m_J is modeled as

    U/h = I * [ kappa_s(F) + A * kappa_v(F) * (2 m_J) ]

with per-line contributions in the standard D-line form: the D2 line
carries scalar weight 2 and the D1 line weight 1, and the vector part is
their difference,

    kappa_s(F) = C2 (2/dlt2(F) - 2/sgm2(F)) + C1 (1/dlt1(F) - 1/sgm1(F))
    kappa_v(F) = C2 / dlt2(F) - C1 / dlt1(F)

where C_L = pi c^2 Gamma_L / (2 omega_L^3) per line, dlt_L(F) is the laser
detuning from line L measured from hyperfine level F, and sgm_L(F) is the
counter-rotating sum frequency. The 1/(omega + omega_L) counter-rotating
term is kept in the scalar part only (a ~2% correction near 800 nm; its
D1/D2 contributions nearly cancel in the vector difference). The
F-dependence of the detunings carries both the differential scalar shift
and the leading hyperfine splitting of the vector coefficients.

Coefficients are in Hz per (W/m^2); the equivalent light-induced field is
B_eff = 2 h kappa_v I A / (g_J mu_B), which couples to the electron spin
only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .atoms import AtomSpec, LineLabel
from .constants import c, h, mu_B
from .exceptions import DomainError, NearResonanceError

_NEAR_RESONANCE_FACTOR = 1000.0


@dataclass(frozen=True)
class LightConfig:
    """Trapping-light descriptor.

    ``circularity`` is the projection of i e* x e on the static-field axis,
    in [-1, 1]. ``B_eff`` is treated as exactly collinear with B
    (``collinear_with_B`` is fixed true; only that component shifts levels
    in the B_eff << B regime).
    """

    wavelength: float           # m
    intensity: float            # W/m^2
    circularity: float = 0.0
    collinear_with_B: bool = field(default=True)

    def __post_init__(self):
        if self.wavelength <= 0:
            raise DomainError("wavelength must be positive")
        if self.intensity < 0:
            raise DomainError("intensity must be non-negative")
        if abs(self.circularity) > 1:
            raise DomainError("|circularity| <= 1")
        if not self.collinear_with_B:
            raise DomainError("only collinear B_eff is modeled")


@dataclass(frozen=True)
class ShiftCoefficients:
    """Light-shift coefficients at one wavelength, Hz/(W/m^2).

    ``kappa_s`` and ``kappa_v`` map hyperfine level F to its scalar and
    vector coefficient; ``kappa_v_centroid`` is the vector coefficient at
    the hyperfine-centroid detuning (used for the F-changing matrix
    elements and for B_eff bookkeeping).
    """

    wavelength: float
    kappa_s: dict[int, float]
    kappa_v: dict[int, float]
    kappa_v_centroid: float
    g_J: float

    @property
    def kappa_s_avg(self) -> float:
        """Degeneracy-weighted scalar coefficient (unpolarized atom)."""
        ws = {F: 2 * F + 1 for F in self.kappa_s}
        return sum(w * self.kappa_s[F] for F, w in ws.items()) / sum(ws.values())

    @property
    def b_eff_per_intensity(self) -> float:
        """|B_eff| per unit intensity at full circularity, T/(W/m^2)."""
        return abs(2 * h * self.kappa_v_centroid / (self.g_J * mu_B))

    def b_eff(self, intensity: float, circularity: float) -> float:
        """Signed B_eff (paper sign convention: H_v = -mu_B g_J J.B_eff)."""
        return -2 * h * self.kappa_v_centroid * intensity * circularity / (self.g_J * mu_B)


def _f_level_energies(atom: AtomSpec) -> dict[int, float]:
    I = atom.nuclear_spin
    return {
        int(I + 0.5): atom.A_hf * I / 2,
        int(I - 0.5): -atom.A_hf * (I + 1) / 2,
    }


def shift_coefficients(atom: AtomSpec, wavelength: float) -> ShiftCoefficients:
    """Evaluate the two-line coefficients at one wavelength.

    Raises
    ------
    NearResonanceError
        If the laser is within 1000 natural linewidths of either line
        (from either hyperfine level); the far-detuned model is invalid
        there.
    """
    if wavelength <= 0:
        raise DomainError("wavelength must be positive")
    nu = c / wavelength
    e_f = _f_level_energies(atom)
    lines = ((atom.line(LineLabel.D2), 2.0, +1.0), (atom.line(LineLabel.D1), 1.0, -1.0))

    kappa_s: dict[int, float] = {}
    kappa_v: dict[int, float] = {}
    for F, ef in e_f.items():
        ks = kv = 0.0
        for line, weight, vsign in lines:
            nu_line = line.frequency - ef
            delta = nu - nu_line
            if abs(delta) < _NEAR_RESONANCE_FACTOR * line.natural_linewidth:
                raise NearResonanceError(
                    f"{wavelength * 1e9:.3f} nm is within 1000 linewidths of {line.label.value}"
                )
            cl = _line_coefficient(line.frequency, line.natural_linewidth)
            ks += cl * weight * (1.0 / delta - 1.0 / (nu + nu_line))
            kv += cl * vsign / delta
        kappa_s[F] = ks
        kappa_v[F] = kv

    kv_centroid = 0.0
    for line, _, vsign in lines:
        cl = _line_coefficient(line.frequency, line.natural_linewidth)
        kv_centroid += cl * vsign / (nu - line.frequency)

    return ShiftCoefficients(
        wavelength=wavelength,
        kappa_s=kappa_s,
        kappa_v=kappa_v,
        kappa_v_centroid=kv_centroid,
        g_J=atom.g_J,
    )


def _line_coefficient(frequency: float, linewidth: float) -> float:
    # pi c^2 Gamma / (2 omega^3 h), arranged so that dividing by a detuning
    # in Hz yields Hz per (W/m^2)
    omega = 2 * np.pi * frequency
    gamma = 2 * np.pi * linewidth
    return np.pi * c**2 * gamma / (2 * omega**3 * h) / (2 * np.pi)


def eq1_sensitivity(
    coeffs: ShiftCoefficients,
    lower_F: int,
    upper_F: int,
    circularity: float,
    vector_moments: tuple[float, float],
) -> float:
    """Perturbative d nu / dI of a transition, Hz/(W/m^2).

    ``vector_moments`` are the expectations of 2 J_z along B in the lower
    and upper eigenstates at the operating field (from the spin
    Hamiltonian). The result is the scalar differential plus the
    circularity-weighted vector differential; at the magic field the vector
    difference does not vanish, it reduces to the nuclear residual.
    """
    w_lo, w_up = vector_moments
    scalar = coeffs.kappa_s[upper_F] - coeffs.kappa_s[lower_F]
    vector = coeffs.kappa_v[upper_F] * w_up - coeffs.kappa_v[lower_F] * w_lo
    return scalar + circularity * vector
