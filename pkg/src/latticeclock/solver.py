"""Scan drivers and root finders for magic fields, zero-shift fields and
the near-magic wavelength.

Roots use a bracketed bisection/secant hybrid (Brent); minima are refined
by golden-section search inside the bracketing grid cells. Grid points are
evaluated in order (optionally on a thread pool, assembled in grid order),
so identical inputs give identical outputs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .atoms import AtomSpec, recoil_energy
from .constants import CONSTANTS_VERSION
from .dressed import (
    DEFAULT_CLOCK_BIAS,
    DEFAULT_TWO_PHOTON_FIELD,
    SlopeFit,
    dnu_dI,
    dressed_transition,
)
from .exceptions import BracketError, DomainError
from .polarizability import LightConfig, shift_coefficients
from .spinham import CLOCK, TWO_PHOTON, Derivative, TransitionSpec, dnu_dB

_FIELD_ROOT_TOL = 1e-12     # T, well inside the documented 1e-9
_DERIV_STEP = 1e-7          # T, finite-difference step for d nu/dB


class ScanAxis(str, Enum):
    wavelength = "wavelength"
    field = "field"
    intensity = "intensity"


@dataclass(frozen=True)
class SensitivityReport:
    """One scan point: frequency and its field/intensity sensitivities.

    ``metadata`` records every input needed to recompute the point.
    """

    nu: float
    dnu_dB: Derivative | None
    slope: SlopeFit | None
    ratio: float | None
    metadata: dict


@dataclass(frozen=True)
class Extremum:
    kind: str                   # "root" or "minimum"
    bracket: tuple[float, float]
    x: float
    value: float
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScanResult:
    axis: ScanAxis
    grid: tuple[float, ...]
    values: tuple[SensitivityReport, ...]
    extrema: tuple[Extremum, ...]

    def series(self, what: str) -> np.ndarray:
        if what == "ratio":
            return np.array([v.ratio for v in self.values], float)
        if what == "slope_per_recoil":
            return np.array([v.slope.per_recoil for v in self.values], float)
        if what == "nu":
            return np.array([v.nu for v in self.values], float)
        raise DomainError(f"unknown series {what!r}")


def find_magic_field(
    atom: AtomSpec,
    t: TransitionSpec,
    bracket: tuple[float, float],
    step: float = _DERIV_STEP,
) -> float:
    """Field where d nu/dB = 0, from bracketed root finding on the
    finite-difference derivative of the exact diagonalization.

    Raises ``BracketError`` if the derivative does not change sign over
    the bracket (e.g. the clock transition away from B = 0).
    """
    a, b = bracket
    if not a < b:
        raise DomainError("bracket must be ordered (a, b) with a < b")

    def f(B: float) -> float:
        return dnu_dB(atom, t, B, step=step).value

    fa, fb = f(a), f(b)
    if np.sign(fa) == np.sign(fb):
        raise BracketError(
            f"no magic point in bracket [{a:g}, {b:g}] T: "
            f"d nu/dB = {fa:.3g} and {fb:.3g} Hz/T"
        )
    return float(brentq(f, a, b, xtol=_FIELD_ROOT_TOL))


@dataclass(frozen=True)
class ZeroDlsResult:
    field: float                # T
    residual_dnu_dB: Derivative
    slope_at_root: SlopeFit


def find_zero_dls_field(
    atom: AtomSpec,
    wavelength: float,
    circularity: float,
    depth_er: float,
    t: TransitionSpec,
    bracket: tuple[float, float],
) -> ZeroDlsResult:
    """Field where the transition's intensity slope crosses zero.

    The slope is extracted at the given lambda/2-equivalent depth exactly
    as in ``dnu_dI``. Also reports the residual magnetic sensitivity at
    the root. Raises ``BracketError`` when there is no sign change (e.g.
    linear polarization: the scalar shift cannot cancel).
    """
    a, b = bracket
    if not a < b:
        raise DomainError("bracket must be ordered (a, b) with a < b")
    coeffs = shift_coefficients(atom, wavelength)
    i_max = depth_er * recoil_energy(atom, wavelength) / abs(coeffs.kappa_s_avg)
    light = LightConfig(wavelength, i_max, circularity)

    def f(B: float) -> float:
        return dnu_dI(atom, B, light, t, coeffs).per_intensity

    fa, fb = f(a), f(b)
    if np.sign(fa) == np.sign(fb):
        raise BracketError(
            f"d nu/dI does not change sign over [{a:g}, {b:g}] T "
            f"({fa:.3g} to {fb:.3g})"
        )
    root = float(brentq(f, a, b, xtol=1e-11))
    return ZeroDlsResult(
        field=root,
        residual_dnu_dB=dnu_dB(atom, t, root),
        slope_at_root=dnu_dI(atom, root, light, t, coeffs),
    )


def _ordered_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 1:
        raise DomainError("need at least one grid point")
    if n == 1:
        if lo != hi:
            raise DomainError("single-point scan needs lo == hi")
        return np.array([lo])
    if not lo < hi:
        raise DomainError("scan range must be strictly increasing")
    return np.linspace(lo, hi, n)


def _evaluate_grid(fn: Callable[[float], SensitivityReport],
                   grid: np.ndarray, threads: int) -> list[SensitivityReport]:
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, grid))
    return [fn(x) for x in grid]


def scan_wavelength(
    atom: AtomSpec,
    wavelength_range: tuple[float, float],
    n_points: int,
    circularity: float = 0.99,
    B_two_photon: float = DEFAULT_TWO_PHOTON_FIELD,
    B_clock: float = DEFAULT_CLOCK_BIAS,
    depth_er: float = 40.0,
    threads: int = 0,
) -> ScanResult:
    """Two-photon/clock sensitivity-ratio curve vs lattice wavelength,
    with interior minima refined by golden-section search."""
    grid = _ordered_grid(*wavelength_range, n_points)

    def ratio_at(lam: float) -> float:
        coeffs = shift_coefficients(atom, lam)
        i_max = depth_er * recoil_energy(atom, lam) / abs(coeffs.kappa_s_avg)
        light = LightConfig(lam, i_max, circularity)
        f2 = dnu_dI(atom, B_two_photon, light, TWO_PHOTON, coeffs)
        fc = dnu_dI(atom, B_clock, light, CLOCK, coeffs)
        return f2.per_intensity / fc.per_intensity

    def point(lam: float) -> SensitivityReport:
        coeffs = shift_coefficients(atom, lam)
        i_max = depth_er * recoil_energy(atom, lam) / abs(coeffs.kappa_s_avg)
        light = LightConfig(lam, i_max, circularity)
        f2 = dnu_dI(atom, B_two_photon, light, TWO_PHOTON, coeffs)
        fc = dnu_dI(atom, B_clock, light, CLOCK, coeffs)
        nu = dressed_transition(atom, B_two_photon, light, TWO_PHOTON, coeffs)
        return SensitivityReport(
            nu=nu,
            dnu_dB=dnu_dB(atom, TWO_PHOTON, B_two_photon),
            slope=f2,
            ratio=f2.per_intensity / fc.per_intensity,
            metadata={
                "species": atom.species,
                "wavelength_m": lam,
                "circularity": circularity,
                "B_two_photon_T": B_two_photon,
                "B_clock_T": B_clock,
                "depth_er": depth_er,
                "intensity_grid_W_m2": list(f2.intensities),
                "dB_step_T": _DERIV_STEP,
                "constants": CONSTANTS_VERSION,
            },
        )

    values = _evaluate_grid(point, grid, threads)
    ratios = np.array([v.ratio for v in values])
    extrema = []
    for i in range(1, len(grid) - 1):
        if ratios[i] < ratios[i - 1] and ratios[i] < ratios[i + 1]:
            res = minimize_scalar(
                ratio_at,
                bracket=(grid[i - 1], grid[i], grid[i + 1]),
                method="golden",
                options={"xtol": 1e-13},
            )
            extrema.append(
                Extremum(
                    kind="minimum",
                    bracket=(grid[i - 1], grid[i + 1]),
                    x=float(res.x),
                    value=float(res.fun),
                )
            )
    return ScanResult(ScanAxis.wavelength, tuple(grid), tuple(values), tuple(extrema))


def scan_field(
    atom: AtomSpec,
    wavelength: float,
    circularity: float,
    depth_er: float,
    t: TransitionSpec,
    field_range: tuple[float, float],
    n_points: int,
    threads: int = 0,
) -> ScanResult:
    """Intensity-sensitivity curve vs bias field, with zero crossings
    refined by bracketed root finding."""
    grid = _ordered_grid(*field_range, n_points)
    coeffs = shift_coefficients(atom, wavelength)
    i_max = depth_er * recoil_energy(atom, wavelength) / abs(coeffs.kappa_s_avg)
    light = LightConfig(wavelength, i_max, circularity)

    def slope_at(B: float) -> float:
        return dnu_dI(atom, B, light, t, coeffs).per_intensity

    def point(B: float) -> SensitivityReport:
        fit = dnu_dI(atom, B, light, t, coeffs)
        return SensitivityReport(
            nu=dressed_transition(atom, B, light, t, coeffs),
            dnu_dB=dnu_dB(atom, t, B),
            slope=fit,
            ratio=None,
            metadata={
                "species": atom.species,
                "wavelength_m": wavelength,
                "circularity": circularity,
                "B_T": B,
                "depth_er": depth_er,
                "intensity_grid_W_m2": list(fit.intensities),
                "dB_step_T": _DERIV_STEP,
                "constants": CONSTANTS_VERSION,
            },
        )

    values = _evaluate_grid(point, grid, threads)
    slopes = np.array([v.slope.per_intensity for v in values])
    extrema = []
    for i in range(len(grid) - 1):
        if np.sign(slopes[i]) != np.sign(slopes[i + 1]) and slopes[i] != 0.0:
            root = float(brentq(slope_at, grid[i], grid[i + 1], xtol=1e-11))
            extrema.append(
                Extremum(
                    kind="root",
                    bracket=(float(grid[i]), float(grid[i + 1])),
                    x=root,
                    value=slope_at(root),
                    extra={"dnu_dB_Hz_per_T": dnu_dB(atom, t, root).value},
                )
            )
    return ScanResult(ScanAxis.field, tuple(grid), tuple(values), tuple(extrema))
