"""Detuned Ramsey spectroscopy on inhomogeneous ensembles.

Two pi/2 pulses separated by a hold time tau; per-atom frequency offsets
dephase the ensemble and the fringe contrast decays. Pulses are propagated
with the exact two-level unitary (finite duration and detuning included);
the drive's AC shift during the pulses is reported as a diagnostic but not
added to the free-evolution phase (it cancels to first order in Ramsey).

Ensemble sampling uses a scrambled Sobol sequence seeded from the
configuration, so curves are deterministic and converge much faster than
plain Monte Carlo.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit
from scipy.stats import norm, qmc

from .exceptions import DomainError, FitError


@dataclass(frozen=True)
class PulseSpec:
    """A resonant-frame pulse: Rabi frequency (Hz), duration (s), phase."""

    rabi_frequency: float
    duration: float
    phase: float = 0.0

    def __post_init__(self):
        if self.rabi_frequency <= 0:
            raise DomainError("rabi_frequency must be positive")
        if self.duration < 0:
            raise DomainError("duration must be non-negative")

    @classmethod
    def pi_half(cls, rabi_frequency: float, phase: float = 0.0) -> "PulseSpec":
        # pi/2 area: rabi * duration = 1/4 cycle
        return cls(rabi_frequency, 0.25 / rabi_frequency, phase)


@dataclass(frozen=True)
class TwoPhotonDrive:
    """Microwave + rf drive through a far-detuned intermediate state."""

    rabi_uw: float
    rabi_rf: float
    intermediate_detuning: float = 90e3

    def __post_init__(self):
        if self.intermediate_detuning == 0:
            raise DomainError("intermediate detuning must be nonzero")


@dataclass(frozen=True)
class EffectiveDrive:
    rabi: float                 # Hz
    differential_ac_shift: float  # Hz, of the two clock levels from the drive


def effective_rabi(drive: TwoPhotonDrive) -> EffectiveDrive:
    """Adiabatic elimination of the intermediate state.

    Omega_eff = Omega_uw * Omega_rf / (2 Delta); the differential AC shift
    of the two clock levels from the drive fields is
    (Omega_uw^2 - Omega_rf^2) / (4 Delta).
    """
    d = drive.intermediate_detuning
    if max(abs(drive.rabi_uw), abs(drive.rabi_rf)) * 10 > abs(d):
        warnings.warn("intermediate detuning below 10x Rabi rates: "
                      "adiabatic elimination marginal", stacklevel=2)
    return EffectiveDrive(
        rabi=drive.rabi_uw * drive.rabi_rf / (2 * d),
        differential_ac_shift=(drive.rabi_uw**2 - drive.rabi_rf**2) / (4 * d),
    )


def _pulse_unitary(detuning: float, pulse: PulseSpec) -> np.ndarray:
    """Exact two-level rotating-frame propagator of one pulse."""
    omega = 2 * np.pi * pulse.rabi_frequency
    delta = 2 * np.pi * detuning
    W = np.hypot(omega, delta)
    th = W * pulse.duration / 2
    c, s = np.cos(th), np.sin(th)
    if W == 0:
        return np.eye(2, dtype=complex)
    nx = omega * np.cos(pulse.phase) / W
    ny = omega * np.sin(pulse.phase) / W
    nz = -delta / W
    # U = cos(th) - i sin(th) (n . sigma)
    return np.array(
        [[c - 1j * s * nz, -1j * s * (nx - 1j * ny)],
         [-1j * s * (nx + 1j * ny), c + 1j * s * nz]]
    )


def ramsey_probability(
    detuning: float,
    tau: float,
    pulses: tuple[PulseSpec, PulseSpec] | None = None,
    rabi_frequency: float = 1e3,
) -> float:
    """Excitation probability after pulse - hold(tau) - pulse.

    With ``pulses=None``, ideal instantaneous pi/2 pulses are used and the
    result reduces to (1 + cos(2 pi detuning tau)) / 2.
    """
    if tau < 0:
        raise DomainError("tau must be non-negative")
    if pulses is None:
        return 0.5 * (1.0 + np.cos(2 * np.pi * detuning * tau))
    p1, p2 = pulses
    U1 = _pulse_unitary(detuning, p1)
    U2 = _pulse_unitary(detuning, p2)
    # same sign convention as the zero-drive limit of _pulse_unitary
    ph = np.exp(1j * np.pi * detuning * tau)
    Ufree = np.array([[ph, 0], [0, np.conj(ph)]])
    psi = U2 @ Ufree @ U1 @ np.array([1.0, 0.0], complex)
    norm2 = float(np.real(np.vdot(psi, psi)))
    if abs(norm2 - 1.0) > 1e-12:
        raise DomainError(f"pulse evolution lost unitarity: |psi|^2 = {norm2}")
    return float(np.abs(psi[1]) ** 2)


@dataclass(frozen=True)
class RamseyEnsemble:
    """Per-atom detuning distribution driving the contrast decay.

    ``distribution`` is one of "delta", "gaussian", "from-lattice-sites".
    For "gaussian", ``spread`` is the standard deviation (Hz) of the
    per-atom shifts. For "from-lattice-sites", site depths are sampled
    from the axial profile of a Gaussian-beam lattice over a thermal cloud
    of the given extent and mapped to shifts with ``shift_per_depth``
    (Hz/E_R, from the light-shift engine).
    """

    detuning_nominal: float = 1e3
    distribution: str = "gaussian"
    spread: float = 0.0
    n_samples: int = 4096
    seed: int = 0
    # from-lattice-sites parameters
    site_depth_er: float = 30.0
    shift_per_depth: float = 0.0
    beam_waist: float = 60e-6
    cloud_sigma: float = 15e-6

    def __post_init__(self):
        if self.n_samples < 1:
            raise DomainError("n_samples must be >= 1")
        if self.distribution not in ("delta", "gaussian", "from-lattice-sites"):
            raise DomainError(f"unknown distribution {self.distribution!r}")
        if not np.isfinite(self.spread) or self.spread < 0:
            raise DomainError("spread must be finite and non-negative")

    def shifts(self) -> np.ndarray:
        """Per-atom frequency offsets from the nominal detuning, Hz."""
        if self.distribution == "delta":
            return np.zeros(self.n_samples)
        m = int(np.ceil(np.log2(max(self.n_samples, 2))))
        eng = qmc.Sobol(d=1, scramble=True, seed=self.seed)
        u = eng.random(2**m)[: self.n_samples, 0]
        u = np.clip(u, 1e-12, 1 - 1e-12)
        z = norm.ppf(u)
        if self.distribution == "gaussian":
            return self.spread * z
        # from-lattice-sites: axial positions of a thermal cloud in the
        # Gaussian-beam lattice profile; shift follows the local depth
        pos = self.cloud_sigma * z
        depth = self.site_depth_er * np.exp(-2 * pos**2 / self.beam_waist**2)
        shifts = self.shift_per_depth * depth
        return shifts - shifts.mean()


@dataclass(frozen=True)
class ContrastCurve:
    tau: np.ndarray
    contrast: np.ndarray
    flags: tuple[str, ...]


def ensemble_contrast(
    ensemble: RamseyEnsemble,
    tau_grid: np.ndarray,
    pulses: tuple[PulseSpec, PulseSpec] | None = None,
    n_phases: int = 16,
) -> ContrastCurve:
    """Fringe contrast vs hold time.

    For each tau the second-pulse phase is scanned over one period, the
    ensemble-averaged signal is fit to offset + amplitude * cos(phase),
    and contrast = 2 * amplitude. Ideal pulses (``pulses=None``) use the
    closed-form fringe. Deterministic for a given ensemble seed.
    """
    taus = np.asarray(tau_grid, float)
    if np.any(taus < 0):
        raise DomainError("tau must be non-negative")
    shifts = ensemble.shifts()
    phis = np.linspace(0.0, 2 * np.pi, n_phases, endpoint=False)
    M = np.column_stack([np.ones_like(phis), np.cos(phis), np.sin(phis)])
    Minv = np.linalg.pinv(M)

    contrasts = np.empty_like(taus)
    flags: list[str] = []
    for k, tau in enumerate(taus):
        if pulses is None:
            # P_i(phi) = (1 + cos(2 pi d_i tau - phi))/2 ensemble-averaged
            z = np.exp(2j * np.pi * shifts * tau)
            zbar = z.mean()
            signal = 0.5 * (1 + np.real(zbar) * np.cos(phis) + np.imag(zbar) * np.sin(phis))
        else:
            p1, p2 = pulses
            signal = np.empty_like(phis)
            for j, phi in enumerate(phis):
                p2j = PulseSpec(p2.rabi_frequency, p2.duration, p2.phase + phi)
                vals = [
                    ramsey_probability(ensemble.detuning_nominal + d, tau, (p1, p2j))
                    for d in shifts
                ]
                signal[j] = float(np.mean(vals))
        coef = Minv @ signal
        amp = float(np.hypot(coef[1], coef[2]))
        if amp < 1e-12:
            flags.append(f"flat fringe at tau={tau:g}")
            contrasts[k] = 0.0
        else:
            contrasts[k] = 2 * amp
    return ContrastCurve(tau=taus, contrast=contrasts, flags=tuple(flags))


@dataclass(frozen=True)
class FringeFit:
    frequency: float
    amplitude: float
    offset: float
    phase: float
    covariance: np.ndarray      # order: (frequency, amplitude, offset, phase)


def extract_frequency(samples: np.ndarray) -> FringeFit:
    """Least-squares sinusoid fit to (time_or_phase, probability) samples.

    This mirrors the analysis that turns Ramsey fringes into transition
    frequencies. Raises ``FitError`` for underdetermined or degenerate
    input (fewer than 5 samples, less than one fringe, constant signal).
    """
    pts = np.asarray(samples, float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 5:
        raise FitError("need at least 5 (x, p) samples")
    x, p = pts[:, 0], pts[:, 1]
    span = x.max() - x.min()
    if span <= 0:
        raise FitError("degenerate sample positions")
    if np.ptp(p) < 1e-12:
        raise FitError("constant signal: no fringe to fit")

    # frequency seed from a coarse periodogram
    f_trial = np.linspace(0.25 / span, pts.shape[0] / (2 * span), 256)
    power = [
        np.abs(np.sum((p - p.mean()) * np.exp(-2j * np.pi * f * x))) for f in f_trial
    ]
    f0 = float(f_trial[int(np.argmax(power))])

    def model(t, f, a, off, ph):
        return off + a * np.cos(2 * np.pi * f * t + ph)

    try:
        popt, pcov = curve_fit(
            model, x, p,
            p0=[f0, 0.5 * np.ptp(p), float(p.mean()), 0.0],
            maxfev=20000,
        )
    except RuntimeError as exc:
        raise FitError(f"sinusoid fit failed: {exc}") from exc
    if not np.all(np.isfinite(pcov)):
        raise FitError("fit covariance singular (underdetermined)")
    f_fit = abs(float(popt[0]))
    if f_fit * span < 1.0:
        raise FitError("samples span less than one fringe")
    return FringeFit(
        frequency=f_fit,
        amplitude=abs(float(popt[1])),
        offset=float(popt[2]),
        phase=float(popt[3]) % (2 * np.pi),
        covariance=pcov,
    )


def gaussian_contrast(sigma: float, tau: np.ndarray | float) -> np.ndarray | float:
    """Closed-form contrast for Gaussian dephasing: exp(-2 pi^2 s^2 t^2)."""
    return np.exp(-2 * np.pi**2 * sigma**2 * np.square(tau))
