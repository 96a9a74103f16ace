"""Atomic species data: ground-state hyperfine parameters and D-line data.

Values live in a bundled JSON registry (``data/atoms.json``) where every
number carries a source citation. Energies are exposed as frequencies
(E/h, Hz).

Sign conventions
----------------
``g_J > 0`` and the electronic Zeeman term enters the Hamiltonian as
``+g_J * mu_B * m_J * B / h``. ``g_I`` is stored in the nuclear-magneton
convention so the nuclear term is ``+g_I * mu_N * m_I * B / h`` with
``g_I < 0`` for Rb87. This convention is pinned by two observables:
``-2 g_I mu_N / mu_B = 0.0020`` and the two-photon magic field at
0.32289 mT (see the test suite).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .constants import h, mu_B, mu_N
from .exceptions import DomainError, UnknownSpeciesError


class LineLabel(str, Enum):
    D1 = "D1"
    D2 = "D2"


@dataclass(frozen=True)
class SpectralLine:
    """One fine-structure line of the principal doublet."""

    label: LineLabel
    frequency: float            # Hz
    natural_linewidth: float    # Hz (Gamma / 2 pi)

    def __post_init__(self):
        if self.frequency <= 0:
            raise DomainError("line frequency must be positive")
        if self.natural_linewidth <= 0:
            raise DomainError("natural linewidth must be positive")


@dataclass(frozen=True)
class AtomSpec:
    """Immutable per-species parameter record.

    ``g_I`` uses the nuclear-magneton convention described in the module
    docstring; ``A_hf`` is the ground-state magnetic-dipole constant in Hz.
    """

    species: str
    nuclear_spin: float
    g_J: float
    g_I: float
    A_hf: float
    mass: float
    d_lines: tuple[SpectralLine, SpectralLine]

    def __post_init__(self):
        if self.nuclear_spin <= 0 or round(2 * self.nuclear_spin) != 2 * self.nuclear_spin:
            raise DomainError("nuclear spin must be a positive half-integer")
        if self.A_hf <= 0:
            raise DomainError("A_hf must be positive for a normal hyperfine ground state")
        if self.mass <= 0:
            raise DomainError("mass must be positive")
        d1, d2 = self.line(LineLabel.D1), self.line(LineLabel.D2)
        if d2.frequency <= d1.frequency:
            raise DomainError("D2 must lie above D1")

    def line(self, label: LineLabel | str) -> SpectralLine:
        label = LineLabel(label)
        for ln in self.d_lines:
            if ln.label == label:
                return ln
        raise DomainError(f"missing line {label}")

    @property
    def hyperfine_splitting(self) -> float:
        """Zero-field splitting between the F = I +- 1/2 manifolds, Hz."""
        return self.A_hf * (self.nuclear_spin + 0.5)

    @property
    def f_levels(self) -> tuple[float, float]:
        """(F_lower, F_upper) of the ground manifold."""
        return (self.nuclear_spin - 0.5, self.nuclear_spin + 0.5)


def _registry() -> dict:
    with resources.files("latticeclock.data").joinpath("atoms.json").open() as fh:
        return json.load(fh)


def registered_species() -> tuple[str, ...]:
    return tuple(sorted(_registry()["species"]))


def registry_version() -> str:
    return _registry()["registry_version"]


def load_atom(species: str) -> AtomSpec:
    """Load a species from the bundled registry.

    Raises
    ------
    UnknownSpeciesError
        If ``species`` is not registered.
    """
    reg = _registry()["species"]
    if species not in reg:
        raise UnknownSpeciesError(
            f"unsupported species {species!r}; registered: {', '.join(sorted(reg))}"
        )
    rec = reg[species]
    lines = tuple(
        SpectralLine(
            label=LineLabel(ln["label"]),
            frequency=ln["frequency_Hz"],
            natural_linewidth=ln["natural_linewidth_Hz"],
        )
        for ln in rec["d_lines"]
    )
    return AtomSpec(
        species=species,
        nuclear_spin=rec["nuclear_spin"]["value"],
        g_J=rec["g_J"]["value"],
        g_I=rec["g_I_muB"]["value"] * (mu_B / mu_N),
        A_hf=rec["A_hf_Hz"]["value"],
        mass=rec["mass_kg"]["value"],
        d_lines=lines,
    )


def recoil_energy(atom: AtomSpec, wavelength: float) -> float:
    """Photon recoil energy E_R/h = h / (2 m lambda^2), in Hz."""
    if wavelength <= 0:
        raise DomainError("wavelength must be positive")
    return h / (2.0 * atom.mass * wavelength**2)


def fine_structure_splitting(atom: AtomSpec) -> float:
    """D2 - D1 line frequency difference, Hz."""
    return atom.line(LineLabel.D2).frequency - atom.line(LineLabel.D1).frequency
