"""Ground-manifold hyperfine + Zeeman Hamiltonian for a J = 1/2 alkali atom.

Builds the (2J+1)(2I+1)-dimensional Hamiltonian in the product basis
|m_J, m_I> (m_J descending, then m_I descending), diagonalizes it, assigns
adiabatic (F, m_F) labels by eigenvector overlap, and provides the analytic
Breit-Rabi energies as an independent cross-check. Exact diagonalization is
the source of truth; Breit-Rabi is the oracle.

The magnetic field argument is the signed projection of B on the
quantization axis; negative values describe a field anti-parallel to it
(needed e.g. for the m -> -m mirror of the magic point).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from .atoms import AtomSpec
from .constants import h, mu_B, mu_N
from .exceptions import DomainError, LabelContinuationError

_ORTHONORMALITY_TOL = 1e-12


@dataclass(frozen=True, order=True)
class StateLabel:
    """Adiabatic (F, m_F) label of a ground-manifold state."""

    F: int
    m_F: int

    def __post_init__(self):
        if abs(self.m_F) > self.F:
            raise DomainError(f"|m_F| <= F violated by {self}")


@dataclass(frozen=True)
class TransitionSpec:
    lower: StateLabel
    upper: StateLabel
    photon_order: int = 1

    def __post_init__(self):
        if self.lower == self.upper:
            raise DomainError("transition needs two distinct states")
        if self.photon_order < 1:
            raise DomainError("photon_order must be >= 1")


# The two transitions studied throughout: the field-insensitive two-photon
# pair and the single-photon clock transition.
TWO_PHOTON = TransitionSpec(StateLabel(1, -1), StateLabel(2, +1), photon_order=2)
CLOCK = TransitionSpec(StateLabel(1, 0), StateLabel(2, 0), photon_order=1)


class SpinBasis:
    """Product basis |m_J, m_I> for J = 1/2 and nuclear spin I.

    Ordering is m_J descending, then m_I descending, and is part of the
    public contract (eigenvector matrices refer to it).
    """

    def __init__(self, nuclear_spin: float):
        self.J = 0.5
        self.I = nuclear_spin
        nj, ni = 2, int(round(2 * nuclear_spin + 1))
        self.dim = nj * ni
        self.m_J = np.repeat([0.5, -0.5], ni)
        self.m_I = np.tile(nuclear_spin - np.arange(ni), nj)
        self.m_F = self.m_J + self.m_I

    @staticmethod
    def _ladder(j: float) -> tuple[np.ndarray, np.ndarray]:
        d = int(round(2 * j + 1))
        m = j - np.arange(d)
        jz = np.diag(m)
        jp = np.zeros((d, d))
        for k in range(1, d):
            jp[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
        return jz, jp

    @property
    def labels(self) -> tuple[StateLabel, ...]:
        """All valid (F, m_F) labels in canonical (F, m_F) order."""
        out = []
        for F in (int(self.I - 0.5), int(self.I + 0.5)):
            for m in range(-F, F + 1):
                out.append(StateLabel(F, m))
        return tuple(out)

    def operators(self) -> dict[str, np.ndarray]:
        """J_z, I_z and J.I in the product basis (real matrices)."""
        jz, jp = self._ladder(self.J)
        iz, ip = self._ladder(self.I)
        ej, ei = np.eye(jz.shape[0]), np.eye(iz.shape[0])
        JZ = np.kron(jz, ei)
        IZ = np.kron(ej, iz)
        JdotI = np.kron(jz, iz) + 0.5 * (np.kron(jp, ip.T) + np.kron(jp.T, ip))
        return {"Jz": JZ, "Iz": IZ, "JdotI": JdotI}


@lru_cache(maxsize=8)
def _basis_and_ops(nuclear_spin: float):
    basis = SpinBasis(nuclear_spin)
    return basis, basis.operators()


def build_hf_zeeman(atom: AtomSpec, B: float) -> np.ndarray:
    """(H_HF + H_Z)/h in the product basis, Hz; real symmetric.

    H_HF/h = A_hf J.I and H_Z/h = (g_J mu_B J_z + g_I mu_N I_z) B / h,
    with J.I = J_z I_z + (J+ I- + J- I+)/2.
    """
    _, ops = _basis_and_ops(atom.nuclear_spin)
    return (
        atom.A_hf * ops["JdotI"]
        + (atom.g_J * mu_B * B / h) * ops["Jz"]
        + (atom.g_I * mu_N * B / h) * ops["Iz"]
    )


@lru_cache(maxsize=8)
def zero_field_basis(nuclear_spin: float) -> tuple[tuple[StateLabel, ...], np.ndarray]:
    """Analytic |F, m_F> eigenbasis of H_HF (Clebsch-Gordan, J = 1/2).

    Columns follow the canonical label order of ``SpinBasis.labels``.
    """
    basis = SpinBasis(nuclear_spin)
    I = nuclear_spin
    vecs = np.zeros((basis.dim, basis.dim))
    labels = basis.labels
    for col, lab in enumerate(labels):
        m = lab.m_F
        # amplitudes on |m_J=+1/2, m_I=m-1/2> and |m_J=-1/2, m_I=m+1/2>
        a = np.sqrt((I + 0.5 + m) / (2 * I + 1))
        b = np.sqrt((I + 0.5 - m) / (2 * I + 1))
        if lab.F == int(I + 0.5):
            amp_up, amp_dn = a, b
        else:
            amp_up, amp_dn = -b, a
        for amp, mj in ((amp_up, 0.5), (amp_dn, -0.5)):
            mi = m - mj
            if abs(mi) > I + 1e-9:
                continue
            idx = np.where((basis.m_J == mj) & (np.isclose(basis.m_I, mi)))[0]
            vecs[idx[0], col] = amp
    return labels, vecs


@dataclass(frozen=True)
class ZeemanEigensystem:
    """Labeled eigensystem of the (possibly light-dressed) ground manifold.

    ``eigenvalues[k]`` belongs to ``labels[k]``; ``eigenvectors[:, k]`` is the
    corresponding state in the product basis.
    """

    field_magnitude: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    labels: tuple[StateLabel, ...]

    def energy(self, label: StateLabel) -> float:
        try:
            return float(self.eigenvalues[self.labels.index(label)])
        except ValueError:
            raise DomainError(f"label {label} not present") from None

    def vector(self, label: StateLabel) -> np.ndarray:
        try:
            return self.eigenvectors[:, self.labels.index(label)]
        except ValueError:
            raise DomainError(f"label {label} not present") from None


def _assign_labels(vecs: np.ndarray, ref_vecs: np.ndarray,
                   ref_labels: tuple[StateLabel, ...]) -> tuple[StateLabel, ...]:
    # maximum-overlap matching between new eigenvectors and the reference set
    overlap = np.abs(ref_vecs.T @ vecs) ** 2
    rows, cols = linear_sum_assignment(-overlap)
    labels: list[StateLabel | None] = [None] * vecs.shape[1]
    for r, c in zip(rows, cols):
        if overlap[r, c] < 0.5:
            raise LabelContinuationError(
                f"ambiguous continuation: best overlap {overlap[r, c]:.3f} for {ref_labels[r]}"
            )
        labels[c] = ref_labels[r]
    return tuple(labels)  # type: ignore[arg-type]


def diagonalize(
    H: np.ndarray,
    nuclear_spin: float,
    field_magnitude: float = 0.0,
    reference: ZeemanEigensystem | None = None,
) -> ZeemanEigensystem:
    """Eigen-decompose a real symmetric ground-manifold Hamiltonian (Hz).

    Labels are assigned by maximum-overlap continuation from ``reference``
    when given, else from the analytic zero-field |F, m_F> basis. The
    returned system is re-ordered canonically by (F, m_F).
    """
    H = np.asarray(H, float)
    if H.shape[0] != H.shape[1] or not np.allclose(H, H.T, atol=1e-6 * max(1.0, np.abs(H).max())):
        raise DomainError("H must be real symmetric")
    w, v = np.linalg.eigh(H)
    gram = v.T @ v - np.eye(H.shape[0])
    if np.abs(gram).max() > _ORTHONORMALITY_TOL:
        raise DomainError("eigenvector orthonormality beyond tolerance")

    if reference is not None:
        ref_vecs, ref_labels = reference.eigenvectors, reference.labels
    else:
        ref_labels, ref_vecs = zero_field_basis(nuclear_spin)
    labels = _assign_labels(v, ref_vecs, ref_labels)

    fs = np.array([lab.F for lab in labels])
    ms = np.array([lab.m_F for lab in labels])
    order = np.lexsort((ms, fs))
    return ZeemanEigensystem(
        field_magnitude=field_magnitude,
        eigenvalues=w[order],
        eigenvectors=v[:, order],
        labels=tuple(labels[k] for k in order),
    )


def solve_bare(atom: AtomSpec, B: float,
               reference: ZeemanEigensystem | None = None) -> ZeemanEigensystem:
    """Diagonalize the bare hyperfine + Zeeman Hamiltonian at field B."""
    return diagonalize(build_hf_zeeman(atom, B), atom.nuclear_spin, B, reference)


def breit_rabi_energy(atom: AtomSpec, label: StateLabel, B: float) -> float:
    """Analytic Breit-Rabi energy E/h in Hz (J = 1/2), hyperfine-centroid zero.

    E(F = I +- 1/2, m) = -DW/(2(2I+1)) + g_I mu_N m B/h
                         +- (DW/2) sqrt(1 + 4 m x/(2I+1) + x^2),
    x = (g_J mu_B - g_I mu_N) B / (h DW). The stretched states of the upper
    manifold use their exact linear expressions (valid at all fields).
    """
    I = atom.nuclear_spin
    f_lo, f_up = int(I - 0.5), int(I + 0.5)
    if label.F not in (f_lo, f_up):
        raise DomainError(f"invalid F for I={I}: {label}")
    if abs(label.m_F) > label.F:
        raise DomainError(f"invalid label {label}")
    DW = atom.hyperfine_splitting
    m = label.m_F
    if label.F == f_up and abs(m) == f_up:
        s = 1.0 if m > 0 else -1.0
        return I * atom.A_hf / 2 + s * (atom.g_J * mu_B / 2 + atom.g_I * mu_N * I) * B / h
    x = (atom.g_J * mu_B - atom.g_I * mu_N) * B / (h * DW)
    sgn = 1.0 if label.F == f_up else -1.0
    return (
        -DW / (2 * (2 * I + 1))
        + atom.g_I * mu_N * m * B / h
        + sgn * (DW / 2) * np.sqrt(1 + 4 * m * x / (2 * I + 1) + x * x)
    )


def breit_rabi_dEdB(atom: AtomSpec, label: StateLabel, B: float) -> float:
    """Analytic derivative of the Breit-Rabi energy, Hz/T (test oracle)."""
    I = atom.nuclear_spin
    f_up = int(I + 0.5)
    m = label.m_F
    if label.F == f_up and abs(m) == f_up:
        s = 1.0 if m > 0 else -1.0
        return s * (atom.g_J * mu_B / 2 + atom.g_I * mu_N * I) / h
    DW = atom.hyperfine_splitting
    x = (atom.g_J * mu_B - atom.g_I * mu_N) * B / (h * DW)
    dx = (atom.g_J * mu_B - atom.g_I * mu_N) / (h * DW)
    sgn = 1.0 if label.F == f_up else -1.0
    root = np.sqrt(1 + 4 * m * x / (2 * I + 1) + x * x)
    return atom.g_I * mu_N * m / h + sgn * (DW / 4) * (4 * m / (2 * I + 1) + 2 * x) * dx / root


def transition_frequency(sys: ZeemanEigensystem, t: TransitionSpec) -> float:
    """E(upper) - E(lower), Hz."""
    return sys.energy(t.upper) - sys.energy(t.lower)


@dataclass(frozen=True)
class Derivative:
    """A finite-difference derivative with its Richardson error estimate."""

    value: float
    error: float
    step: float


def dnu_dB(atom: AtomSpec, t: TransitionSpec, B: float, step: float = 1e-7) -> Derivative:
    """d nu / dB of a bare transition by Richardson-extrapolated central
    differences (steps ``step`` and ``step/2``), Hz/T."""
    if step <= 0 or step < 1e-12:
        raise DomainError("step underflow")

    def nu(b: float) -> float:
        return transition_frequency(solve_bare(atom, b), t)

    d1 = (nu(B + step) - nu(B - step)) / (2 * step)
    d2 = (nu(B + step / 2) - nu(B - step / 2)) / step
    value = (4 * d2 - d1) / 3
    return Derivative(value=value, error=abs(value - d2), step=step)


def vector_moment(sys: ZeemanEigensystem, label: StateLabel, nuclear_spin: float) -> float:
    """Expectation of 2 J_z (twice the electron-spin projection on the
    quantization axis) in the labeled eigenstate."""
    _, ops = _basis_and_ops(nuclear_spin)
    v = sys.vector(label)
    return float(v @ (2 * ops["Jz"]) @ v)
