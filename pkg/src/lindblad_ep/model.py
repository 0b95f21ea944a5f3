"""Two-level dissipative system: parameters, operators, density-matrix helpers.

Basis ordering is (excited, ground): index 0 is |e>, index 1 is |g>.  The
flattened (Hilbert-Schmidt) layout of a density matrix is the 4-vector
(rho_eg, rho_ge, rho_ee, rho_gg).  This ordering is a frozen contract shared
by every module that builds or consumes the 4x4 generator.

All energies are real with hbar = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

HS_COMPONENTS = ("rho_eg", "rho_ge", "rho_ee", "rho_gg")

INITIAL_STATES = ("excited", "ground", "mixed", "coherent")


class HermiticityWarning(UserWarning):
    """A flattened state broke the conjugate pairing between rho_eg and rho_ge."""


def _as_finite_float(name: str, value) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Rotating-frame parameters: detuning, drive amplitude, environment coupling.

    ``gamma`` must be nonnegative.  ``delta`` may vanish except where a
    quantity is expressed in units of the detuning (the scaled coordinates
    d/delta and gamma/delta).
    """

    delta: float
    d: float
    gamma: float

    def __post_init__(self):
        for name in ("delta", "d", "gamma"):
            object.__setattr__(self, name, _as_finite_float(name, getattr(self, name)))
        if self.gamma < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")

    def scaled(self) -> tuple[float, float]:
        """Return (d/delta, gamma/delta); requires a nonzero detuning."""
        if self.delta == 0:
            raise DomainError("scaled coordinates d/delta, gamma/delta need delta != 0")
        return self.d / self.delta, self.gamma / self.delta

    def energy_scale(self) -> float:
        """delta^2 + d^2 + gamma^2, the squared energy scale used for tolerances."""
        return self.delta**2 + self.d**2 + self.gamma**2


@dataclass(frozen=True)
class LabParams:
    """Lab-frame parameters: level splitting, drive frequency and amplitude, coupling."""

    Delta: float
    omega: float
    d: float
    gamma: float

    def __post_init__(self):
        for name in ("Delta", "omega", "d", "gamma"):
            object.__setattr__(self, name, _as_finite_float(name, getattr(self, name)))
        if self.gamma < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")

    @property
    def detuning(self) -> float:
        """Drive offset from the level splitting, Delta - omega."""
        return self.Delta - self.omega

    def to_rotating(self) -> ModelParams:
        """Parameters of the equivalent co-rotating-frame description."""
        return ModelParams(self.Delta - self.omega, self.d, self.gamma)


def hamiltonian_rwa(params: LabParams, t: float) -> np.ndarray:
    """Lab-frame Hamiltonian with the counter-rotating drive component dropped."""
    phase = np.exp(-1j * params.omega * t)
    half = 0.5 * params.d
    return np.array([[params.Delta + 0j, half * phase], [half * np.conj(phase), 0j]])


def hamiltonian_rotating(params: ModelParams) -> np.ndarray:
    """Time-independent Hamiltonian in the frame co-rotating with the drive."""
    half = 0.5 * params.d
    return np.array([[params.delta, half], [half, 0.0]], dtype=complex)


def jump_operators() -> tuple[np.ndarray, np.ndarray]:
    """Relaxation operator and its adjoint, as the pair (c, c_dagger).

    ``c`` lowers the excited state into the ground state; its adjoint describes
    excitation by the environment.
    """
    c = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
    return c, c.conj().T


def frame_unitary(omega: float, t: float) -> np.ndarray:
    """Diagonal unitary carrying the drive phase on the excited level only."""
    return np.array([[np.exp(-1j * omega * t), 0j], [0j, 1.0 + 0j]])


def rotate_to_lab(rho_tilde: np.ndarray, omega: float, t: float) -> np.ndarray:
    """Map a rotating-frame state back to the lab frame at time ``t``.

    Unitary conjugation: preserves trace, Hermiticity and eigenvalues; only the
    phase of the coherence changes.
    """
    u = frame_unitary(omega, t)
    return u @ np.asarray(rho_tilde, dtype=complex) @ u.conj().T


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Flatten a 2x2 density matrix to (rho_eg, rho_ge, rho_ee, rho_gg)."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([rho[0, 1], rho[1, 0], rho[0, 0], rho[1, 1]])


def devectorize(psi: np.ndarray, pairing_tol: float = 1e-9) -> np.ndarray:
    """Rebuild the 2x2 density matrix from its flattened form.

    Exact inverse of :func:`vectorize` (components are copied, never
    symmetrised).  A vector whose components violate the Hermiticity pairing
    beyond ``pairing_tol`` (relative) triggers a non-fatal
    :class:`HermiticityWarning`.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise DomainError(f"expected a length-4 vector, got shape {psi.shape}")
    scale = max(1.0, float(np.max(np.abs(psi))))
    defect = max(
        abs(psi[0] - np.conj(psi[1])),
        abs(psi[2].imag),
        abs(psi[3].imag),
    )
    if defect > pairing_tol * scale:
        warnings.warn(
            f"flattened state violates Hermiticity pairing by {defect:.3e}",
            HermiticityWarning,
            stacklevel=2,
        )
    return np.array([[psi[2], psi[0]], [psi[1], psi[3]]])


def initial_state(name: str) -> np.ndarray:
    """One of the built-in preparations: excited, ground, mixed, coherent."""
    if name == "excited":
        return np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    if name == "ground":
        return np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    if name == "mixed":
        return np.array([[0.5, 0.0], [0.0, 0.5]], dtype=complex)
    if name == "coherent":
        return np.full((2, 2), 0.5, dtype=complex)
    raise DomainError(f"unknown initial state {name!r}; choose from {INITIAL_STATES}")


def max_abs(a: np.ndarray) -> float:
    """Max-norm of an array: the largest entry magnitude."""
    return float(np.max(np.abs(a)))


def hermiticity_defect(rho: np.ndarray) -> float:
    """Max-norm distance of a matrix from its own adjoint."""
    rho = np.asarray(rho)
    return max_abs(rho - rho.conj().T)


def trace_defect(rho: np.ndarray) -> float:
    """|Tr rho - 1| for a would-be density matrix."""
    return abs(complex(np.trace(np.asarray(rho))) - 1.0)


def check_density_matrix(rho: np.ndarray, tol: float = 1e-9) -> None:
    """Raise :class:`DomainError` unless ``rho`` is a physical state within ``tol``.

    Checks Hermiticity, unit trace and an eigenvalue floor at ``-tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {rho.shape}")
    if hermiticity_defect(rho) > tol:
        raise DomainError("density matrix is not Hermitian within tolerance")
    if trace_defect(rho) > tol:
        raise DomainError("density matrix does not have unit trace within tolerance")
    lowest = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if lowest < -tol:
        raise DomainError(f"density matrix has a negative eigenvalue {lowest:.3e}")
