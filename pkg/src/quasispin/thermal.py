"""Thermal occupation and effective couplings of the quasi-spin ensemble.

The two-level atoms exchange excitation pairs through a lossy cavity mode,
so the effective exchange integral and the dressed level splitting inherit
a temperature dependence through the mode's Planck occupation. This module
evaluates that occupation, the resulting couplings, and the microscopic
two-photon amplitude they derive from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "DomainError",
    "SingularLevelError",
    "Variant",
    "ModelParams",
    "Couplings",
    "TransitionLevel",
    "MicroscopicLevels",
    "mean_photon_number",
    "couplings_at",
    "transition_amplitude",
    "coupling_constants",
]

# Relative tolerance below which a denominator counts as resonant.
SINGULARITY_RTOL = 1e-12


class DomainError(ValueError):
    """An input lies outside the physical domain of an operation."""


class SingularLevelError(DomainError):
    """An intermediate level is resonant with the cavity mode."""


class Variant(str, Enum):
    """How the couplings respond to temperature.

    PROPOSED keeps the cavity occupation in the couplings, so the exchange
    integral grows with temperature. TRADITIONAL pins the occupation to
    zero, freezing the couplings at their vacuum values.
    """

    PROPOSED = "proposed"
    TRADITIONAL = "traditional"


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs of the exchange model.

    All energies (``omega21``, ``chi``, ``omega_k``) and the temperature
    share one unit system; only their ratios matter. ``omega_k`` defaults
    to half the bare splitting, the two-photon resonance point.
    """

    omega21: float  # bare two-level splitting, > 0
    chi: float  # vacuum exchange coupling, > 0
    omega_k: float | None = None  # cavity mode energy, > 0
    n_atoms: int = 100  # ensemble size, >= 2
    variant: Variant = Variant.PROPOSED

    def __post_init__(self) -> None:
        if self.omega21 <= 0.0:
            raise DomainError(f"omega21 must be positive, got {self.omega21}")
        if self.chi <= 0.0:
            raise DomainError(f"chi must be positive, got {self.chi}")
        if self.omega_k is None:
            object.__setattr__(self, "omega_k", 0.5 * self.omega21)
        if self.omega_k <= 0.0:
            raise DomainError(f"omega_k must be positive, got {self.omega_k}")
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 2:
            raise DomainError(f"n_atoms must be an integer >= 2, got {self.n_atoms}")
        object.__setattr__(self, "variant", Variant(self.variant))


@dataclass(frozen=True)
class Couplings:
    """Effective couplings of the ensemble at one temperature."""

    theta: float  # temperature, >= 0
    nbar: float  # cavity occupation entering the couplings
    omega: float  # dressed level splitting
    lam: float  # exchange integral, > 0
    varpi: float  # splitting left over after exchange, omega - lam


def mean_photon_number(theta: float, omega_k: float) -> float:
    """Planck occupation of a mode of energy ``omega_k`` at temperature ``theta``.

    Evaluated as ``exp(-x) / (1 - exp(-x))`` with ``x = omega_k / theta``,
    which is finite for every ``theta >= 0``: no overflow for small
    temperatures and no precision loss for large ones.
    """
    if omega_k <= 0.0:
        raise DomainError(f"omega_k must be positive, got {omega_k}")
    if theta < 0.0:
        raise DomainError(f"theta must be non-negative, got {theta}")
    if theta == 0.0:
        return 0.0
    x = omega_k / theta
    return math.exp(-x) / -math.expm1(-x)


def couplings_at(params: ModelParams, theta: float) -> Couplings:
    """Effective couplings at temperature ``theta``.

    The exchange integral is ``chi * (1 + 2*nbar)`` and the dressed
    splitting is ``omega21 - 2*nbar**2*chi``. The TRADITIONAL variant
    evaluates both at ``nbar = 0`` regardless of temperature.
    """
    if params.variant is Variant.TRADITIONAL:
        if theta < 0.0:
            raise DomainError(f"theta must be non-negative, got {theta}")
        nbar = 0.0
    else:
        nbar = mean_photon_number(theta, params.omega_k)
    omega = params.omega21 - 2.0 * nbar * nbar * params.chi
    lam = params.chi * (1.0 + 2.0 * nbar)
    return Couplings(theta=theta, nbar=nbar, omega=omega, lam=lam, varpi=omega - lam)


@dataclass(frozen=True)
class TransitionLevel:
    """One intermediate level of the two-photon transition chain."""

    proj1: float  # dipole projection linking the level to the lower state
    proj2: float  # dipole projection linking the upper state to the level
    omega_a1: float  # level energy measured from the lower state
    omega_2a: float  # upper-state energy measured from the level


@dataclass(frozen=True)
class MicroscopicLevels:
    """Intermediate-level table plus the cavity linewidth."""

    levels: tuple[TransitionLevel, ...]
    gamma_cav: float  # cavity half-linewidth, > 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(self.levels))
        if self.gamma_cav <= 0.0:
            raise DomainError(f"gamma_cav must be positive, got {self.gamma_cav}")


def transition_amplitude(levels: MicroscopicLevels, omega_k: float) -> float:
    """Squared two-photon amplitude summed over the intermediate levels.

    Each level contributes
    ``proj1*proj2*(omega_a1 - omega_2a) / ((omega_2a - omega_k)*(omega_a1 - omega_k))``;
    the coherent sum is squared, so the result is >= 0 and individual terms
    may cancel.

    Raises
    ------
    SingularLevelError
        If ``omega_k`` is resonant with either denominator of some level,
        within relative tolerance 1e-12.
    """
    total = 0.0
    for index, level in enumerate(levels.levels):
        for name, freq in (("omega_2a", level.omega_2a), ("omega_a1", level.omega_a1)):
            if abs(freq - omega_k) <= SINGULARITY_RTOL * max(abs(freq), abs(omega_k)):
                raise SingularLevelError(
                    f"level {index}: {name} = {freq} is resonant with omega_k = {omega_k}"
                )
        total += (
            level.proj1
            * level.proj2
            * (level.omega_a1 - level.omega_2a)
            / ((level.omega_2a - omega_k) * (level.omega_a1 - omega_k))
        )
    return total * total


def coupling_constants(
    amplitude: float, gamma_cav: float, omega21: float, omega_k: float
) -> tuple[float, float]:
    """Split the two-photon amplitude into exchange and decay couplings.

    Returns ``(chi, gamma)``: the dispersive exchange coupling and the
    two-photon decay rate, sharing the Lorentzian denominator
    ``delta**2 + 4*gamma_cav**2`` with ``delta = 2*omega_k - omega21``.
    ``chi`` carries the sign of the detuning ``delta`` while ``gamma`` is
    always >= 0; their ratio is ``delta / (2*gamma_cav)``.
    """
    if amplitude < 0.0:
        raise DomainError(f"amplitude must be non-negative, got {amplitude}")
    if gamma_cav <= 0.0:
        raise DomainError(f"gamma_cav must be positive, got {gamma_cav}")
    delta = 2.0 * omega_k - omega21
    denom = delta * delta + 4.0 * gamma_cav * gamma_cav
    return amplitude * delta / denom, amplitude * 2.0 * gamma_cav / denom
