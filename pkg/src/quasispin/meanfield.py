"""Equilibrium mean-field thermodynamics of the exchange ensemble.

Variational free energy per atom, the self-consistent order parameter,
critical temperatures, and the equilibrium population inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .thermal import Couplings, DomainError, ModelParams, couplings_at

__all__ = [
    "NoCriticalPointError",
    "Phase",
    "TransitionKind",
    "GapSolution",
    "CriticalPoint",
    "ValidityReport",
    "free_energy_per_atom",
    "gap_solve",
    "zero_temperature_solution",
    "ordering_measure",
    "is_ordered",
    "critical_temperatures",
    "population_inversion",
    "rz_relaxation",
    "validity_report",
]


class NoCriticalPointError(DomainError):
    """A scan range contains no order/disorder transition."""


class Phase(str, Enum):
    ORDERED = "ordered"
    DISORDERED = "disordered"


class TransitionKind(str, Enum):
    """Whether order appears or disappears as theta crosses the root."""

    ONSET = "onset"
    VANISHING = "vanishing"


@dataclass(frozen=True)
class GapSolution:
    """Self-consistent solution of the order-parameter equation."""

    c_abs: float  # |order parameter|, in [0, 1/2]
    splitting: float  # quasiparticle splitting at the solution
    phase: Phase
    residual: float  # |self-consistency residual| at c_abs
    free_energy_per_atom: float


@dataclass(frozen=True)
class CriticalPoint:
    theta_cr: float
    couplings_at_cr: Couplings
    kind: TransitionKind


@dataclass(frozen=True)
class ValidityReport:
    """Standing of the mean-field treatment against its validity bounds.

    Margins are signed distances to the bounds: positive means satisfied.
    """

    bloch_ok: bool  # |varpi| < n_atoms * lam (collective-coupling bound)
    window_ok: bool  # 2*nbar^2 < omega21/chi < 2*(1 + nbar)^2, strictly
    bloch_margin: float
    window_lower_margin: float
    window_upper_margin: float


def free_energy_per_atom(c_abs: float, cpl: Couplings) -> float:
    """Variational free energy per atom at fixed order-parameter magnitude.

    f(c) = -theta*ln(2*cosh(E/(2*theta))) + lam*c**2 with
    E = sqrt(varpi**2 + 4*lam**2*c**2), evaluated in the overflow-safe form
    -(E/2 + theta*ln(1 + exp(-E/theta))) + lam*c**2, which is finite for
    temperatures all the way down to the underflow limit.
    """
    if c_abs < 0.0:
        raise DomainError(f"c_abs must be non-negative, got {c_abs}")
    if cpl.theta <= 0.0:
        raise DomainError(f"free energy needs theta > 0, got {cpl.theta}")
    splitting = math.hypot(cpl.varpi, 2.0 * cpl.lam * c_abs)
    depth = 0.5 * splitting + cpl.theta * math.log1p(math.exp(-splitting / cpl.theta))
    return cpl.lam * c_abs * c_abs - depth


def _splitting_root(lam: float, theta: float) -> float:
    # Root of u(E) = lam*tanh(E/(2*theta))/E = 1 on (0, lam]. The caller
    # guarantees theta < lam/2, so u(0+) = lam/(2*theta) > 1 and u is
    # strictly decreasing: the bracket cannot fail. Bisection runs to float
    # convergence; it is ~60 cheap evaluations.
    def u(splitting: float) -> float:
        return lam * math.tanh(splitting / (2.0 * theta)) / splitting

    hi = lam
    if u(hi) >= 1.0:
        return hi  # tanh saturated: the root is lam to float precision
    lo = 0.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return hi
        if u(mid) > 1.0:
            lo = mid
        else:
            hi = mid


def gap_solve(cpl: Couplings, tol: float = 1e-10) -> GapSolution:
    """Solve the self-consistency condition for the order parameter.

    The nonzero branch satisfies ``lam*tanh(E/(2*theta))/E = 1``; the left
    side is strictly decreasing in E with limit ``lam/(2*theta)`` at 0, so a
    root exists on (0, lam] iff ``theta < lam/2``. The phase is ORDERED when
    that root exceeds ``|varpi|``, giving
    ``c = sqrt(E**2 - varpi**2)/(2*lam)`` — the global minimizer of the free
    energy; otherwise the minimum sits at c = 0.

    Parameters
    ----------
    cpl : Couplings
        Effective couplings; requires ``theta > 0`` and ``lam > 0``.
    tol : float
        Acceptance scale for the reported residual, in (0, 1e-3]. The
        bisection itself always runs to float convergence, so residuals are
        typically ~1e-16 regardless of ``tol``.
    """
    if cpl.theta <= 0.0:
        raise DomainError(f"gap_solve needs theta > 0, got {cpl.theta}")
    if cpl.lam <= 0.0:
        raise DomainError(f"gap_solve needs lam > 0, got {cpl.lam}")
    if not 0.0 < tol <= 1e-3:
        raise DomainError(f"tol must lie in (0, 1e-3], got {tol}")
    abs_varpi = abs(cpl.varpi)
    if cpl.theta < 0.5 * cpl.lam:
        splitting = _splitting_root(cpl.lam, cpl.theta)
        if splitting > abs_varpi:
            c_abs = math.sqrt(max(splitting * splitting - cpl.varpi * cpl.varpi, 0.0)) / (
                2.0 * cpl.lam
            )
            if c_abs > 0.0:
                recomputed = math.hypot(cpl.varpi, 2.0 * cpl.lam * c_abs)
                residual = abs(
                    c_abs
                    - cpl.lam * c_abs * math.tanh(recomputed / (2.0 * cpl.theta)) / recomputed
                )
                return GapSolution(
                    c_abs=c_abs,
                    splitting=splitting,
                    phase=Phase.ORDERED,
                    residual=residual,
                    free_energy_per_atom=free_energy_per_atom(c_abs, cpl),
                )
    return GapSolution(
        c_abs=0.0,
        splitting=abs_varpi,
        phase=Phase.DISORDERED,
        residual=0.0,
        free_energy_per_atom=free_energy_per_atom(0.0, cpl),
    )


def zero_temperature_solution(cpl: Couplings) -> GapSolution:
    """Analytic zero-temperature limit of :func:`gap_solve`.

    With tanh saturated to 1 the order parameter is
    ``sqrt(lam**2 - varpi**2)/(2*lam)`` when ``lam > |varpi|`` and 0
    otherwise, with free energies ``-(lam**2 + varpi**2)/(4*lam)`` and
    ``-|varpi|/2``. Sweeps use this for their theta = 0 endpoint.
    """
    abs_varpi = abs(cpl.varpi)
    if cpl.lam > abs_varpi:
        c_abs = math.sqrt(cpl.lam * cpl.lam - cpl.varpi * cpl.varpi) / (2.0 * cpl.lam)
        energy = -(cpl.lam * cpl.lam + cpl.varpi * cpl.varpi) / (4.0 * cpl.lam)
        return GapSolution(
            c_abs=c_abs,
            splitting=cpl.lam,
            phase=Phase.ORDERED,
            residual=0.0,
            free_energy_per_atom=energy,
        )
    return GapSolution(
        c_abs=0.0,
        splitting=abs_varpi,
        phase=Phase.DISORDERED,
        residual=0.0,
        free_energy_per_atom=-0.5 * abs_varpi,
    )


def ordering_measure(cpl: Couplings) -> float:
    """Signed measure whose positive sign marks the ordered phase.

    ``lam*tanh(|varpi|/(2*theta)) - |varpi|`` is strictly positive iff the
    self-consistent order parameter is nonzero, except exactly at
    ``varpi = 0`` where the ordering condition degenerates to
    ``theta < lam/2``.
    """
    if cpl.theta <= 0.0:
        raise DomainError(f"ordering measure needs theta > 0, got {cpl.theta}")
    return cpl.lam * math.tanh(abs(cpl.varpi) / (2.0 * cpl.theta)) - abs(cpl.varpi)


def is_ordered(cpl: Couplings) -> bool:
    """Phase classification consistent with :func:`gap_solve`."""
    if cpl.varpi == 0.0:
        return cpl.theta < 0.5 * cpl.lam
    return ordering_measure(cpl) > 0.0


def _sign_change_roots(
    fn: Callable[[float], float], grid: Sequence[float], tol: float
) -> list[tuple[float, TransitionKind]]:
    # Bisect every strict sign change between consecutive nonzero values.
    # Exact zeros are saturation plateaus (tanh rounds to 1.0 at marginal
    # couplings), not roots: counting them would invent transitions where
    # lam*tanh < lam = |varpi| holds strictly in exact arithmetic.
    values = [fn(x) for x in grid]
    nonzero = [(x, v) for x, v in zip(grid, values) if v != 0.0]
    roots: list[tuple[float, TransitionKind]] = []
    for (x0, v0), (x1, v1) in zip(nonzero, nonzero[1:]):
        if (v0 > 0.0) == (v1 > 0.0):
            continue
        lo, lo_val, hi = x0, v0, x1
        while True:
            mid = 0.5 * (lo + hi)
            # Refine to a quarter of the requested tolerance so roots found
            # from different grids agree within tol.
            if mid <= lo or mid >= hi or (hi - lo) <= 0.25 * tol * mid:
                break
            mid_val = fn(mid)
            if mid_val != 0.0 and (mid_val > 0.0) == (lo_val > 0.0):
                lo, lo_val = mid, mid_val
            else:
                hi = mid
        kind = TransitionKind.VANISHING if v0 > 0.0 else TransitionKind.ONSET
        roots.append((0.5 * (lo + hi), kind))
    return roots


def critical_temperatures(
    params: ModelParams,
    theta_range: tuple[float, float],
    grid_points: int = 512,
    tol: float = 1e-10,
) -> list[CriticalPoint]:
    """Locate all order/disorder transition temperatures in a range.

    Scans the ordering measure on a uniform theta grid and refines every
    strict sign change by bisection to relative tolerance ``tol``. ONSET
    means order appears above the root, VANISHING that it disappears above
    it. Results are ordered by increasing theta.

    Parameters
    ----------
    params : ModelParams
        Model inputs; the variant decides whether the couplings follow
        temperature.
    theta_range : (float, float)
        Scan range, ``0 < lo < hi``.
    grid_points : int
        Uniform grid size, >= 64. Doubling it moves any reported root by
        less than the tolerance.
    tol : float
        Relative tolerance on each root, > 0.
    """
    lo, hi = theta_range
    if not 0.0 < lo < hi:
        raise DomainError(f"theta_range must satisfy 0 < lo < hi, got {theta_range}")
    if grid_points < 64:
        raise DomainError(f"grid_points must be >= 64, got {grid_points}")
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    step = (hi - lo) / (grid_points - 1)
    grid = [lo + i * step for i in range(grid_points - 1)] + [hi]

    def measure(theta: float) -> float:
        return ordering_measure(couplings_at(params, theta))

    return [
        CriticalPoint(theta_cr=root, couplings_at_cr=couplings_at(params, root), kind=kind)
        for root, kind in _sign_change_roots(measure, grid, tol)
    ]


def population_inversion(cpl: Couplings, sol: GapSolution) -> float:
    """Equilibrium spin polarization per atom, in [-1/2, 1/2].

    Evaluates ``-(varpi/(2*E))*tanh(E/(2*theta))`` at the solution's
    splitting. In the ordered phase the self-consistency condition collapses
    this to ``-varpi/(2*lam)``, the relaxation stationary value.
    """
    splitting = sol.splitting
    if splitting == 0.0:
        return 0.0
    saturation = 1.0 if cpl.theta == 0.0 else math.tanh(splitting / (2.0 * cpl.theta))
    return -0.5 * (cpl.varpi / splitting) * saturation


def rz_relaxation(cpl: Couplings) -> float:
    """Stationary polarization of the relaxation dynamics, ``-varpi/(2*lam)``.

    Unclamped: the value leaves [-1/2, 1/2] once ``|varpi| > lam``, which is
    exactly where the equilibrium solution stops tracking it (the ordered
    phase requires ``|varpi| < lam``).
    """
    if cpl.lam <= 0.0:
        raise DomainError(f"rz_relaxation needs lam > 0, got {cpl.lam}")
    return -cpl.varpi / (2.0 * cpl.lam)


def validity_report(params: ModelParams, theta: float) -> ValidityReport:
    """Check the collective-coupling and critical-window bounds at ``theta``."""
    cpl = couplings_at(params, theta)
    bloch_margin = params.n_atoms * cpl.lam - abs(cpl.varpi)
    ratio = params.omega21 / params.chi
    lower_margin = ratio - 2.0 * cpl.nbar * cpl.nbar
    upper_margin = 2.0 * (1.0 + cpl.nbar) ** 2 - ratio
    return ValidityReport(
        bloch_ok=bloch_margin > 0.0,
        window_ok=lower_margin > 0.0 and upper_margin > 0.0,
        bloch_margin=bloch_margin,
        window_lower_margin=lower_margin,
        window_upper_margin=upper_margin,
    )
