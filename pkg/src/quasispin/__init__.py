"""Thermodynamics of cavity-mediated quasi-spin exchange.

The coupling between the quasi-spins is carried by a thermally occupied
cavity mode, so the exchange strength itself grows with temperature. The
package solves the resulting self-consistent mean-field problem, locates
the order/disorder transitions (including reentrant ones), cross-checks
the polarization against exact fixed-spin diagonalization at finite atom
number, and derives the coupling constants from a microscopic level table.
"""

from .thermal import (
    Couplings,
    DomainError,
    MicroscopicLevels,
    ModelParams,
    SingularLevelError,
    SINGULARITY_RTOL,
    TransitionLevel,
    Variant,
    coupling_constants,
    couplings_at,
    mean_photon_number,
    transition_amplitude,
)
from .meanfield import (
    CriticalPoint,
    GapSolution,
    NoCriticalPointError,
    Phase,
    TransitionKind,
    ValidityReport,
    critical_temperatures,
    free_energy_per_atom,
    gap_solve,
    is_ordered,
    ordering_measure,
    population_inversion,
    rz_relaxation,
    validity_report,
    zero_temperature_solution,
)
from .exact import (
    DickeSpectrum,
    FiniteSizeComparison,
    GibbsObservables,
    MAX_LADDER_ATOMS,
    compare_meanfield,
    dicke_spectrum,
    gibbs_observables,
    ground_state_m,
)
from .sweep import (
    BoundaryPoint,
    OutputFormat,
    PhaseMap,
    PopulationPoint,
    RatioSeries,
    SweepConfig,
    THERMO_COLUMNS,
    ThermoPoint,
    boundary_records,
    critical_point_records,
    default_theta_max,
    figure1_records,
    figure1_series,
    figure2_records,
    figure2_series,
    phase_map,
    phase_map_records,
    plot_script,
    proposed_normalizer,
    serialize,
    temperature_sweep,
    thermo_point,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # thermal
    "Couplings",
    "DomainError",
    "MicroscopicLevels",
    "ModelParams",
    "SingularLevelError",
    "SINGULARITY_RTOL",
    "TransitionLevel",
    "Variant",
    "coupling_constants",
    "couplings_at",
    "mean_photon_number",
    "transition_amplitude",
    # meanfield
    "CriticalPoint",
    "GapSolution",
    "NoCriticalPointError",
    "Phase",
    "TransitionKind",
    "ValidityReport",
    "critical_temperatures",
    "free_energy_per_atom",
    "gap_solve",
    "is_ordered",
    "ordering_measure",
    "population_inversion",
    "rz_relaxation",
    "validity_report",
    "zero_temperature_solution",
    # exact
    "DickeSpectrum",
    "FiniteSizeComparison",
    "GibbsObservables",
    "MAX_LADDER_ATOMS",
    "compare_meanfield",
    "dicke_spectrum",
    "gibbs_observables",
    "ground_state_m",
    # sweep
    "BoundaryPoint",
    "OutputFormat",
    "PhaseMap",
    "PopulationPoint",
    "RatioSeries",
    "SweepConfig",
    "THERMO_COLUMNS",
    "ThermoPoint",
    "boundary_records",
    "critical_point_records",
    "default_theta_max",
    "figure1_records",
    "figure1_series",
    "figure2_records",
    "figure2_series",
    "phase_map",
    "phase_map_records",
    "plot_script",
    "proposed_normalizer",
    "serialize",
    "temperature_sweep",
    "thermo_point",
]
