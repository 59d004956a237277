"""Propagation of nonclassical light through disordered coupled-waveguide arrays."""

from .disorder import DisorderSpec, Lcg64, derive_seed, ensemble_seed, sample_betas, standard_normals
from .experiment import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    InvariantViolation,
    RealizationArchive,
    run_ensemble,
    run_experiment,
    wigner_pipeline,
)
from .lattice import GreenTrajectory, LatticeConfig, PivotBreakdown, lattice, ordered_lattice_oracle, propagate_green
from .observables import (
    EnsembleStats,
    G2Result,
    accumulate,
    g2,
    intensity_correlation,
    intensity_profile,
    intensity_variance,
    mean_intensity,
    participation_number,
    profile_distance,
)
from .phase_space import GridSpec, PndResult, WignerGrid, pnd, wigner_grid, wigner_oracle, wigner_point, wigner_values
from .states import FockVector, StateMoments, StateSpec, UnsupportedState, fock_vector, moments, parse_state, preset

__version__ = "0.1.0"
