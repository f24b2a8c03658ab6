//! Pseudospectral solver for the 2D Boussinesq system with fractional
//! dissipation on the periodic torus, with attractor diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod inequalities;
pub mod integrator;
pub mod random;
pub mod rhs;
pub mod stats;

pub use eigen::{eigen_index, project_high, project_low, Basis, EigenIndex, Eigenfunction, Projector};
pub use error::{Error, Result};
pub use field::{lp_norm_samples, Axis, SpectralField, Transform};
pub use grid::{make_grid, GridSpec, DOMAIN_SIZE};
pub use rhs::{
    make_forcing, temperature_rhs, velocity_from_vorticity, vorticity_rhs, Dynamics, FlowState, Forcing,
    ForcingMode, ForcingSpec, Model, Phase, PhysParams,
};
pub use integrator::{
    cfl_dt, courant_number, max_speed, read_checkpoint, spin_up, step, write_checkpoint, IntegratorConfig, Scheme, SpinUp, Stepper,
};
pub use experiments::{
    difference_norm, projected_difference_norm, run_determining_modes, run_squeezing, run_trajectory_pair,
    DeterminingMode, DeterminingResult, ExperimentConfig, GronwallRecord, SqueezePair, SqueezeSample,
    SqueezingResult,
};
pub use inequalities::{
    check_commutator, check_interpolation, check_kato_ponce, check_poincare, check_sobolev, check_uniform_gronwall,
    commutator_field, random_gronwall_instance, random_samples, GronwallInstance, HolderExponents, InequalityReport,
};
pub use diagnostics::{
    bound_report, compute_aggregates, compute_m, compute_n, determining_threshold, dimension_bound,
    energy_budget_defects, gauss_constant, monitor_apriori, norm_record, rho_m, sobolev_constant, Aggregates,
    AprioriMargins, BoundReport, BudgetTracker, Exponents, NValue, NormRecord, Threshold,
};
