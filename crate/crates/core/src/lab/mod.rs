//! Experiment layer: admissible initial data, the `T_good` clock, constant
//! estimators, the inequality registry, energy certificates and lifespan scans.

pub mod bounds;
pub mod config;
pub mod data;
pub mod estimate;
pub mod lifespan;
pub mod output;
pub mod registry;
pub mod sample;

pub use bounds::{
    energy_certificate, fit_growth_degree, gronwall_bound, t_good, Certificate, CertificateKind,
    GronwallKind, GrowthFit,
};
pub use config::{preset, ExperimentConfig, InitialData, Resolved, SolverSettings, MIN_K};
pub use data::{gen_initial_data, initial_state, Admissibility, DataSpec, Profile};
pub use estimate::{estimate_tame_constant, estimate_w_constant, TameEstimate};
pub use lifespan::{lifespan_scan, LifespanCell, LifespanGrid};
pub use registry::{inequality_check, RatioReport, RegistryOptions, REGISTRY};
