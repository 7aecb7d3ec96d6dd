//! Class-KL/K algebra, dwell-time constructions, bound monitors and
//! convergence-time estimates.

pub mod convergence;
pub mod kl;
pub mod lyapunov;
pub mod monitor;

pub use convergence::{
    argmin_row, convergence_time_bound, optimal_threshold, threshold_sweep, two_stage_time, ConvergenceVariant,
};
pub use kl::{chi, dwell_from_beta, time_to_level, GainFn, KLExp};
pub use lyapunov::{is_hurwitz, lure_siios_estimate, lyapunov_residual, solve_lyapunov_small, spectral_abscissa};
pub use monitor::{theorem1_monitor, theorem2_monitor, MonitorReport, MonitorRow};
