//! User-facing layer: configuration, parameter sweeps, contour extraction,
//! seeded shot sampling, figure presets, and CSV output. Everything here is
//! double precision.

pub mod config;
pub mod contour;
pub mod csv;
pub mod presets;
pub mod shots;
pub mod sweep;

pub use config::{Config, ConfigError, Engine, PathKind};
pub use contour::{extract_contours, ContourSet, ContourVertex, DEFAULT_CONTOUR_TOL};
pub use presets::FigurePreset;
pub use shots::{readout_from_propagator, sample_shots, ShotEnsemble, ShotsError};
pub use sweep::{
    run_compare_sweep, run_floquet_sweep, run_grid_sweep, run_tau_sweep, ComparePoint,
    FloquetPoint, SweepGrid, TauPoint,
};

/// Numerical-failure codes recorded per sweep point (0 means success).
pub mod error_code {
    pub const OK: u32 = 0;
    pub const NO_CONVERGENCE: u32 = 1;
    pub const SINGULAR: u32 = 2;
    pub const DEFECTIVE: u32 = 3;
    pub const NORMALIZATION_UNDERFLOW: u32 = 4;
    pub const STEP_TOO_LARGE: u32 = 5;
    pub const ALL_DISCARDED: u32 = 6;
    pub const OTHER: u32 = 7;
}

use crate::lindblad::LindbladError;
use crate::propagator::PropagateError;
use crate::qmath::MatError;
use crate::workstats::WorkStatsError;

pub fn code_of_propagate(e: &PropagateError) -> u32 {
    match e {
        PropagateError::NoConvergence { .. } => error_code::NO_CONVERGENCE,
        PropagateError::Mat(MatError::Singular) => error_code::SINGULAR,
        PropagateError::Mat(MatError::Defective) => error_code::DEFECTIVE,
        _ => error_code::OTHER,
    }
}

pub fn code_of_workstats(e: &WorkStatsError) -> u32 {
    match e {
        WorkStatsError::NormalizationUnderflow { .. } => error_code::NORMALIZATION_UNDERFLOW,
        _ => error_code::OTHER,
    }
}

pub fn code_of_lindblad(e: &LindbladError) -> u32 {
    match e {
        LindbladError::StepTooLarge { .. } => error_code::STEP_TOO_LARGE,
        LindbladError::NormalizationUnderflow { .. } => error_code::NORMALIZATION_UNDERFLOW,
        _ => error_code::OTHER,
    }
}
