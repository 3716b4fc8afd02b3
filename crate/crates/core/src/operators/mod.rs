//! Kernel operators on finite grids: Schur–Holmgren norms, truncations,
//! magnetic phase twists and phase validation.

mod grid;
mod kernel;
mod norms;
mod phase;

pub use grid::{bracket, distance, Grid, Point};
pub use kernel::{KernelFile, KernelOperator, HERMITIAN_TOL};
pub use norms::{
    sh_norm, truncate, twist, twist_tabulated, uniformity_defect, Attained, ShNormResult,
};
pub use phase::{validate_phase, PhaseFunction, PhaseReport, PhaseTable, DEFAULT_TRIPLES};
