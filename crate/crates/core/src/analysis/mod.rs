//! Parameter sweeps, Hölder fits, the resolvent comparison for magnetic
//! Schrödinger operators and the truncation pipeline for heavy tails.

mod experiments;
mod fit;
mod jobs;

pub use experiments::{
    alpha0_pipeline, check_b_grid, harper_family, hash_json, sweep_defect, sweep_hausdorff,
    sweep_hausdorff_from, theorem2_compare, Alpha0Report, Alpha0Row, HarperFamily, Theorem2Tables,
    CHAIN_SLACK,
};
pub use fit::{
    fit_holder, log_spaced, HolderFit, Quantity, SweepTable, MIN_FIT_ROWS, ZERO_THRESHOLD,
};
pub use jobs::run_jobs;
