// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod certificate;
pub mod cli;
pub mod error;
pub mod models;
pub mod operators;
pub mod spectral;

pub use error::{Error, Result};
