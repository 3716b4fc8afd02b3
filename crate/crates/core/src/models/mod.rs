//! Model builders: Harper-like lattice operators, the finite-difference
//! magnetic Schrödinger operator, magnetic fields and their gauges.

mod builders;
mod field;

pub use builders::{
    build_harper, build_mag_schrodinger, build_mag_schrodinger_with, resolvent, Decay, ModelKind,
    ModelSpec, Potential, INVERSE_GOLDEN_MEAN, RESOLVENT_RESIDUAL_TOL,
};
pub use field::{
    line_phase, magnetic_phase, simpson, transverse_gauge, Embedding, FieldTerm, MagneticField,
    TransverseGauge, VectorPotential, SIMPSON_PANELS,
};
