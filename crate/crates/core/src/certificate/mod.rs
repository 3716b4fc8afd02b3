//! Partition of unity, the Γ-maps, the approximate-resolvent defect S(z) and
//! the resolvent-set certificate built on it.

mod defect;
mod gamma;
mod partition;

pub use defect::{
    certificate_of, certify_resolvent_point, default_z_values, defect, defect_split, Certificate,
    DefectEngine, DefectParts, DefectReport, ResolventPoint, CERTIFY_SLACK, SPECTRAL_MARGIN,
};
pub use gamma::{family_norm, gamma, gamma_hat, gamma_tilde};
pub use partition::{build_partition, smoothstep, Cell, PartitionOfUnity};
