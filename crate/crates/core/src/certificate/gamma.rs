//! The Γ-maps assembling per-cell operators into one operator on the grid.

use faer::{c64, Mat};

use super::partition::PartitionOfUnity;
use crate::error::{Error, Result};
use crate::operators::KernelOperator;
use crate::spectral::op_norm;

fn check_family(family: &[KernelOperator], p: &PartitionOfUnity) -> Result<()> {
    if family.len() != p.len() {
        return Err(Error::InvalidArgument(format!(
            "family has {} operators, partition has {} cells",
            family.len(),
            p.len()
        )));
    }
    let n = p.grid().len();
    if let Some(t) = family.iter().find(|t| t.len() != n) {
        return Err(Error::Shape {
            rows: t.len(),
            cols: t.len(),
            points: n,
        });
    }
    Ok(())
}

/// |||T|||_∞ = max_γ ‖T_γ‖.
pub fn family_norm(family: &[KernelOperator]) -> Result<f64> {
    family
        .iter()
        .try_fold(0.0f64, |m, t| Ok(m.max(op_norm(t)?)))
}

/// Γ(T) = Σ_γ χ_γ T_γ χ_γ, with χ_γ the indicator of the support of cell γ.
pub fn gamma(family: &[KernelOperator], p: &PartitionOfUnity) -> Result<KernelOperator> {
    check_family(family, p)?;
    let n = p.grid().len();
    let mut out = Mat::<c64>::zeros(n, n);
    let mut hermitian = true;
    for (cell, t) in p.cells().iter().zip(family) {
        hermitian &= t.is_hermitian();
        let m = t.matrix();
        for &j in &cell.support {
            for &i in &cell.support {
                out[(i, j)] += m[(i, j)];
            }
        }
    }
    Ok(KernelOperator::from_matrix_unchecked(
        p.grid().clone(),
        out,
        hermitian,
    ))
}

/// Γ̂_A(T)ψ = Σ_γ χ_γ A |T_γ χ_γ ψ|, for A with entrywise nonnegative entries.
/// The modulus is taken pointwise, so the map is nonlinear.
pub fn gamma_hat(
    a: &KernelOperator,
    family: &[KernelOperator],
    p: &PartitionOfUnity,
    psi: &[c64],
) -> Result<Vec<f64>> {
    check_family(family, p)?;
    let n = p.grid().len();
    if a.len() != n || psi.len() != n {
        return Err(Error::InvalidArgument(
            "operator or vector does not match the grid".into(),
        ));
    }
    let am = a.matrix();
    for j in 0..n {
        for i in 0..n {
            let v = am[(i, j)];
            if v.im != 0.0 || v.re < 0.0 {
                return Err(Error::NotPositivityPreserving(v));
            }
        }
    }
    Ok(accumulate(family, p, psi, |f| {
        (0..n)
            .map(|i| (0..n).map(|j| am[(i, j)].re * f[j]).sum())
            .collect()
    }))
}

/// Γ̃(T)ψ = Σ_γ χ_γ |T_γ χ_γ ψ|, the A = Id case of [`gamma_hat`].
pub fn gamma_tilde(
    family: &[KernelOperator],
    p: &PartitionOfUnity,
    psi: &[c64],
) -> Result<Vec<f64>> {
    check_family(family, p)?;
    if psi.len() != p.grid().len() {
        return Err(Error::InvalidArgument(
            "vector does not match the grid".into(),
        ));
    }
    Ok(accumulate(family, p, psi, |f| f))
}

fn accumulate(
    family: &[KernelOperator],
    p: &PartitionOfUnity,
    psi: &[c64],
    apply_a: impl Fn(Vec<f64>) -> Vec<f64>,
) -> Vec<f64> {
    let n = psi.len();
    let mut out = vec![0.0; n];
    for (cell, t) in p.cells().iter().zip(family) {
        let mut local = vec![c64::new(0.0, 0.0); n];
        for &i in &cell.support {
            local[i] = psi[i];
        }
        let modulus: Vec<f64> = t.apply(&local).iter().map(|v| v.norm()).collect();
        let image = apply_a(modulus);
        for &i in &cell.support {
            out[i] += image[i];
        }
    }
    out
}
