//! Hermitian eigenvalues, Hausdorff distance between spectra, operator norms.

use faer::{c64, Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::KernelOperator;

/// Relative asymmetry accepted by [`eigvalsh`].
pub const EIGVALSH_ASYMMETRY_TOL: f64 = 1e-10;

/// Sorted eigenvalues, multiplicity kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    source_norm: f64,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "spectrum entries must be finite".into(),
            ));
        }
        values.sort_by(f64::total_cmp);
        let source_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Spectrum {
            values,
            source_norm,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ‖H‖ of the operator this spectrum came from (max |λ| for hermitian H).
    pub fn source_norm(&self) -> f64 {
        self.source_norm
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// On-disk spectrum: eigenvalues plus run metadata.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectrumFile {
    pub values: Vec<f64>,
    pub model_hash: String,
    pub b: f64,
    pub n: usize,
}

fn hermitian_part(m: &Mat<c64>) -> Mat<c64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

fn relative_asymmetry(m: &Mat<c64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            scale = scale.max(m[(i, j)].norm());
            if i <= j {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

pub(crate) fn hermitian_eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    let asym = relative_asymmetry(m);
    if asym > EIGVALSH_ASYMMETRY_TOL {
        return Err(Error::NotHermitian(asym));
    }
    hermitian_part(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence)
}

/// Eigenvalues of a hermitian operator, sorted nondecreasing.
///
/// Rejects operators whose relative asymmetry exceeds
/// [`EIGVALSH_ASYMMETRY_TOL`], whatever their flag says.
pub fn eigvalsh(h: &KernelOperator) -> Result<Spectrum> {
    Spectrum::new(hermitian_eigenvalues(h.matrix())?)
}

/// Largest `sup_a inf_b |a − b|` over a sorted `a` against a sorted `b`.
fn directed(a: &[f64], b: &[f64]) -> f64 {
    let mut j = 0;
    let mut worst = 0.0f64;
    for &x in a {
        while j + 1 < b.len() && b[j + 1] <= x {
            j += 1;
        }
        let mut d = (x - b[j]).abs();
        if j + 1 < b.len() {
            d = d.min((x - b[j + 1]).abs());
        }
        worst = worst.max(d);
    }
    worst
}

/// Hausdorff distance between the two spectra viewed as sets, by a linear
/// two-pointer sweep over the sorted values.
pub fn hausdorff(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    hausdorff_sorted(a.values(), b.values())
}

/// [`hausdorff`] on raw sorted slices.
pub fn hausdorff_sorted(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    Ok(directed(a, b).max(directed(b, a)))
}

/// dist(z, σ) = min over λ of |z − λ|.
pub fn spectral_distance(z: c64, s: &Spectrum) -> Result<f64> {
    let v = s.values();
    if v.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let k = v.partition_point(|&l| l < z.re);
    let mut best = f64::INFINITY;
    for idx in [k.wrapping_sub(1), k] {
        if let Some(&l) = v.get(idx) {
            best = best.min((z - c64::new(l, 0.0)).norm());
        }
    }
    Ok(best)
}

pub(crate) fn matrix_op_norm(m: &Mat<c64>, hermitian: bool) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    if hermitian {
        let ev = hermitian_eigenvalues(m)?;
        return Ok(ev.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    }
    let gram = m.adjoint() * m;
    let ev = hermitian_part(&gram)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence)?;
    Ok(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// L² operator norm: the largest singular value, from the eigenvalues of T*T
/// (or max |λ| when the operator is flagged hermitian).
pub fn op_norm(t: &KernelOperator) -> Result<f64> {
    matrix_op_norm(t.matrix(), t.is_hermitian())
}
