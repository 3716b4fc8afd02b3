use faer::{c64, Mat};

use super::partition::PartitionOfUnity;
use crate::error::{Error, Result};
use crate::models::resolvent;
use crate::operators::{sh_norm, twist_tabulated, KernelOperator, PhaseFunction, PhaseTable};
use crate::spectral::{eigvalsh, matrix_op_norm, spectral_distance, Spectrum};

/// Relative margin `dist(z, σ(H)) > MARGIN · ‖H‖` demanded of every z.
pub const SPECTRAL_MARGIN: f64 = 1e-6;

/// `‖S(z)‖ ≤ 1 − CERTIFY_SLACK` certifies z ∈ ρ(H_b).
pub const CERTIFY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectReport {
    pub b: f64,
    pub z: c64,
    pub norm_s: f64,
    pub norm_s1: f64,
    pub norm_s2: f64,
    /// `|b|^{ε/2} ‖H‖₁,ε / dist(z, σ(H))`, the defect envelope without its constant.
    pub bound_value: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub in_resolvent: bool,
    pub margin: f64,
}

/// S(z) together with its two pieces. S₁ collects the phase defects
/// `e^{ib fl} − 1`, S₂ the commutators of H with the cutoffs.
#[derive(Debug, Clone)]
pub struct DefectParts {
    pub s: KernelOperator,
    pub s1: KernelOperator,
    pub s2: KernelOperator,
}

impl DefectParts {
    /// ‖S − S₁ − S₂‖, which vanishes up to rounding.
    pub fn split_residual(&self) -> Result<f64> {
        let n = self.s.len();
        let m = self.s.matrix();
        let (a, b) = (self.s1.matrix(), self.s2.matrix());
        let diff = Mat::from_fn(n, n, |i, j| m[(i, j)] - a[(i, j)] - b[(i, j)]);
        matrix_op_norm(&diff, false)
    }
}

/// R(z), H·R(z) and dist(z, σ(H)) for one spectral parameter.
#[derive(Debug, Clone)]
pub struct ResolventPoint {
    z: c64,
    r: Mat<c64>,
    hr: Mat<c64>,
    distance: f64,
}

impl ResolventPoint {
    pub fn z(&self) -> c64 {
        self.z
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }
}

/// Everything about (H, φ) that does not depend on b or z: the tabulated
/// phase, σ(H) and ‖H‖₁,ε. Reused across a sweep.
#[derive(Debug, Clone)]
pub struct DefectEngine {
    h: KernelOperator,
    phi: PhaseFunction,
    table: PhaseTable,
    spectrum: Spectrum,
    epsilon: f64,
    sh_eps: f64,
}

impl DefectEngine {
    /// `epsilon` is the Hölder parameter min{α, 1} of the model.
    pub fn new(h: &KernelOperator, phi: &PhaseFunction, epsilon: f64) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::InvalidArgument(
                "defect needs a hermitian operator".into(),
            ));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        Ok(DefectEngine {
            h: h.clone(),
            phi: phi.clone(),
            table: PhaseTable::new(h.grid(), phi),
            spectrum: eigvalsh(h)?,
            epsilon,
            sh_eps: sh_norm(h, epsilon).value,
        })
    }

    pub fn operator(&self) -> &KernelOperator {
        &self.h
    }

    pub fn phase(&self) -> &PhaseFunction {
        &self.phi
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// ‖H‖₁,ε.
    pub fn sh_norm_epsilon(&self) -> f64 {
        self.sh_eps
    }

    pub fn bound_value(&self, b: f64, distance: f64) -> f64 {
        b.abs().powf(0.5 * self.epsilon) * self.sh_eps / distance
    }

    /// Resolvent data at z, refusing points within `SPECTRAL_MARGIN · ‖H‖` of σ(H).
    pub fn at(&self, z: c64) -> Result<ResolventPoint> {
        let distance = spectral_distance(z, &self.spectrum)?;
        let required = SPECTRAL_MARGIN * self.spectrum.source_norm();
        if !(distance > required) {
            return Err(Error::TooCloseToSpectrum {
                z,
                distance,
                required,
            });
        }
        let r = resolvent(&self.h, z)?.into_matrix();
        let hr = self.h.matrix() * &r;
        Ok(ResolventPoint { z, r, hr, distance })
    }

    fn check_partition(&self, b: f64, p: &PartitionOfUnity) -> Result<()> {
        if p.grid().as_ref() != self.h.grid().as_ref() {
            return Err(Error::InvalidArgument(
                "partition lives on a different grid".into(),
            ));
        }
        if (p.b() - b.abs()).abs() > 1e-12 * b.abs() {
            return Err(Error::InvalidArgument(format!(
                "partition was built for b = {}, not for |b| = {}",
                p.b(),
                b.abs()
            )));
        }
        Ok(())
    }

    /// Assembles S = (H_b − z) Γ(T(z)) − Id by a direct product, and S₁, S₂
    /// cell by cell, with `T_γ = u_γ ĝ_γ R ĝ_γ ū_γ`, `u_γ = e^{ibφ(·, b^{−1/2}γ)}`.
    pub fn assemble(
        &self,
        rp: &ResolventPoint,
        b: f64,
        p: &PartitionOfUnity,
    ) -> Result<DefectParts> {
        let grid = self.h.grid().clone();
        let n = grid.len();
        let wrap = |m: Mat<c64>| KernelOperator::from_matrix_unchecked(grid.clone(), m, false);
        if b == 0.0 {
            return Ok(DefectParts {
                s: wrap(Mat::zeros(n, n)),
                s1: wrap(Mat::zeros(n, n)),
                s2: wrap(Mat::zeros(n, n)),
            });
        }
        self.check_partition(b, p)?;
        let h = self.h.matrix();
        let pts = grid.points();
        let mut gamma = Mat::<c64>::zeros(n, n);
        let mut s1 = Mat::<c64>::zeros(n, n);
        let mut s2 = Mat::<c64>::zeros(n, n);

        for cell in p.cells() {
            let idx = &cell.support;
            let g = &cell.values;
            let k = idx.len();
            let pc: Vec<f64> = pts.iter().map(|x| self.phi.eval(x, &cell.center)).collect();
            let u: Vec<c64> = pc.iter().map(|&t| unimodular(b * t)).collect();

            let w = Mat::from_fn(k, k, |a, y| {
                rp.r[(idx[a], idx[y])] * (g[a] * g[y]) * u[idx[y]].conj()
            });
            for y in 0..k {
                for a in 0..k {
                    gamma[(idx[a], idx[y])] += u[idx[a]] * w[(a, y)];
                }
            }

            let d = Mat::from_fn(n, k, |x, a| {
                let ia = idx[a];
                let fl = self.table.get(x, ia) + pc[ia] - pc[x];
                h[(x, ia)] * expm1_i(b * fl)
            });
            let dw = &d * &w;
            let hcols = Mat::from_fn(n, k, |x, a| h[(x, idx[a])]);
            let hw = &hcols * &w;
            for y in 0..k {
                for x in 0..n {
                    s1[(x, idx[y])] += u[x] * dw[(x, y)];
                    s2[(x, idx[y])] += u[x] * hw[(x, y)];
                }
                let iy = idx[y];
                let right = g[y] * u[iy].conj();
                for a in 0..k {
                    let ia = idx[a];
                    s2[(ia, iy)] -= u[ia] * g[a] * rp.hr[(ia, iy)] * right;
                }
            }
        }

        let hb = twist_tabulated(&self.h, &self.table, b).shift(-rp.z);
        let mut s = hb.matrix() * &gamma;
        for i in 0..n {
            s[(i, i)] -= c64::new(1.0, 0.0);
        }
        Ok(DefectParts {
            s: wrap(s),
            s1: wrap(s1),
            s2: wrap(s2),
        })
    }

    pub fn report(
        &self,
        rp: &ResolventPoint,
        b: f64,
        p: &PartitionOfUnity,
    ) -> Result<DefectReport> {
        let parts = self.assemble(rp, b, p)?;
        self.report_from_parts(rp, b, &parts)
    }

    pub fn report_from_parts(
        &self,
        rp: &ResolventPoint,
        b: f64,
        parts: &DefectParts,
    ) -> Result<DefectReport> {
        let norm_s = matrix_op_norm(parts.s.matrix(), false)?;
        let norm_s1 = matrix_op_norm(parts.s1.matrix(), false)?;
        let norm_s2 = matrix_op_norm(parts.s2.matrix(), false)?;
        Ok(DefectReport {
            b,
            z: rp.z,
            norm_s,
            norm_s1,
            norm_s2,
            bound_value: self.bound_value(b, rp.distance),
            certified: norm_s <= 1.0 - CERTIFY_SLACK,
        })
    }
}

fn unimodular(theta: f64) -> c64 {
    let (s, c) = theta.sin_cos();
    c64::new(c, s)
}

/// e^{iθ} − 1 without cancellation for small θ.
fn expm1_i(theta: f64) -> c64 {
    let half = (0.5 * theta).sin();
    c64::new(-2.0 * half * half, theta.sin())
}

/// Defect report of the approximate resolvent of H_b at z.
pub fn defect(
    h: &KernelOperator,
    phi: &PhaseFunction,
    b: f64,
    z: c64,
    p: &PartitionOfUnity,
    epsilon: f64,
) -> Result<DefectReport> {
    let engine = DefectEngine::new(h, phi, epsilon)?;
    let rp = engine.at(z)?;
    engine.report(&rp, b, p)
}

/// The phase piece S₁ and the commutator piece S₂ of S(z).
pub fn defect_split(
    h: &KernelOperator,
    phi: &PhaseFunction,
    b: f64,
    z: c64,
    p: &PartitionOfUnity,
) -> Result<(KernelOperator, KernelOperator)> {
    let engine = DefectEngine::new(h, phi, 1.0)?;
    let rp = engine.at(z)?;
    let parts = engine.assemble(&rp, b, p)?;
    Ok((parts.s1, parts.s2))
}

/// `‖S(z)‖ < 1` puts z in the resolvent set of H_b.
pub fn certify_resolvent_point(
    h: &KernelOperator,
    phi: &PhaseFunction,
    b: f64,
    z: c64,
    p: &PartitionOfUnity,
    epsilon: f64,
) -> Result<Certificate> {
    let r = defect(h, phi, b, z, p, epsilon)?;
    Ok(certificate_of(&r))
}

pub fn certificate_of(r: &DefectReport) -> Certificate {
    Certificate {
        in_resolvent: r.certified,
        margin: 1.0 - r.norm_s,
    }
}

/// Default spectral parameters: real points below σ(H) at distances 1, 2, 4
/// and the complex point `min σ(H) − 1 + i`.
pub fn default_z_values(spectrum: &Spectrum) -> Vec<c64> {
    let lo = spectrum.min().unwrap_or(0.0);
    vec![
        c64::new(lo - 1.0, 0.0),
        c64::new(lo - 2.0, 0.0),
        c64::new(lo - 4.0, 0.0),
        c64::new(lo - 1.0, 1.0),
    ]
}
