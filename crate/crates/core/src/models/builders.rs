use std::f64::consts::PI;
use std::sync::Arc;

use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::field::{
    line_phase, magnetic_phase, Embedding, MagneticField, TransverseGauge, VectorPotential,
};
use crate::error::{Error, Result};
use crate::operators::{bracket, Grid, KernelOperator, PhaseFunction};
use crate::spectral::eigvalsh;

/// Residual bound `max |(H − z) R − Id|` accepted by [`resolvent`].
pub const RESOLVENT_RESIDUAL_TOL: f64 = 1e-9;

/// Inverse golden mean, the default quasi-periodic frequency.
pub const INVERSE_GOLDEN_MEAN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Exponentially decaying hopping.
    Harper,
    /// Power-law hopping.
    Longrange,
    /// Finite-difference magnetic Laplacian plus potential.
    MagSchrodinger,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Decay {
    /// `e^{−μ t}`
    Exponential { rate: f64 },
    /// `⟨t⟩^{−p}`
    PowerLaw { exponent: f64 },
}

impl Decay {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Decay::Exponential { rate } => (-rate * t).exp(),
            Decay::PowerLaw { exponent } => bracket(t).powf(-exponent),
        }
    }
}

/// V(x) = 2λ cos(2πσ x₁).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Potential {
    pub lambda: f64,
    pub sigma: f64,
}

impl Default for Potential {
    fn default() -> Self {
        Potential {
            lambda: 1.0,
            sigma: INVERSE_GOLDEN_MEAN,
        }
    }
}

impl Potential {
    pub fn zero() -> Self {
        Potential {
            lambda: 0.0,
            sigma: INVERSE_GOLDEN_MEAN,
        }
    }

    pub fn at(&self, x: &[f64; 2]) -> f64 {
        2.0 * self.lambda * (2.0 * PI * self.sigma * x[0]).cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub grid: Arc<Grid>,
    pub hopping: f64,
    pub decay: Decay,
    pub potential: Potential,
    pub embedding: Embedding,
}

impl ModelSpec {
    /// Chains default to the [`Embedding::Corner`] placement, planar grids to
    /// [`Embedding::Plane`].
    pub fn harper(grid: Grid, hopping: f64, rate: f64) -> Self {
        let embedding = if grid.dim() == 1 {
            Embedding::Corner
        } else {
            Embedding::Plane
        };
        ModelSpec {
            kind: ModelKind::Harper,
            grid: Arc::new(grid),
            hopping,
            decay: Decay::Exponential { rate },
            potential: Potential::default(),
            embedding,
        }
    }

    pub fn longrange(grid: Grid, hopping: f64, exponent: f64) -> Self {
        ModelSpec {
            kind: ModelKind::Longrange,
            decay: Decay::PowerLaw { exponent },
            ..ModelSpec::harper(grid, hopping, 1.0)
        }
    }

    pub fn mag_schrodinger(grid: Grid) -> Self {
        ModelSpec {
            kind: ModelKind::MagSchrodinger,
            ..ModelSpec::harper(grid, 1.0, 1.0)
        }
    }

    pub fn with_potential(mut self, potential: Potential) -> Self {
        self.potential = potential;
        self
    }

    pub fn with_embedding(mut self, embedding: Embedding) -> Self {
        self.embedding = embedding;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.grid.dim() as f64;
        match (self.kind, self.decay) {
            (ModelKind::Harper, Decay::Exponential { rate })
            | (ModelKind::Longrange, Decay::Exponential { rate }) => {
                if !(rate > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "decay rate must be positive, got {rate}"
                    )));
                }
            }
            (ModelKind::Harper, Decay::PowerLaw { exponent })
            | (ModelKind::Longrange, Decay::PowerLaw { exponent }) => {
                if !(exponent > dim) {
                    return Err(Error::InvalidModel(format!(
                        "power-law exponent p = {exponent} must exceed dim = {dim}"
                    )));
                }
            }
            (ModelKind::MagSchrodinger, _) => {
                if self.grid.dim() != 2 {
                    return Err(Error::InvalidModel(
                        "mag_schrodinger needs a 2D grid".into(),
                    ));
                }
            }
        }
        if let Embedding::Ring { radius } = self.embedding {
            if !(radius > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "ring radius must be positive, got {radius}"
                )));
            }
        }
        Ok(())
    }

    /// Decay exponent α for which ‖H‖₁,α is finite, capped at 1 for
    /// exponential decay and backed off by 0.01 from p − dim for power laws.
    pub fn alpha(&self) -> f64 {
        match self.decay {
            Decay::Exponential { .. } => 1.0,
            Decay::PowerLaw { exponent } => exponent - self.grid.dim() as f64 - 0.01,
        }
    }

    /// ε = min{α, 1}.
    pub fn epsilon(&self) -> f64 {
        self.alpha().min(1.0)
    }
}

/// Untwisted Harper-like operator H and the phase φ of `field`.
///
/// Off the diagonal the kernel is `J · decay(|x − x′|)`; the diagonal holds
/// the potential. The family is then `twist(H, φ, b)`.
pub fn build_harper(
    spec: &ModelSpec,
    field: &MagneticField,
) -> Result<(KernelOperator, PhaseFunction)> {
    if spec.kind == ModelKind::MagSchrodinger {
        return Err(Error::InvalidModel(
            "build_harper needs kind harper or longrange".into(),
        ));
    }
    spec.validate()?;
    let grid = spec.grid.clone();
    let pts = grid.points();
    let n = pts.len();
    let w = grid.weight();
    let m = Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(spec.potential.at(&pts[i]), 0.0)
        } else {
            c64::new(w * spec.hopping * spec.decay.at(grid.distance(i, j)), 0.0)
        }
    });
    let h = KernelOperator::from_matrix_unchecked(grid, m, true);
    Ok((h, magnetic_phase(field, spec.embedding)))
}

/// `−Δ_A + V + a_shift` with the 5-point stencil and Dirichlet boundary,
/// vector potential the transverse gauge of `field`.
pub fn build_mag_schrodinger(
    spec: &ModelSpec,
    field: &MagneticField,
    a_shift: f64,
) -> Result<KernelOperator> {
    build_mag_schrodinger_with(spec, &TransverseGauge::new(field), a_shift)
}

/// [`build_mag_schrodinger`] for an arbitrary vector potential. Bond (x, x′)
/// carries the Peierls factor `e^{−i∫_x^{x′} A}`.
pub fn build_mag_schrodinger_with(
    spec: &ModelSpec,
    potential: &dyn VectorPotential,
    a_shift: f64,
) -> Result<KernelOperator> {
    if spec.kind != ModelKind::MagSchrodinger {
        return Err(Error::InvalidModel(
            "build_mag_schrodinger needs kind mag_schrodinger".into(),
        ));
    }
    spec.validate()?;
    let grid = spec.grid.clone();
    let n = grid.len();
    let side = grid.per_axis();
    let hh = grid.spacing() * grid.spacing();
    let mut m = Mat::<c64>::zeros(n, n);
    for i1 in 0..side {
        for i2 in 0..side {
            let i = grid.index(i1, i2);
            let x = grid.point(i);
            m[(i, i)] = c64::new(4.0 / hh + spec.potential.at(x) + a_shift, 0.0);
            let mut bond = |j: usize| {
                let phi = line_phase(potential, x, grid.point(j));
                let (s, c) = phi.sin_cos();
                let t = c64::new(c, s) * (-1.0 / hh);
                m[(i, j)] = t;
                m[(j, i)] = t.conj();
            };
            if i1 + 1 < side {
                bond(grid.index(i1 + 1, i2));
            }
            if i2 + 1 < side {
                bond(grid.index(i1, i2 + 1));
            }
        }
    }
    let h = KernelOperator::from_matrix_unchecked(grid, m, true);
    let lowest = eigvalsh(&h)?.min().unwrap_or(0.0);
    if lowest <= 0.0 {
        return Err(Error::NotPositive(lowest));
    }
    Ok(h)
}

/// R(z) = (H − z)⁻¹ by dense LU, checked through the residual of (H − z) R = Id.
pub fn resolvent(h: &KernelOperator, z: c64) -> Result<KernelOperator> {
    let shifted = h.shift(-z);
    let inv = shifted.matrix().partial_piv_lu().inverse();
    let residual = max_identity_residual(&(shifted.matrix() * &inv));
    if !(residual <= RESOLVENT_RESIDUAL_TOL) {
        return Err(Error::NearSingular { z, residual });
    }
    let hermitian = h.is_hermitian() && z.im == 0.0;
    let inv = if hermitian {
        let n = inv.nrows();
        Mat::from_fn(n, n, |i, j| (inv[(i, j)] + inv[(j, i)].conj()) * 0.5)
    } else {
        inv
    };
    Ok(KernelOperator::from_matrix_unchecked(
        h.grid().clone(),
        inv,
        hermitian,
    ))
}

fn max_identity_residual(p: &Mat<c64>) -> f64 {
    let n = p.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j {
                c64::new(1.0, 0.0)
            } else {
                c64::new(0.0, 0.0)
            };
            let d = (p[(i, j)] - target).norm();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}
