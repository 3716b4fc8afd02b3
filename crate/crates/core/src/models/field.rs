use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::operators::{PhaseFunction, Point};

/// Panels of the composite Simpson rule used for every gauge and line integral.
pub const SIMPSON_PANELS: usize = 64;

/// Composite Simpson rule on [0, 1] with `panels` double intervals.
pub fn simpson(panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let m = 2 * panels;
    let h = 1.0 / m as f64;
    let mut acc = f(0.0) + f(1.0);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0
}

/// One additive piece of a planar field B₁₂(x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FieldTerm {
    Uniform {
        strength: f64,
    },
    /// `amplitude · cos(wavenumber · x₁)`
    Cosine {
        amplitude: f64,
        wavenumber: f64,
    },
}

impl FieldTerm {
    fn value(&self, x: &Point) -> f64 {
        match *self {
            FieldTerm::Uniform { strength } => strength,
            FieldTerm::Cosine {
                amplitude,
                wavenumber,
            } => amplitude * (wavenumber * x[0]).cos(),
        }
    }

    fn scaled(&self, c: f64) -> FieldTerm {
        match *self {
            FieldTerm::Uniform { strength } => FieldTerm::Uniform {
                strength: c * strength,
            },
            FieldTerm::Cosine {
                amplitude,
                wavenumber,
            } => FieldTerm::Cosine {
                amplitude: c * amplitude,
                wavenumber,
            },
        }
    }

    fn bound(&self) -> f64 {
        match *self {
            FieldTerm::Uniform { strength } => strength.abs(),
            FieldTerm::Cosine { amplitude, .. } => amplitude.abs(),
        }
    }

    /// ∫₀¹ B(s x) s ds in closed form.
    fn radial_moment(&self, x: &Point) -> f64 {
        match *self {
            FieldTerm::Uniform { strength } => 0.5 * strength,
            FieldTerm::Cosine {
                amplitude,
                wavenumber,
            } => amplitude * cosine_moment(wavenumber * x[0]),
        }
    }
}

/// ∫₀¹ cos(u s) s ds.
fn cosine_moment(u: f64) -> f64 {
    if u.abs() < 1e-3 {
        let u2 = u * u;
        0.5 - u2 / 8.0 + u2 * u2 / 144.0 - u2 * u2 * u2 / 5760.0
    } else {
        u.sin() / u + (u.cos() - 1.0) / (u * u)
    }
}

/// A magnetic field in the plane, stored as its single independent component
/// B₁₂ = −B₂₁ (a sum of [`FieldTerm`]s). One-dimensional models see it through
/// an [`Embedding`] of the chain into the plane.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MagneticField {
    terms: Vec<FieldTerm>,
}

impl MagneticField {
    pub fn zero() -> Self {
        MagneticField { terms: Vec::new() }
    }

    pub fn uniform(strength: f64) -> Self {
        MagneticField {
            terms: vec![FieldTerm::Uniform { strength }],
        }
    }

    pub fn cosine(amplitude: f64, wavenumber: f64) -> Self {
        MagneticField {
            terms: vec![FieldTerm::Cosine {
                amplitude,
                wavenumber,
            }],
        }
    }

    pub fn from_terms(terms: Vec<FieldTerm>) -> Self {
        MagneticField { terms }
    }

    pub fn terms(&self) -> &[FieldTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        2
    }

    /// `self + c · other`, e.g. B_b = B₀ + b𝔟.
    pub fn plus_scaled(&self, c: f64, other: &MagneticField) -> MagneticField {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| t.scaled(c)));
        MagneticField { terms }
    }

    pub fn scaled(&self, c: f64) -> MagneticField {
        MagneticField::zero().plus_scaled(c, self)
    }

    pub fn b12(&self, x: &Point) -> f64 {
        self.terms.iter().map(|t| t.value(x)).sum()
    }

    /// B_jk(x) for j, k ∈ {0, 1}.
    pub fn component(&self, j: usize, k: usize, x: &Point) -> f64 {
        match (j, k) {
            (0, 1) => self.b12(x),
            (1, 0) => -self.b12(x),
            (0, 0) | (1, 1) => 0.0,
            _ => panic!("field component ({j}, {k}) out of range"),
        }
    }

    /// ‖B‖_∞ bound: sum of the term amplitudes.
    pub fn sup_norm(&self) -> f64 {
        self.terms.iter().map(FieldTerm::bound).sum()
    }

    /// Strength if every term is uniform.
    pub fn uniform_strength(&self) -> Option<f64> {
        self.terms.iter().try_fold(0.0, |acc, t| match t {
            FieldTerm::Uniform { strength } => Some(acc + strength),
            FieldTerm::Cosine { .. } => None,
        })
    }
}

/// Transverse gauge A_j(x) = −Σ_k ∫₀¹ B_jk(s x) s x_k ds, by composite Simpson.
pub fn transverse_gauge(field: &MagneticField, x: &Point) -> [f64; 2] {
    let mut a = [0.0; 2];
    for (j, aj) in a.iter_mut().enumerate() {
        for k in 0..2 {
            if j == k {
                continue;
            }
            let integral = simpson(SIMPSON_PANELS, |s| {
                field.component(j, k, &[s * x[0], s * x[1]]) * s * x[k]
            });
            *aj -= integral;
        }
    }
    a
}

pub trait VectorPotential: Send + Sync {
    fn at(&self, x: &Point) -> [f64; 2];
}

impl<F> VectorPotential for F
where
    F: Fn(&Point) -> [f64; 2] + Send + Sync,
{
    fn at(&self, x: &Point) -> [f64; 2] {
        self(x)
    }
}

/// Transverse gauge of a field with the radial integral done in closed form
/// for each term. Agrees with [`transverse_gauge`] to quadrature accuracy.
#[derive(Debug, Clone)]
pub struct TransverseGauge {
    field: MagneticField,
}

impl TransverseGauge {
    pub fn new(field: &MagneticField) -> Self {
        TransverseGauge {
            field: field.clone(),
        }
    }
}

impl VectorPotential for TransverseGauge {
    fn at(&self, x: &Point) -> [f64; 2] {
        let beta: f64 = self.field.terms.iter().map(|t| t.radial_moment(x)).sum();
        [-x[1] * beta, x[0] * beta]
    }
}

/// φ(x, x′) = −∫ A along the segment from x to x′, by composite Simpson.
pub fn line_phase(a: &dyn VectorPotential, x: &Point, xp: &Point) -> f64 {
    if x == xp {
        return 0.0;
    }
    let d = [xp[0] - x[0], xp[1] - x[1]];
    -simpson(SIMPSON_PANELS, |t| {
        let v = a.at(&[x[0] + t * d[0], x[1] + t * d[1]]);
        v[0] * d[0] + v[1] * d[1]
    })
}

/// How model coordinates sit in the plane carrying the field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Embedding {
    /// Coordinates are used as they are (a chain lies on the x₁ axis).
    Plane,
    /// A chain wound on a circle of the given radius, arc length = coordinate.
    Ring { radius: f64 },
    /// A chain bent by a right angle at the origin: x ≤ 0 runs along the
    /// first axis, x > 0 along the second. Triangles straddling the bend
    /// enclose flux at every scale, which a straight chain never does.
    Corner,
}

impl Embedding {
    pub fn place(&self, x: &Point) -> Point {
        match *self {
            Embedding::Plane => *x,
            Embedding::Ring { radius } => {
                let (s, c) = (x[0] / radius).sin_cos();
                [radius * c, radius * s]
            }
            Embedding::Corner => {
                if x[0] <= 0.0 {
                    [x[0], 0.0]
                } else {
                    [0.0, x[0]]
                }
            }
        }
    }
}

/// Line phase of the transverse gauge of `field`, seen through `embedding`,
/// with flux constant ‖B‖_∞: the flux through a triangle is bounded by
/// ‖B‖_∞ |x − y| |y − x′| and embedded distances never exceed chain distances.
pub fn magnetic_phase(field: &MagneticField, embedding: Embedding) -> PhaseFunction {
    let bound = field.sup_norm();
    if let Some(strength) = field.uniform_strength() {
        return PhaseFunction::new(bound, move |x, y| {
            let p = embedding.place(x);
            let q = embedding.place(y);
            -0.5 * strength * (p[0] * q[1] - p[1] * q[0])
        });
    }
    let gauge = Arc::new(TransverseGauge::new(field));
    PhaseFunction::new(bound, move |x, y| {
        line_phase(gauge.as_ref(), &embedding.place(x), &embedding.place(y))
    })
}
