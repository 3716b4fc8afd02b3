use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::grid::{distance, Grid, Point};
use crate::error::{Error, Result};

type PhaseFn = dyn Fn(&Point, &Point) -> f64 + Send + Sync;

/// Default number of sampled triples for [`validate_phase`].
pub const DEFAULT_TRIPLES: usize = 10_000;

/// Grids with at most this many points are checked exhaustively.
const EXHAUSTIVE_LIMIT: usize = 20;

/// Antisymmetric two-point phase φ(x, x′) with flux constant c_φ:
/// `|φ(x,y) + φ(y,x′) − φ(x,x′)| ≤ c_φ |x − y| |y − x′|`.
#[derive(Clone)]
pub struct PhaseFunction {
    eval: Arc<PhaseFn>,
    flux_constant: f64,
}

impl fmt::Debug for PhaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseFunction")
            .field("flux_constant", &self.flux_constant)
            .finish_non_exhaustive()
    }
}

impl PhaseFunction {
    pub fn new(
        flux_constant: f64,
        eval: impl Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        assert!(flux_constant >= 0.0, "flux constant must be nonnegative");
        PhaseFunction {
            eval: Arc::new(eval),
            flux_constant,
        }
    }

    pub fn zero() -> Self {
        PhaseFunction::new(0.0, |_, _| 0.0)
    }

    /// φ(x, x′) = f(x) − f(x′); its flux defect vanishes identically.
    pub fn pure_gauge(f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        PhaseFunction::new(0.0, move |x, y| f(x) - f(y))
    }

    /// Phase of a uniform planar field of strength `strength` in the
    /// symmetric gauge: φ(x, x′) = −(strength/2)(x₁x′₂ − x₂x′₁).
    pub fn symmetric_gauge(strength: f64) -> Self {
        PhaseFunction::new(strength.abs(), move |x, y| {
            -0.5 * strength * (x[0] * y[1] - x[1] * y[0])
        })
    }

    pub fn flux_constant(&self) -> f64 {
        self.flux_constant
    }

    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        (self.eval)(x, y)
    }

    /// fl(x, y, x′) = φ(x,y) + φ(y,x′) − φ(x,x′).
    pub fn flux_defect(&self, x: &Point, y: &Point, xp: &Point) -> f64 {
        self.eval(x, y) + self.eval(y, xp) - self.eval(x, xp)
    }
}

/// Phase values φ(x_i, x_j) tabulated on a grid, row-major.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    n: usize,
    values: Vec<f64>,
}

impl PhaseTable {
    pub fn new(grid: &Grid, phi: &PhaseFunction) -> Self {
        let pts = grid.points();
        let n = pts.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = phi.eval(&pts[i], &pts[j]);
                values[i * n + j] = v;
                values[j * n + i] = -v;
            }
        }
        PhaseTable { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseReport {
    pub max_antisymmetry_violation: f64,
    pub max_flux_ratio: f64,
    pub flux_constant: f64,
    pub triples_checked: usize,
    pub pass: bool,
}

/// Samples triples (x, y, x′) of grid points and measures the antisymmetry
/// violation and the largest ratio |fl(x,y,x′)| / (|x−y| |y−x′|).
///
/// Grids of at most 20 points are enumerated exhaustively; otherwise
/// `n_triples` triples are drawn from a ChaCha stream seeded with `seed`.
/// Triples with a coincident pair contribute only to the antisymmetry check.
pub fn validate_phase(
    phi: &PhaseFunction,
    grid: &Grid,
    n_triples: usize,
    seed: u64,
) -> Result<PhaseReport> {
    if n_triples == 0 {
        return Err(Error::InvalidArgument(
            "n_triples must be at least 1".into(),
        ));
    }
    let pts = grid.points();
    let n = pts.len();
    let mut state = Accumulator::default();
    if n <= EXHAUSTIVE_LIMIT {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    state.visit(phi, &pts[a], &pts[b], &pts[c]);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..n_triples {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let c = rng.gen_range(0..n);
            state.visit(phi, &pts[a], &pts[b], &pts[c]);
        }
    }
    let antisym_ok = state.antisym <= 1e-12 * (1.0 + state.phase_scale);
    let flux_ok = state.ratio <= phi.flux_constant() + 1e-10;
    Ok(PhaseReport {
        max_antisymmetry_violation: state.antisym,
        max_flux_ratio: state.ratio,
        flux_constant: phi.flux_constant(),
        triples_checked: state.count,
        pass: antisym_ok && flux_ok,
    })
}

#[derive(Default)]
struct Accumulator {
    antisym: f64,
    phase_scale: f64,
    ratio: f64,
    count: usize,
}

impl Accumulator {
    fn visit(&mut self, phi: &PhaseFunction, x: &Point, y: &Point, xp: &Point) {
        self.count += 1;
        let fxy = phi.eval(x, y);
        let fyx = phi.eval(y, x);
        self.phase_scale = self.phase_scale.max(fxy.abs());
        self.antisym = self.antisym.max((fxy + fyx).abs());
        self.antisym = self.antisym.max(phi.eval(x, x).abs());
        let denom = distance(x, y) * distance(y, xp);
        if denom == 0.0 {
            return;
        }
        let fl = phi.flux_defect(x, y, xp);
        self.ratio = self.ratio.max(fl.abs() / denom);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_gauge_hand_triple() {
        let phi = PhaseFunction::symmetric_gauge(1.0);
        let fl = phi.flux_defect(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0]);
        assert!((fl.abs() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn symmetric_gauge_passes() {
        let g = Grid::square(12).unwrap();
        let r = validate_phase(&PhaseFunction::symmetric_gauge(1.0), &g, 10_000, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.max_flux_ratio <= 0.5 + 1e-12);
        assert!(r.max_flux_ratio > 0.1);
        assert_eq!(r.triples_checked, 10_000);
    }

    #[test]
    fn zero_phase_has_no_violations() {
        let g = Grid::square(6).unwrap();
        let r = validate_phase(&PhaseFunction::zero(), &g, 100, 0).unwrap();
        assert_eq!(r.max_antisymmetry_violation, 0.0);
        assert_eq!(r.max_flux_ratio, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn pure_gauge_has_zero_flux() {
        let g = Grid::new(2, 6.0, 0.5).unwrap();
        let phi = PhaseFunction::pure_gauge(|x| (3.0 * x[0]).sin() + x[1] * x[1]);
        let r = validate_phase(&phi, &g, 5_000, 11).unwrap();
        assert!(r.max_flux_ratio < 1e-12, "{r:?}");
        assert!(r.pass);
    }

    #[test]
    fn small_grids_are_exhaustive() {
        let g = Grid::chain(4).unwrap();
        let r = validate_phase(&PhaseFunction::zero(), &g, 1, 0).unwrap();
        assert_eq!(r.triples_checked, 64);
    }

    #[test]
    fn detects_flux_violation() {
        let g = Grid::square(6).unwrap();
        // claims c = 0.1 but the true constant is 1/2
        let bad = PhaseFunction::new(0.1, |x, y| -0.5 * (x[0] * y[1] - x[1] * y[0]));
        assert!(!validate_phase(&bad, &g, 2_000, 1).unwrap().pass);
    }

    #[test]
    fn detects_antisymmetry_violation() {
        let g = Grid::square(6).unwrap();
        let bad = PhaseFunction::new(10.0, |x, y| x[0] * y[0]);
        assert!(!validate_phase(&bad, &g, 2_000, 1).unwrap().pass);
    }

    #[test]
    fn rejects_zero_triples() {
        let g = Grid::square(6).unwrap();
        assert!(validate_phase(&PhaseFunction::zero(), &g, 0, 0).is_err());
    }

    #[test]
    fn table_is_antisymmetric() {
        let g = Grid::square(4).unwrap();
        let t = PhaseTable::new(&g, &PhaseFunction::symmetric_gauge(0.7));
        for i in 0..g.len() {
            assert_eq!(t.get(i, i), 0.0);
            for j in 0..g.len() {
                assert_eq!(t.get(i, j), -t.get(j, i));
            }
        }
    }
}
