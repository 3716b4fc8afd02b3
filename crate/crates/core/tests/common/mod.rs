#![allow(dead_code)]

use std::sync::Arc;

use faer::{c64, Mat};
use magspec::operators::{Grid, KernelOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn chain(n: usize) -> Arc<Grid> {
    Arc::new(Grid::chain(n).unwrap())
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |_, _| {
        c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Dense random kernel with entries in the unit square.
pub fn random_kernel(rng: &mut ChaCha8Rng, grid: &Arc<Grid>) -> KernelOperator {
    let m = random_matrix(rng, grid.len());
    KernelOperator::from_matrix(grid.clone(), m, false).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, grid: &Arc<Grid>) -> KernelOperator {
    let m = random_matrix(rng, grid.len());
    let h = Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        (m[(i, j)] + m[(j, i)].conj()) * 0.5
    });
    KernelOperator::from_matrix(grid.clone(), h, true).unwrap()
}

/// Unsorted multiset of reals, duplicates included.
pub fn random_points(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<f64> {
    let n = rng.gen_range(1..=max_len);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    if n > 2 && rng.gen_bool(0.3) {
        v[1] = v[0];
    }
    v
}

/// max over a of min over b |a − b|, both directions.
pub fn brute_hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one = |x: &[f64], y: &[f64]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// Spectral norm by power iteration on T*T, started from a fixed vector.
pub fn power_norm(m: &Mat<c64>) -> f64 {
    let n = m.ncols();
    let mut v = Mat::<c64>::from_fn(n, 1, |i, _| c64::new(1.0 + (i as f64).sin(), 0.3));
    let mut est = 0.0;
    for _ in 0..2000 {
        let w = m.adjoint() * (m * &v);
        let norm = w.norm_l2();
        if norm == 0.0 {
            return 0.0;
        }
        v = w * faer::Scale(c64::new(1.0 / norm, 0.0));
        let next = (m * &v).norm_l2();
        if (next - est).abs() <= 1e-15 * next {
            return next;
        }
        est = next;
    }
    est
}
