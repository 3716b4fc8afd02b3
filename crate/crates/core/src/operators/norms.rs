use faer::{c64, Mat};
use serde::Serialize;

use super::grid::bracket;
use super::kernel::KernelOperator;
use super::phase::{PhaseFunction, PhaseTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Attained {
    /// Maximal weighted column sum (integration over the first variable).
    Column(usize),
    /// Maximal weighted row sum (integration over the second variable).
    Row(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShNormResult {
    pub value: f64,
    pub alpha: f64,
    pub achieved_at: Attained,
}

/// Weighted Schur–Holmgren norm ‖T‖₁,α: the larger of the maximal row and
/// column sums of `|K(x_i, x_j)| ⟨x_i − x_j⟩^α h^dim`.
pub fn sh_norm(t: &KernelOperator, alpha: f64) -> ShNormResult {
    assert!(alpha >= 0.0, "alpha must be nonnegative");
    let n = t.len();
    let grid = t.grid();
    let m = t.matrix();
    let mut rows = vec![0.0f64; n];
    let mut cols = vec![0.0f64; n];
    for j in 0..n {
        for i in 0..n {
            let a = m[(i, j)].norm();
            if a == 0.0 {
                continue;
            }
            let w = if alpha == 0.0 || i == j {
                1.0
            } else {
                bracket(grid.distance(i, j)).powf(alpha)
            };
            rows[i] += a * w;
            cols[j] += a * w;
        }
    }
    let mut best = ShNormResult {
        value: 0.0,
        alpha,
        achieved_at: Attained::Column(0),
    };
    for (j, &c) in cols.iter().enumerate() {
        if c > best.value {
            best.value = c;
            best.achieved_at = Attained::Column(j);
        }
    }
    for (i, &r) in rows.iter().enumerate() {
        if r > best.value {
            best.value = r;
            best.achieved_at = Attained::Row(i);
        }
    }
    best
}

/// Kernel `χ(|x − x′| / M) K(x, x′)` with χ the indicator of [0, 1].
pub fn truncate(t: &KernelOperator, radius: f64) -> Result<KernelOperator> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "truncation radius must be positive, got {radius}"
        )));
    }
    let n = t.len();
    let grid = t.grid();
    let m = t.matrix();
    let out = Mat::from_fn(n, n, |i, j| {
        if grid.distance(i, j) / radius <= 1.0 {
            m[(i, j)]
        } else {
            c64::new(0.0, 0.0)
        }
    });
    Ok(KernelOperator::from_matrix_unchecked(
        grid.clone(),
        out,
        t.is_hermitian(),
    ))
}

/// ‖T − T_M‖₁,₀, the off-band mass that truncation at radius `M` discards.
pub fn uniformity_defect(t: &KernelOperator, radius: f64) -> Result<f64> {
    let tail = t.sub(&truncate(t, radius)?)?;
    Ok(sh_norm(&tail, 0.0).value)
}

/// Harper-like twist: kernel `e^{i b φ(x, x′)} K(x, x′)`.
pub fn twist(t: &KernelOperator, phi: &PhaseFunction, b: f64) -> KernelOperator {
    if b == 0.0 {
        return t.clone();
    }
    twist_tabulated(t, &PhaseTable::new(t.grid(), phi), b)
}

/// [`twist`] with the phase already tabulated on the operator's grid.
pub fn twist_tabulated(t: &KernelOperator, table: &PhaseTable, b: f64) -> KernelOperator {
    assert_eq!(
        table.len(),
        t.len(),
        "phase table does not match the operator"
    );
    if b == 0.0 {
        return t.clone();
    }
    let n = t.len();
    let m = t.matrix();
    let out = Mat::from_fn(n, n, |i, j| {
        let (s, c) = (b * table.get(i, j)).sin_cos();
        m[(i, j)] * c64::new(c, s)
    });
    KernelOperator::from_matrix_unchecked(t.grid().clone(), out, t.is_hermitian())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::operators::Grid;

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    #[test]
    fn diagonal_kernel_norm() {
        let g = Arc::new(Grid::chain(3).unwrap());
        let d = KernelOperator::multiplication(g, &[2.0, -3.0, 1.0]).unwrap();
        for alpha in [0.0, 0.5, 3.0] {
            assert_eq!(sh_norm(&d, alpha).value, 3.0);
        }
    }

    #[test]
    fn two_site_weighted_norm() {
        let g = Arc::new(Grid::chain(2).unwrap());
        let k = Mat::from_fn(2, 2, |i, j| if i == j { c(0.0) } else { c(1.0) });
        let t = KernelOperator::from_matrix(g, k, true).unwrap();
        assert!((sh_norm(&t, 2.0).value - 2.0).abs() < 1e-14);
        assert_eq!(sh_norm(&t, 0.0).value, 1.0);
    }

    #[test]
    fn gaussian_norm_matches_quadrature() {
        let g = Arc::new(Grid::new(1, 20.0, 0.01).unwrap());
        let t =
            KernelOperator::from_kernel(g, true, |x, y| c((-(x[0] - y[0]).powi(2)).exp())).unwrap();
        let v = sh_norm(&t, 0.0).value;
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-3, "{v}");
    }

    #[test]
    fn truncation_uses_closed_indicator() {
        let g = Arc::new(Grid::chain(8).unwrap());
        let t =
            KernelOperator::from_kernel(g.clone(), true, |x, y| c((-(x[0] - y[0]).powi(2)).exp()))
                .unwrap();
        let tm = truncate(&t, 2.0).unwrap();
        assert_eq!(tm.entry(0, 3), c(0.0));
        assert_eq!(tm.entry(0, 1), t.entry(0, 1));
        assert_eq!(tm.entry(0, 2), t.entry(0, 2));
        assert_eq!(truncate(&t, g.diameter()).unwrap(), t);
        assert!(truncate(&t, 0.0).is_err());
    }

    #[test]
    fn banded_kernel_has_no_defect() {
        let g = Arc::new(Grid::chain(10).unwrap());
        let t = KernelOperator::from_kernel(g, true, |x, y| {
            if (x[0] - y[0]).abs() <= 2.0 {
                c(1.0)
            } else {
                c(0.0)
            }
        })
        .unwrap();
        assert_eq!(truncate(&t, 2.0).unwrap(), t);
        assert_eq!(uniformity_defect(&t, 2.0).unwrap(), 0.0);
        assert!(uniformity_defect(&t, 1.0).unwrap() > 0.0);
    }

    #[test]
    fn power_tail_defect_matches_tail_sum() {
        let n = 400;
        let g = Arc::new(Grid::chain(n).unwrap());
        let t =
            KernelOperator::from_kernel(g, true, |x, y| c(bracket(x[0] - y[0]).powi(-3))).unwrap();
        let mut last = f64::INFINITY;
        for m in [2.0, 4.0, 8.0] {
            let d = uniformity_defect(&t, m).unwrap();
            assert!(d < last);
            last = d;
            // central row: both tails, truncated by the box
            let mid = n / 2;
            let oracle: f64 = (0..n)
                .map(|j| (j as f64 - mid as f64).abs())
                .filter(|&t| t > m)
                .map(|t| bracket(t).powi(-3))
                .sum();
            let infinite: f64 = 2.0
                * (m as usize + 1..100_000)
                    .map(|t| bracket(t as f64).powi(-3))
                    .sum::<f64>();
            assert!((d - oracle).abs() < 1e-12 * oracle, "{d} vs {oracle}");
            // the box cuts both tails at 200 sites, a relative loss of a few 1e-3
            assert!((d - infinite).abs() < 5e-3 * infinite);
        }
    }

    #[test]
    fn twist_at_zero_is_identity() {
        let g = Arc::new(Grid::square(4).unwrap());
        let t = KernelOperator::from_kernel(g, true, |x, y| {
            c(-(x[0] - y[0]).abs() - (x[1] - y[1]).abs())
        })
        .unwrap();
        assert_eq!(twist(&t, &PhaseFunction::symmetric_gauge(1.0), 0.0), t);
    }
}
