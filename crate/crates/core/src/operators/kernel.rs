use std::sync::Arc;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::grid::{Grid, Point};
use crate::error::{Error, Result};

/// Relative tolerance of the hermitian flag, measured against the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A dense integral operator on a [`Grid`].
///
/// The stored matrix is the operator matrix acting on ℓ² of the grid, i.e.
/// `K(x_i, x_j) · h^dim`. With this convention products, inverses, spectra and
/// norms are plain matrix operations, while [`KernelOperator::kernel`] recovers
/// the kernel values. Multiplication operators (potentials, cutoffs) sit on the
/// diagonal of the matrix unscaled.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    grid: Arc<Grid>,
    matrix: Mat<c64>,
    hermitian: bool,
}

impl KernelOperator {
    pub fn from_matrix(grid: Arc<Grid>, matrix: Mat<c64>, hermitian: bool) -> Result<Self> {
        let n = grid.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Shape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                points: n,
            });
        }
        let op = KernelOperator {
            grid,
            matrix,
            hermitian,
        };
        if hermitian {
            let defect = op.hermitian_defect();
            if defect > HERMITIAN_TOL {
                return Err(Error::NotHermitian(defect));
            }
        }
        Ok(op)
    }

    /// Wraps a matrix without checking the hermitian flag. Callers guarantee it.
    pub(crate) fn from_matrix_unchecked(
        grid: Arc<Grid>,
        matrix: Mat<c64>,
        hermitian: bool,
    ) -> Self {
        debug_assert_eq!(matrix.nrows(), grid.len());
        KernelOperator {
            grid,
            matrix,
            hermitian,
        }
    }

    /// Builds the operator with kernel `k(x_i, x_j)`.
    pub fn from_kernel(
        grid: Arc<Grid>,
        hermitian: bool,
        k: impl Fn(&Point, &Point) -> c64,
    ) -> Result<Self> {
        let w = grid.weight();
        let pts = grid.points();
        let m = Mat::from_fn(pts.len(), pts.len(), |i, j| k(&pts[i], &pts[j]) * w);
        Self::from_matrix(grid, m, hermitian)
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        KernelOperator {
            grid,
            matrix: Mat::zeros(n, n),
            hermitian: true,
        }
    }

    pub fn identity(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        KernelOperator {
            grid,
            matrix: Mat::identity(n, n),
            hermitian: true,
        }
    }

    /// Multiplication operator by a real function.
    pub fn multiplication(grid: Arc<Grid>, values: &[f64]) -> Result<Self> {
        let n = grid.len();
        if values.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} diagonal values for {n} grid points",
                values.len()
            )));
        }
        let m = Mat::from_fn(n, n, |i, j| {
            if i == j {
                c64::new(values[i], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        Ok(KernelOperator {
            grid,
            matrix: m,
            hermitian: true,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<c64> {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    /// Operator-matrix entry.
    pub fn entry(&self, i: usize, j: usize) -> c64 {
        self.matrix[(i, j)]
    }

    /// Kernel value `K(x_i, x_j)`.
    pub fn kernel(&self, i: usize, j: usize) -> c64 {
        self.matrix[(i, j)] / self.grid.weight()
    }

    pub fn max_abs(&self) -> f64 {
        let n = self.len();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max(self.matrix[(i, j)].norm());
            }
        }
        m
    }

    /// `max |K_ij − conj(K_ji)| / max |K|`, zero for the zero operator.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "operators live on different grids".into(),
            ))
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(KernelOperator {
            grid: self.grid.clone(),
            matrix: &self.matrix - &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(KernelOperator {
            grid: self.grid.clone(),
            matrix: &self.matrix + &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    /// Operator composition `self ∘ other`; kernels compose with the grid measure.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(KernelOperator {
            grid: self.grid.clone(),
            matrix: &self.matrix * &other.matrix,
            hermitian: false,
        })
    }

    pub fn scale(&self, c: c64) -> Self {
        let hermitian = self.hermitian && c.im == 0.0;
        let n = self.len();
        KernelOperator {
            grid: self.grid.clone(),
            matrix: Mat::from_fn(n, n, |i, j| self.matrix[(i, j)] * c),
            hermitian,
        }
    }

    /// `self + c · Id`.
    pub fn shift(&self, c: c64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..self.len() {
            m[(i, i)] += c;
        }
        KernelOperator {
            grid: self.grid.clone(),
            matrix: m,
            hermitian: self.hermitian && c.im == 0.0,
        }
    }

    pub fn adjoint(&self) -> Self {
        KernelOperator {
            grid: self.grid.clone(),
            matrix: self.matrix.adjoint().to_owned(),
            hermitian: self.hermitian,
        }
    }

    /// Entrywise modulus as an operator with nonnegative kernel.
    pub fn abs(&self) -> Self {
        let n = self.len();
        KernelOperator {
            grid: self.grid.clone(),
            matrix: Mat::from_fn(n, n, |i, j| c64::new(self.matrix[(i, j)].norm(), 0.0)),
            hermitian: self.hermitian,
        }
    }

    /// Applies the operator to a vector in ℓ² of the grid.
    pub fn apply(&self, psi: &[c64]) -> Vec<c64> {
        let n = self.len();
        assert_eq!(psi.len(), n, "vector length must match the grid");
        let mut out = vec![c64::new(0.0, 0.0); n];
        for (j, &p) in psi.iter().enumerate() {
            if p == c64::new(0.0, 0.0) {
                continue;
            }
            let col = self.matrix.col(j);
            for (o, m) in out.iter_mut().zip(col.iter()) {
                *o += *m * p;
            }
        }
        out
    }

    pub fn max_entry_difference(&self, other: &Self) -> f64 {
        let n = self.len();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max((self.matrix[(i, j)] - other.matrix[(i, j)]).norm());
            }
        }
        m
    }
}

impl PartialEq for KernelOperator {
    fn eq(&self, other: &Self) -> bool {
        *self.grid == *other.grid
            && self.hermitian == other.hermitian
            && self.matrix.nrows() == other.matrix.nrows()
            && (0..self.len())
                .all(|j| (0..self.len()).all(|i| self.matrix[(i, j)] == other.matrix[(i, j)]))
    }
}

/// On-disk container for a kernel operator: kernel values `K(x_i, x_j)`
/// as `(re, im)` pairs in row-major order.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KernelFile {
    pub dim: usize,
    #[serde(rename = "L")]
    pub extent: f64,
    pub h: f64,
    pub hermitian: bool,
    pub entries: Vec<(f64, f64)>,
}

impl From<&KernelOperator> for KernelFile {
    fn from(op: &KernelOperator) -> Self {
        let n = op.len();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let k = op.kernel(i, j);
                entries.push((k.re, k.im));
            }
        }
        KernelFile {
            dim: op.grid.dim(),
            extent: op.grid.extent(),
            h: op.grid.spacing(),
            hermitian: op.hermitian,
            entries,
        }
    }
}

impl KernelFile {
    pub fn into_operator(self) -> Result<KernelOperator> {
        let grid = Arc::new(Grid::new(self.dim, self.extent, self.h)?);
        let n = grid.len();
        if self.entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "kernel file has {} entries, grid needs {}",
                self.entries.len(),
                n * n
            )));
        }
        let w = grid.weight();
        let m = Mat::from_fn(n, n, |i, j| {
            let (re, im) = self.entries[i * n + j];
            c64::new(re, im) * w
        });
        KernelOperator::from_matrix(grid, m, self.hermitian)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
