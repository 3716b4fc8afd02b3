use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operators::{distance, Grid, Point};

/// Quintic smoothstep profile: 1 on [0, ½], 0 on [2, ∞), C² in between.
pub fn smoothstep(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let t = (r - 0.5) / 1.5;
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// One cell of the partition: its lattice label, its center `b^{−1/2} γ`,
/// the grid points where ĝ_γ > 0 and the values of ĝ_γ there.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub label: [i64; 2],
    pub center: Point,
    pub support: Vec<usize>,
    pub values: Vec<f64>,
}

/// Locally finite quadratic partition of unity `Σ_γ ĝ_γ² = 1` on a grid,
/// at scale `b^{−1/2}`.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    b: f64,
    grid: Arc<Grid>,
    cells: Vec<Cell>,
    neighbors: Vec<Vec<usize>>,
    multiplicity: usize,
}

/// Builds the partition for `b ∈ [(8/L)², 1]`.
///
/// Raw cells are `g(√b x − γ)` with the radial profile `g(y) = s(|y|)`, for
/// every γ ∈ ℤ^dim whose support meets the grid. Values are then divided by
/// `√Σ_γ g²` pointwise. A radial profile keeps the support inside the ball of
/// radius `2b^{−1/2}` in every dimension.
pub fn build_partition(grid: &Arc<Grid>, b: f64) -> Result<PartitionOfUnity> {
    let lo = grid.min_partition_b();
    if !(b >= lo && b <= 1.0) {
        return Err(Error::InadmissibleB { b, lo, hi: 1.0 });
    }
    let scale = b.sqrt().recip();
    let half = 0.5 * grid.extent();
    let first = ((-half - 2.0 * scale) / scale).floor() as i64;
    let last = ((half + 2.0 * scale) / scale).ceil() as i64;
    let second = if grid.dim() == 2 { first..=last } else { 0..=0 };

    let mut cells = Vec::new();
    for g1 in first..=last {
        for g2 in second.clone() {
            let center = [g1 as f64 * scale, g2 as f64 * scale];
            let mut support = Vec::new();
            let mut values = Vec::new();
            for (i, x) in grid.points().iter().enumerate() {
                let v = smoothstep(distance(x, &center) / scale);
                if v > 0.0 {
                    support.push(i);
                    values.push(v);
                }
            }
            if !support.is_empty() {
                cells.push(Cell {
                    label: [g1, g2],
                    center,
                    support,
                    values,
                });
            }
        }
    }
    Ok(PartitionOfUnity::from_raw_cells(grid.clone(), b, cells))
}

impl PartitionOfUnity {
    /// Normalizes raw cells pointwise and records overlaps.
    fn from_raw_cells(grid: Arc<Grid>, b: f64, mut cells: Vec<Cell>) -> Self {
        let n = grid.len();
        let mut sum_sq = vec![0.0f64; n];
        let mut owners: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (c, cell) in cells.iter().enumerate() {
            for (&i, &v) in cell.support.iter().zip(&cell.values) {
                sum_sq[i] += v * v;
                owners[i].push(c);
            }
        }
        for cell in &mut cells {
            for (&i, v) in cell.support.iter().zip(cell.values.iter_mut()) {
                *v /= sum_sq[i].sqrt();
            }
        }
        let multiplicity = owners.iter().map(Vec::len).max().unwrap_or(0);
        let mut neighbors = Vec::with_capacity(cells.len());
        for cell in &cells {
            let mut list: Vec<usize> = cell
                .support
                .iter()
                .flat_map(|&i| owners[i].iter().copied())
                .collect();
            list.sort_unstable();
            list.dedup();
            neighbors.push(list);
        }
        PartitionOfUnity {
            b,
            grid,
            cells,
            neighbors,
            multiplicity,
        }
    }

    /// Degenerate one-cell partition with ĝ ≡ 1 on the whole grid, centered
    /// at the origin. Every commutator with it vanishes.
    pub fn trivial(grid: &Arc<Grid>, b: f64) -> Self {
        let n = grid.len();
        let cell = Cell {
            label: [0, 0],
            center: [0.0, 0.0],
            support: (0..n).collect(),
            values: vec![1.0; n],
        };
        PartitionOfUnity::from_raw_cells(grid.clone(), b, vec![cell])
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Cell scale `b^{−1/2}`.
    pub fn scale(&self) -> f64 {
        self.b.sqrt().recip()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// ĝ_γ on the whole grid.
    pub fn g_values(&self, c: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        let cell = &self.cells[c];
        for (&i, &v) in cell.support.iter().zip(&cell.values) {
            out[i] = v;
        }
        out
    }

    /// Cells whose supports share a grid point with cell `c` (itself included).
    pub fn neighbors(&self, c: usize) -> &[usize] {
        &self.neighbors[c]
    }

    pub fn max_neighbors(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest number of supports containing one grid point. This is the
    /// constant in the Γ-map bounds.
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// max over grid points of |Σ_γ ĝ_γ² − 1|.
    pub fn identity_defect(&self) -> f64 {
        let mut sum = vec![0.0f64; self.grid.len()];
        for cell in &self.cells {
            for (&i, &v) in cell.support.iter().zip(&cell.values) {
                sum[i] += v * v;
            }
        }
        sum.iter().fold(0.0f64, |m, s| m.max((s - 1.0).abs()))
    }

    /// Largest distance from a cell center to a point of its support.
    pub fn support_radius(&self) -> f64 {
        let pts = self.grid.points();
        self.cells
            .iter()
            .flat_map(|c| c.support.iter().map(move |&i| distance(&pts[i], &c.center)))
            .fold(0.0, f64::max)
    }
}
