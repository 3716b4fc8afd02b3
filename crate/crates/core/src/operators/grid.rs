use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℝ¹ or ℝ². One-dimensional grids leave the second coordinate at zero.
pub type Point = [f64; 2];

pub fn distance(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// The Japanese bracket ⟨t⟩ = √(1 + t²).
pub fn bracket(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

/// Uniform lattice discretization of the centered box [−L/2, L/2)^dim.
///
/// Points are enumerated in lexicographic order (first coordinate major) and
/// every point carries the measure `h^dim`, so kernel sums approximate
/// integrals. With `h = 1` the measure is counting measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    dim: usize,
    extent: f64,
    spacing: f64,
    per_axis: usize,
    points: Vec<Point>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct GridSpec {
    dim: usize,
    #[serde(rename = "L")]
    extent: f64,
    #[serde(rename = "h")]
    spacing: f64,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.dim, s.extent, s.spacing)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            dim: g.dim,
            extent: g.extent,
            spacing: g.spacing,
        }
    }
}

impl Grid {
    pub fn new(dim: usize, extent: f64, spacing: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        if !(extent.is_finite() && extent >= 2.0 * spacing) {
            return Err(Error::InvalidGrid(format!(
                "extent L = {extent} must be at least 2h = {}",
                2.0 * spacing
            )));
        }
        let per_axis = (extent / spacing).round() as usize;
        let axis: Vec<f64> = (0..per_axis)
            .map(|k| -0.5 * extent + k as f64 * spacing)
            .collect();
        let points = match dim {
            1 => axis.iter().map(|&x| [x, 0.0]).collect(),
            _ => axis
                .iter()
                .flat_map(|&x1| axis.iter().map(move |&x2| [x1, x2]))
                .collect(),
        };
        Ok(Grid {
            dim,
            extent,
            spacing,
            per_axis,
            points,
        })
    }

    /// Unit-spaced chain of `n` sites.
    pub fn chain(n: usize) -> Result<Self> {
        Grid::new(1, n as f64, 1.0)
    }

    /// Unit-spaced `n × n` square lattice.
    pub fn square(n: usize) -> Result<Self> {
        Grid::new(2, n as f64, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    /// Measure carried by each point, `h^dim`.
    pub fn weight(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// Coordinate of lattice index `k` along one axis.
    pub fn axis_coordinate(&self, k: usize) -> f64 {
        -0.5 * self.extent + k as f64 * self.spacing
    }

    /// Flat index of the lattice site with per-axis indices `(i1, i2)`.
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        match self.dim {
            1 => i1,
            _ => i1 * self.per_axis + i2,
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        distance(&self.points[i], &self.points[j])
    }

    /// Largest distance between two grid points.
    pub fn diameter(&self) -> f64 {
        let side = (self.per_axis - 1) as f64 * self.spacing;
        side * (self.dim as f64).sqrt()
    }

    /// Lower end of the b-window on which a partition of unity fits at least
    /// four cells per axis: `(8/L)²`.
    pub fn min_partition_b(&self) -> f64 {
        (8.0 / self.extent).powi(2)
    }

    /// Indices of points lying in the inner fraction `frac` of the box.
    pub fn inner_indices(&self, frac: f64) -> Vec<usize> {
        let half = 0.5 * frac * self.extent;
        (0..self.len())
            .filter(|&i| self.points[i][..self.dim].iter().all(|c| c.abs() <= half))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_count_and_order() {
        let g = Grid::new(2, 4.0, 1.0).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.point(0), &[-2.0, -2.0]);
        assert_eq!(g.point(1), &[-2.0, -1.0]);
        assert_eq!(g.point(4), &[-1.0, -2.0]);
        assert_eq!(g.index(1, 0), 4);
        assert_eq!(g.weight(), 1.0);

        let g = Grid::new(1, 2.0, 0.25).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.weight(), 0.25);
        assert_eq!(g.point(7)[0], 0.75);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(3, 4.0, 1.0).is_err());
        assert!(Grid::new(1, 1.0, 1.0).is_err());
        assert!(Grid::new(1, 4.0, 0.0).is_err());
        assert!(Grid::new(1, 4.0, -1.0).is_err());
    }

    #[test]
    fn bracket_values() {
        assert_eq!(bracket(0.0), 1.0);
        assert!((bracket(1.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn serde_uses_compact_spec() {
        let g = Grid::new(2, 8.0, 0.5).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"dim":2,"L":8.0,"h":0.5}"#);
        let back: Grid = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
