//! Radius calculus for `L`-lists of points in `R^n`.

mod chebyshev;
mod io;
mod radius;
mod spectral;

pub use chebyshev::{
    chebyshev_radius, chebyshev_radius_exact, default_max_iters, ChebResult, EXACT_MAX_LIST, EXACT_MAX_SUPPORT,
};
pub use io::{parse_point_file, read_point_list, render_point_file, PointFile};
pub use radius::{
    avg_sq_radius, avg_sq_radius_spherical, centroid, max_centroid_dist_sq, quadratic_form_g, rad_p, sq_dist,
    AvgRadiusFormula, RadPResult,
};
pub use spectral::{spectral_pair, SpectralPair};

use crate::{Error, Result};

/// An ordered list of `L >= 2` points sharing one dimension `n >= 1`.
///
/// Duplicate points are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct PointList {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointList {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(format!("a list needs at least 2 points, got {}", points.len())));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("points must have dimension >= 1".into()));
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { index, expected: dim, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("point {index} has a non-finite coordinate")));
            }
        }
        Ok(Self { points, dim })
    }

    /// Builds a list of one-dimensional points.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    /// Number of points, `L`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: a valid list holds at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ambient dimension, `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Coordinate `j` of every point, i.e. the `j`-th column of the `L x n` matrix.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[j]).collect()
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }
}

/// Tolerance on `|sum(z) - 1|` for [`SimplexWeights`].
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// A probability vector on `{0, .., L-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidInput("simplex weights must be nonempty".into()));
        }
        if let Some(i) = z.iter().position(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidInput(format!("weight {i} is negative or NaN: {}", z[i])));
        }
        let sum: f64 = z.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(Error::InvalidInput(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(z))
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sum_i z_i x_i`.
    pub fn barycenter(&self, list: &PointList) -> Vec<f64> {
        let mut y = vec![0.0; list.dim()];
        for (w, p) in self.0.iter().zip(list.points()) {
            for (yj, pj) in y.iter_mut().zip(p) {
                *yj += w * pj;
            }
        }
        y
    }
}
