//! Finite metric spaces, point clouds and the snowflake transform.
//!
//! A [`FiniteMetricSpace`] is always validated on construction: its distance
//! matrix is exactly symmetric with a zero diagonal, positive off-diagonal
//! entries and the triangle inequality holding up to a tolerance scaled by
//! the largest distance.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for the triangle inequality.
pub const DEFAULT_TRIANGLE_TOL: f64 = 1e-12;

/// An n-point metric space stored as a dense distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    distances: DMatrix<f64>,
}

impl FiniteMetricSpace {
    /// Validates `distances` and wraps it. See [`validate_metric`].
    pub fn new(distances: DMatrix<f64>, tol: f64) -> Result<Self> {
        validate_metric(distances, tol)
    }

    /// Builds a space from nested rows.
    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        validate_metric(DMatrix::from_fn(n, n, |i, j| rows[i][j]), tol)
    }

    pub fn len(&self) -> usize {
        self.distances.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[(i, j)]
    }

    pub fn distances(&self) -> &DMatrix<f64> {
        &self.distances
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.max()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.distances.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// Skips validation. Only for transforms that provably preserve the axioms.
    fn from_trusted(distances: DMatrix<f64>) -> Self {
        FiniteMetricSpace { distances }
    }
}

/// Snowflake exponent α ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SnowflakeExponent(f64);

impl SnowflakeExponent {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "snowflake exponent must lie in [0, 1], got {alpha}"
            )));
        }
        Ok(SnowflakeExponent(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True for α in the open interval (0, 1), where the general-position
    /// guarantee applies.
    pub fn is_proper(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }

    /// Applies t ↦ t^α, with the convention 0^α = 0 and t^0 = 1 for t > 0.
    pub fn apply(self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else if self.0 == 0.0 {
            1.0
        } else if self.0 == 1.0 {
            t
        } else {
            t.powf(self.0)
        }
    }
}

/// n points in E^m, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coordinates: DMatrix<f64>,
}

impl PointCloud {
    pub fn new(coordinates: DMatrix<f64>) -> Result<Self> {
        if coordinates.nrows() == 0 {
            return Err(Error::Empty);
        }
        for i in 0..coordinates.nrows() {
            for j in 0..coordinates.ncols() {
                if !coordinates[(i, j)].is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
            }
        }
        Ok(PointCloud { coordinates })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let m = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        PointCloud::new(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }

    pub fn len(&self) -> usize {
        self.coordinates.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.coordinates.ncols()
    }

    pub fn coordinates(&self) -> &DMatrix<f64> {
        &self.coordinates
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.coordinates.row(i).iter().copied().collect()
    }

    pub fn squared_distance_to_origin(&self, i: usize) -> f64 {
        self.coordinates.row(i).norm_squared()
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        (0..self.dim())
            .map(|c| {
                let d = self.coordinates[(i, c)] - self.coordinates[(j, c)];
                d * d
            })
            .sum()
    }
}

/// Checks the metric axioms on a square matrix.
///
/// Symmetry and the zero diagonal are checked exactly; the triangle inequality
/// is allowed an additive slack of `tol · max d`.
pub fn validate_metric(matrix: DMatrix<f64>, tol: f64) -> Result<FiniteMetricSpace> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Err(Error::Empty);
    }
    let n = rows;
    for i in 0..n {
        for j in 0..n {
            if !matrix[(i, j)].is_finite() {
                return Err(Error::NonFinite { i, j });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (matrix[(i, j)], matrix[(j, i)]);
            if a != b {
                return Err(Error::NotSymmetric { i, j, a, b });
            }
        }
    }
    for i in 0..n {
        if matrix[(i, i)] != 0.0 {
            return Err(Error::NonzeroDiagonal {
                i,
                value: matrix[(i, i)],
            });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix[(i, j)] <= 0.0 {
                return Err(Error::NonpositiveOffDiagonal {
                    i,
                    j,
                    value: matrix[(i, j)],
                });
            }
        }
    }
    let slack = tol * matrix.max();
    for i in 0..n {
        for j in (i + 1)..n {
            let direct = matrix[(i, j)];
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let detour = matrix[(i, k)] + matrix[(k, j)];
                if direct > detour + slack {
                    return Err(Error::TriangleViolation {
                        i,
                        j,
                        k,
                        direct,
                        detour,
                    });
                }
            }
        }
    }
    Ok(FiniteMetricSpace::from_trusted(matrix))
}

/// The snowflake X^α: every distance raised to the power α.
///
/// At α = 0 every off-diagonal distance becomes 1 (the uniform metric of a
/// regular simplex), which is the pointwise limit as α → 0.
pub fn snowflake(space: &FiniteMetricSpace, alpha: SnowflakeExponent) -> FiniteMetricSpace {
    let d = space.distances.map(|t| alpha.apply(t));
    // t ↦ t^α is subadditive on [0, ∞) for α ≤ 1, so the axioms survive
    FiniteMetricSpace::from_trusted(d)
}

/// Pairwise Euclidean distances of a point cloud.
pub fn euclidean_metric(points: &PointCloud) -> Result<FiniteMetricSpace> {
    let n = points.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = points.squared_distance(i, j).sqrt();
            if dist == 0.0 {
                return Err(Error::DuplicatePoints { i, j });
            }
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    Ok(FiniteMetricSpace::from_trusted(d))
}

/// D with D[i][j] = d(i, j)².
pub fn squared_distance_matrix(space: &FiniteMetricSpace) -> DMatrix<f64> {
    space.distances.map(|t| t * t)
}
