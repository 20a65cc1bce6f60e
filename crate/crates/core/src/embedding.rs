//! Spectral isometric embedding by double centering.
//!
//! A metric of negative type on n points is realized in E^r, r ≤ n − 1, by
//! the eigenvectors of the centered Gram form scaled by the square roots of
//! their eigenvalues. For the snowflake of a Hilbert-embeddable space with
//! 0 < α < 1 the form is positive definite on the sum-zero subspace, so the
//! image spans exactly n − 1 dimensions; [`snowflake_embed`] enforces that.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{double_center, sum_zero_spectrum};
use crate::metric::{snowflake, squared_distance_matrix, FiniteMetricSpace, SnowflakeExponent};
use crate::negative_type::check_negative_type;

/// Largest point count accepted by [`embed`]; the eigensolver is O(n³).
pub const MAX_POINTS: usize = 4096;

/// Largest relative distance error accepted from an embedding.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    /// n×r coordinates centered at the centroid.
    pub coordinates: DMatrix<f64>,
    /// Spectrum of the centered Gram form on the sum-zero subspace,
    /// nonincreasing, length n − 1.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    /// max over pairs of |‖pᵢ − pⱼ‖ − d(i, j)| / d(i, j).
    pub residual: f64,
}

impl EmbeddingResult {
    pub fn dimension(&self) -> usize {
        self.coordinates.ncols()
    }

    /// Smallest eigenvalue that was kept, if any.
    pub fn smallest_kept_eigenvalue(&self) -> Option<f64> {
        self.rank.checked_sub(1).map(|k| self.eigenvalues[k])
    }

    pub fn largest_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Pairwise distances between the embedded points.
    pub fn distances(&self) -> DMatrix<f64> {
        let n = self.coordinates.nrows();
        DMatrix::from_fn(n, n, |i, j| {
            (self.coordinates.row(i) - self.coordinates.row(j)).norm()
        })
    }
}

/// B = −½·P·D·P with P = I − (1/n)·ones.
pub fn gram_from_distances(d: &DMatrix<f64>) -> DMatrix<f64> {
    double_center(d) * -0.5
}

/// Embeds a metric of negative type isometrically into Euclidean space.
///
/// Eigenpairs above `tol · λ_max` are kept. Fails with
/// [`Error::NotEmbeddable`] when some eigenvalue lies below `−tol · λ_max`,
/// carrying the offending eigenvector as a negative-type witness.
pub fn embed(space: &FiniteMetricSpace, tol: f64) -> Result<EmbeddingResult> {
    let n = space.len();
    if n > MAX_POINTS {
        return Err(Error::Domain(format!(
            "{n} points exceed the embedding cap of {MAX_POINTS}"
        )));
    }
    let eig = sum_zero_spectrum(&squared_distance_matrix(space));
    let top = eig.max();
    let cutoff = tol * top;
    if let Some(k) = eig.values.iter().rposition(|&v| v < -cutoff) {
        return Err(Error::NotEmbeddable {
            eigenvalue: eig.values[k],
            witness: eig.vectors.column(k).iter().copied().collect(),
        });
    }
    let rank = eig.values.iter().take_while(|&&v| v > cutoff).count();
    let mut coordinates = DMatrix::zeros(n, rank);
    for k in 0..rank {
        let scale = eig.values[k].sqrt();
        coordinates.set_column(k, &(eig.vectors.column(k) * scale));
    }
    let residual = embedding_residual(&coordinates, space)?;
    if residual > RESIDUAL_LIMIT {
        return Err(Error::ResidualExceeded {
            residual,
            limit: RESIDUAL_LIMIT,
        });
    }
    Ok(EmbeddingResult {
        coordinates,
        eigenvalues: eig.values,
        rank,
        residual,
    })
}

/// Embeds the snowflake X^α of a Hilbert-embeddable space, requiring full
/// rank n − 1.
///
/// A rank deficit is reported as [`Error::TheoremViolation`]; at sane
/// tolerances it can only come from numerical breakdown.
pub fn snowflake_embed(
    space: &FiniteMetricSpace,
    alpha: SnowflakeExponent,
    tol: f64,
) -> Result<EmbeddingResult> {
    if !alpha.is_proper() {
        return Err(Error::Domain(format!(
            "snowflake embedding needs α in (0, 1), got {}",
            alpha.value()
        )));
    }
    let base = check_negative_type(space, tol);
    if !base.is_negative_type {
        return Err(Error::NotEmbeddable {
            eigenvalue: base.min_eigenvalue,
            witness: base.witness.map(|w| w.0).unwrap_or_default(),
        });
    }
    let result = embed(&snowflake(space, alpha), tol)?;
    let expected = space.len() - 1;
    if result.rank != expected {
        return Err(Error::TheoremViolation {
            expected,
            found: result.rank,
            spectrum: result.eigenvalues,
        });
    }
    Ok(result)
}

/// Largest relative distance error of `coords` against `space`.
pub fn embedding_residual(coords: &DMatrix<f64>, space: &FiniteMetricSpace) -> Result<f64> {
    let n = space.len();
    if coords.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: coords.nrows(),
        });
    }
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let achieved = (coords.row(i) - coords.row(j)).norm();
            let target = space.distance(i, j);
            worst = worst.max((achieved - target).abs() / target);
        }
    }
    Ok(worst)
}
