//! Inequalities of negative type.
//!
//! For a finite metric with squared-distance matrix D, the form ΛDΛᵀ over
//! weight vectors with ΣΛ = 0 is nonpositive exactly when the space embeds
//! isometrically into Hilbert space. Deciding this by search over Λ is
//! unnecessary: on the sum-zero subspace ΛDΛᵀ = −2·Λ(−½PDP)Λᵀ, so the
//! condition is positive semidefiniteness of the double-centered matrix
//! −½PDP restricted to that subspace, and the eigenvector of its smallest
//! eigenvalue is the sharpest violator.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{bilinear, sum_zero_spectrum, SortedEigen};
use crate::metric::{
    euclidean_metric, snowflake, squared_distance_matrix, FiniteMetricSpace, PointCloud,
    SnowflakeExponent,
};

/// Tolerance on |ΣΛ| for weight vectors that must sum to zero.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Default relative tolerance for spectral decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A weight vector Λ = (λ₁, …, λₙ).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(v: Vec<f64>) -> Self {
        WeightVector(v)
    }
}

/// Outcome of a negative-type test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeTypeReport {
    pub is_negative_type: bool,
    pub is_strict: bool,
    /// Smallest eigenvalue of −½PDP on the sum-zero subspace. Infinite for a
    /// one-point space, where that subspace is trivial.
    pub min_eigenvalue: f64,
    /// Largest eigenvalue magnitude on the same subspace; tolerances are
    /// relative to it.
    pub spectral_radius: f64,
    /// Unit sum-zero eigenvector of `min_eigenvalue`, present when the test
    /// fails or is not strict.
    pub witness: Option<WeightVector>,
}

impl NegativeTypeReport {
    /// Negative type is equivalent to isometric embeddability into Hilbert
    /// space.
    pub fn embeddable(&self) -> bool {
        self.is_negative_type
    }

    fn from_spectrum(eig: &SortedEigen, tol: f64) -> Self {
        if eig.values.is_empty() {
            return NegativeTypeReport {
                is_negative_type: true,
                is_strict: true,
                min_eigenvalue: f64::INFINITY,
                spectral_radius: 0.0,
                witness: None,
            };
        }
        let radius = eig.spectral_radius();
        let min = eig.min();
        let is_negative_type = min >= -tol * radius;
        let is_strict = min > tol * radius;
        let witness = (!is_strict).then(|| {
            let last = eig.values.len() - 1;
            WeightVector(eig.vectors.column(last).iter().copied().collect())
        });
        NegativeTypeReport {
            is_negative_type,
            is_strict,
            min_eigenvalue: min,
            spectral_radius: radius,
            witness,
        }
    }
}

/// ΛDΛᵀ = Σᵢⱼ λᵢλⱼD[i][j].
pub fn quadratic_form(d: &DMatrix<f64>, weights: &WeightVector) -> Result<f64> {
    if d.nrows() != d.ncols() {
        return Err(Error::NotSquare {
            rows: d.nrows(),
            cols: d.ncols(),
        });
    }
    if d.nrows() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: d.nrows(),
            found: weights.len(),
        });
    }
    Ok(bilinear(d, weights.as_slice()))
}

/// Decides whether ΛDΛᵀ ≤ 0 for all sum-zero Λ, relative to `tol`.
pub fn check_negative_type(space: &FiniteMetricSpace, tol: f64) -> NegativeTypeReport {
    let eig = sum_zero_spectrum(&squared_distance_matrix(space));
    NegativeTypeReport::from_spectrum(&eig, tol)
}

/// Strict negative type of the snowflake X^α of a Hilbert-embeddable space.
///
/// For α < 1 and distinct points the form is strictly negative on every
/// nonzero sum-zero Λ. α = 1 is accepted so that callers can observe the
/// failure of strictness on affinely dependent inputs.
pub fn check_strict_negative_type(
    space: &FiniteMetricSpace,
    alpha: SnowflakeExponent,
    tol: f64,
) -> Result<NegativeTypeReport> {
    if alpha.value() <= 0.0 {
        return Err(Error::Domain(format!(
            "strict negative type needs α in (0, 1], got {}",
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
    let report = check_negative_type(&snowflake(space, alpha), tol);
    if !report.is_strict {
        return Err(Error::NotStrict {
            min_eigenvalue: report.min_eigenvalue,
            witness: report.witness.map(|w| w.0).unwrap_or_default(),
        });
    }
    Ok(report)
}

/// Both sides of ΛDΛᵀ = −2‖x₊ − x₋‖².
///
/// `weights` must split into a nonnegative part summing to 1 and a
/// nonpositive part summing to −1. Here x₊ = Σ_{λᵢ>0} λᵢpᵢ and
/// x₋ = Σ_{λᵢ<0} |λᵢ|pᵢ, so both are convex combinations of the points.
/// (With signed weights in x₋ the identity would not balance.)
pub fn geometric_form_check(points: &PointCloud, weights: &WeightVector) -> Result<(f64, f64)> {
    let n = points.len();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    let positive: f64 = weights.0.iter().filter(|&&w| w > 0.0).sum();
    let negative: f64 = weights.0.iter().filter(|&&w| w < 0.0).sum();
    if (positive - 1.0).abs() > WEIGHT_SUM_TOL || (negative + 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::BadPartition { positive, negative });
    }
    let d = DMatrix::from_fn(n, n, |i, j| points.squared_distance(i, j));
    let lhs = bilinear(&d, weights.as_slice());

    let m = points.dim();
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    for (i, &w) in weights.0.iter().enumerate() {
        let target = if w > 0.0 { &mut plus } else { &mut minus };
        for (c, slot) in target.iter_mut().enumerate() {
            *slot += w.abs() * points.coordinates()[(i, c)];
        }
    }
    let gap: f64 = plus.iter().zip(&minus).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((lhs, -2.0 * gap))
}

/// Affine independence test for a point cloud.
///
/// `is_strict` reports general position: the smallest eigenvalue of the
/// centered Gram form on the sum-zero subspace exceeds `tol` times the
/// largest. Otherwise `witness` holds a unit sum-zero Λ with ΛDΛᵀ ≈ 0, an
/// affine dependence among the points.
pub fn general_position_certificate(points: &PointCloud, tol: f64) -> Result<NegativeTypeReport> {
    let space = euclidean_metric(points)?;
    Ok(check_negative_type(&space, tol))
}
