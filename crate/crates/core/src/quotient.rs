//! Quotients E^m/G and the embedding of their snowflakes into Q(n, G).
//!
//! Q(n, G) is the hyperplane L₁(n, G) = {f ∈ R[G]^n : Σ f = 1} with its
//! standard Euclidean structure, modulo the regular action of G on each of
//! the n blocks of coordinates.
//!
//! Given n orbit representatives with free orbits, the pipeline
//!
//! 1. lifts them to the N = n·|G| points y₍ₖ,ₕ₎ = h·ŷₖ,
//! 2. forms the scalar product B = −½·P·D^α·P on the sum-zero hyperplane
//!    from the snowflaked squared distances of the lift,
//! 3. checks B is invariant under the block-regular permutations π(g),
//! 4. takes the symmetric square root T = B^{1/2}, which commutes with
//!    every π(g) and satisfies ⟨Tu, Tv⟩ = uᵀBv,
//! 5. places xₖ = (1/N)·1 + T·e₍ₖ,ₑ₎ in L₁(n, G),
//! 6. verifies that min_g ‖xᵢ − π(g)xⱼ‖ equals d_{E^m/G}(ŷᵢ, ŷⱼ)^α.
//!
//! Because π(g)xⱼ = (1/N)·1 + T·e₍ⱼ,g₎, the squared distance in step 6 is
//! exactly D^α between ŷᵢ and g·ŷⱼ, so the minimum over g is the snowflaked
//! quotient distance.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::embedding::gram_from_distances;
use crate::error::{Error, Result};
use crate::group::OrthogonalAction;
use crate::linalg::{double_center, max_abs, psd_sqrt};
use crate::metric::{PointCloud, SnowflakeExponent};

/// Default tolerance for invariance checks and distance verification.
pub const DEFAULT_QUOTIENT_TOL: f64 = 1e-8;

/// Default relative separation required between lifted points.
pub const DEFAULT_SEPARATION_TOL: f64 = 1e-9;

/// Printed with every serialized embedding.
pub const SCALE_NOTE: &str = "points lie in the hyperplane of R[G]^n with coordinate sum 1, \
standard Euclidean metric; at alpha = 0 distinct orbits sit at distance 1 (the snowflake limit), \
not at the sqrt(2) edge length of the coordinate simplex";

/// A permutation of `0..len`, stored as the image of each index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation((0..len).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::Domain(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    /// self ∘ other: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// The linear map with e_i ↦ e_{σ(i)}.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.0[i]] = x;
        }
        out
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.0.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &j) in self.0.iter().enumerate() {
            m[(j, i)] = 1.0;
        }
        m
    }
}

/// min over g of ‖x − g·y‖.
pub fn quotient_distance(x: &[f64], y: &[f64], action: &OrthogonalAction) -> Result<f64> {
    quotient_distance_argmin(x, y, action).map(|(d, _)| d)
}

/// [`quotient_distance`] together with the first minimizing element.
pub fn quotient_distance_argmin(
    x: &[f64],
    y: &[f64],
    action: &OrthogonalAction,
) -> Result<(f64, usize)> {
    for v in [x, y] {
        if v.len() != action.dim() {
            return Err(Error::DimensionMismatch {
                expected: action.dim(),
                found: v.len(),
            });
        }
    }
    let mut best = (f64::INFINITY, 0);
    for g in 0..action.order() {
        let gy = action.act(g, y);
        let d = x
            .iter()
            .zip(&gy)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if d < best.0 {
            best = (d, g);
        }
    }
    Ok(best)
}

/// Orbit representatives together with their full lift.
#[derive(Debug, Clone)]
pub struct QuotientConfiguration {
    action: OrthogonalAction,
    representatives: PointCloud,
    lifted: PointCloud,
    permutations: Vec<Permutation>,
}

impl QuotientConfiguration {
    pub fn action(&self) -> &OrthogonalAction {
        &self.action
    }

    pub fn representatives(&self) -> &PointCloud {
        &self.representatives
    }

    /// N × m; row k·|G| + h is h·ŷₖ.
    pub fn lifted(&self) -> &PointCloud {
        &self.lifted
    }

    /// π(g) for each group element g, mapping (k, h) ↦ (k, g·h).
    pub fn action_permutations(&self) -> &[Permutation] {
        &self.permutations
    }

    pub fn orbit_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn lifted_count(&self) -> usize {
        self.lifted.len()
    }

    /// Flat index of the lifted point (orbit, element).
    pub fn index(&self, orbit: usize, element: usize) -> usize {
        orbit * self.action.order() + element
    }
}

/// Lifts orbit representatives to the full preimage Y of size n·|G|.
///
/// Every lifted point must be separated from every other by more than
/// `tol · scale`, where scale is the largest representative norm (at least 1).
pub fn lift_orbits(
    reps: &PointCloud,
    action: &OrthogonalAction,
    tol: f64,
) -> Result<QuotientConfiguration> {
    if reps.dim() != action.dim() {
        return Err(Error::DimensionMismatch {
            expected: action.dim(),
            found: reps.dim(),
        });
    }
    let n = reps.len();
    let order = action.order();
    let group = action.group();
    let rows: Vec<Vec<f64>> = (0..n)
        .flat_map(|k| {
            let rep = reps.point(k);
            (0..order).map(move |h| action.act(h, &rep))
        })
        .collect();
    let lifted = PointCloud::from_rows(&rows)?;

    let scale = (0..n)
        .map(|k| reps.squared_distance_to_origin(k).sqrt())
        .fold(1.0, f64::max);
    let threshold = tol * scale;
    for a in 0..rows.len() {
        for b in (a + 1)..rows.len() {
            if lifted.squared_distance(a, b).sqrt() <= threshold {
                let (ka, ha) = (a / order, a % order);
                let (kb, hb) = (b / order, b % order);
                return Err(if ka == kb {
                    Error::NonFreeOrbit {
                        orbit: ka,
                        g: ha,
                        h: hb,
                    }
                } else {
                    Error::OrbitCollision {
                        first: ka,
                        second: kb,
                    }
                });
            }
        }
    }

    let permutations = (0..order)
        .map(|g| {
            Permutation(
                (0..n * order)
                    .map(|idx| (idx / order) * order + group.mul(g, idx % order))
                    .collect(),
            )
        })
        .collect();
    Ok(QuotientConfiguration {
        action: action.clone(),
        representatives: reps.clone(),
        lifted,
        permutations,
    })
}

/// π(g) as dense N×N matrices, one per group element.
pub fn regular_permutation_matrices(config: &QuotientConfiguration) -> Vec<DMatrix<f64>> {
    config.permutations.iter().map(Permutation::to_matrix).collect()
}

/// max over g of the largest entry of T·π(g) − π(g)·T.
pub fn equivariance_defect(t: &DMatrix<f64>, perms: &[Permutation]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for p in perms {
        if p.len() != t.nrows() || t.nrows() != t.ncols() {
            return Err(Error::DimensionMismatch {
                expected: t.nrows(),
                found: p.len(),
            });
        }
        // (Tπ)[i][j] = T[i][σ(j)], (πT)[i][j] = T[σ⁻¹(i)][j]
        let inv = p.inverse();
        for i in 0..t.nrows() {
            for j in 0..t.ncols() {
                let diff = t[(i, p.image(j))] - t[(inv.image(i), j)];
                worst = worst.max(diff.abs());
            }
        }
    }
    Ok(worst)
}

/// One row of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    /// d_{E^m/G}(ŷᵢ, ŷⱼ)^α.
    pub target: f64,
    /// min_g ‖xᵢ − π(g)xⱼ‖ in Q(n, G).
    pub achieved: f64,
    pub abs_error: f64,
}

/// n points of L₁(n, G) realizing the snowflaked quotient metric.
#[derive(Debug, Clone)]
pub struct QngEmbedding {
    pub alpha: SnowflakeExponent,
    /// n vectors of length N = n·|G|, each summing to 1.
    pub points: Vec<Vec<f64>>,
    /// T = B^{1/2}, symmetric, G-equivariant, T·1 = 0.
    pub gram_root: DMatrix<f64>,
    /// Eigenvalues of B, nonincreasing; exactly one vanishes (along 1).
    pub spectrum: Vec<f64>,
    pub equivariance_defect: f64,
    pub report: Vec<PairReport>,
    permutations: Vec<Permutation>,
}

impl QngEmbedding {
    pub fn max_abs_error(&self) -> f64 {
        self.report.iter().map(|r| r.abs_error).fold(0.0, f64::max)
    }

    pub fn max_target(&self) -> f64 {
        self.report.iter().map(|r| r.target).fold(0.0, f64::max)
    }

    /// Eigenvalues of B with |μ| ≤ rel_tol·max|μ|.
    pub fn zero_eigenvalues(&self, rel_tol: f64) -> usize {
        let top = self.spectrum.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        self.spectrum.iter().filter(|v| v.abs() <= rel_tol * top).count()
    }

    /// min over g of ‖xᵢ − π(g)xⱼ‖ and the first minimizing g.
    pub fn quotient_distance_between(&self, i: usize, j: usize) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (g, p) in self.permutations.iter().enumerate() {
            let moved = p.apply(&self.points[j]);
            let d = self.points[i]
                .iter()
                .zip(&moved)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d < best.0 {
                best = (d, g);
            }
        }
        best
    }
}

/// Embeds the snowflake X^α of the orbit space isometrically into Q(n, G).
///
/// `tol` bounds both the invariance defect of B (relative to its largest
/// entry) and the verification error (relative to 1 + the largest target
/// distance). Requires 0 ≤ α < 1.
pub fn qng_embed(
    config: &QuotientConfiguration,
    alpha: SnowflakeExponent,
    tol: f64,
) -> Result<QngEmbedding> {
    if alpha.value() >= 1.0 {
        return Err(Error::Domain(format!(
            "quotient embedding needs α in [0, 1), got {}",
            alpha.value()
        )));
    }
    let lifted = config.lifted();
    let big_n = lifted.len();
    let d_alpha = DMatrix::from_fn(big_n, big_n, |i, j| {
        let s = alpha.apply(lifted.squared_distance(i, j).sqrt());
        s * s
    });
    let b = gram_from_distances(&d_alpha);

    let perms = config.action_permutations();
    let b_defect = equivariance_defect(&b, perms)?;
    if b_defect > tol * max_abs(&b).max(f64::MIN_POSITIVE) {
        return Err(Error::InvarianceViolation { defect: b_defect });
    }

    let (root, eig) = psd_sqrt(&b);
    // project out the ones direction exactly; P commutes with every π(g)
    let gram_root = double_center(&root);
    let defect = equivariance_defect(&gram_root, perms)?;

    let identity = config.action().group().identity();
    let base = 1.0 / big_n as f64;
    let points: Vec<Vec<f64>> = (0..config.orbit_count())
        .map(|k| {
            let col = config.index(k, identity);
            (0..big_n).map(|r| base + gram_root[(r, col)]).collect()
        })
        .collect();

    let mut embedding = QngEmbedding {
        alpha,
        points,
        gram_root,
        spectrum: eig.values,
        equivariance_defect: defect,
        report: Vec::new(),
        permutations: perms.to_vec(),
    };

    let reps = config.representatives();
    let n = reps.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let geometric = quotient_distance(&reps.point(i), &reps.point(j), config.action())?;
            let target = alpha.apply(geometric);
            let (achieved, _) = embedding.quotient_distance_between(i, j);
            embedding.report.push(PairReport {
                i,
                j,
                target,
                achieved,
                abs_error: (achieved - target).abs(),
            });
        }
    }
    let limit = tol * (1.0 + embedding.max_target());
    let worst = embedding.max_abs_error();
    if worst > limit {
        return Err(Error::VerificationFailure {
            max_abs_error: worst,
            limit,
            report: embedding.report,
        });
    }
    Ok(embedding)
}
