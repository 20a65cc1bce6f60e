//! The integral representation of powers and Gaussian-kernel positivity.
//!
//! For 0 < a < 1 and t > 0,
//!
//! ```text
//! t^(2a) = c(a) · ∫₀^∞ (1 − exp(−λ²t²)) · λ^(−1−2a) dλ,    c(a) = 2a / Γ(1 − a).
//! ```
//!
//! Applied entrywise to squared distances, this writes the snowflaked form
//! ΛD^aΛᵀ (ΣΛ = 0) as an integral of −ΛS(λ)Λᵀ against a positive weight,
//! where S(λ) is the Gaussian kernel matrix. Positivity of every S(λ) then
//! forces ΛD^aΛᵀ ≤ 0, with equality only for Λ = 0.
//!
//! Throughout, `a` is the snowflake exponent, so the verified power is t^(2a).
//!
//! # Quadrature layout
//!
//! The improper integral is split at s = 1/max(t, 1):
//!
//! * on (0, s] the substitution λ = u^p with p = 1/(2 − 2a) turns the
//!   integrand, which behaves like λ^(1−2a) near zero, into a bounded one;
//! * on [s, λ_cut] the integrand is smooth and integrated directly, with
//!   λ_cut chosen so that exp(−λ²t²) is below machine epsilon beyond it;
//! * past λ_cut only the constant limit of the bracket remains and
//!   ∫ λ^(−1−2a) is taken in closed form.

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg::SortedEigen;
use crate::metric::{euclidean_metric, PointCloud};
use crate::negative_type::{WeightVector, WEIGHT_SUM_TOL};
pub use crate::quadrature::QuadratureSpec;
use crate::quadrature::{integrate, Estimate};

/// Kernel entries below this are flushed to zero.
pub const KERNEL_FLUSH: f64 = 1e-300;

fn check_exponent(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("exponent must lie in (0, 1), got {a}")))
    }
}

/// c(a) = 2a / Γ(1 − a), the normalizing constant of the power identity.
///
/// Cross-checked against [`schoenberg_constant_by_quadrature`] in the test
/// suite; see also [`validate_schoenberg_constant`].
pub fn schoenberg_constant(a: f64) -> Result<f64> {
    check_exponent(a)?;
    Ok(2.0 * a / gamma(1.0 - a))
}

/// c(a) = 1 / ∫₀^∞ (1 − e^{−λ²}) λ^{−1−2a} dλ, computed by quadrature.
pub fn schoenberg_constant_by_quadrature(a: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_exponent(a)?;
    let integral = power_integral(1.0, a, spec)?;
    Ok(1.0 / integral.value)
}

/// Closed-form and quadrature values of c(a) side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantCheck {
    pub a: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub rel_diff: f64,
}

pub fn validate_schoenberg_constant(a: f64, spec: &QuadratureSpec) -> Result<ConstantCheck> {
    let closed_form = schoenberg_constant(a)?;
    let quadrature = schoenberg_constant_by_quadrature(a, spec)?;
    Ok(ConstantCheck {
        a,
        closed_form,
        quadrature,
        rel_diff: (closed_form - quadrature).abs() / quadrature.abs(),
    })
}

/// Both sides of t^{2a} = c(a)·∫₀^∞(1 − e^{−λ²t²})λ^{−1−2a}dλ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerIdentity {
    pub t: f64,
    pub a: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

pub fn verify_power_identity(t: f64, a: f64, spec: &QuadratureSpec) -> Result<PowerIdentity> {
    check_exponent(a)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("t must be positive and finite, got {t}")));
    }
    let c = schoenberg_constant(a)?;
    let lhs = t.powf(2.0 * a);
    let rhs = c * power_integral(t, a, spec)?.value;
    Ok(PowerIdentity {
        t,
        a,
        lhs,
        rhs,
        rel_err: (lhs - rhs).abs() / lhs,
    })
}

fn power_integral(t: f64, a: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let t2 = t * t;
    weighted_integral(|l| -(-l * l * t2).exp_m1(), 1.0, a, t, t, spec)
}

/// ∫₀^∞ f(λ)·λ^{−1−2a} dλ for a bracket f with f(λ) = O(λ²) at zero and
/// f(λ) → `limit` at infinity, where the approach to the limit is governed
/// by Gaussians with length scales between `short` and `long`.
fn weighted_integral<F: Fn(f64) -> f64>(
    f: F,
    limit: f64,
    a: f64,
    short: f64,
    long: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let split = 1.0 / long.max(1.0);
    let cut = (-f64::EPSILON.ln()).sqrt() / short;
    let cut = cut.max(split);

    let p = 1.0 / (2.0 - 2.0 * a);
    let near = integrate(
        |u: f64| {
            let l = u.powf(p);
            p * f(l) * u.powf(-2.0 * a * p - 1.0)
        },
        0.0,
        split.powf(2.0 - 2.0 * a),
        spec,
    )?;
    let middle = integrate(|l: f64| f(l) * l.powf(-1.0 - 2.0 * a), split, cut, spec)?;
    let tail = limit * cut.powf(-2.0 * a) / (2.0 * a);
    Ok(Estimate {
        value: near.value + middle.value + tail,
        error: near.error + middle.error,
    })
}

/// S[i][j] = exp(−λ²·‖pᵢ − pⱼ‖²).
pub fn gaussian_kernel_matrix(points: &PointCloud, lambda: f64) -> Result<DMatrix<f64>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!(
            "kernel scale must be positive, got {lambda}"
        )));
    }
    let n = points.len();
    let l2 = lambda * lambda;
    let mut s = DMatrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (-l2 * points.squared_distance(i, j)).exp();
            let v = if v < KERNEL_FLUSH { 0.0 } else { v };
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelPsd {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// Positive semidefiniteness over the full space (not only sum-zero
/// vectors): min eigenvalue ≥ −tol.
pub fn check_kernel_psd(s: &DMatrix<f64>, tol: f64) -> Result<KernelPsd> {
    if s.nrows() != s.ncols() {
        return Err(Error::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    let scale = s.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    for i in 0..s.nrows() {
        for j in (i + 1)..s.ncols() {
            if (s[(i, j)] - s[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::NotSymmetric {
                    i,
                    j,
                    a: s[(i, j)],
                    b: s[(j, i)],
                });
            }
        }
    }
    let min_eigenvalue = SortedEigen::new(s).min();
    Ok(KernelPsd {
        is_psd: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}

/// The snowflaked form and its Gaussian-integral representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionCheck {
    /// ΛD^aΛᵀ with D^a[i][j] = ‖pᵢ − pⱼ‖^{2a}.
    pub form_value: f64,
    /// c(a)·∫₀^∞ Λ(−S(λ))Λᵀ·λ^{−1−2a} dλ.
    pub integral_value: f64,
}

impl DecompositionCheck {
    pub fn rel_diff(&self) -> f64 {
        (self.form_value - self.integral_value).abs() / (1.0 + self.form_value.abs())
    }
}

/// Evaluates the snowflaked form directly and through the Gaussian integral.
///
/// Since ΣΛ = 0 the constant part of 1 − S(λ) drops out, so
/// Λ(−S(λ))Λᵀ = Σᵢⱼ λᵢλⱼ(1 − e^{−λ²dᵢⱼ²}); the bracket is evaluated in that
/// form to avoid cancellation for small λ.
pub fn strict_decomposition_check(
    points: &PointCloud,
    a: f64,
    weights: &WeightVector,
    spec: &QuadratureSpec,
) -> Result<DecompositionCheck> {
    check_exponent(a)?;
    let n = points.len();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    let l1: f64 = weights.0.iter().map(|w| w.abs()).sum();
    let sum = weights.sum();
    if sum.abs() > WEIGHT_SUM_TOL * l1.max(1.0) {
        return Err(Error::BadWeights { sum });
    }
    let space = euclidean_metric(points)?;

    let w = weights.as_slice();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let coef = 2.0 * w[i] * w[j];
            if coef != 0.0 {
                pairs.push((coef, space.distance(i, j)));
            }
        }
    }
    let form_value: f64 = pairs.iter().map(|&(c, d)| c * d.powf(2.0 * a)).sum();
    if pairs.is_empty() {
        return Ok(DecompositionCheck {
            form_value,
            integral_value: 0.0,
        });
    }
    let limit: f64 = pairs.iter().map(|&(c, _)| c).sum();
    let short = pairs.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
    let long = pairs.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    let bracket = |l: f64| {
        pairs
            .iter()
            .map(|&(c, d)| -c * (-l * l * d * d).exp_m1())
            .sum::<f64>()
    };
    let integral = weighted_integral(bracket, limit, a, short, long, spec)?;
    Ok(DecompositionCheck {
        form_value,
        integral_value: schoenberg_constant(a)? * integral.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_at_one_half_is_inverse_sqrt_pi() {
        let c = schoenberg_constant(0.5).unwrap();
        assert!((c - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn constant_domain() {
        for a in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(schoenberg_constant(a), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn identity_is_exact_at_t_one() {
        let spec = QuadratureSpec::default();
        for k in 1..10 {
            let a = k as f64 / 10.0;
            let c = schoenberg_constant_by_quadrature(a, &spec).unwrap();
            let r = verify_power_identity(1.0, a, &spec).unwrap();
            assert_eq!(r.lhs, 1.0);
            assert!(r.rel_err < 1e-9, "a = {a}: {r:?}");
            // definition instantiated at t = 1
            let integral = power_integral(1.0, a, &spec).unwrap().value;
            assert!((c * integral - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_rejects_bad_t() {
        let spec = QuadratureSpec::default();
        assert!(verify_power_identity(0.0, 0.5, &spec).is_err());
        assert!(verify_power_identity(-1.0, 0.5, &spec).is_err());
    }

    #[test]
    fn kernel_examples() {
        let single = PointCloud::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(gaussian_kernel_matrix(&single, 1.0).unwrap(), DMatrix::identity(1, 1));

        let pair = PointCloud::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let s = gaussian_kernel_matrix(&pair, 1.0).unwrap();
        let e = (-1.0f64).exp();
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[1.0, e, e, 1.0]));
        let psd = check_kernel_psd(&s, 1e-12).unwrap();
        assert!(psd.is_psd);
        assert!((psd.min_eigenvalue - (1.0 - e)).abs() < 1e-15);

        let wide = gaussian_kernel_matrix(&pair, 1e3).unwrap();
        assert_eq!(wide, DMatrix::identity(2, 2));
        assert!(gaussian_kernel_matrix(&pair, 0.0).is_err());
    }

    #[test]
    fn identity_kernel_is_psd() {
        let psd = check_kernel_psd(&DMatrix::identity(4, 4), 1e-12).unwrap();
        assert!(psd.is_psd);
        assert!((psd.min_eigenvalue - 1.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_and_asymmetric_inputs() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let r = check_kernel_psd(&m, 1e-12).unwrap();
        assert!(!r.is_psd);
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-15);
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        assert!(matches!(check_kernel_psd(&asym, 1e-12), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn decomposition_on_two_points() {
        let p = PointCloud::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let r = strict_decomposition_check(&p, 0.5, &vec![1.0, -1.0].into(), &QuadratureSpec::default())
            .unwrap();
        assert_eq!(r.form_value, -2.0);
        assert!(r.rel_diff() < 1e-9, "{r:?}");
    }

    #[test]
    fn decomposition_with_zero_weights() {
        let p = PointCloud::from_rows(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let r = strict_decomposition_check(&p, 0.3, &vec![0.0; 3].into(), &QuadratureSpec::default())
            .unwrap();
        assert_eq!((r.form_value, r.integral_value), (0.0, 0.0));
    }

    #[test]
    fn decomposition_rejects_unbalanced_weights() {
        let p = PointCloud::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            strict_decomposition_check(&p, 0.5, &vec![1.0, -0.5].into(), &QuadratureSpec::default()),
            Err(Error::BadWeights { .. })
        ));
    }
}
