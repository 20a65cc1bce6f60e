//! Test-only oracles and generators, independent of the library's numerics.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snowflake_embed::PointCloud;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
pub fn jacobi_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (upper, lower) = a.split_at_mut(q);
                for (x, y) in upper[p].iter_mut().zip(lower[0].iter_mut()) {
                    let (apk, aqk) = (*x, *y);
                    *x = c * apk - s * aqk;
                    *y = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    values
}

/// −½·P·D·P built with an explicit centering matrix.
pub fn centered_gram(squared: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = squared.len();
    let p: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64).collect())
        .collect();
    let mul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect())
            .collect()
    };
    let pd = mul(&p, &squared.to_vec());
    mul(&pd, &p)
        .into_iter()
        .map(|row| row.into_iter().map(|v| -0.5 * v).collect())
        .collect()
}

/// Spectrum of the centered Gram form on the sum-zero subspace, descending:
/// the full spectrum of −½PDP with the eigenvalue of the ones direction
/// (the one closest to zero) removed.
pub fn sum_zero_spectrum_oracle(squared: &[Vec<f64>]) -> Vec<f64> {
    let mut values = jacobi_eigenvalues(&centered_gram(squared));
    let k = (0..values.len())
        .min_by(|&a, &b| values[a].abs().partial_cmp(&values[b].abs()).unwrap())
        .unwrap();
    values.remove(k);
    values.reverse();
    values
}

pub fn squared_from_points(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum())
                .collect()
        })
        .collect()
}

pub fn powered(squared: &[Vec<f64>], alpha: f64) -> Vec<Vec<f64>> {
    squared
        .iter()
        .map(|r| r.iter().map(|&v| if v == 0.0 { 0.0 } else { v.powf(alpha) }).collect())
        .collect()
}

/// ∫₀^∞ f by double-exponential (tanh-sinh style exp-sinh) quadrature:
/// x = exp(π/2·sinh s) on a uniform grid in s.
pub fn exp_sinh_integral<F: Fn(f64) -> f64>(f: F) -> f64 {
    let h = 1.0 / 64.0;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut total = 0.0;
    let mut k: i64 = -400;
    while k <= 400 {
        let s = k as f64 * h;
        let x = (half_pi * s.sinh()).exp();
        let dx = half_pi * s.cosh() * x;
        if x.is_finite() && x > 0.0 && dx.is_finite() {
            let v = f(x) * dx;
            if v.is_finite() {
                total += v;
            }
        }
        k += 1;
    }
    total * h
}

pub fn random_points<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

pub fn cloud(points: &[Vec<f64>]) -> PointCloud {
    PointCloud::from_rows(points).unwrap()
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Random sum-zero weight vector with positive part summing to 1 and
/// negative part summing to −1.
pub fn admissible_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let split = rng.random_range(1..n);
    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let pos: f64 = w[..split].iter().sum();
    let neg: f64 = w[split..].iter().sum();
    for v in &mut w[..split] {
        *v /= pos;
    }
    for v in &mut w[split..] {
        *v = -*v / neg;
    }
    w
}

/// Random nonzero weight vector with zero sum.
pub fn sum_zero_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = w.iter().sum::<f64>() / n as f64;
    for v in &mut w {
        *v -= mean;
    }
    w
}
