//! Dense symmetric linear algebra shared by the embedding, negative-type and
//! quotient modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted in
/// nonincreasing order (ties broken by the solver's original index).
///
/// Each eigenvector is sign-normalized so that its entry of largest magnitude
/// is positive, making results reproducible across runs.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl SortedEigen {
    pub fn new(matrix: &DMatrix<f64>) -> Self {
        // symmetrize first so round-off in the input cannot leak into the solver
        let sym = (matrix + matrix.transpose()) * 0.5;
        let n = sym.nrows();
        if n == 0 {
            return SortedEigen {
                values: Vec::new(),
                vectors: DMatrix::zeros(0, 0),
            };
        }
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            let pivot = col
                .iter()
                .copied()
                .fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
            if pivot < 0.0 {
                col.neg_mut();
            }
            vectors.set_column(dst, &col);
        }
        SortedEigen { values, vectors }
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Orthonormal basis of the sum-zero subspace of R^n (Helmert contrasts),
/// as an n×(n−1) matrix.
///
/// Column k−1 is (1,…,1,−k,0,…,0)/√(k(k+1)) with k leading ones.
pub fn sum_zero_basis(n: usize) -> DMatrix<f64> {
    let cols = n.saturating_sub(1);
    let mut basis = DMatrix::zeros(n, cols);
    for c in 0..cols {
        let k = (c + 1) as f64;
        let norm = (k * (k + 1.0)).sqrt();
        for r in 0..=c {
            basis[(r, c)] = 1.0 / norm;
        }
        basis[(c + 1, c)] = -k / norm;
    }
    basis
}

/// Spectrum of the form −½·ΛDΛᵀ restricted to sum-zero Λ.
///
/// Eigenvectors are returned in R^n (so each column sums to zero), which is
/// the convention for negative-type witnesses and embedding coordinates.
pub fn sum_zero_spectrum(squared: &DMatrix<f64>) -> SortedEigen {
    let n = squared.nrows();
    let basis = sum_zero_basis(n);
    // for sum-zero V, Vᵀ(−½PDP)V = −½VᵀDV since PV = V
    let restricted = basis.transpose() * squared * &basis * -0.5;
    let eig = SortedEigen::new(&restricted);
    SortedEigen {
        values: eig.values,
        vectors: basis * eig.vectors,
    }
}

/// ΛMΛᵀ for a square matrix M, summed directly.
pub fn bilinear(matrix: &DMatrix<f64>, weights: &[f64]) -> f64 {
    let n = weights.len();
    let mut total = 0.0;
    for j in 0..n {
        let wj = weights[j];
        if wj == 0.0 {
            continue;
        }
        let mut col = 0.0;
        for i in 0..n {
            col += weights[i] * matrix[(i, j)];
        }
        total += wj * col;
    }
    total
}

/// Symmetric PSD square root via eigendecomposition; eigenvalues below zero
/// (round-off) are clamped to zero.
pub fn psd_sqrt(matrix: &DMatrix<f64>) -> (DMatrix<f64>, SortedEigen) {
    let eig = SortedEigen::new(matrix);
    let roots = DVector::from_iterator(eig.values.len(), eig.values.iter().map(|v| v.max(0.0).sqrt()));
    let scaled = &eig.vectors * DMatrix::from_diagonal(&roots);
    let root = &scaled * eig.vectors.transpose();
    (root, eig)
}

/// P·M·P with P = I − (1/n)·ones: removes row and column means.
pub fn double_center(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| m.row(i).sum() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| m.column(j).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    DMatrix::from_fn(n, n, |i, j| m[(i, j)] - (row_means[i] + col_means[j]) + grand)
}

pub(crate) fn max_abs(matrix: &DMatrix<f64>) -> f64 {
    matrix.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}
