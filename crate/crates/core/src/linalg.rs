//! Dense Hermitian helpers shared by the measurement and information modules.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::fock::C64;

/// (M + M†)/2.
pub fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Largest entry modulus.
pub fn max_abs<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// max |M − M†|.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    max_abs((m - m.adjoint()).iter())
}

/// max |M − 1|.
pub fn identity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    max_abs((m - DMatrix::<C64>::identity(n, m.ncols())).iter())
}

/// Base-2 entropy of a spectrum, clipping negative eigenvalues to zero.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Base-2 von Neumann entropy.
pub fn von_neumann_entropy(rho: &DMatrix<C64>) -> f64 {
    spectrum_entropy(&hermitian_eigenvalues(rho))
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (values, vectors) = hermitian_eigen(m);
    let roots = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)),
    ));
    &vectors * roots * vectors.adjoint()
}

/// tr(A B) without forming the product.
pub fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
