//! Small dense helpers over `nalgebra` complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let h = (m + m.adjoint()).scale(0.5);
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Trace norm of a Hermitian matrix: the sum of absolute eigenvalues.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

/// `exp(G)` for skew-Hermitian `G`, through the eigendecomposition of `iG`.
pub fn expm_skew_hermitian(generator: &CMatrix) -> CMatrix {
    let n = generator.nrows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    // G = -iH with H = iG Hermitian, so exp(G) = V exp(-i diag(e)) V†.
    let h = generator.map(|z| I * z);
    let (values, vectors) = hermitian_eigen(&h);
    let mut scaled = vectors.clone();
    for (c, &e) in values.iter().enumerate() {
        let mut col = scaled.column_mut(c);
        col *= Complex64::from_polar(1.0, -e);
    }
    scaled * vectors.adjoint()
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let product = u.adjoint() * u;
    max_abs(&(product - CMatrix::identity(n, n)))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `|M - M†|`.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `|v⟩⟨v|`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}
