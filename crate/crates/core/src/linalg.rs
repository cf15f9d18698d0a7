//! Dense Hermitian eigendecomposition backed by faer.

use faer::complex_native::c64;
use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// as columns.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    let a = Mat::<c64>::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        c64 { re: z.re, im: z.im }
    });
    let evd = a.selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s.read(x).re.total_cmp(&s.read(y).re));
    let values = order.iter().map(|&k| s.read(k).re).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| {
        let z = u.read(i, order[j]);
        Complex64::new(z.re, z.im)
    });
    (values, vectors)
}

/// Real symmetric counterpart of [`hermitian_eigen`].
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let a = Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = a.selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s.read(x).total_cmp(&s.read(y)));
    let values = order.iter().map(|&k| s.read(k)).collect();
    (values, DMatrix::from_fn(n, n, |i, j| u.read(i, order[j])))
}
