//! Orthonormal cosine basis of the 1-D Neumann difference operator.
//!
//! On the cell-centered grid `x_j = (j + 1/2) h`, `h = pi / n`, the vectors
//! `c_m(j) = s_m cos(m x_j)` are exact eigenvectors of the ghost-eliminated
//! second-difference operator with eigenvalues `(2 - 2 cos(m h)) / h^2`.

use ndarray::Array2;
use std::f64::consts::PI;

/// Matrix whose columns are the orthonormal cosine modes.
pub fn basis(n: usize) -> Array2<f64> {
    let nf = n as f64;
    let mut c = Array2::zeros((n, n));
    for m in 0..n {
        let scale = if m == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        for j in 0..n {
            c[(j, m)] = scale * (m as f64 * (j as f64 + 0.5) * PI / nf).cos();
        }
    }
    c
}

/// Eigenvalues of the 1-D Neumann operator, indexed by mode number.
pub fn eigenvalues(n: usize) -> Vec<f64> {
    let h = PI / n as f64;
    (0..n).map(|m| (2.0 - 2.0 * (m as f64 * h).cos()) / (h * h)).collect()
}
