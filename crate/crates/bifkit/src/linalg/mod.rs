//! Small dense/structured linear-algebra kernels used by the grid
//! operator: the cosine basis that diagonalizes the Neumann direction,
//! tridiagonal factorizations for the separated vertical operator, a
//! right-preconditioned GMRES for the Newton systems, and a symmetric
//! Lanczos iteration for the spectrum.

pub mod dct;
pub mod gmres;
pub mod lanczos;
pub mod tridiag;
