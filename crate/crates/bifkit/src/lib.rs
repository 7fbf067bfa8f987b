//! Numerical toolkit for the steady bifurcation scenario of
//! `laplace(u) + lambda u = f(u, lambda)` on the square `(0, pi)^2` under a
//! homotopy of boundary conditions: Neumann on the vertical sides, and a
//! Robin pair on the horizontal sides that slides from Neumann (`mu = 0`)
//! to Dirichlet (`mu = 1`).
//!
//! The crate computes, in closed form where possible and on an independent
//! finite-difference oracle everywhere:
//!
//! - wavenumber curves `k(mu)` of the transcendental characteristic
//!   equation, with parity tracking ([`wavenumber`]);
//! - eigenvalues `lambda = n^2 + k(mu)^2`, eigenfunctions, and the curves
//!   of bifurcation points with their crossings ([`spectrum`]);
//! - the sign-extended dihedral symmetry action, isotropy subgroups, and
//!   equivariance checks ([`symmetry`]);
//! - reduced bifurcation coefficients at simple and double points, by
//!   closed-form quadrature and by a discretized solution operator
//!   ([`reduction`], [`grid`]);
//! - explicit bifurcating branch families with symmetry labels and
//!   secondary-bifurcation loci, validated against Newton/arclength
//!   continuation of the discrete problem ([`scenario`], [`continuation`]).
//!
//! The `bifkit` binary exposes the whole pipeline as subcommands
//! (`spectrum`, `coeffs`, `diagram`, `trace`, `verify`); see the guide in
//! `book/` for a narrative walkthrough.

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod continuation;
pub mod error;
pub mod grid;
pub mod homotopy;
pub mod linalg;
pub mod nonlinearity;
pub mod quad;
pub mod reduction;
pub mod scenario;
pub mod spectrum;
pub mod symmetry;
pub mod wavenumber;

pub use error::{Error, Result};

// The guide's code blocks run as doctests so the book cannot drift from
// the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/homotopy.md")]
    mod homotopy {}
    #[doc = include_str!("../../../book/src/wavenumbers.md")]
    mod wavenumbers {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/symmetry.md")]
    mod symmetry {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/scenario.md")]
    mod scenario {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
