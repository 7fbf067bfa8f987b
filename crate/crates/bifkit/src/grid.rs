//! Finite-difference oracle: the operator `(-laplace + 1)` on the square
//! with the homotopy boundary conditions, its inverse (the solution
//! operator), the derivative of the inverse in the homotopy parameter,
//! eigenvalue extraction, and the residual of the fixed-point map `G`.
//!
//! Discretization: second-order five-point stencil on a uniform
//! cell-centered grid, boundary conditions eliminated through ghost cells.
//! In the x-direction the Neumann ghost is a plain mirror; in the
//! y-direction the Robin condition `h0 u -/+ h1 du/dy = 0` gives the ghost
//! coefficient
//!
//! ```text
//! beta = (h1 - (h/2) h0) / (h1 + (h/2) h0),
//! ```
//!
//! which runs from `+1` (Neumann) to `-1` (Dirichlet) as `mu` goes from 0
//! to 1, so the Dirichlet limit needs no row surgery. Corner cells receive
//! both eliminations. The assembled matrix is symmetric positive definite;
//! the x-direction is diagonalized exactly by the cosine basis and the
//! remaining tridiagonal systems are factored once per assembly, giving a
//! fast direct solver.
//!
//! Sign convention: the positive-definite operator `A = -laplace + 1` is
//! stored and factored; the solution operator of the problem
//! `laplace u - u = g` is `T = -A^(-1)`. The linearization of `G` about
//! the trivial solution, `I + (lambda + 1) T`, is then singular exactly at
//! the discrete eigenvalues `lambda` of `-laplace`.

use crate::error::{Error, Result};
use crate::homotopy::HomotopySpec;
use crate::linalg::dct;
use crate::linalg::gmres::{gmres, GmresOptions};
use crate::linalg::lanczos::{lanczos, LanczosOptions, RitzSelect};
use crate::linalg::tridiag::{SpdFactor, SymTridiag};
use crate::nonlinearity::Nonlinearity;
use ndarray::{Array1, Array2};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Assembled discrete operator at a fixed homotopy parameter, with its
/// factorization cache. Immutable after assembly; concurrent solves are
/// safe.
pub struct GridOperator {
    n: usize,
    mu: f64,
    spec: HomotopySpec,
    h: f64,
    beta: f64,
    ax_diag: Vec<f64>,
    ay: SymTridiag,
    basis: Array2<f64>,
    alpha: Vec<f64>,
    y_factors: Vec<SpdFactor>,
    y_eigen: OnceLock<YEigen>,
}

struct YEigen {
    gamma: Vec<f64>,
    /// Columns are orthonormal eigenvectors of the vertical operator.
    vectors: Array2<f64>,
}

/// Builds the operator at grid size `n` and homotopy parameter `mu`.
pub fn assemble(n: usize, mu: f64, spec: &HomotopySpec) -> Result<GridOperator> {
    assert!(n >= 8, "grid too coarse");
    assert!((0.0..=1.0).contains(&mu), "mu outside the homotopy interval");
    let h = PI / n as f64;
    let h0 = spec.h0(mu);
    let h1 = spec.h1(mu);
    if h1 == 0.0 && mu < 1.0 {
        return Err(Error::SpecViolation(format!(
            "h1({mu}) = 0 before the Dirichlet end of the homotopy"
        )));
    }
    if h0 * h1 < 0.0 {
        return Err(Error::SpecViolation(format!(
            "h0 h1 < 0 at mu = {mu}: the form is not coercive"
        )));
    }
    let denom = h1 + 0.5 * h * h0;
    if denom == 0.0 {
        return Err(Error::SpecViolation(format!("degenerate ghost elimination at mu = {mu}")));
    }
    let beta = (h1 - 0.5 * h * h0) / denom;

    let hh = h * h;
    let mut ax_diag = vec![2.0 / hh; n];
    ax_diag[0] = 1.0 / hh;
    ax_diag[n - 1] = 1.0 / hh;
    let mut ay_diag = vec![2.0 / hh; n];
    ay_diag[0] = (2.0 - beta) / hh;
    ay_diag[n - 1] = (2.0 - beta) / hh;
    let ay = SymTridiag { diag: ay_diag, off: vec![-1.0 / hh; n - 1] };

    let basis = dct::basis(n);
    let alpha = dct::eigenvalues(n);
    let mut y_factors = Vec::with_capacity(n);
    for &a in &alpha {
        y_factors.push(ay.shifted(a + 1.0).factor_spd()?);
    }

    Ok(GridOperator {
        n,
        mu,
        spec: spec.clone(),
        h,
        beta,
        ax_diag,
        ay,
        basis,
        alpha,
        y_factors,
        y_eigen: OnceLock::new(),
    })
}

impl GridOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn spec(&self) -> &HomotopySpec {
        &self.spec
    }

    pub fn robin_beta(&self) -> f64 {
        self.beta
    }

    /// Cell-center coordinate of index `i` (same spacing on both axes).
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    /// Samples a function of `(x, y)` at the cell centers.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> Array2<f64> {
        Array2::from_shape_fn((self.n, self.n), |(i, j)| f(self.coord(i), self.coord(j)))
    }

    /// Discrete L2 inner product (midpoint rule).
    pub fn inner(&self, u: &Array2<f64>, v: &Array2<f64>) -> f64 {
        self.h * self.h * u.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm(&self, u: &Array2<f64>) -> f64 {
        self.inner(u, u).sqrt()
    }

    /// Applies the assembled matrix `A = -laplace_h + I`.
    pub fn apply_matrix(&self, u: &Array2<f64>) -> Array2<f64> {
        let n = self.n;
        let hh = self.h * self.h;
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut v = (self.ax_diag[i] + self.ay.diag[j] + 1.0) * u[(i, j)];
                if i > 0 {
                    v -= u[(i - 1, j)] / hh;
                }
                if i + 1 < n {
                    v -= u[(i + 1, j)] / hh;
                }
                if j > 0 {
                    v -= u[(i, j - 1)] / hh;
                }
                if j + 1 < n {
                    v -= u[(i, j + 1)] / hh;
                }
                out[(i, j)] = v;
            }
        }
        out
    }

    /// Direct solve `A x = g` through the cosine transform and the cached
    /// tridiagonal factors.
    fn solve_a(&self, g: &Array2<f64>) -> Array2<f64> {
        let mut hat = self.basis.t().dot(g);
        for (m, factor) in self.y_factors.iter().enumerate() {
            let mut row = hat.row_mut(m);
            factor.solve_in_place(row.as_slice_mut().expect("standard layout"));
        }
        self.basis.dot(&hat)
    }

    /// The solution operator `T g` of `laplace u - u = g` with the
    /// homotopy boundary conditions; equals `-A^(-1) g`.
    pub fn apply_t(&self, g: &Array2<f64>) -> Array2<f64> {
        -self.solve_a(g)
    }

    /// Coefficient of the boundary rows in `dA/dmu` (the only entries of
    /// the assembled family that move with `mu`).
    fn boundary_dmu_coeff(&self) -> Result<f64> {
        if self.mu >= 1.0 {
            return Err(Error::Domain(
                "mu-derivative restricted to mu in [0, 1): the ratio h0/h1 degenerates at 1".into(),
            ));
        }
        let w = self.spec.wronskian(self.mu);
        let denom = self.spec.h1(self.mu) + 0.5 * self.h * self.spec.h0(self.mu);
        Ok(w / (self.h * denom * denom))
    }

    /// Exact `mu`-derivative of the solution operator of the assembled
    /// family: `T' = T A' T`, with `A'` the diagonal boundary-row
    /// derivative. Self-adjoint by construction.
    pub fn apply_t_prime(&self, g: &Array2<f64>) -> Result<Array2<f64>> {
        let coeff = self.boundary_dmu_coeff()?;
        let t1 = self.apply_t(g);
        let mut b = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            b[(i, 0)] = coeff * t1[(i, 0)];
            b[(i, self.n - 1)] = coeff * t1[(i, self.n - 1)];
        }
        Ok(self.apply_t(&b))
    }

    /// The boundary-value formula for `T'`:
    ///
    /// ```text
    /// v = h~ { T[(2/pi) Tg + 2 (2y/pi - 1) d_y(Tg) + (y^2/pi - y) g]
    ///          + (-y^2/pi + y) Tg }
    /// ```
    ///
    /// with `d_y` the same centered stencil (ghost values included) as the
    /// assembled operator. Agrees with [`Self::apply_t_prime`] to the
    /// discretization order.
    pub fn apply_t_prime_formula(&self, g: &Array2<f64>) -> Result<Array2<f64>> {
        let (_, h_tilde) = self.spec.ratio_and_derivative(self.mu)?;
        let u = self.apply_t(g);
        let dyu = self.dy(&u);
        let n = self.n;
        let mut inner = Array2::zeros((n, n));
        let mut outer = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let y = self.coord(j);
                let poly = y * y / PI - y;
                inner[(i, j)] =
                    2.0 / PI * u[(i, j)] + 2.0 * (2.0 * y / PI - 1.0) * dyu[(i, j)] + poly * g[(i, j)];
                outer[(i, j)] = -poly * u[(i, j)];
            }
        }
        let mut v = self.apply_t(&inner);
        v += &outer;
        Ok(v * h_tilde)
    }

    /// Centered vertical derivative with the operator's ghost values.
    pub fn dy(&self, u: &Array2<f64>) -> Array2<f64> {
        let n = self.n;
        let two_h = 2.0 * self.h;
        Array2::from_shape_fn((n, n), |(i, j)| {
            let below = if j == 0 { self.beta * u[(i, 0)] } else { u[(i, j - 1)] };
            let above = if j == n - 1 { self.beta * u[(i, n - 1)] } else { u[(i, j + 1)] };
            (above - below) / two_h
        })
    }

    /// Residual of `G(u, lambda) = u + (lambda + 1) T u - T f(u, lambda)`.
    pub fn residual_g(&self, u: &Array2<f64>, lambda: f64, f: &Nonlinearity) -> Array2<f64> {
        let rhs = u.mapv(|v| (lambda + 1.0) * v) - u.mapv(|v| f.value(v, lambda));
        u + &self.apply_t(&rhs)
    }

    /// Matrix-free action of `D_u G`.
    pub fn jacobian_vec(
        &self,
        u: &Array2<f64>,
        lambda: f64,
        f: &Nonlinearity,
        v: &Array2<f64>,
    ) -> Array2<f64> {
        let fu = u.mapv(|w| f.du(w, lambda));
        let rhs = v.mapv(|w| (lambda + 1.0) * w) - &(&fu * v);
        v + &self.apply_t(&rhs)
    }

    /// `D_lambda G = T u - T D_lambda f(u, lambda)`.
    pub fn g_lambda(&self, u: &Array2<f64>, lambda: f64, f: &Nonlinearity) -> Array2<f64> {
        let rhs = u - &u.mapv(|w| f.dlambda(w, lambda));
        self.apply_t(&rhs)
    }

    /// Solves `D_u G s = rhs` by preconditioned GMRES on the equivalent
    /// symmetric system `(A - (lambda + 1) I + diag(f_u)) s = A rhs`, with
    /// the separable shifted operator as right preconditioner.
    pub fn solve_jacobian(
        &self,
        u: &Array2<f64>,
        lambda: f64,
        f: &Nonlinearity,
        rhs: &Array2<f64>,
        tol: f64,
    ) -> Result<Array2<f64>> {
        let n = self.n;
        let fu = u.mapv(|w| f.du(w, lambda));
        let b2 = self.apply_matrix(rhs);
        let b = flat(&b2);

        // preconditioner: factored A - (lambda + 1) I per cosine mode
        let mut shifted = Vec::with_capacity(n);
        for &a in &self.alpha {
            shifted.push(self.ay.shifted(a - lambda).factor_pivoted());
        }
        let apply_m = |v: &Array1<f64>| {
            let v2 = unflat(v, n);
            let mut out = self.apply_matrix(&v2);
            out.zip_mut_with(&v2, |o, &vi| *o -= (lambda + 1.0) * vi);
            out.zip_mut_with(&(&fu * &v2), |o, &fi| *o += fi);
            flat(&out)
        };
        let apply_pre = |v: &Array1<f64>| {
            let v2 = unflat(v, n);
            let mut hat = self.basis.t().dot(&v2);
            for (m, factor) in shifted.iter().enumerate() {
                let mut row = hat.row_mut(m);
                factor.solve_in_place(row.as_slice_mut().expect("standard layout"));
            }
            flat(&self.basis.dot(&hat))
        };
        let out = gmres(apply_m, apply_pre, &b, &GmresOptions { tol, max_iter: 250 })?;
        if out.relative_residual > tol * 10.0 {
            return Err(Error::NewtonDiverged { iters: out.iterations, residual: out.relative_residual });
        }
        Ok(unflat(&out.x, n))
    }

    /// The `count` smallest eigenvalues of the discrete `-laplace` with
    /// eigenvectors, ascending; Lanczos on the factored inverse.
    pub fn eigs(&self, count: usize) -> Result<Vec<(f64, Array2<f64>)>> {
        assert!(count <= self.n * self.n / 4, "asking for too much of the spectrum");
        let n = self.n;
        let apply = |v: &Array1<f64>| flat(&self.solve_a(&unflat(v, n)));
        let pairs = lanczos(
            apply,
            n * n,
            count,
            RitzSelect::Largest,
            &LanczosOptions { tol: 1e-10, max_iter: 400 },
        )?;
        let mut out: Vec<(f64, Array2<f64>)> = pairs
            .into_iter()
            .map(|(theta, v)| (1.0 / theta - 1.0, normalize_sign(unflat(&v, n))))
            .collect();
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(out)
    }

    /// Eigenvalues of `-laplace` nearest `target`, with eigenvectors.
    pub fn eigs_near(&self, target: f64, count: usize) -> Result<Vec<(f64, Array2<f64>)>> {
        let n = self.n;
        let sigma = target + 1.0;
        let mut factors = Vec::with_capacity(n);
        for &a in &self.alpha {
            factors.push(self.ay.shifted(a + 1.0 - sigma).factor_pivoted());
        }
        let apply = |v: &Array1<f64>| {
            let v2 = unflat(v, n);
            let mut hat = self.basis.t().dot(&v2);
            for (m, factor) in factors.iter().enumerate() {
                let mut row = hat.row_mut(m);
                factor.solve_in_place(row.as_slice_mut().expect("standard layout"));
            }
            flat(&self.basis.dot(&hat))
        };
        let pairs = lanczos(
            apply,
            n * n,
            count,
            RitzSelect::LargestMagnitude,
            &LanczosOptions { tol: 1e-9, max_iter: 400 },
        )?;
        let mut out: Vec<(f64, Array2<f64>)> = pairs
            .into_iter()
            .map(|(theta, v)| (target + 1.0 / theta, normalize_sign(unflat(&v, n))))
            .collect();
        out.sort_by(|a, b| {
            (a.0 - target).abs().partial_cmp(&(b.0 - target).abs()).unwrap()
        });
        Ok(out)
    }

    /// Dense assembly of `A` for small grids; the second oracle in tests.
    pub fn dense_matrix(&self) -> nalgebra::DMatrix<f64> {
        assert!(self.n <= 48, "dense fallback reserved for coarse grids");
        let n = self.n;
        let hh = self.h * self.h;
        let mut m = nalgebra::DMatrix::zeros(n * n, n * n);
        let idx = |i: usize, j: usize| i * n + j;
        for i in 0..n {
            for j in 0..n {
                let row = idx(i, j);
                m[(row, row)] = self.ax_diag[i] + self.ay.diag[j] + 1.0;
                if i > 0 {
                    m[(row, idx(i - 1, j))] = -1.0 / hh;
                }
                if i + 1 < n {
                    m[(row, idx(i + 1, j))] = -1.0 / hh;
                }
                if j > 0 {
                    m[(row, idx(i, j - 1))] = -1.0 / hh;
                }
                if j + 1 < n {
                    m[(row, idx(i, j + 1))] = -1.0 / hh;
                }
            }
        }
        m
    }

    /// The `count` smallest eigenvalues of `-laplace` by dense
    /// factorization (grids up to 48 cells per axis).
    pub fn eigs_dense(&self, count: usize) -> Vec<f64> {
        let m = self.dense_matrix();
        let se = m.symmetric_eigen();
        let mut vals: Vec<f64> = se.eigenvalues.iter().map(|v| v - 1.0).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.truncate(count);
        vals
    }

    fn y_eigen(&self) -> &YEigen {
        self.y_eigen.get_or_init(|| {
            let (gamma, vectors) = self.ay.eigen();
            let n = self.n;
            let v = Array2::from_shape_fn((n, n), |(i, j)| vectors[(i, j)]);
            YEigen { gamma, vectors: v }
        })
    }

    /// Full separable spectrum `alpha_m + gamma_j` of `-laplace`, sorted
    /// ascending. Exact for the assembled matrix; used as a cross-check
    /// against the Lanczos route.
    pub fn separable_spectrum(&self, count: usize) -> Vec<f64> {
        let ye = self.y_eigen();
        let mut vals: Vec<f64> = Vec::with_capacity(self.n * self.n);
        for &a in &self.alpha {
            for &g in &ye.gamma {
                vals.push(a + g);
            }
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.truncate(count);
        vals
    }

    /// Discrete kernel vectors of `I + (lambda0 + 1) T` at a discrete
    /// eigenvalue `lambda0` of `-laplace`, normalized in the grid inner
    /// product. Exact by the separable structure.
    pub fn kernel_vectors(&self, lambda0: f64, tol: f64) -> Vec<Array2<f64>> {
        let ye = self.y_eigen();
        let mut out = Vec::new();
        for (m, &a) in self.alpha.iter().enumerate() {
            for (j, &g) in ye.gamma.iter().enumerate() {
                if (a + g - lambda0).abs() <= tol {
                    let col_x = self.basis.column(m);
                    let col_y = ye.vectors.column(j);
                    let mut v = Array2::zeros((self.n, self.n));
                    for ix in 0..self.n {
                        for iy in 0..self.n {
                            v[(ix, iy)] = col_x[ix] * col_y[iy];
                        }
                    }
                    out.push(normalize_sign(v / self.h));
                }
            }
        }
        out
    }

    /// Solves `D_u G_0 v = Q T rhs` for `v` orthogonal to the kernel at
    /// the discrete eigenvalue `lambda0`, through the full separable
    /// eigenbasis. Kernel modes are identified by `|alpha + gamma -
    /// lambda0| <= kernel_tol` and projected out exactly; a non-kernel
    /// mode with a near-vanishing denominator reports a kernel-detection
    /// mismatch.
    pub fn solve_projected(
        &self,
        rhs: &Array2<f64>,
        lambda0: f64,
        kernel_tol: f64,
        expected_kernel_dim: usize,
    ) -> Result<Array2<f64>> {
        let ye = self.y_eigen();
        let mut hat = self.basis.t().dot(rhs).dot(&ye.vectors);
        let mut kernel_count = 0;
        let warn_band = 20.0 * kernel_tol;
        for (m, &a) in self.alpha.iter().enumerate() {
            for (j, &g) in ye.gamma.iter().enumerate() {
                let denom = a + g - lambda0;
                if denom.abs() <= kernel_tol {
                    kernel_count += 1;
                    hat[(m, j)] = 0.0;
                } else {
                    if denom.abs() < warn_band {
                        return Err(Error::KernelMismatch(format!(
                            "mode ({m}, {j}) sits at distance {denom:e} from lambda0 = {lambda0}, between the kernel tolerance and the resolution band"
                        )));
                    }
                    hat[(m, j)] *= -1.0 / denom;
                }
            }
        }
        if kernel_count != expected_kernel_dim {
            return Err(Error::KernelMismatch(format!(
                "found {kernel_count} kernel modes at lambda0 = {lambda0}, expected {expected_kernel_dim}"
            )));
        }
        Ok(self.basis.dot(&hat.dot(&ye.vectors.t())))
    }
}

pub(crate) fn flat(u: &Array2<f64>) -> Array1<f64> {
    Array1::from_iter(u.iter().copied())
}

pub(crate) fn unflat(v: &Array1<f64>, n: usize) -> Array2<f64> {
    Array2::from_shape_vec((n, n), v.to_vec()).expect("length n*n")
}

fn normalize_sign(mut v: Array2<f64>) -> Array2<f64> {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.mapv_inplace(|x| -x);
    }
    v
}
