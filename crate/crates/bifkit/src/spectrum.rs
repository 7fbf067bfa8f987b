//! Eigenvalues `lambda = n^2 + k(mu)^2`, closed-form eigenfunctions, the
//! curves of bifurcation points they induce in `(mu, lambda)` space, and
//! the crossings of those curves (double points).

use crate::error::{Error, Result};
use crate::homotopy::HomotopySpec;
use crate::quad;
use crate::wavenumber::{self, Parity, Wavenumber, WavenumberCurve};
use std::f64::consts::PI;

/// A separated eigenfunction `phi(x, y) = cos(n x) * Y(y)`, normalized in
/// `L^2` of the square.
///
/// The vertical factor is `Y(y) = h0 sin(k y) + h1 k cos(k y)` except in the
/// constant limit `h0 = 0, k = 0`, where `Y = 1`.
#[derive(Debug, Clone, Copy)]
pub struct EigenMode {
    pub n: u32,
    pub k: f64,
    pub mu: f64,
    pub lambda: f64,
    h0: f64,
    h1: f64,
    constant_y: bool,
    /// `1 / ||phi_tilde||`, from the closed-form antiderivative of the
    /// squared mode; quadrature is only a cross-check.
    norm_inv: f64,
}

impl EigenMode {
    /// Mode with vertical factor built from the Robin data at `mu`.
    pub fn new(n: u32, w: &Wavenumber, spec: &HomotopySpec) -> Result<Self> {
        Self::from_parts(n, w.k, w.mu, spec.h0(w.mu), spec.h1(w.mu))
    }

    /// Integer Neumann mode at `mu = 0` (vertical factor `cos(k y)`).
    pub fn neumann(n: u32, k: u32) -> Self {
        // h0 = 0, h1 = 1: phi_tilde = k cos(k y) cos(n x) for k >= 1.
        if k == 0 {
            let ix = if n == 0 { PI } else { PI / 2.0 };
            Self {
                n,
                k: 0.0,
                mu: 0.0,
                lambda: (n * n) as f64,
                h0: 0.0,
                h1: 1.0,
                constant_y: true,
                norm_inv: 1.0 / (ix * PI).sqrt(),
            }
        } else {
            Self::from_parts(n, k as f64, 0.0, 0.0, 1.0).expect("nonzero integer mode")
        }
    }

    pub fn from_parts(n: u32, k: f64, mu: f64, h0: f64, h1: f64) -> Result<Self> {
        if h0 == 0.0 && (k == 0.0 || h1 == 0.0) {
            return Err(Error::DegenerateMode(format!(
                "phi_tilde vanishes identically (n = {n}, k = {k}, h0 = {h0}, h1 = {h1})"
            )));
        }
        let ix = if n == 0 { PI } else { PI / 2.0 };
        let s = (2.0 * k * PI).sin();
        let c = (2.0 * k * PI).cos();
        // integral over [0, pi] of (h0 sin ky + h1 k cos ky)^2
        let iy = h0 * h0 * (PI / 2.0 - s / (4.0 * k))
            + h1 * h1 * k * k * (PI / 2.0 + s / (4.0 * k))
            + 2.0 * h0 * h1 * k * (1.0 - c) / (4.0 * k);
        let norm_sq = ix * iy;
        if norm_sq <= 0.0 || norm_sq.is_nan() {
            return Err(Error::DegenerateMode(format!(
                "non-positive norm {norm_sq} (n = {n}, k = {k})"
            )));
        }
        Ok(Self {
            n,
            k,
            mu,
            lambda: (n * n) as f64 + k * k,
            h0,
            h1,
            constant_y: false,
            norm_inv: 1.0 / norm_sq.sqrt(),
        })
    }

    fn y_factor(&self, y: f64) -> f64 {
        if self.constant_y {
            1.0
        } else {
            self.h0 * (self.k * y).sin() + self.h1 * self.k * (self.k * y).cos()
        }
    }

    fn y_factor_d1(&self, y: f64) -> f64 {
        if self.constant_y {
            0.0
        } else {
            self.k * (self.h0 * (self.k * y).cos() - self.h1 * self.k * (self.k * y).sin())
        }
    }

    /// Normalized value `phi(x, y)`.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.norm_inv * (self.n as f64 * x).cos() * self.y_factor(y)
    }

    /// `d phi / d y`, used by the reduced-coefficient pairings.
    pub fn dy(&self, x: f64, y: f64) -> f64 {
        self.norm_inv * (self.n as f64 * x).cos() * self.y_factor_d1(y)
    }

    /// Laplacian assembled from the explicitly differentiated factors.
    pub fn laplacian(&self, x: f64, y: f64) -> f64 {
        let nf = self.n as f64;
        let d2x = -nf * nf * (nf * x).cos() * self.y_factor(y);
        let d2y = if self.constant_y {
            0.0
        } else {
            -self.k * self.k * (nf * x).cos() * self.y_factor(y)
        };
        self.norm_inv * (d2x + d2y)
    }

    /// Residuals of the four boundary conditions at a boundary coordinate.
    pub fn boundary_residuals(&self, t: f64) -> [f64; 4] {
        let nf = self.n as f64;
        // x-sides: d phi / d x = -n sin(n x) * Y(y)
        let dx0 = self.norm_inv * nf * (nf * 0.0f64).sin() * self.y_factor(t);
        let dx1 = self.norm_inv * nf * (nf * PI).sin() * self.y_factor(t);
        // y-sides: h0 phi -/+ h1 d phi / d y
        let b0 = self.h0 * self.value(t, 0.0) - self.h1 * self.dy(t, 0.0);
        let b1 = self.h0 * self.value(t, PI) + self.h1 * self.dy(t, PI);
        [b0, b1, dx0, dx1]
    }
}

/// A point on the trivial solution manifold where the linearization is
/// singular.
#[derive(Debug, Clone)]
pub struct BifurcationPoint {
    pub lambda0: f64,
    pub mu0: f64,
    pub modes: Vec<EigenMode>,
}

impl BifurcationPoint {
    /// Simple point on the curve of the mode `cos(n x) * Y_k(y)`.
    pub fn simple(n: u32, w: &Wavenumber, spec: &HomotopySpec) -> Result<Self> {
        let mode = EigenMode::new(n, w, spec)?;
        Ok(Self { lambda0: mode.lambda, mu0: w.mu, modes: vec![mode] })
    }

    /// Double point of the Neumann end with integer wavenumbers `(n, k)`.
    pub fn neumann_double(n: u32, k: u32) -> Result<Self> {
        let (phi1, phi2) = neumann_kernel(n, k)?;
        Ok(Self { lambda0: phi1.lambda, mu0: 0.0, modes: vec![phi1, phi2] })
    }

    pub fn kernel_dim(&self) -> usize {
        self.modes.len()
    }
}

/// One curve of simple bifurcation points, `lambda(mu) = n^2 + k(mu)^2`.
#[derive(Debug, Clone)]
pub struct BifurcationCurve {
    pub n: u32,
    pub curve: WavenumberCurve,
}

impl BifurcationCurve {
    pub fn base_mode(&self) -> u32 {
        self.curve.base_mode
    }

    pub fn parity(&self) -> Parity {
        self.curve.parity
    }

    pub fn lambda_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let nsq = (self.n * self.n) as f64;
        self.curve.samples.iter().map(move |&(mu, k)| (mu, nsq + k * k))
    }

    pub fn lambda_at(&self, mu: f64) -> f64 {
        let k = self.curve.k_at(mu);
        (self.n * self.n) as f64 + k * k
    }
}

/// All curves with `n^2 + m^2 < lambda_max`, each sampled on the same
/// uniform `mu` grid.
pub fn bifurcation_curves(
    lambda_max: f64,
    spec: &HomotopySpec,
    n_samples: usize,
) -> Result<Vec<BifurcationCurve>> {
    assert!(lambda_max > 0.0);
    let mut curves = Vec::new();
    let bound = lambda_max.sqrt().ceil() as u32 + 1;
    for n in 0..=bound {
        for m in 0..=bound {
            if ((n * n + m * m) as f64) < lambda_max {
                let curve = wavenumber::trace_curve(m, Parity::of_mode(m), spec, n_samples)?;
                curves.push(BifurcationCurve { n, curve });
            }
        }
    }
    curves.sort_by(|a, b| {
        let la = a.n * a.n + a.base_mode() * a.base_mode();
        let lb = b.n * b.n + b.base_mode() * b.base_mode();
        la.cmp(&lb).then(a.n.cmp(&b.n))
    });
    Ok(curves)
}

/// A coincidence of two bifurcation-point curves.
#[derive(Debug, Clone, Copy)]
pub struct Crossing {
    pub lambda: f64,
    pub mu: f64,
    /// Indices of the two curves in the input slice.
    pub pair: (usize, usize),
}

/// Locates all coincidences of curve pairs: endpoint coincidences at
/// `mu = 0, 1` (the generic double points) and any interior sign change of
/// the pairwise difference, refined by bisection.
pub fn find_crossings(curves: &[BifurcationCurve], spec: &HomotopySpec) -> Vec<Crossing> {
    let mut out = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let (a, b) = (&curves[i], &curves[j]);
            debug_assert_eq!(a.curve.samples.len(), b.curve.samples.len(), "common grid required");
            for (&(mu, _), _) in a.curve.samples.iter().zip(&b.curve.samples) {
                if mu == 0.0 || mu == 1.0 {
                    let (la, lb) = (a.lambda_at(mu), b.lambda_at(mu));
                    if (la - lb).abs() < 1e-12 {
                        out.push(Crossing { lambda: la, mu, pair: (i, j) });
                    }
                }
            }
            // interior sign changes of lambda_a - lambda_b
            let samples = &a.curve.samples;
            for w in 0..samples.len() - 1 {
                let (mu0, _) = samples[w];
                let (mu1, _) = samples[w + 1];
                let d0 = a.lambda_at(mu0) - b.lambda_at(mu0);
                let d1 = a.lambda_at(mu1) - b.lambda_at(mu1);
                if d0 == 0.0 && mu0 != 0.0 {
                    out.push(Crossing { lambda: a.lambda_at(mu0), mu: mu0, pair: (i, j) });
                } else if d0 * d1 < 0.0 {
                    let mu = bisect_crossing(a, b, spec, mu0, mu1);
                    let lambda = resolve_lambda(a, spec, mu);
                    out.push(Crossing { lambda, mu, pair: (i, j) });
                }
            }
        }
    }
    out.sort_by(|p, q| p.mu.partial_cmp(&q.mu).unwrap().then(p.lambda.partial_cmp(&q.lambda).unwrap()));
    out
}

fn resolve_lambda(c: &BifurcationCurve, spec: &HomotopySpec, mu: f64) -> f64 {
    let w = wavenumber::solve_k(mu, c.base_mode(), c.parity(), spec, 1e-12)
        .expect("crossing refinement inside a traced bracket");
    (c.n * c.n) as f64 + w.k * w.k
}

fn bisect_crossing(
    a: &BifurcationCurve,
    b: &BifurcationCurve,
    spec: &HomotopySpec,
    mut lo: f64,
    mut hi: f64,
) -> f64 {
    let diff = |mu: f64| resolve_lambda(a, spec, mu) - resolve_lambda(b, spec, mu);
    let mut dlo = diff(lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let dm = diff(mid);
        if dm == 0.0 {
            return mid;
        }
        if dm.signum() == dlo.signum() {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// The orthonormal kernel pair at a Neumann double point `lambda0 = n^2 + k^2`.
///
/// The second mode is the first with the roles of `x` and `y` exchanged;
/// both carry the `sqrt(2)/pi` scaling when `n * k = 0`.
pub fn neumann_kernel(n: u32, k: u32) -> Result<(EigenMode, EigenMode)> {
    if n == k {
        return Err(Error::Domain(format!(
            "(n, k) = ({n}, {k}) is not a double point: modes coincide"
        )));
    }
    Ok((EigenMode::neumann(n, k), EigenMode::neumann(k, n)))
}

/// Discrete L2 inner product of two modes by quadrature.
pub fn mode_inner_product(a: &EigenMode, b: &EigenMode) -> f64 {
    quad::integrate_square(|x, y| a.value(x, y) * b.value(x, y), quad::DEFAULT_NODES)
}
