//! Newton correction and pseudo-arclength continuation on the grid
//! operator, with a signed singular-point detector.
//!
//! Branches live in `(u, lambda)` space at a fixed homotopy parameter.
//! The corrector solves the bordered system by block elimination (two
//! Jacobian solves per iteration); the detector tracks the eigenvalue of
//! the symmetric linearization nearest zero by warm-started inverse
//! iteration, and a sign change between accepted states marks a candidate
//! singular point (fold or secondary bifurcation).

use crate::error::{Error, Result};
use crate::grid::GridOperator;
use crate::nonlinearity::Nonlinearity;
use ndarray::Array2;

/// A point on (or near) a solution branch.
#[derive(Debug, Clone)]
pub struct ContinuationState {
    pub u: Array2<f64>,
    pub lambda: f64,
    pub mu: f64,
    /// Unit tangent in `(u, lambda)` space under the grid inner product.
    pub tangent: Tangent,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct Tangent {
    pub du: Array2<f64>,
    pub dlambda: f64,
}

impl ContinuationState {
    pub fn at(u: Array2<f64>, lambda: f64, mu: f64) -> Self {
        let n = u.dim().0;
        Self {
            u,
            lambda,
            mu,
            tangent: Tangent { du: Array2::zeros((n, n)), dlambda: 1.0 },
            step: 0.05,
        }
    }
}

/// Which quantity the Newton corrector holds fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Corrector {
    /// `lambda` and `mu` fixed: solve `G(u) = 0` in `u` alone.
    FixedLambda,
    /// `mu` fixed, `lambda` free: arclength constraint against the
    /// supplied predictor point and tangent.
    Arclength { u_pred_lambda: f64 },
}

pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub linear_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 30, linear_tol: 1e-9 }
    }
}

/// Newton-corrects `state` on the operator's grid. The residual norm of
/// the accepted state is below `opts.tol` (scaled by the problem size).
pub fn newton_solve(
    op: &GridOperator,
    f: &Nonlinearity,
    state: &ContinuationState,
    corrector: Corrector,
    opts: &NewtonOptions,
) -> Result<ContinuationState> {
    debug_assert_eq!(op.mu(), state.mu, "operator assembled at a different mu");
    let mut u = state.u.clone();
    let mut lambda = state.lambda;
    let scale = 1.0 + op.norm(&u);
    let mut last_residual = f64::INFINITY;

    for iter in 0..opts.max_iter {
        let g = op.residual_g(&u, lambda, f);
        let gnorm = op.norm(&g);
        last_residual = gnorm;
        if gnorm <= opts.tol * scale {
            let mut out = state.clone();
            out.u = u;
            out.lambda = lambda;
            return Ok(out);
        }
        match corrector {
            Corrector::FixedLambda => {
                let s = op.solve_jacobian(&u, lambda, f, &g, opts.linear_tol)?;
                u -= &s;
            }
            Corrector::Arclength { u_pred_lambda } => {
                let glam = op.g_lambda(&u, lambda, f);
                let z1 = op.solve_jacobian(&u, lambda, f, &g, opts.linear_tol)?;
                let z2 = op.solve_jacobian(&u, lambda, f, &glam, opts.linear_tol)?;
                // constraint: <t_u, u - u_pred> + t_l (lambda - l_pred) = 0;
                // the update is du = -z1 - dlam z2 with J z1 = G, J z2 = G_lambda
                let t = &state.tangent;
                let c = op.inner(&t.du, &(&u - &state.u)) + t.dlambda * (lambda - u_pred_lambda);
                let denom = t.dlambda - op.inner(&t.du, &z2);
                if denom.abs() < 1e-14 {
                    return Err(Error::NewtonDiverged { iters: iter, residual: gnorm });
                }
                let dlam = (-c + op.inner(&t.du, &z1)) / denom;
                u -= &z1;
                u.scaled_add(-dlam, &z2);
                lambda += dlam;
            }
        }
    }
    Err(Error::NewtonDiverged { iters: opts.max_iter, residual: last_residual })
}

/// Signed eigenvalue of the symmetric linearization
/// `A - (lambda + 1) I + diag(f_u(u))` nearest zero, by inverse iteration
/// with a warm start. Its sign changes exactly when an eigenvalue of the
/// Jacobian crosses zero along a branch.
pub fn detector_value(
    op: &GridOperator,
    f: &Nonlinearity,
    u: &Array2<f64>,
    lambda: f64,
    warm: &mut Option<Array2<f64>>,
) -> Result<f64> {
    let _n = op.n();
    let mut x = warm.clone().unwrap_or_else(|| {
        op.sample(|xc, yc| 1.0 + (xc * 1.3).cos() * (0.7 * yc).cos() + 0.3 * (2.0 * xc).cos())
    });
    let nx = op.norm(&x);
    x /= nx;
    let fu = u.mapv(|w| f.du(w, lambda));
    let apply_m = |v: &Array2<f64>| {
        let mut out = op.apply_matrix(v);
        out.zip_mut_with(v, |o, &vi| *o -= (lambda + 1.0) * vi);
        out.zip_mut_with(&(&fu * v), |o, &fi| *o += fi);
        out
    };
    let mut rho = f64::INFINITY;
    for _ in 0..14 {
        // inverse iteration step: solve M y = x through the Jacobian solver
        // (J = A^-1 M, so J y = A^-1 x)
        let rhs = -op.apply_t(&x); // A^-1 x
        let y = op.solve_jacobian(u, lambda, f, &rhs, 1e-8)?;
        let ny = op.norm(&y);
        if !ny.is_finite() || ny == 0.0 {
            break;
        }
        x = y / ny;
        let next = op.inner(&x, &apply_m(&x)) / op.inner(&x, &x);
        if (next - rho).abs() <= 1e-9 * (1.0 + next.abs()) {
            rho = next;
            break;
        }
        rho = next;
    }
    *warm = Some(x);
    Ok(rho)
}

/// One accepted continuation step.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub u: Array2<f64>,
    pub lambda: f64,
    pub residual: f64,
    /// Signed nearest-zero eigenvalue of the linearization.
    pub det_value: f64,
}

/// A sign change of the detector between two accepted states.
#[derive(Debug, Clone, Copy)]
pub struct SingularPoint {
    /// Index of the accepted state before the crossing.
    pub after_index: usize,
    /// Linear-interpolation estimate of the crossing parameter.
    pub lambda_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct BranchTrace {
    pub points: Vec<BranchPoint>,
    pub singular_points: Vec<SingularPoint>,
}

pub struct ContinuationOptions {
    pub newton: NewtonOptions,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Stop once `lambda` leaves `[lambda_min, lambda_max]`.
    pub lambda_window: (f64, f64),
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions::default(),
            initial_step: 0.02,
            min_step: 1e-7,
            max_step: 0.1,
            lambda_window: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// Pseudo-arclength predictor-corrector from a converged seed.
///
/// Each accepted state is Newton-converged; the detector value is
/// recorded per state and sign changes are reported as candidate
/// singular points (secondary bifurcations or folds).
pub fn continue_branch(
    op: &GridOperator,
    f: &Nonlinearity,
    seed: &ContinuationState,
    steps: usize,
    opts: &ContinuationOptions,
) -> Result<BranchTrace> {
    // converge the seed at fixed lambda first
    let mut current = newton_solve(op, f, seed, Corrector::FixedLambda, &opts.newton)?;
    current.step = opts.initial_step;

    // initial tangent: natural parameterization du/dlambda unless the seed
    // carries one already
    if op.norm(&current.tangent.du) == 0.0 && current.tangent.dlambda == 1.0 {
        let glam = op.g_lambda(&current.u, current.lambda, f);
        let dudl = op.solve_jacobian(&current.u, current.lambda, f, &glam, opts.newton.linear_tol)?;
        let dudl = -dudl;
        let scale = (op.inner(&dudl, &dudl) + 1.0).sqrt();
        current.tangent = Tangent { du: dudl / scale, dlambda: 1.0 / scale };
    }

    let mut warm = None;
    let det0 = detector_value(op, f, &current.u, current.lambda, &mut warm)?;
    let mut points = vec![BranchPoint {
        u: current.u.clone(),
        lambda: current.lambda,
        residual: op.norm(&op.residual_g(&current.u, current.lambda, f)),
        det_value: det0,
    }];
    let mut singular = Vec::new();

    let mut step = opts.initial_step;
    for _ in 0..steps {
        let mut accepted = None;
        for _ in 0..10 {
            let mut predicted = current.clone();
            predicted.u = &current.u + &current.tangent.du.mapv(|v| step * v);
            let lambda_pred = current.lambda + step * current.tangent.dlambda;
            predicted.lambda = lambda_pred;
            match newton_solve(
                op,
                f,
                &predicted,
                Corrector::Arclength { u_pred_lambda: lambda_pred },
                &opts.newton,
            ) {
                Ok(next) => {
                    accepted = Some(next);
                    break;
                }
                Err(_) => {
                    step *= 0.5;
                    if step < opts.min_step {
                        return Err(Error::ContinuationStall(format!(
                            "step underflow below {:e} at lambda = {}",
                            opts.min_step, current.lambda
                        )));
                    }
                }
            }
        }
        let mut next = accepted.ok_or_else(|| {
            Error::ContinuationStall(format!("corrector kept failing at lambda = {}", current.lambda))
        })?;

        // secant tangent, oriented along the previous one
        let mut du = &next.u - &current.u;
        let mut dl = next.lambda - current.lambda;
        let norm = (op.inner(&du, &du) + dl * dl).sqrt();
        if norm > 0.0 {
            du /= norm;
            dl /= norm;
            let orient = op.inner(&du, &current.tangent.du) + dl * current.tangent.dlambda;
            if orient < 0.0 {
                du.mapv_inplace(|v| -v);
                dl = -dl;
            }
            next.tangent = Tangent { du, dlambda: dl };
        }

        let det = detector_value(op, f, &next.u, next.lambda, &mut warm)?;
        let prev_det = points.last().unwrap().det_value;
        if prev_det * det < 0.0 {
            let t = prev_det / (prev_det - det);
            let lambda_estimate =
                points.last().unwrap().lambda + t * (next.lambda - points.last().unwrap().lambda);
            singular.push(SingularPoint { after_index: points.len() - 1, lambda_estimate });
        }
        points.push(BranchPoint {
            u: next.u.clone(),
            lambda: next.lambda,
            residual: op.norm(&op.residual_g(&next.u, next.lambda, f)),
            det_value: det,
        });

        step = (step * 1.3).min(opts.max_step);
        next.step = step;
        current = next;

        if current.lambda < opts.lambda_window.0 || current.lambda > opts.lambda_window.1 {
            break;
        }
    }

    Ok(BranchTrace { points, singular_points: singular })
}

/// Refines a detector sign change by bisection in `lambda`, Newton-
/// correcting at fixed `lambda` from interpolated iterates.
pub fn refine_singular(
    op: &GridOperator,
    f: &Nonlinearity,
    lo: &BranchPoint,
    hi: &BranchPoint,
    iterations: usize,
) -> Result<f64> {
    let (mut la, mut fa) = (lo.lambda, lo.det_value);
    let (mut lb, mut fb) = (hi.lambda, hi.det_value);
    if fa * fb > 0.0 {
        return Err(Error::Domain("no detector sign change between the supplied states".into()));
    }
    let mut ua = lo.u.clone();
    let newton = NewtonOptions::default();
    for _ in 0..iterations {
        let lm = 0.5 * (la + lb);
        let guess = ContinuationState::at(ua.clone(), lm, op.mu());
        let corrected = newton_solve(op, f, &guess, Corrector::FixedLambda, &newton)?;
        let mut warm = None;
        let fm = detector_value(op, f, &corrected.u, lm, &mut warm)?;
        if fm.signum() == fa.signum() {
            la = lm;
            fa = fm;
            ua = corrected.u;
        } else {
            lb = lm;
            fb = fm;
        }
    }
    // final secant estimate inside the bracket
    Ok(la - fa * (lb - la) / (fb - fa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::assemble;
    use crate::homotopy::HomotopySpec;

    #[test]
    fn newton_accepts_exact_trivial_solution() {
        let op = assemble(16, 0.3, &HomotopySpec::linear()).unwrap();
        let f = Nonlinearity::lambda_u2_u3();
        let state = ContinuationState::at(Array2::zeros((16, 16)), 0.7, 0.3);
        let out = newton_solve(&op, &f, &state, Corrector::FixedLambda, &Default::default()).unwrap();
        assert_eq!(out.u, Array2::<f64>::zeros((16, 16)));
    }

    #[test]
    fn detector_on_trivial_branch_tracks_eigenvalue_gap() {
        let op = assemble(24, 0.3, &HomotopySpec::linear()).unwrap();
        let f = Nonlinearity::lambda_u2_u3();
        let z = Array2::zeros((24, 24));
        let eigs: Vec<f64> = op.eigs(3).unwrap().into_iter().map(|p| p.0).collect();
        // off-center between the first two eigenvalues, the nearest-zero
        // eigenvalue of A - (lambda + 1) is lambda_0 - lambda
        let lambda = eigs[0] + 0.3 * (eigs[1] - eigs[0]);
        let mut warm = None;
        let det = detector_value(&op, &f, &z, lambda, &mut warm).unwrap();
        let expect = eigs[0] - lambda;
        assert!((det - expect).abs() < 1e-6, "det {det} vs {expect}");
    }

    #[test]
    fn trivial_branch_detector_fires_at_each_eigenvalue() {
        let spec = HomotopySpec::linear();
        let op = assemble(24, 0.3, &spec).unwrap();
        let f = Nonlinearity::lambda_u2_u3();
        let eigs: Vec<f64> = op.eigs(3).unwrap().into_iter().map(|p| p.0).collect();

        let seed = ContinuationState::at(Array2::zeros((24, 24)), eigs[0] - 0.15, 0.3);
        let opts = ContinuationOptions {
            initial_step: 0.05,
            max_step: 0.08,
            lambda_window: (f64::NEG_INFINITY, eigs[2] - 0.05),
            ..Default::default()
        };
        let trace = continue_branch(&op, &f, &seed, 80, &opts).unwrap();
        // u stays zero along the trivial branch
        for p in &trace.points {
            assert!(op.norm(&p.u) < 1e-9);
        }
        // crossings near the first two eigenvalues (the second is a near
        // double eigenvalue pair at this mu, counted once per sign change)
        assert!(!trace.singular_points.is_empty());
        let first = trace.singular_points[0].lambda_estimate;
        assert!((first - eigs[0]).abs() < 5e-3, "first crossing {first} vs {}", eigs[0]);
    }

    #[test]
    fn stalls_report_an_error() {
        let op = assemble(16, 0.3, &HomotopySpec::linear()).unwrap();
        let f = Nonlinearity::lambda_u2_u3();
        // a hopeless seed far from any solution with a tiny step budget
        let u = op.sample(|x, y| 40.0 * (x * y).sin());
        let seed = ContinuationState::at(u, 2.0, 0.3);
        let opts = ContinuationOptions {
            newton: NewtonOptions { max_iter: 3, ..Default::default() },
            min_step: 1e-3,
            ..Default::default()
        };
        assert!(continue_branch(&op, &f, &seed, 5, &opts).is_err());
    }
}
