//! Right-preconditioned GMRES on matrix-free operators.

use crate::error::{Error, Result};
use ndarray::Array1;

pub struct GmresOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200 }
    }
}

pub struct GmresOutcome {
    pub x: Array1<f64>,
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Solves `A x = b` with right preconditioning: GMRES runs on `A M^-1` and
/// the returned solution is `M^-1 y`.
pub fn gmres<A, M>(apply_a: A, apply_minv: M, b: &Array1<f64>, opts: &GmresOptions) -> Result<GmresOutcome>
where
    A: Fn(&Array1<f64>) -> Array1<f64>,
    M: Fn(&Array1<f64>) -> Array1<f64>,
{
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(GmresOutcome { x: Array1::zeros(n), relative_residual: 0.0, iterations: 0 });
    }
    let m = opts.max_iter.min(n);
    let mut basis: Vec<Array1<f64>> = Vec::with_capacity(m + 1);
    // Hessenberg columns, plus Givens rotation state.
    let mut hess: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut cs = vec![0.0f64; m];
    let mut sn = vec![0.0f64; m];
    let mut g = vec![0.0f64; m + 1];

    basis.push(b / bnorm);
    g[0] = bnorm;
    let mut iterations = 0;
    let mut rel = 1.0;

    for j in 0..m {
        iterations = j + 1;
        let w0 = apply_minv(&basis[j]);
        let mut w = apply_a(&w0);
        let mut col = vec![0.0f64; j + 2];
        // modified Gram-Schmidt
        for (i, v) in basis.iter().enumerate() {
            let hij = w.dot(v);
            col[i] = hij;
            w.scaled_add(-hij, v);
        }
        // one refinement pass for robustness
        for (i, v) in basis.iter().enumerate() {
            let corr = w.dot(v);
            col[i] += corr;
            w.scaled_add(-corr, v);
        }
        let hlast = norm(&w);
        col[j + 1] = hlast;

        // apply accumulated rotations
        for i in 0..j {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let (c, s) = givens(col[j], col[j + 1]);
        cs[j] = c;
        sn[j] = s;
        col[j] = c * col[j] + s * col[j + 1];
        col[j + 1] = 0.0;
        g[j + 1] = -s * g[j];
        g[j] *= c;
        hess.push(col);

        rel = g[j + 1].abs() / bnorm;
        if rel <= opts.tol {
            break;
        }
        if hlast == 0.0 {
            break; // lucky breakdown: exact solution in the basis
        }
        basis.push(&w / hlast);
    }

    // back substitution on the triangular system
    let k = iterations;
    let mut y = vec![0.0f64; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for (l, yl) in y.iter().enumerate().take(k).skip(i + 1) {
            s -= hess[l][i] * yl;
        }
        let hii = hess[i][i];
        if hii == 0.0 {
            return Err(Error::EigenConvergence("gmres hit a zero pivot".into()));
        }
        y[i] = s / hii;
    }
    let mut xk = Array1::zeros(n);
    for (i, yi) in y.iter().enumerate() {
        xk.scaled_add(*yi, &basis[i]);
    }
    let x = apply_minv(&xk);

    Ok(GmresOutcome { x, relative_residual: rel, iterations })
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else if a.abs() > b.abs() {
        let t = b / a;
        let c = 1.0 / (1.0 + t * t).sqrt() * a.signum();
        (c.abs(), c.abs() * t)
    } else {
        let t = a / b;
        let s = 1.0 / (1.0 + t * t).sqrt() * b.signum();
        (s.abs() * t, s.abs())
    }
}
