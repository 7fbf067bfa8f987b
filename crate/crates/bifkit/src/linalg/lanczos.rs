//! Symmetric Lanczos iteration with full reorthogonalization.
//!
//! The grid eigensolver runs this on the (factored) inverse operator, so
//! the wanted end of the spectrum converges first and no shift tuning is
//! needed.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use ndarray::Array1;
use rand::{Rng, SeedableRng};

/// Which Ritz values to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RitzSelect {
    /// Algebraically largest (inverse iteration on a definite operator).
    Largest,
    /// Largest in magnitude (shift-inverted indefinite operator).
    LargestMagnitude,
}

pub struct LanczosOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 300 }
    }
}

/// Runs Lanczos on the symmetric operator `apply`, returning `count`
/// converged Ritz pairs chosen by `select`, best first.
pub fn lanczos<B>(
    apply: B,
    n: usize,
    count: usize,
    select: RitzSelect,
    opts: &LanczosOptions,
) -> Result<Vec<(f64, Array1<f64>)>>
where
    B: Fn(&Array1<f64>) -> Array1<f64>,
{
    assert!(count >= 1 && count <= n);
    let max_iter = opts.max_iter.min(n);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1a2b3c4d);
    let mut v = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0f64));
    let nv = v.dot(&v).sqrt();
    v /= nv;

    let mut basis: Vec<Array1<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    for j in 0..max_iter {
        let mut w = apply(&basis[j]);
        let aj = w.dot(&basis[j]);
        alpha.push(aj);
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for q in &basis {
                let c = w.dot(q);
                w.scaled_add(-c, q);
            }
        }
        let bj = w.dot(&w).sqrt();

        // convergence test on the current tridiagonal section
        if alpha.len() > count || bj < 1e-14 {
            let (theta, s) = tridiag_eigen(&alpha, &beta);
            let picked = pick(&theta, count, select);
            let converged = picked.iter().all(|&idx| {
                let tail = s[(alpha.len() - 1, idx)].abs();
                bj * tail <= opts.tol * theta[idx].abs().max(1e-300)
            });
            if converged || bj < 1e-14 || alpha.len() == max_iter {
                if !converged && alpha.len() == max_iter {
                    return Err(Error::EigenConvergence(format!(
                        "lanczos: {count} pairs not converged after {max_iter} iterations"
                    )));
                }
                let mut out = Vec::with_capacity(count);
                for &idx in &picked {
                    let mut x = Array1::zeros(n);
                    for (row, q) in basis.iter().enumerate() {
                        x.scaled_add(s[(row, idx)], q);
                    }
                    let nx = x.dot(&x).sqrt();
                    out.push((theta[idx], x / nx));
                }
                return Ok(out);
            }
        }

        if bj < 1e-14 {
            // invariant subspace hit before convergence: restart direction
            let mut fresh = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0f64));
            for q in &basis {
                let c = fresh.dot(q);
                fresh.scaled_add(-c, q);
            }
            let nf = fresh.dot(&fresh).sqrt();
            beta.push(0.0);
            basis.push(fresh / nf);
        } else {
            beta.push(bj);
            basis.push(w / bj);
        }
    }
    Err(Error::EigenConvergence("lanczos: iteration budget exhausted".into()))
}

fn tridiag_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let se = t.symmetric_eigen();
    (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
}

fn pick(theta: &[f64], count: usize, select: RitzSelect) -> Vec<usize> {
    let mut order: Vec<usize> = (0..theta.len()).collect();
    match select {
        RitzSelect::Largest => {
            order.sort_by(|&a, &b| theta[b].partial_cmp(&theta[a]).unwrap());
        }
        RitzSelect::LargestMagnitude => {
            order.sort_by(|&a, &b| theta[b].abs().partial_cmp(&theta[a].abs()).unwrap());
        }
    }
    order.truncate(count);
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_largest_of_diagonal_operator() {
        let n = 200;
        let diag = Array1::from_shape_fn(n, |i| 1.0 / (1.0 + i as f64));
        let pairs = lanczos(
            |v: &Array1<f64>| &diag * v,
            n,
            4,
            RitzSelect::Largest,
            &Default::default(),
        )
        .unwrap();
        for (i, (theta, vec)) in pairs.iter().enumerate() {
            let expect = 1.0 / (1.0 + i as f64);
            assert!((theta - expect).abs() < 1e-10, "pair {i}: {theta}");
            // eigenvector concentrates on coordinate i
            assert!(vec[i].abs() > 0.999, "pair {i}");
        }
    }

    #[test]
    fn magnitude_selection_sees_both_ends() {
        let n = 100;
        let diag = Array1::from_shape_fn(n, |i| match i {
            0 => -5.0,
            1 => 4.0,
            _ => 0.01 * (i as f64),
        });
        let pairs = lanczos(
            |v: &Array1<f64>| &diag * v,
            n,
            2,
            RitzSelect::LargestMagnitude,
            &Default::default(),
        )
        .unwrap();
        let mut got: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((got[0] + 5.0).abs() < 1e-9);
        assert!((got[1] - 4.0).abs() < 1e-9);
    }
}
