//! Symmetric tridiagonal matrices: positive-definite Cholesky-style solves
//! for the vertical operator, a partially pivoted LU for indefinite shifts,
//! and a dense eigendecomposition used by the spectral projected solver.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Symmetric tridiagonal matrix given by its diagonal and subdiagonal.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A + shift I`.
    pub fn shifted(&self, shift: f64) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().map(|d| d + shift).collect(),
            off: self.off.clone(),
        }
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            out[i] = v;
        }
    }

    /// LDL^T factorization; requires positive pivots.
    pub fn factor_spd(&self) -> Result<SpdFactor> {
        let n = self.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut prev = 0.0;
        let mut prev_l = 0.0;
        for i in 0..n {
            let mut di = self.diag[i];
            if i > 0 {
                di -= prev_l * prev_l * prev;
            }
            if di <= 0.0 {
                return Err(Error::SpecViolation(format!(
                    "tridiagonal factorization hit non-positive pivot {di:e} at row {i}"
                )));
            }
            d[i] = di;
            if i + 1 < n {
                l[i] = self.off[i] / di;
                prev_l = l[i];
            }
            prev = di;
        }
        Ok(SpdFactor { d, l })
    }

    /// LU with partial pivoting; tolerates indefinite shifts. Exactly
    /// singular pivots are nudged to keep the solve usable as a
    /// preconditioner near a singular shift.
    pub fn factor_pivoted(&self) -> PivotedLu {
        let n = self.len();
        // dl holds multipliers, du the first upper band, du2 the fill-in band.
        let mut dl = self.off.clone();
        let mut d = self.diag.clone();
        let mut du = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let scale: f64 = self.diag.iter().fold(0.0f64, |a, b| a.max(b.abs()))
            + self.off.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let tiny = scale.max(1.0) * f64::EPSILON * 1e-4;
        let nudge = |v: &mut f64| {
            if v.abs() < tiny {
                *v = tiny.copysign(if *v == 0.0 { 1.0 } else { *v });
            }
        };
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                nudge(&mut d[i]);
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                swapped[i] = true;
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * du[i];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
            }
        }
        nudge(&mut d[n - 1]);
        PivotedLu { dl, d, du, du2, swapped }
    }

    /// Dense symmetric eigendecomposition, ascending eigenvalues.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<f64>) {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        let se = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (col, &src) in order.iter().enumerate() {
            vectors.set_column(col, &se.eigenvectors.column(src));
        }
        (values, vectors)
    }
}

/// LDL^T factor of a positive-definite tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl SpdFactor {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            b[i] -= self.l[i - 1] * b[i - 1];
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            b[i] -= self.l[i] * b[i + 1];
        }
    }
}

/// Partially pivoted LU of a tridiagonal matrix (two upper bands).
#[derive(Debug, Clone)]
pub struct PivotedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_tridiag(n: usize, seed: u64, diag_boost: f64) -> SymTridiag {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let off: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n).map(|_| diag_boost + rng.gen_range(0.0..1.0)).collect();
        SymTridiag { diag, off }
    }

    #[test]
    fn spd_solve_inverts_matvec() {
        let t = random_tridiag(40, 1, 3.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let x: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut b = vec![0.0; 40];
        t.matvec(&x, &mut b);
        let f = t.factor_spd().unwrap();
        f.solve_in_place(&mut b);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn spd_factor_rejects_indefinite() {
        let t = SymTridiag { diag: vec![1.0, -5.0, 1.0], off: vec![0.1, 0.1] };
        assert!(t.factor_spd().is_err());
    }

    #[test]
    fn pivoted_solve_handles_indefinite_shift() {
        let base = random_tridiag(60, 3, 3.0);
        for shift in [-3.3, -1.7, 0.9] {
            let t = base.shifted(shift);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
            let x: Vec<f64> = (0..60).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut b = vec![0.0; 60];
            t.matvec(&x, &mut b);
            let lu = t.factor_pivoted();
            lu.solve_in_place(&mut b);
            for (a, e) in b.iter().zip(&x) {
                assert!((a - e).abs() < 1e-9, "shift {shift}");
            }
        }
    }

    #[test]
    fn eigen_matches_known_dirichlet_values() {
        // tridiag(-1, 2, -1) of size n has eigenvalues 2 - 2 cos(j pi / (n+1))
        let n = 16;
        let t = SymTridiag { diag: vec![2.0; n], off: vec![-1.0; n - 1] };
        let (vals, vecs) = t.eigen();
        for (j, v) in vals.iter().enumerate() {
            let expect = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((v - expect).abs() < 1e-12);
        }
        // orthonormality
        let gram = vecs.transpose() * &vecs;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - expect).abs() < 1e-12);
            }
        }
    }
}
