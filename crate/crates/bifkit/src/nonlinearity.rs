//! The nonlinear right-hand side `f(u, lambda)` and the derivative data
//! the reduction needs at the trivial solution.
//!
//! Admissible nonlinearities vanish to second order at `u = 0`, so the
//! trivial solution exists for every `lambda`. The constructor verifies
//! `f(0, lambda) = 0` and `D_u f(0, lambda) = 0` numerically at a handful
//! of `lambda` values.

use crate::error::{Error, Result};

/// Polynomial-in-`u` nonlinearity, optionally multiplied by `lambda`.
///
/// `coeffs[i]` multiplies `u^(i + 2)`: the constant and linear terms are
/// structurally absent.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    coeffs: Vec<f64>,
    lambda_factor: bool,
    name: String,
}

impl Nonlinearity {
    /// `f(u, lambda) = lambda (u^2 + u^3)`.
    pub fn lambda_u2_u3() -> Self {
        Self { coeffs: vec![1.0, 1.0], lambda_factor: true, name: "lambda-u2-u3".into() }
    }

    /// `f(u, lambda) = lambda u^3`; odd in `u`.
    pub fn lambda_u3() -> Self {
        Self { coeffs: vec![0.0, 1.0], lambda_factor: true, name: "lambda-u3".into() }
    }

    /// `f = lambda * sum c_i u^(i+2)` (when `lambda_factor`) or the plain
    /// polynomial. Validates the trivial-solution conditions by finite
    /// differences at five `lambda` values.
    pub fn polynomial(name: &str, coeffs: Vec<f64>, lambda_factor: bool) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Config {
                field: "nonlinearity".into(),
                what: "need at least the u^2 coefficient".into(),
            });
        }
        let f = Self { coeffs, lambda_factor, name: name.into() };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        let eps = 1e-6;
        for lambda in [-1.0, -0.3, 0.1, 1.0, 2.7] {
            let at_zero = self.value(0.0, lambda);
            let slope = (self.value(eps, lambda) - self.value(-eps, lambda)) / (2.0 * eps);
            if at_zero.abs() > 1e-14 || slope.abs() > 1e-8 {
                return Err(Error::Config {
                    field: "nonlinearity".into(),
                    what: format!(
                        "trivial-solution conditions violated at lambda = {lambda}: f(0) = {at_zero:e}, D_u f(0) = {slope:e}"
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn lambda_scale(&self, lambda: f64) -> f64 {
        if self.lambda_factor {
            lambda
        } else {
            1.0
        }
    }

    pub fn value(&self, u: f64, lambda: f64) -> f64 {
        let mut p = 0.0;
        for &c in self.coeffs.iter().rev() {
            p = (p + c) * u;
        }
        // p = sum c_i u^(i+1); one more factor of u gives the u^2 start
        self.lambda_scale(lambda) * p * u
    }

    /// `D_u f(u, lambda)`.
    pub fn du(&self, u: f64, lambda: f64) -> f64 {
        let mut d = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            let pow = (i + 2) as f64;
            d = d * u + pow * c;
        }
        self.lambda_scale(lambda) * d * u
    }

    /// `D_lambda f(u, lambda)`; for `lambda * p(u)` this is just `p(u)`.
    pub fn dlambda(&self, u: f64, _lambda: f64) -> f64 {
        if self.lambda_factor {
            self.value(u, 1.0)
        } else {
            0.0
        }
    }

    /// `D_uu f(0, lambda0)`.
    pub fn d2_at(&self, lambda0: f64) -> f64 {
        2.0 * self.coeffs[0] * self.lambda_scale(lambda0)
    }

    /// `D_uuu f(0, lambda0)`.
    pub fn d3_at(&self, lambda0: f64) -> f64 {
        let c3 = self.coeffs.get(1).copied().unwrap_or(0.0);
        6.0 * c3 * self.lambda_scale(lambda0)
    }

    /// Whether `f` is an odd function of `u`.
    pub fn odd_in_u(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, &c)| c == 0.0 || (i + 2) % 2 == 1)
    }
}
