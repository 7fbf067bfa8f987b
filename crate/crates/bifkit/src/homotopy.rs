//! The boundary-condition homotopy `(h0(mu), h1(mu))`.
//!
//! The pair interpolates from homogeneous Neumann conditions at `mu = 0`
//! (where `h0` vanishes) to Dirichlet conditions on the horizontal sides at
//! `mu = 1` (where `h1` vanishes). Everything downstream — the wavenumber
//! equation, the grid operator, the reduced coefficients — consumes the pair
//! only through the values `(h0, h1)` and the ratio derivative
//! `h_tilde = (h0/h1)'`.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// One leg of the homotopy, with its analytic derivative when available.
#[derive(Clone)]
enum Leg {
    /// Polynomial in `mu`, low-degree coefficient first.
    Poly(Vec<f64>),
    /// Arbitrary function; derivative by central differences of step `FD_STEP`.
    Func(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

const FD_STEP: f64 = 1e-6;

impl Leg {
    fn value(&self, mu: f64) -> f64 {
        match self {
            Leg::Poly(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * mu + ci),
            Leg::Func(f) => f(mu),
        }
    }

    fn derivative(&self, mu: f64) -> f64 {
        match self {
            Leg::Poly(c) => {
                let mut acc = 0.0;
                for (i, &ci) in c.iter().enumerate().skip(1).rev() {
                    acc = acc * mu + i as f64 * ci;
                }
                acc
            }
            Leg::Func(f) => (f(mu + FD_STEP) - f(mu - FD_STEP)) / (2.0 * FD_STEP),
        }
    }

    fn is_approximate(&self) -> bool {
        matches!(self, Leg::Func(_))
    }
}

/// The boundary-condition pair `(h0, h1)` on `mu in [0, 1]`.
///
/// Immutable after construction; cheap to clone and safe to share across
/// threads running parameter sweeps.
#[derive(Clone)]
pub struct HomotopySpec {
    h0: Leg,
    h1: Leg,
    family_tag: String,
}

impl fmt::Debug for HomotopySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomotopySpec({})", self.family_tag)
    }
}

impl HomotopySpec {
    /// The family `h0 = mu`, `h1 = 1 - mu`.
    pub fn linear() -> Self {
        Self {
            h0: Leg::Poly(vec![0.0, 1.0]),
            h1: Leg::Poly(vec![1.0, -1.0]),
            family_tag: "linear".into(),
        }
    }

    /// Polynomial family from coefficient tables (low degree first).
    pub fn from_coefficients(tag: &str, h0: Vec<f64>, h1: Vec<f64>) -> Self {
        Self {
            h0: Leg::Poly(h0),
            h1: Leg::Poly(h1),
            family_tag: tag.into(),
        }
    }

    /// Family from arbitrary closures. Derivatives are obtained by central
    /// differences and the validation report flags them as approximate.
    pub fn from_fns<F0, F1>(tag: &str, h0: F0, h1: F1) -> Self
    where
        F0: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            h0: Leg::Func(Arc::new(h0)),
            h1: Leg::Func(Arc::new(h1)),
            family_tag: tag.into(),
        }
    }

    pub fn family_tag(&self) -> &str {
        &self.family_tag
    }

    pub fn h0(&self, mu: f64) -> f64 {
        self.h0.value(mu)
    }

    pub fn h1(&self, mu: f64) -> f64 {
        self.h1.value(mu)
    }

    pub fn dh0(&self, mu: f64) -> f64 {
        self.h0.derivative(mu)
    }

    pub fn dh1(&self, mu: f64) -> f64 {
        self.h1.derivative(mu)
    }

    /// Wronskian `h0' h1 - h0 h1'`. Positive exactly when `(h1/h0)' < 0`
    /// and `(h0/h1)' > 0`; stays finite at both endpoints.
    pub fn wronskian(&self, mu: f64) -> f64 {
        self.dh0(mu) * self.h1(mu) - self.h0(mu) * self.dh1(mu)
    }

    /// The ratio `r = h0/h1` and its derivative `h_tilde = (h0/h1)'`.
    ///
    /// Fails where `h1` vanishes (the Dirichlet end `mu = 1`).
    pub fn ratio_and_derivative(&self, mu: f64) -> Result<(f64, f64)> {
        let h1 = self.h1(mu);
        if h1 == 0.0 {
            return Err(Error::Domain(format!(
                "h1({mu}) = 0: ratio h0/h1 undefined (Dirichlet limit)"
            )));
        }
        let r = self.h0(mu) / h1;
        let h_tilde = self.wronskian(mu) / (h1 * h1);
        if !r.is_finite() || !h_tilde.is_finite() {
            return Err(Error::Evaluation {
                mu,
                what: format!("non-finite ratio data (r = {r}, h_tilde = {h_tilde})"),
            });
        }
        Ok((r, h_tilde))
    }

    /// Whether derivative values come from finite differences rather than
    /// an analytic formula.
    pub fn derivatives_approximate(&self) -> bool {
        self.h0.is_approximate() || self.h1.is_approximate()
    }
}

/// Outcome of [`validate_homotopy`]: empty `violations` means valid.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub derivatives_approximate: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the endpoint conditions, the non-vanishing of each leg on its
/// half-open interval, the sign of the ratio, and the monotone decrease of
/// `h1/h0`, at the endpoints and `samples` interior points.
///
/// The monotonicity condition is a hypothesis of the wavenumber lemma, not a
/// computable certificate, so it is checked by sampling only.
pub fn validate_homotopy(spec: &HomotopySpec, samples: usize) -> Result<ValidationReport> {
    assert!(samples >= 2, "need at least two sample points");
    let mut violations = Vec::new();

    let check_finite = |mu: f64| -> Result<(f64, f64)> {
        let (v0, v1) = (spec.h0(mu), spec.h1(mu));
        if !v0.is_finite() || !v1.is_finite() {
            return Err(Error::Evaluation {
                mu,
                what: format!("non-finite value (h0 = {v0}, h1 = {v1})"),
            });
        }
        Ok((v0, v1))
    };

    let (h0_at0, _) = check_finite(0.0)?;
    let (_, h1_at1) = check_finite(1.0)?;
    if h0_at0 != 0.0 {
        violations.push(format!("h0(0) != 0 (got {h0_at0})"));
    }
    if h1_at1 != 0.0 {
        violations.push(format!("h1(1) != 0 (got {h1_at1})"));
    }

    // Interior sample points, plus the endpoint that each condition includes.
    for i in 1..=samples {
        let mu = i as f64 / (samples as f64 + 1.0);
        let (h0, h1) = check_finite(mu)?;
        if h0 == 0.0 {
            violations.push(format!("h0({mu}) = 0 inside (0, 1]"));
        }
        if h1 == 0.0 {
            violations.push(format!("h1({mu}) = 0 inside [0, 1)"));
        }
        if h1 != 0.0 && h0 / h1 < 0.0 {
            violations.push(format!("h0/h1 < 0 at mu = {mu}"));
        }
        let w = spec.wronskian(mu);
        if !w.is_finite() {
            return Err(Error::Evaluation {
                mu,
                what: format!("non-finite Wronskian {w}"),
            });
        }
        if w <= 0.0 {
            violations.push(format!("(h1/h0)' >= 0 at mu = {mu} (Wronskian {w:e})"));
        }
    }
    let (_, h1_at0) = check_finite(0.0)?;
    if spec.h0(1.0) == 0.0 {
        violations.push("h0(1) = 0".into());
    }
    if h1_at0 == 0.0 {
        violations.push("h1(0) = 0".into());
    }

    violations.dedup();
    Ok(ValidationReport {
        violations,
        derivatives_approximate: spec.derivatives_approximate(),
    })
}
