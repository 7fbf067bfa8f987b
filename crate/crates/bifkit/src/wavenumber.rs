//! The transcendental wavenumber equation and its parity-tracked solution
//! curves.
//!
//! For each `mu` the vertical wavenumber `k` solves
//!
//! ```text
//! 2 h0 h1 k cos(k pi) + (h0^2 - h1^2 k^2) sin(k pi) = 0,
//! ```
//!
//! which factors (after multiplying by `sin(k pi)`) into an EVEN and an ODD
//! branch. Under the sign restrictions on the homotopy, the solution with
//! base mode `m` increases strictly from `k = m` at `mu = 0` to `k = m + 1`
//! at `mu = 1` and never passes through an integer in between.

use crate::error::{Error, Result};
use crate::homotopy::HomotopySpec;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which factor of the characteristic equation a wavenumber solves.
///
/// Consistent with the parity of the base integer mode at `mu = 0`: even
/// `m` solves the EVEN factor, odd `m` the ODD factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity assigned to the integer Neumann mode `m`.
    pub fn of_mode(m: u32) -> Self {
        if m % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// A solved wavenumber at a single `mu`.
#[derive(Debug, Clone, Copy)]
pub struct Wavenumber {
    pub k: f64,
    pub mu: f64,
    pub parity: Parity,
    pub base_mode: u32,
}

/// A parity-labeled branch `k(mu)` sampled over `[0, 1]`.
#[derive(Debug, Clone)]
pub struct WavenumberCurve {
    pub base_mode: u32,
    pub parity: Parity,
    /// Ordered `(mu, k)` samples covering `[0, 1]` with exact endpoints.
    pub samples: Vec<(f64, f64)>,
}

/// Left-hand side of the characteristic equation, exactly as written.
pub fn characteristic_residual(k: f64, mu: f64, spec: &HomotopySpec) -> f64 {
    let h0 = spec.h0(mu);
    let h1 = spec.h1(mu);
    2.0 * h0 * h1 * k * (k * PI).cos() + (h0 * h0 - h1 * h1 * k * k) * (k * PI).sin()
}

/// The two factors of the characteristic equation:
///
/// ```text
/// even = h0 sin(k pi) - h1 k (1 - cos(k pi))
/// odd  = h0 sin(k pi) + h1 k (1 + cos(k pi))
/// ```
///
/// Their product equals `sin(k pi)` times the characteristic residual.
pub fn parity_factors(k: f64, mu: f64, spec: &HomotopySpec) -> (f64, f64) {
    let h0 = spec.h0(mu);
    let h1 = spec.h1(mu);
    let s = (k * PI).sin();
    let c = (k * PI).cos();
    let even = h0 * s - h1 * k * (1.0 - c);
    let odd = h0 * s + h1 * k * (1.0 + c);
    (even, odd)
}

fn factor_value(k: f64, mu: f64, spec: &HomotopySpec, parity: Parity) -> f64 {
    let (even, odd) = parity_factors(k, mu, spec);
    match parity {
        Parity::Even => even,
        Parity::Odd => odd,
    }
}

/// Inset applied to the bracket `(m, m + 1)`; at the exact integers the
/// selected factor has a double root forming as `mu` approaches 0 or 1.
const BRACKET_EPS: f64 = 1e-8;

/// Solves the characteristic equation for the branch with base mode `m` at
/// an interior homotopy parameter.
///
/// Bracketed bisection on the parity factor, refined by secant steps, then
/// polished to machine precision so the unfactored residual is tiny even
/// close to the endpoints where `sin(k pi)` nearly vanishes.
pub fn solve_k(mu: f64, m: u32, parity: Parity, spec: &HomotopySpec, tol: f64) -> Result<Wavenumber> {
    assert!(tol > 0.0, "tolerance must be positive");
    assert!(
        mu > 0.0 && mu < 1.0,
        "interior mu required; endpoints are integers by construction"
    );
    assert_eq!(parity, Parity::of_mode(m), "parity inconsistent with base mode");

    let mut lo = m as f64 + BRACKET_EPS;
    let mut hi = (m + 1) as f64 - BRACKET_EPS;
    let f = |k: f64| factor_value(k, mu, spec, parity);
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(Wavenumber { k: lo, mu, parity, base_mode: m });
    }
    if fhi == 0.0 {
        return Ok(Wavenumber { k: hi, mu, parity, base_mode: m });
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootIsolation { lo, hi, flo, fhi });
    }

    // Bisection with an interleaved secant guess for speed; the bracket
    // invariant is never given up.
    let mut exact_root = None;
    for iter in 0..200 {
        let mid = if iter % 3 == 2 {
            // secant estimate from the bracket ends, clamped to the interior
            let s = lo - flo * (hi - lo) / (fhi - flo);
            if s > lo && s < hi {
                s
            } else {
                0.5 * (lo + hi)
            }
        } else {
            0.5 * (lo + hi)
        };
        let fmid = f(mid);
        if fmid == 0.0 {
            exact_root = Some(mid);
            break;
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
        if hi - lo < f64::EPSILON * mid.abs() {
            break;
        }
    }
    // Endpoint of the final bracket with the smaller factor value.
    let k = exact_root.unwrap_or(if flo.abs() <= fhi.abs() { lo } else { hi });

    let fv = f(k).abs();
    if fv > tol {
        return Err(Error::RootIsolation { lo, hi, flo, fhi });
    }
    Ok(Wavenumber { k, mu, parity, base_mode: m })
}

/// Traces the branch with base mode `m` over `[0, 1]` on `n_samples` points.
///
/// Endpoint values are set to `m` and `m + 1` analytically; interior values
/// are solved with the previous sample available as a sanity anchor. Strict
/// monotonicity is verified and a violation reports the offending interval.
pub fn trace_curve(
    m: u32,
    parity: Parity,
    spec: &HomotopySpec,
    n_samples: usize,
) -> Result<WavenumberCurve> {
    assert!(n_samples >= 3, "need at least three samples");
    assert_eq!(parity, Parity::of_mode(m), "parity inconsistent with base mode");

    let mut samples = Vec::with_capacity(n_samples);
    samples.push((0.0, m as f64));
    for i in 1..n_samples - 1 {
        let mu = i as f64 / (n_samples as f64 - 1.0);
        let w = solve_k(mu, m, parity, spec, 1e-12)?;
        samples.push((mu, w.k));
    }
    samples.push((1.0, (m + 1) as f64));

    for pair in samples.windows(2) {
        let (mu_lo, k_lo) = pair[0];
        let (mu_hi, k_hi) = pair[1];
        if k_hi <= k_lo {
            return Err(Error::CurveMonotonicity { mu_lo, mu_hi, k_lo, k_hi });
        }
    }
    // Interior samples must avoid the integers strictly.
    for &(mu, k) in &samples[1..n_samples - 1] {
        if (k - k.round()).abs() < BRACKET_EPS {
            return Err(Error::CurveMonotonicity { mu_lo: mu, mu_hi: mu, k_lo: k, k_hi: k });
        }
    }

    Ok(WavenumberCurve { base_mode: m, parity, samples })
}

impl WavenumberCurve {
    /// Linear interpolation of `k(mu)`; exact at the stored samples.
    pub fn k_at(&self, mu: f64) -> f64 {
        let n = self.samples.len();
        if mu <= 0.0 {
            return self.samples[0].1;
        }
        if mu >= 1.0 {
            return self.samples[n - 1].1;
        }
        let pos = self.samples.partition_point(|&(m, _)| m <= mu);
        let (m0, k0) = self.samples[pos - 1];
        let (m1, k1) = self.samples[pos];
        k0 + (k1 - k0) * (mu - m0) / (m1 - m0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain bisection of the unfactored residual, used as an independent
    /// oracle for frozen expected values.
    fn bisect_residual(spec: &HomotopySpec, mu: f64, mut lo: f64, mut hi: f64) -> f64 {
        let f = |k: f64| characteristic_residual(k, mu, spec);
        assert!(f(lo) * f(hi) < 0.0, "oracle bracket invalid");
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if f(mid) == 0.0 {
                return mid;
            }
            if f(lo) * f(mid) < 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn residual_vanishes_at_neumann_integers() {
        let spec = HomotopySpec::linear();
        let r = characteristic_residual(3.0, 0.0, &spec);
        assert!(r.abs() < 1e-13, "residual {r:e}");
    }

    #[test]
    fn residual_vanishes_at_k_zero() {
        let spec = HomotopySpec::linear();
        for mu in [0.0, 0.3, 0.7, 1.0] {
            assert_eq!(characteristic_residual(0.0, mu, &spec), 0.0);
        }
    }

    #[test]
    fn even_factor_root_at_half_mu_matches_bisection_oracle() {
        let spec = HomotopySpec::linear();
        let k_oracle = bisect_residual(&spec, 0.5, 0.1, 0.9);
        let w = solve_k(0.5, 0, Parity::Even, &spec, 1e-12).unwrap();
        assert!((w.k - k_oracle).abs() < 1e-10);
        assert!((w.k - 0.639).abs() < 1e-3, "k = {}", w.k);
        assert!(characteristic_residual(w.k, 0.5, &spec).abs() < 1e-10);
        // With h0 = h1 the even factor reduces to cot(k pi / 2) = k.
        let cot = 1.0 / (w.k * PI / 2.0).tan();
        assert!((cot - w.k).abs() < 1e-10);
    }

    #[test]
    fn odd_factor_root_at_half_mu() {
        let spec = HomotopySpec::linear();
        let w = solve_k(0.5, 1, Parity::Odd, &spec, 1e-12).unwrap();
        assert!((w.k - 1.396).abs() < 1e-3, "k = {}", w.k);
        // With h0 = h1 the odd factor reduces to tan(k pi / 2) = -k.
        let t = (w.k * PI / 2.0).tan();
        assert!((t + w.k).abs() < 1e-9);
    }

    #[test]
    fn k_tends_to_base_mode_as_mu_vanishes() {
        let spec = HomotopySpec::linear();
        for (m, parity) in [(0u32, Parity::Even), (1, Parity::Odd), (2, Parity::Even)] {
            let w = solve_k(1e-6, m, parity, &spec, 1e-12).unwrap();
            assert!((w.k - m as f64).abs() < 1e-2, "m = {m}, k = {}", w.k);
        }
    }

    #[test]
    fn parity_factor_special_values() {
        let spec = HomotopySpec::linear();
        let (even, _) = parity_factors(2.0, 0.0, &spec);
        assert!(even.abs() < 1e-14);
        let (_, odd) = parity_factors(1.0, 0.0, &spec);
        assert!(odd.abs() < 1e-14);
        let (even, _) = parity_factors(0.5, 1.0, &spec);
        assert!((even - 1.0).abs() < 1e-15, "h1(1) = 0 leaves h0 sin(pi/2)");
    }

    #[test]
    fn factorization_identity_on_random_inputs() {
        let spec = HomotopySpec::linear();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10_000 {
            let k = next() * 6.0;
            let mu = next();
            let (even, odd) = parity_factors(k, mu, &spec);
            let lhs = even * odd;
            let rhs = (k * PI).sin() * characteristic_residual(k, mu, &spec);
            let scale = 1.0 + even.abs() + odd.abs() + rhs.abs();
            assert!((lhs - rhs).abs() <= 1e-12 * scale, "k = {k}, mu = {mu}");
        }
    }

    #[test]
    fn traced_curve_is_monotone_with_exact_endpoints() {
        let spec = HomotopySpec::linear();
        for m in [0u32, 2] {
            let curve = trace_curve(m, Parity::of_mode(m), &spec, 11).unwrap();
            assert_eq!(curve.samples.first().unwrap().1, m as f64);
            assert_eq!(curve.samples.last().unwrap().1, (m + 1) as f64);
            for pair in curve.samples.windows(2) {
                assert!(pair[1].1 > pair[0].1);
            }
        }
    }

    #[test]
    fn interior_samples_avoid_integers() {
        let spec = HomotopySpec::linear();
        let curve = trace_curve(1, Parity::Odd, &spec, 101).unwrap();
        for &(_, k) in &curve.samples[1..100] {
            assert!((k - k.round()).abs() > 1e-6);
        }
    }

    #[test]
    fn reversed_homotopy_is_rejected() {
        let spec = HomotopySpec::from_coefficients("reversed", vec![1.0, -1.0], vec![0.0, 1.0]);
        // Either the solver fails to isolate a root or the traced curve is
        // not monotone; both surface as errors.
        let result = trace_curve(0, Parity::Even, &spec, 11);
        assert!(result.is_err());
    }

    #[test]
    fn solver_is_deterministic() {
        let spec = HomotopySpec::linear();
        let a = solve_k(0.37, 2, Parity::Even, &spec, 1e-12).unwrap();
        let b = solve_k(0.37, 2, Parity::Even, &spec, 1e-12).unwrap();
        assert_eq!(a.k.to_bits(), b.k.to_bits());
    }
}
