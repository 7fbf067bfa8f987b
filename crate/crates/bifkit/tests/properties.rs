//! Property tests for the crate's structural invariants.

use bifkit::homotopy::HomotopySpec;
use bifkit::scenario::{double_branches, pitchfork_branches, DoubleNormalForm};
use bifkit::symmetry::{act, GroupElement};
use bifkit::wavenumber::{characteristic_residual, parity_factors};
use ndarray::Array2;
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    /// The parity factors multiply back to `sin(k pi)` times the
    /// characteristic residual.
    #[test]
    fn factorization_identity(k in 0.0f64..6.0, mu in 0.0f64..1.0) {
        let spec = HomotopySpec::linear();
        let (even, odd) = parity_factors(k, mu, &spec);
        let lhs = even * odd;
        let rhs = (k * PI).sin() * characteristic_residual(k, mu, &spec);
        let scale = 1.0 + even.abs() + odd.abs() + rhs.abs();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    /// The analytic ratio derivative matches a central difference.
    #[test]
    fn ratio_derivative_consistency(mu in 0.05f64..0.95) {
        let spec = HomotopySpec::linear();
        let (_, ht) = spec.ratio_and_derivative(mu).unwrap();
        let step = 1e-6;
        let r = |m: f64| spec.h0(m) / spec.h1(m);
        let fd = (r(mu + step) - r(mu - step)) / (2.0 * step);
        prop_assert!((ht - fd).abs() <= 1e-6 * (1.0 + ht.abs()));
    }

    /// Group elements act as exact isometries on grid functions.
    #[test]
    fn action_is_isometric(seed in any::<u64>(), sign in prop::bool::ANY, s in prop::bool::ANY, r in 0u8..4) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let u = Array2::from_shape_fn((12, 12), |_| rng.gen_range(-1.0..1.0));
        let g = GroupElement::new(if sign { 1 } else { -1 }, bifkit::symmetry::Dihedral { s, r });
        let gu = act(g, &u).unwrap();
        let n1: f64 = u.iter().map(|v| v * v).sum();
        let n2: f64 = gu.iter().map(|v| v * v).sum();
        prop_assert!((n1 - n2).abs() <= 1e-12 * n1);
        // and the inverse element undoes the action exactly
        let back = act(g.inverse(), &gu).unwrap();
        prop_assert_eq!(u, back);
    }

    /// Emitted pitchfork amplitudes satisfy the cubic normal form.
    #[test]
    fn pitchfork_residual_vanishes(
        a in -5.0f64..5.0,
        c in prop::sample::select(vec![-3.0f64, -0.7, 0.4, 2.5]),
        sigma in -2.0f64..2.0,
        nu in -0.5f64..0.5,
    ) {
        let sc = bifkit::reduction::SimpleCoefficients {
            n: 1, base_mode: 2, mu0: 0.5, lambda0: 6.0, lambda0_h: 6.0,
            a, a_grid: a, c, q: 0.0, transcritical: false,
        };
        let [plus, _] = pitchfork_branches(&sc).unwrap();
        if let Some((z, _)) = plus.amplitudes(sigma, nu) {
            let resid = (-sigma + a * nu) * z + c * z * z * z;
            prop_assert!(resid.abs() <= 1e-11 * (1.0 + sigma.abs() + nu.abs()));
        }
    }

    /// Emitted double-point amplitudes satisfy the reduced system, and
    /// negating a component maps families onto families.
    #[test]
    fn double_point_residuals_vanish(
        d1 in -3.0f64..3.0,
        d2 in -3.0f64..3.0,
        c1 in prop::sample::select(vec![0.3f64, 1.2, 4.4]),
        ratio in prop::sample::select(vec![0.25f64, 0.6, 3.0]),
        sigma in -2.0f64..2.0,
        nu in -0.3f64..0.3,
    ) {
        let c2 = c1 * ratio; // keeps c1^2 != c2^2
        let nf = DoubleNormalForm { d1, d2, c1, c2 };
        let fams = double_branches(&nf).unwrap();
        for fam in &fams {
            if let Some((z1, z2)) = fam.amplitudes(sigma, nu) {
                let r1 = (-sigma + d1 * nu + c1 * z1 * z1 + c2 * z2 * z2) * z1;
                let r2 = (-sigma + d2 * nu + c2 * z1 * z1 + c1 * z2 * z2) * z2;
                let scale = 1.0 + sigma.abs() + nu.abs() + z1.abs() + z2.abs();
                prop_assert!(r1.abs() <= 1e-11 * scale, "{}: r1 = {r1:e}", fam.label);
                prop_assert!(r2.abs() <= 1e-11 * scale, "{}: r2 = {r2:e}", fam.label);
                // reflection: (-z1, z2) lies on some family of the diagram
                let hit = fams.iter().any(|other| {
                    other.amplitudes(sigma, nu).is_some_and(|(w1, w2)| {
                        ((w1 + z1).abs() <= 1e-12 && (w2 - z2).abs() <= 1e-12)
                            || ((w1 - z1).abs() <= 1e-12 && (w2 + z2).abs() <= 1e-12)
                    })
                });
                prop_assert!(hit, "{}: reflected branch missing", fam.label);
            }
        }
    }
}
