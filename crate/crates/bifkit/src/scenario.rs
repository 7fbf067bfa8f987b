//! Branch families of the reduced equations, their symmetry labels,
//! secondary-bifurcation loci, scenario diagrams, and validation of the
//! predicted amplitudes against continuation of the discrete problem.
//!
//! Families are stored symbolically as coefficient tuples of the squared
//! amplitudes,
//!
//! ```text
//! z^2 = (sigma_coeff * sigma + nu_coeff * nu) / denom,
//! ```
//!
//! so existence regions stay exact sign conditions; sampling happens only
//! on export or validation. The `+/-` reflections of a branch are grouped
//! into a single family, so a double point carries four families: two
//! pure modes and two mixed modes (equal and opposite relative signs).

use crate::continuation::{newton_solve, ContinuationState, Corrector, NewtonOptions};
use crate::error::{Error, Result};
use crate::grid::GridOperator;
use crate::nonlinearity::Nonlinearity;
use crate::reduction::{DoubleCoefficients, NumericDouble, SimpleCoefficients};
use crate::symmetry::{isotropy, SymmetryLabel};
use ndarray::Array2;

/// Squared amplitude as an affine function of `(sigma, nu)` over a
/// constant denominator.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeSq {
    pub sigma_coeff: f64,
    pub nu_coeff: f64,
    pub denom: f64,
}

impl AmplitudeSq {
    pub fn squared(&self, sigma: f64, nu: f64) -> f64 {
        (self.sigma_coeff * sigma + self.nu_coeff * nu) / self.denom
    }

    /// Amplitude where the radicand is nonnegative.
    pub fn value(&self, sigma: f64, nu: f64) -> Option<f64> {
        let s = self.squared(sigma, nu);
        (s >= 0.0).then(|| s.sqrt())
    }
}

/// How the affine map turns into an amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `z = +/- sqrt(map)`; exists where the radicand is nonnegative.
    SquareRoot,
    /// `z = map` directly (transcritical points); exists everywhere.
    Linear,
}

/// One branch family, up to the `+/-` reflection.
#[derive(Debug, Clone)]
pub struct BranchFamily {
    pub label: String,
    pub kind: FamilyKind,
    /// Amplitude maps; `None` marks an identically zero component.
    pub z1: Option<AmplitudeSq>,
    pub z2: Option<AmplitudeSq>,
    /// Relative signs of the representative branch (the mixed families
    /// differ only here).
    pub sign_pattern: (f64, f64),
    pub symmetry: Option<SymmetryLabel>,
}

impl BranchFamily {
    /// Representative amplitudes at `(sigma, nu)`, or `None` outside the
    /// existence region.
    pub fn amplitudes(&self, sigma: f64, nu: f64) -> Option<(f64, f64)> {
        let component = |map: &Option<AmplitudeSq>| -> Option<f64> {
            match (map, self.kind) {
                (None, _) => Some(0.0),
                (Some(a), FamilyKind::SquareRoot) => a.value(sigma, nu),
                (Some(a), FamilyKind::Linear) => Some(a.squared(sigma, nu)),
            }
        };
        let z1 = component(&self.z1)?;
        let z2 = component(&self.z2)?;
        Some((self.sign_pattern.0 * z1, self.sign_pattern.1 * z2))
    }

    pub fn exists(&self, sigma: f64, nu: f64) -> bool {
        self.amplitudes(sigma, nu).is_some()
    }

    /// Existence allowing a round-off band at the region boundary.
    fn exists_with_slack(&self, sigma: f64, nu: f64, slack: f64) -> bool {
        if self.kind == FamilyKind::Linear {
            return true;
        }
        [&self.z1, &self.z2]
            .into_iter()
            .flatten()
            .all(|a| a.squared(sigma, nu) >= -slack)
    }
}

/// The scalar cubic normal form `(-sigma + a nu) z + c z^3` for a simple
/// point, returned as the `+/-` pair of pitchfork branches.
pub fn pitchfork_branches(sc: &SimpleCoefficients) -> Result<[BranchFamily; 2]> {
    if sc.c == 0.0 {
        return Err(Error::DegenerateCoefficients(
            "cubic coefficient vanishes: the third-order truncation does not settle the scenario"
                .into(),
        ));
    }
    if sc.transcritical {
        return Err(Error::DegenerateCoefficients(format!(
            "quadratic coefficient q = {:e} above the pitchfork threshold; use the transcritical form",
            sc.q
        )));
    }
    let amp = AmplitudeSq { sigma_coeff: 1.0, nu_coeff: -sc.a, denom: sc.c };
    Ok([
        BranchFamily {
            label: "pitchfork(+)".into(),
            kind: FamilyKind::SquareRoot,
            z1: Some(amp),
            z2: None,
            sign_pattern: (1.0, 0.0),
            symmetry: None,
        },
        BranchFamily {
            label: "pitchfork(-)".into(),
            kind: FamilyKind::SquareRoot,
            z1: Some(amp),
            z2: None,
            sign_pattern: (-1.0, 0.0),
            symmetry: None,
        },
    ])
}

/// Second-order normal form `(-sigma + a nu) z + q z^2 = 0` for the
/// quadratically nondegenerate simple points (`n = 0` modes can land
/// here): a single crossing branch `z = (sigma - a nu)/q`.
pub fn transcritical_branch(sc: &SimpleCoefficients) -> Result<BranchFamily> {
    if sc.q == 0.0 {
        return Err(Error::DegenerateCoefficients("quadratic coefficient vanishes".into()));
    }
    Ok(BranchFamily {
        label: "transcritical".into(),
        kind: FamilyKind::Linear,
        z1: Some(AmplitudeSq { sigma_coeff: 1.0, nu_coeff: -sc.a, denom: sc.q }),
        z2: None,
        sign_pattern: (1.0, 0.0),
        symmetry: None,
    })
}

/// Pitchfork pair, or the transcritical crossing when the quadratic
/// diagnostic is above threshold.
pub fn simple_branches(sc: &SimpleCoefficients) -> Result<Vec<BranchFamily>> {
    if sc.transcritical {
        Ok(vec![transcritical_branch(sc)?])
    } else {
        Ok(pitchfork_branches(sc)?.to_vec())
    }
}

/// Normal-form coefficients of a double point, independent of how they
/// were obtained.
#[derive(Debug, Clone, Copy)]
pub struct DoubleNormalForm {
    pub d1: f64,
    pub d2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl From<&DoubleCoefficients> for DoubleNormalForm {
    fn from(dc: &DoubleCoefficients) -> Self {
        Self { d1: dc.d1, d2: dc.d2, c1: dc.c1, c2: dc.c2 }
    }
}

impl From<&NumericDouble> for DoubleNormalForm {
    fn from(nd: &NumericDouble) -> Self {
        Self { d1: nd.d1, d2: nd.d2, c1: nd.c1, c2: nd.c2 }
    }
}

/// The four families at a double point: two pure modes and the two mixed
/// sign classes.
pub fn double_branches(nf: &DoubleNormalForm) -> Result<[BranchFamily; 4]> {
    if nf.c1 == 0.0 {
        return Err(Error::DegenerateCoefficients("c1 = 0".into()));
    }
    if (nf.c1 * nf.c1 - nf.c2 * nf.c2) == 0.0 {
        return Err(Error::DegenerateCoefficients("c1^2 = c2^2: mixed modes degenerate".into()));
    }
    let pure1 = AmplitudeSq { sigma_coeff: 1.0, nu_coeff: -nf.d1, denom: nf.c1 };
    let pure2 = AmplitudeSq { sigma_coeff: 1.0, nu_coeff: -nf.d2, denom: nf.c1 };
    let dc2 = nf.c1 * nf.c1 - nf.c2 * nf.c2;
    let mixed1 = AmplitudeSq {
        sigma_coeff: nf.c1 - nf.c2,
        nu_coeff: -(nf.c1 * nf.d1 - nf.c2 * nf.d2),
        denom: dc2,
    };
    let mixed2 = AmplitudeSq {
        sigma_coeff: nf.c1 - nf.c2,
        nu_coeff: nf.c2 * nf.d1 - nf.c1 * nf.d2,
        denom: dc2,
    };
    Ok([
        BranchFamily {
            label: "pure-phi1".into(),
            kind: FamilyKind::SquareRoot,
            z1: Some(pure1),
            z2: None,
            sign_pattern: (1.0, 0.0),
            symmetry: None,
        },
        BranchFamily {
            label: "pure-phi2".into(),
            kind: FamilyKind::SquareRoot,
            z1: None,
            z2: Some(pure2),
            sign_pattern: (0.0, 1.0),
            symmetry: None,
        },
        BranchFamily {
            label: "mixed(+)".into(),
            kind: FamilyKind::SquareRoot,
            z1: Some(mixed1),
            z2: Some(mixed2),
            sign_pattern: (1.0, 1.0),
            symmetry: None,
        },
        BranchFamily {
            label: "mixed(-)".into(),
            kind: FamilyKind::SquareRoot,
            z1: Some(mixed1),
            z2: Some(mixed2),
            sign_pattern: (1.0, -1.0),
            symmetry: None,
        },
    ])
}

/// A coincidence of a pure and a mixed family away from the trivial
/// solution.
#[derive(Debug, Clone)]
pub struct SecondaryLocus {
    /// The locus is the ray `sigma = (sigma_over_nu) nu`.
    pub sigma_over_nu: f64,
    /// Which pure family the mixed family meets there.
    pub pure_label: String,
    /// Whether the meeting point lies inside both existence regions for
    /// positive (negative) `nu`.
    pub valid_nu_pos: bool,
    pub valid_nu_neg: bool,
}

/// Secondary-bifurcation loci of the double-point system. Empty when
/// `d1 = d2`: the would-be loci collapse onto the primary point.
pub fn secondary_loci(nf: &DoubleNormalForm) -> Result<Vec<SecondaryLocus>> {
    if nf.c1 == nf.c2 {
        return Err(Error::DegenerateCoefficients("c1 = c2".into()));
    }
    if nf.d1 == nf.d2 {
        return Ok(Vec::new());
    }
    let families = double_branches(nf)?;
    let mut out = Vec::new();
    for (ratio, pure_label) in [
        ((nf.c1 * nf.d1 - nf.c2 * nf.d2) / (nf.c1 - nf.c2), "pure-phi2"),
        ((nf.c1 * nf.d2 - nf.c2 * nf.d1) / (nf.c1 - nf.c2), "pure-phi1"),
    ] {
        let pure = families.iter().find(|f| f.label == pure_label).unwrap();
        let mixed = &families[2];
        let valid = |nu: f64| {
            let sigma = ratio * nu;
            let slack = 1e-10 * (1.0 + sigma.abs() + nu.abs());
            pure.exists_with_slack(sigma, nu, slack) && mixed.exists_with_slack(sigma, nu, slack)
        };
        out.push(SecondaryLocus {
            sigma_over_nu: ratio,
            pure_label: pure_label.into(),
            valid_nu_pos: valid(1.0),
            valid_nu_neg: valid(-1.0),
        });
    }
    Ok(out)
}

/// Result of comparing brute-force isotropy of a leading-order branch
/// function against the structural prediction.
#[derive(Debug, Clone)]
pub struct ClassifiedSymmetry {
    /// Isotropy inside the full sign-extended dihedral group.
    pub computed: SymmetryLabel,
    /// Structural prediction (isotropy of the kernel combination).
    pub predicted: SymmetryLabel,
    /// Isotropy cut down to the problem's equivariance group.
    pub within_gamma: SymmetryLabel,
    pub consistent: bool,
}

/// Brute-force isotropy of the leading-order function `z1 phi1 + z2 phi2`
/// at a sample point of the family's existence region, cross-checked
/// against the prediction obtained from generic amplitudes of the same
/// sign pattern.
pub fn classify_branch_symmetry(
    family: &BranchFamily,
    modes: &[Array2<f64>],
    sigma: f64,
    nu: f64,
    gamma: &SymmetryLabel,
    tol: f64,
) -> Result<ClassifiedSymmetry> {
    let (z1, z2) = family
        .amplitudes(sigma, nu)
        .ok_or_else(|| Error::Domain(format!("({sigma}, {nu}) outside the existence region")))?;
    let build = |a: f64, b: f64| -> Array2<f64> {
        let mut u = modes[0].mapv(|v| a * v);
        if modes.len() > 1 {
            u.scaled_add(b, &modes[1]);
        }
        u
    };
    let u = build(z1, z2);
    let computed = isotropy(&u, tol)?.label;

    // prediction: same sign pattern with either equal-magnitude or generic
    // unequal amplitudes, matching the family's structure
    let zsign = |z: f64| if z == 0.0 { 0.0 } else { z.signum() };
    let equal = (z1.abs() - z2.abs()).abs() <= 1e-12 * (z1.abs() + z2.abs());
    let (p1, p2) = if z1 == 0.0 || z2 == 0.0 {
        (zsign(z1), zsign(z2))
    } else if equal {
        (family.sign_pattern.0, family.sign_pattern.1)
    } else {
        // generic unequal amplitudes with the family's signs
        (0.83 * family.sign_pattern.0, 0.41 * family.sign_pattern.1)
    };
    let predicted = isotropy(&build(p1, p2), tol)?.label;
    let within_gamma = computed.intersect(&gamma.elements);

    Ok(ClassifiedSymmetry {
        consistent: computed.elements == predicted.elements,
        computed,
        predicted,
        within_gamma,
    })
}

/// A full local scenario at one bifurcation point.
#[derive(Debug, Clone)]
pub struct ScenarioDiagram {
    pub lambda0: f64,
    pub mu0: f64,
    pub kernel_dim: usize,
    pub branches: Vec<BranchFamily>,
    pub secondary_loci: Vec<SecondaryLocus>,
    /// Double points only: whether the mixed modes keep a nontrivial
    /// isotropy for `nu != 0` (they do exactly when `d1 = d2`).
    pub mixed_symmetry_preserved: Option<bool>,
}

/// Assembles the diagram of a simple point.
pub fn assemble_simple_diagram(sc: &SimpleCoefficients) -> Result<ScenarioDiagram> {
    let branches = pitchfork_branches(sc)?;
    Ok(ScenarioDiagram {
        lambda0: sc.lambda0,
        mu0: sc.mu0,
        kernel_dim: 1,
        branches: branches.to_vec(),
        secondary_loci: Vec::new(),
        mixed_symmetry_preserved: None,
    })
}

/// Assembles the diagram of a Neumann double point from a normal form.
pub fn assemble_double_diagram(
    lambda0: f64,
    nf: &DoubleNormalForm,
) -> Result<ScenarioDiagram> {
    let branches = double_branches(nf)?;
    let loci = secondary_loci(nf)?;
    Ok(ScenarioDiagram {
        lambda0,
        mu0: 0.0,
        kernel_dim: 2,
        branches: branches.to_vec(),
        secondary_loci: loci,
        mixed_symmetry_preserved: Some(nf.d1 == nf.d2),
    })
}

/// Amplitude comparison for one family.
#[derive(Debug, Clone)]
pub struct BranchValidation {
    pub label: String,
    /// `(sigma, relative amplitude error)` per validated sample.
    pub samples: Vec<(f64, f64)>,
    /// `(sigma, reason)` for samples where continuation failed.
    pub failures: Vec<(f64, String)>,
}

impl BranchValidation {
    pub fn max_rel_err(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(0.0, f64::max)
    }

    /// Whether the error at the smallest validated `|sigma|` is below the
    /// error at the largest (the truncation is asymptotic in `sigma`).
    pub fn error_shrinks_with_sigma(&self) -> bool {
        if self.samples.len() < 2 {
            return false;
        }
        let mut by_sigma = self.samples.clone();
        by_sigma.sort_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap());
        by_sigma.first().unwrap().1 < by_sigma.last().unwrap().1
    }
}

/// Validates family amplitude predictions against Newton solutions of the
/// discrete problem seeded on the kernel.
///
/// `op` is assembled at `mu0 + nu`; `lambda0_h` is the discrete
/// bifurcation point of the `mu0` operator, the origin for `sigma`;
/// `kernel` holds the grid-normalized kernel modes in family order.
/// Continuation failures are recorded per branch, not fatal.
pub fn validate_against_continuation(
    op: &GridOperator,
    f: &Nonlinearity,
    lambda0_h: f64,
    kernel: &[Array2<f64>],
    families: &[BranchFamily],
    sigmas: &[f64],
    nu: f64,
) -> Vec<BranchValidation> {
    let newton = NewtonOptions::default();
    families
        .iter()
        .map(|family| {
            let mut samples = Vec::new();
            let mut failures = Vec::new();
            for &sigma in sigmas {
                let Some((z1, z2)) = family.amplitudes(sigma, nu) else {
                    failures.push((sigma, "outside existence region".into()));
                    continue;
                };
                let mut seed = kernel[0].mapv(|v| z1 * v);
                if kernel.len() > 1 {
                    seed.scaled_add(z2, &kernel[1]);
                }
                let state = ContinuationState::at(seed, lambda0_h + sigma, op.mu());
                match newton_solve(op, f, &state, Corrector::FixedLambda, &newton) {
                    Ok(sol) => {
                        if op.norm(&sol.u) < 1e-8 {
                            failures.push((sigma, "converged to the trivial solution".into()));
                            continue;
                        }
                        let m1 = op.inner(&kernel[0], &sol.u);
                        let m2 = if kernel.len() > 1 {
                            op.inner(&kernel[1], &sol.u)
                        } else {
                            0.0
                        };
                        let pred_norm = (z1 * z1 + z2 * z2).sqrt();
                        if pred_norm < 1e-12 {
                            failures.push((sigma, "zero predicted amplitude".into()));
                            continue;
                        }
                        let err = ((m1 - z1).powi(2) + (m2 - z2).powi(2)).sqrt() / pred_norm;
                        samples.push((sigma, err));
                    }
                    Err(e) => failures.push((sigma, e.to_string())),
                }
            }
            BranchValidation { label: family.label.clone(), samples, failures }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::double_coeffs_neumann;
    use crate::symmetry::{d2_elements, gamma_for};
    use std::f64::consts::PI;

    fn f36() -> Nonlinearity {
        Nonlinearity::lambda_u2_u3()
    }

    fn sample_mode(n: usize, mode: &crate::spectrum::EigenMode) -> Array2<f64> {
        let h = PI / n as f64;
        Array2::from_shape_fn((n, n), |(i, j)| {
            mode.value((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
        })
    }

    #[test]
    fn pitchfork_roots_on_trivial_line() {
        let sc = SimpleCoefficients {
            n: 1,
            base_mode: 2,
            mu0: 0.5,
            lambda0: 6.1,
            lambda0_h: 6.1,
            a: 3.86,
            a_grid: 3.86,
            c: 4.47,
            q: 0.0,
            transcritical: false,
        };
        let [plus, minus] = pitchfork_branches(&sc).unwrap();
        // sigma = a nu puts the branch exactly on the trivial solution
        let (z1, _) = plus.amplitudes(3.86 * 0.2, 0.2).unwrap();
        assert_eq!(z1, 0.0);
        // supercritical: exists only for sigma >= a nu
        assert!(plus.exists(0.9, 0.0));
        assert!(!plus.exists(-0.1, 0.0));
        assert_eq!(minus.amplitudes(0.9, 0.0).unwrap().0, -plus.amplitudes(0.9, 0.0).unwrap().0);
    }

    #[test]
    fn pitchfork_satisfies_reduced_equation() {
        let sc = SimpleCoefficients {
            n: 1,
            base_mode: 2,
            mu0: 0.5,
            lambda0: 6.1,
            lambda0_h: 6.1,
            a: -2.3,
            a_grid: -2.3,
            c: 1.9,
            q: 0.0,
            transcritical: false,
        };
        let [plus, _] = pitchfork_branches(&sc).unwrap();
        let mut state = 1u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut tried = 0;
        while tried < 100 {
            let sigma = next() * 4.0;
            let nu = next() * 0.8;
            if let Some((z, _)) = plus.amplitudes(sigma, nu) {
                let resid = (-sigma + sc.a * nu) * z + sc.c * z * z * z;
                assert!(resid.abs() < 1e-12, "residual {resid:e}");
                tried += 1;
            }
        }
    }

    #[test]
    fn degenerate_cubic_is_an_error() {
        let sc = SimpleCoefficients {
            n: 0,
            base_mode: 0,
            mu0: 0.5,
            lambda0: 0.4,
            lambda0_h: 0.4,
            a: 1.0,
            a_grid: 1.0,
            c: 0.0,
            q: 0.0,
            transcritical: false,
        };
        assert!(pitchfork_branches(&sc).is_err());
    }

    #[test]
    fn double_branches_match_worked_example_1_2() {
        // published display: pure modes (+/- (132 pi (pi sigma - 4 nu)/5695)^(1/2), 0)
        let f = f36();
        let dc = double_coeffs_neumann(1, 2, &f, 1.0).unwrap();
        let nf = DoubleNormalForm {
            d1: dc.d1,
            d2: dc.d2,
            c1: dc.c1,
            c2: dc.c2_tabulated.unwrap(), // the worked example used the tabulated value
        };
        let fams = double_branches(&nf).unwrap();
        let sigma = 0.7;
        let nu = 0.1;
        let (z1, _) = fams[0].amplitudes(sigma, nu).unwrap();
        let display = (132.0 * PI * (PI * sigma - 4.0 * nu) / 5695.0).sqrt();
        assert!((z1 - display).abs() < 1e-12);
        // mixed modes with the tabulated c2: denominator 5695 + 110220
        let (m1, m2) = fams[2].amplitudes(sigma, nu).unwrap();
        let mixed_display = (132.0 * PI * (PI * sigma - 4.0 * nu) / 115_915.0).sqrt();
        assert!((m1 - mixed_display).abs() < 1e-12);
        assert!((m2 - mixed_display).abs() < 1e-12, "d1 = d2 mixed modes have equal magnitudes");
    }

    #[test]
    fn double_branches_match_worked_example_0_1() {
        let f = f36();
        let dc = double_coeffs_neumann(0, 1, &f, 1.0).unwrap();
        let nf = DoubleNormalForm::from(&dc);
        let fams = double_branches(&nf).unwrap();
        let sigma = 0.4;
        let nu = 0.01;
        // pure-phi2 branch (0, +/- (6 pi^2 sigma / 19)^(1/2)): nu-independent
        let (z1, z2) = fams[1].amplitudes(sigma, nu).unwrap();
        assert_eq!(z1, 0.0);
        assert!((z2 - (6.0 * PI * PI * sigma / 19.0).sqrt()).abs() < 1e-12);
        assert_eq!(fams[1].amplitudes(sigma, 0.3).unwrap().1, z2);
        // mixed modes per the worked display
        let (m1, m2) = fams[2].amplitudes(sigma, nu).unwrap();
        assert!((m1 - (6.0 * PI * (PI * sigma - 76.0 * nu) / 37.0).sqrt()).abs() < 1e-12);
        assert!((m2 - (6.0 * PI * (PI * sigma + 72.0 * nu) / 37.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn neumann_limit_recovers_symmetric_scenario() {
        let f = f36();
        let dc = double_coeffs_neumann(0, 1, &f, 1.0).unwrap();
        let nf = DoubleNormalForm::from(&dc);
        let fams = double_branches(&nf).unwrap();
        let sigma = 0.25;
        for fam in &fams {
            let at_zero = fam.amplitudes(sigma, 0.0).unwrap();
            let near_zero = fam.amplitudes(sigma, 1e-9).unwrap();
            assert!((at_zero.0 - near_zero.0).abs() < 1e-6);
            assert!((at_zero.1 - near_zero.1).abs() < 1e-6);
        }
        // at nu = 0 the mixed modes have equal magnitudes
        let (m1, m2) = fams[2].amplitudes(sigma, 0.0).unwrap();
        assert!((m1.abs() - m2.abs()).abs() < 1e-14);
    }

    #[test]
    fn reflection_maps_families_onto_families() {
        let f = f36();
        let dc = double_coeffs_neumann(1, 2, &f, 1.0).unwrap();
        let fams = double_branches(&DoubleNormalForm::from(&dc)).unwrap();
        let (sigma, nu) = (0.9, 0.05);
        // negating z1 sends mixed(+) to mixed(-) and fixes the pure families
        let (p1, p2) = fams[2].amplitudes(sigma, nu).unwrap();
        let target: Vec<(f64, f64)> =
            fams.iter().filter_map(|f| f.amplitudes(sigma, nu)).collect();
        assert!(target
            .iter()
            .any(|&(a, b)| (a - (-p1)).abs() < 1e-14 && (b - p2).abs() < 1e-14
                || (a + (-p1)).abs() < 1e-14 && (b + p2).abs() < 1e-14));
    }

    #[test]
    fn secondary_loci_for_0_1() {
        let f = f36();
        let dc = double_coeffs_neumann(0, 1, &f, 1.0).unwrap();
        let loci = secondary_loci(&DoubleNormalForm::from(&dc)).unwrap();
        assert_eq!(loci.len(), 2);
        let phi2_locus = loci.iter().find(|l| l.pure_label == "pure-phi2").unwrap();
        assert!((phi2_locus.sigma_over_nu - 76.0 / PI).abs() < 1e-12);
        assert!(phi2_locus.valid_nu_pos);
        // the phi1-side locus sits at negative sigma/nu and is only
        // realizable for nu < 0
        let phi1_locus = loci.iter().find(|l| l.pure_label == "pure-phi1").unwrap();
        assert!((phi1_locus.sigma_over_nu + 72.0 / PI).abs() < 1e-12);
        assert!(!phi1_locus.valid_nu_pos);
        assert!(phi1_locus.valid_nu_neg);
    }

    #[test]
    fn degenerate_mixed_coefficients_are_errors() {
        let nf = DoubleNormalForm { d1: 1.0, d2: 0.5, c1: 1.2, c2: -1.2 };
        assert!(double_branches(&nf).is_err(), "c1^2 = c2^2");
        let nf = DoubleNormalForm { d1: 1.0, d2: 0.5, c1: 1.2, c2: 1.2 };
        assert!(secondary_loci(&nf).is_err(), "c1 = c2");
    }

    #[test]
    fn secondary_loci_collapse_when_slopes_agree() {
        let f = f36();
        let dc = double_coeffs_neumann(1, 2, &f, 1.0).unwrap();
        let loci = secondary_loci(&DoubleNormalForm::from(&dc)).unwrap();
        assert!(loci.is_empty());
    }

    #[test]
    fn locus_amplitudes_meet_by_substitution() {
        let f = f36();
        let dc = double_coeffs_neumann(0, 1, &f, 1.0).unwrap();
        let nf = DoubleNormalForm::from(&dc);
        let fams = double_branches(&nf).unwrap();
        let loci = secondary_loci(&nf).unwrap();
        let locus = loci.iter().find(|l| l.pure_label == "pure-phi2").unwrap();
        let nu = 0.013;
        let sigma = locus.sigma_over_nu * nu;
        let pure = fams[1].amplitudes(sigma, nu).unwrap();
        let mixed = fams[2].amplitudes(sigma, nu).unwrap();
        // the mixed z1-component vanishes at the locus and the z2
        // components coincide
        assert!(mixed.0.abs() < 1e-12);
        assert!((mixed.1 - pure.1).abs() < 1e-12);
    }

    #[test]
    fn branch_symmetries_at_the_two_worked_points() {
        let f = f36();
        let gamma = gamma_for(false, 0.01);
        assert_eq!(gamma.elements, SymmetryLabel::from_elements(d2_elements()).elements);

        // (1, 2): symmetry preserved for nu != 0
        let dc = double_coeffs_neumann(1, 2, &f, 1.0).unwrap();
        let fams = double_branches(&DoubleNormalForm::from(&dc)).unwrap();
        let (m1, m2) = crate::spectrum::neumann_kernel(1, 2).unwrap();
        let modes = [sample_mode(64, &m1), sample_mode(64, &m2)];
        let pure = classify_branch_symmetry(&fams[0], &modes, 0.8, 0.05, &gamma, 1e-8).unwrap();
        assert!(pure.consistent);
        assert_eq!(pure.computed.order(), 4);
        assert!(pure.computed.name.starts_with('<'), "twisted mirror group: {}", pure.computed.name);
        let mixed_plus = classify_branch_symmetry(&fams[2], &modes, 0.8, 0.05, &gamma, 1e-8).unwrap();
        assert!(mixed_plus.consistent);
        assert_eq!(mixed_plus.computed.name, "diag");
        let mixed_minus = classify_branch_symmetry(&fams[3], &modes, 0.8, 0.05, &gamma, 1e-8).unwrap();
        assert_eq!(mixed_minus.computed.name, "antidiag");

        // (0, 1): mixed modes lose everything inside the problem group
        let dc = double_coeffs_neumann(0, 1, &f, 1.0).unwrap();
        let fams = double_branches(&DoubleNormalForm::from(&dc)).unwrap();
        let (m1, m2) = crate::spectrum::neumann_kernel(0, 1).unwrap();
        let modes = [sample_mode(64, &m1), sample_mode(64, &m2)];
        let mixed = classify_branch_symmetry(&fams[2], &modes, 1.5, 0.05, &gamma, 1e-8).unwrap();
        assert!(mixed.consistent);
        assert_eq!(mixed.within_gamma.name, "trivial");
    }

    #[test]
    fn diagram_assembly_counts() {
        let f = f36();
        let dc = double_coeffs_neumann(0, 1, &f, 1.0).unwrap();
        let diagram = assemble_double_diagram(1.0, &DoubleNormalForm::from(&dc)).unwrap();
        assert_eq!(diagram.branches.len(), 4);
        assert_eq!(diagram.mixed_symmetry_preserved, Some(false));
        assert_eq!(diagram.secondary_loci.len(), 2);

        let dc = double_coeffs_neumann(1, 2, &f, 1.0).unwrap();
        let diagram = assemble_double_diagram(5.0, &DoubleNormalForm::from(&dc)).unwrap();
        assert_eq!(diagram.mixed_symmetry_preserved, Some(true));
        assert!(diagram.secondary_loci.is_empty());
    }
}
