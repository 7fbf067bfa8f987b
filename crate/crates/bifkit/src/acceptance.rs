//! The verification suite: ten numbered criteria covering the wavenumber
//! curves, the discrete operator, the reduced coefficients, branch
//! predictions, and property checks. Each criterion reports its
//! sub-checks individually; the `verify` subcommand and the acceptance
//! test target both run through this module.

use crate::continuation::{continue_branch, ContinuationOptions, ContinuationState};
use crate::grid::assemble;
use crate::homotopy::HomotopySpec;
use crate::nonlinearity::Nonlinearity;
use crate::quad;
use crate::reduction::{
    double_coeffs_neumann, double_coeffs_numeric, quadratic_coeff, simple_coeffs,
};
use crate::scenario::{
    classify_branch_symmetry, double_branches, pitchfork_branches, secondary_loci,
    validate_against_continuation, DoubleNormalForm,
};
use crate::spectrum::{neumann_kernel, EigenMode};
use crate::symmetry::{check_equivariance, d2_elements, gamma_for, Dihedral, GroupElement};
use crate::wavenumber::{characteristic_residual, solve_k, trace_curve, Parity};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

const PI2: f64 = PI * PI;

/// One sub-check of a criterion.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub label: String,
    pub passed: bool,
    pub detail: String,
    /// Informational lines do not gate the criterion; they carry
    /// adjudication context next to a failing reference check.
    pub informational: bool,
}

impl CheckLine {
    fn gate(label: impl Into<String>, passed: bool, detail: String) -> Self {
        Self { label: label.into(), passed, detail, informational: false }
    }

    fn info(label: impl Into<String>, passed: bool, detail: String) -> Self {
        Self { label: label.into(), passed, detail, informational: true }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub checks: Vec<CheckLine>,
    pub runtime: Duration,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| !c.informational).all(|c| c.passed)
    }

    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:02} [{}] {} ({:.2?})",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.runtime
        )
    }
}

/// Suite-wide options. A grid override rescales the published resolutions
/// (halved for the coarse member of convergence pairs).
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptanceOptions {
    pub grid_override: Option<usize>,
}

impl AcceptanceOptions {
    fn fine(&self, default: usize) -> usize {
        self.grid_override.unwrap_or(default)
    }
}

pub const CRITERION_COUNT: usize = 10;

pub fn run_all(opts: &AcceptanceOptions) -> Vec<CriterionResult> {
    (1..=CRITERION_COUNT).map(|id| run_criterion(id, opts)).collect()
}

pub fn run_criterion(id: usize, opts: &AcceptanceOptions) -> CriterionResult {
    let start = Instant::now();
    let (name, checks) = match id {
        1 => ("wavenumber curves", criterion_1()),
        2 => ("discrete spectrum convergence", criterion_2(opts)),
        3 => ("operator structure", criterion_3(opts)),
        4 => ("solution-operator derivative", criterion_4(opts)),
        5 => ("double-point constants (0,1)", criterion_5(opts)),
        6 => ("double-point constants (1,2)", criterion_6(opts)),
        7 => ("pitchfork amplitude validation", criterion_7(opts)),
        8 => ("secondary bifurcation locus", criterion_8(opts)),
        9 => ("branch symmetry classification", criterion_9()),
        10 => ("property suites", criterion_10(opts)),
        _ => panic!("criterion id out of range"),
    };
    let runtime = start.elapsed();
    CriterionResult { id, name: name.into(), checks, runtime }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn runtime_check(checks: &mut Vec<CheckLine>, start: Instant, limit: Duration) {
    let elapsed = start.elapsed();
    checks.push(CheckLine::gate(
        format!("runtime < {:.0?}", limit),
        elapsed < limit,
        format!("elapsed {elapsed:.2?}"),
    ));
}

// --- criterion 1 -------------------------------------------------------

fn criterion_1() -> Vec<CheckLine> {
    let start = Instant::now();
    let spec = HomotopySpec::linear();
    let mut checks = Vec::new();
    for m in 0u32..=2 {
        let label = format!("curve m = {m}");
        match trace_curve(m, Parity::of_mode(m), &spec, 101) {
            Ok(curve) => {
                let monotone = curve.samples.windows(2).all(|w| w[1].1 > w[0].1);
                let endpoints = curve.samples[0] == (0.0, m as f64)
                    && *curve.samples.last().unwrap() == (1.0, (m + 1) as f64);
                let max_resid = curve
                    .samples
                    .iter()
                    .map(|&(mu, k)| characteristic_residual(k, mu, &spec).abs())
                    .fold(0.0f64, f64::max);
                let no_integers = curve.samples[1..100]
                    .iter()
                    .all(|&(_, k)| (k - k.round()).abs() > 1e-8);
                checks.push(CheckLine::gate(
                    label,
                    monotone && endpoints && max_resid < 1e-10 && no_integers,
                    format!(
                        "monotone = {monotone}, exact endpoints = {endpoints}, max residual = {max_resid:.2e}, interior integers avoided = {no_integers}"
                    ),
                ));
            }
            Err(e) => checks.push(CheckLine::gate(label, false, format!("trace failed: {e}"))),
        }
    }
    runtime_check(&mut checks, start, Duration::from_secs(1));
    checks
}

// --- criterion 2 -------------------------------------------------------

fn criterion_2(opts: &AcceptanceOptions) -> Vec<CheckLine> {
    let start = Instant::now();
    let spec = HomotopySpec::linear();
    let mu = 0.5;
    let mut checks = Vec::new();

    // analytic references n^2 + k(mu)^2 for the five smallest
    let k0 = solve_k(mu, 0, Parity::Even, &spec, 1e-12).unwrap().k;
    let k1 = solve_k(mu, 1, Parity::Odd, &spec, 1e-12).unwrap().k;
    let mut exact = vec![k0 * k0, 1.0 + k0 * k0, k1 * k1, 1.0 + k1 * k1, 4.0 + k0 * k0];
    exact.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let n_fine = opts.fine(128);
    let n_coarse = n_fine / 2;
    if n_coarse < 8 {
        checks.push(CheckLine::gate(
            "convergence pair resolvable",
            false,
            format!("resolution too low: the coarse member of the pair would be {n_coarse} < 8"),
        ));
        return checks;
    }
    let run = |n: usize| -> crate::error::Result<Vec<f64>> {
        let op = assemble(n, mu, &spec)?;
        Ok(op.eigs(5)?.into_iter().map(|p| p.0).collect())
    };
    match (run(n_coarse), run(n_fine)) {
        (Ok(coarse), Ok(fine)) => {
            let worst_rel = fine
                .iter()
                .zip(&exact)
                .map(|(got, want)| rel_gap(*got, *want))
                .fold(0.0f64, f64::max);
            checks.push(CheckLine::gate(
                format!("five smallest eigenvalues at N = {n_fine} within 1%"),
                worst_rel < 0.01,
                format!("worst relative error {worst_rel:.3e} (exact {exact:?})"),
            ));
            let err = |vals: &[f64]| -> f64 {
                vals.iter()
                    .zip(&exact)
                    .map(|(g, w)| (g - w) * (g - w))
                    .sum::<f64>()
                    .sqrt()
            };
            let order = (err(&coarse) / err(&fine)).log2();
            checks.push(CheckLine::gate(
                format!("convergence order between N = {n_coarse} and N = {n_fine} in 2.0 +/- 0.3"),
                (order - 2.0).abs() <= 0.3,
                format!("observed order {order:.3}"),
            ));
        }
        (a, b) => {
            let msg = format!("{:?} / {:?}", a.err().map(|e| e.to_string()), b.err().map(|e| e.to_string()));
            checks.push(CheckLine::gate("eigenvalue computation", false, msg));
        }
    }
    runtime_check(&mut checks, start, Duration::from_secs(30));
    checks
}

// --- criterion 3 -------------------------------------------------------

fn criterion_3(opts: &AcceptanceOptions) -> Vec<CheckLine> {
    let n = opts.fine(64);
    let spec = HomotopySpec::linear();
    let f = Nonlinearity::lambda_u2_u3();
    let mut checks = Vec::new();

    // self-adjointness over 20 random pairs
    let op = assemble(n, 0.37, &spec).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0));
        let b = Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0));
        let lhs = op.inner(&op.apply_t(&a), &b);
        let rhs = op.inner(&a, &op.apply_t(&b));
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
    }
    checks.push(CheckLine::gate(
        "solution operator self-adjoint to 1e-10 (20 random pairs)",
        worst <= 1e-10,
        format!("worst relative asymmetry {worst:.3e}"),
    ));

    let lambda = 2.3;
    let g_residual = |mu: f64, gamma: GroupElement| -> f64 {
        let op = assemble(n, mu, &spec).unwrap();
        check_equivariance(|u| op.residual_g(&u.mapv(|v| 0.5 * v), lambda, &f), gamma, n, 3)
    };

    let d2_worst = d2_elements()
        .into_iter()
        .map(|g| g_residual(0.4, g))
        .fold(0.0f64, f64::max);
    checks.push(CheckLine::gate(
        "D2-equivariance of discrete G below 1e-12",
        d2_worst < 1e-12,
        format!("worst residual {d2_worst:.3e} at mu = 0.4"),
    ));

    let d4_residual = |mu: f64| -> f64 {
        Dihedral::all()
            .into_iter()
            .map(|d| g_residual(mu, GroupElement::new(1, d)))
            .fold(0.0f64, f64::max)
    };
    let at0 = d4_residual(0.0);
    checks.push(CheckLine::gate(
        "full dihedral equivariance at mu = 0",
        at0 < 1e-12,
        format!("worst residual {at0:.3e}"),
    ));
    let at_half = d4_residual(0.5);
    checks.push(CheckLine::gate(
        "full dihedral equivariance broken in the interior",
        at_half > 1e-6,
        format!("worst residual {at_half:.3e} at mu = 0.5"),
    ));
    let at1 = d4_residual(1.0);
    checks.push(CheckLine::gate(
        "full dihedral equivariance at mu = 1",
        at1 < 1e-12,
        format!(
            "worst residual {at1:.3e}; the quarter turn exchanges the Dirichlet and Neumann side pairs, so the mixed-end operator does not commute with it"
        ),
    ));

    // sign action with an odd nonlinearity at the Neumann end
    let odd = Nonlinearity::lambda_u3();
    let op0 = assemble(n, 0.0, &spec).unwrap();
    let minus = GroupElement::new(-1, Dihedral::IDENTITY);
    let odd_resid =
        check_equivariance(|u| op0.residual_g(&u.mapv(|v| 0.5 * v), lambda, &odd), minus, n, 3);
    checks.push(CheckLine::gate(
        "sign equivariance with odd nonlinearity at mu = 0",
        odd_resid < 1e-12,
        format!("residual {odd_resid:.3e}"),
    ));

    checks
}

// --- criterion 4 -------------------------------------------------------

fn criterion_4(opts: &AcceptanceOptions) -> Vec<CheckLine> {
    let n = opts.fine(96);
    let spec = HomotopySpec::linear();
    let mu = 0.4;
    let op = assemble(n, mu, &spec).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut checks = Vec::new();

    for trial in 0..5 {
        // random smooth field: a few low cosine modes with random weights
        let w: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = op.sample(|x, y| {
            w[0] + w[1] * x.cos() + w[2] * y.cos()
                + w[3] * x.cos() * y.cos()
                + w[4] * (2.0 * x).cos() * (0.5 * y).sin()
                + w[5] * (1.5 * y).cos()
        });
        let tp = op.apply_t_prime(&g).unwrap();
        let mut errs = Vec::new();
        for delta in [1e-2, 1e-3] {
            let plus = assemble(n, mu + delta, &spec).unwrap().apply_t(&g);
            let minus = assemble(n, mu - delta, &spec).unwrap().apply_t(&g);
            let fd = (&plus - &minus) / (2.0 * delta);
            errs.push(op.norm(&(&fd - &tp)));
        }
        let order = (errs[0] / errs[1]).log10();
        checks.push(CheckLine::gate(
            format!("derivative consistency order >= 1.8 (field {trial})"),
            order >= 1.8,
            format!("errors {:.3e} -> {:.3e}, order {order:.2}", errs[0], errs[1]),
        ));
    }
    checks
}

// --- criterion 5 -------------------------------------------------------

fn criterion_5(opts: &AcceptanceOptions) -> Vec<CheckLine> {
    let start = Instant::now();
    let spec = HomotopySpec::linear();
    let f = Nonlinearity::lambda_u2_u3();
    let mut checks = Vec::new();

    let h_tilde0 = spec.ratio_and_derivative(0.0).unwrap().1;
    let dc = double_coeffs_neumann(0, 1, &f, h_tilde0).unwrap();
    let refs = [
        ("c1 = 19/(6 pi^2)", dc.c1, 19.0 / (6.0 * PI2)),
        ("c2 = 3/pi^2", dc.c2, 3.0 / PI2),
        ("d1 = 4/pi", dc.d1, 4.0 / PI),
    ];
    for (label, got, want) in refs {
        checks.push(CheckLine::gate(
            format!("closed form {label} to 1e-12"),
            rel_gap(got, want) <= 1e-12,
            format!("got {got:.15}"),
        ));
    }
    checks.push(CheckLine::gate(
        "closed form d2 = 0 to 1e-12",
        dc.d2.abs() <= 1e-12,
        format!("got {:.15}", dc.d2),
    ));

    let n_fine = opts.fine(128);
    let n_coarse = n_fine / 2;
    if n_coarse < 8 {
        checks.push(CheckLine::gate(
            "convergence pair resolvable",
            false,
            format!("resolution too low: the coarse member of the pair would be {n_coarse} < 8"),
        ));
        return checks;
    }
    let run = |n: usize| {
        let op = assemble(n, 0.0, &spec).unwrap();
        double_coeffs_numeric(0, 1, &f, &op).unwrap()
    };
    let coarse = run(n_coarse);
    let fine = run(n_fine);
    let richardson = |a: f64, b: f64| (4.0 * b - a) / 3.0;

    let rows = [
        ("c1", fine.c1, coarse.c1, dc.c1),
        ("c2", fine.c2, coarse.c2, dc.c2),
        ("d1", fine.d1, coarse.d1, dc.d1),
        ("d2", fine.d2, coarse.d2, dc.d2),
    ];
    for (label, fine_v, coarse_v, closed) in rows {
        let gap = if closed == 0.0 { fine_v.abs() } else { rel_gap(fine_v, closed) };
        let rich = richardson(coarse_v, fine_v);
        let rich_gap = if closed == 0.0 { rich.abs() } else { rel_gap(rich, closed) };
        checks.push(CheckLine::gate(
            format!("numeric {label} agrees with closed form to 1e-4 at N = {n_fine}"),
            gap <= 1e-4,
            format!("numeric {fine_v:.10}, closed {closed:.10}, gap {gap:.3e}"),
        ));
        checks.push(CheckLine::gate(
            format!("numeric {label} agrees to 1e-6 after Richardson"),
            rich_gap <= 1e-6,
            format!("extrapolated {rich:.10}, gap {rich_gap:.3e}"),
        ));
    }
    // adjudication context for the failing rows
    checks.push(CheckLine::info(
        "numeric d2 matches the pairing-identity value 2/pi",
        rel_gap(fine.d2, 2.0 / PI) <= 1e-6,
        format!(
            "numeric {:.10} vs 2/pi = {:.10}; the tabulated closed form is 0",
            fine.d2,
            2.0 / PI
        ),
    ));
    checks.push(CheckLine::info(
        "numeric c2 matches the quadratic-interaction value 1/pi^2",
        rel_gap(richardson(coarse.c2, fine.c2), 1.0 / PI2) <= 1e-6,
        format!(
            "extrapolated {:.10} vs 1/pi^2 = {:.10}; the tabulated closed form is 3/pi^2",
            richardson(coarse.c2, fine.c2),
            1.0 / PI2
        ),
    ));
    runtime_check(&mut checks, start, Duration::from_secs(60));
    checks
}

// --- criterion 6 -------------------------------------------------------

fn criterion_6(opts: &AcceptanceOptions) -> Vec<CheckLine> {
    let spec = HomotopySpec::linear();
    let f = Nonlinearity::lambda_u2_u3();
    let mut checks = Vec::new();

    let dc = double_coeffs_neumann(1, 2, &f, 1.0).unwrap();
    checks.push(CheckLine::gate(
        "closed form c1 = 5695/(132 pi^2) to 1e-12",
        rel_gap(dc.c1, 5695.0 / (132.0 * PI2)) <= 1e-12,
        format!("got {:.15}", dc.c1),
    ));

    let formula = dc.c2;
    let tabulated = dc.c2_tabulated.unwrap();
    let n_fine = opts.fine(128);
    let op = assemble(n_fine, 0.0, &spec).unwrap();
    let numeric = double_coeffs_numeric(1, 2, &f, &op).unwrap().c2;

    let to_formula = rel_gap(numeric, formula);
    let to_tabulated = rel_gap(numeric, tabulated);
    let verdict = match (to_formula <= 0.05, to_tabulated <= 0.05) {
        (true, false) => "formula",
        (false, true) => "tabulated",
        _ => "unresolved",
    };
    checks.push(CheckLine::gate(
        "numeric route within 5% of exactly one c2 candidate",
        verdict != "unresolved",
        format!(
            "candidates: formula {formula:.10}, tabulated {tabulated:.10}; numeric {numeric:.10} (gaps {to_formula:.2e} / {to_tabulated:.2e}); verdict: {verdict}"
        ),
    ));
    checks.push(CheckLine::info(
        "verdict is the formula value",
        verdict == "formula",
        "the tabulated constant is 39 times the formula value; numeric sides with the formula".into(),
    ));
    checks
}

// --- criterion 7 -------------------------------------------------------

fn criterion_7(opts: &AcceptanceOptions) -> Vec<CheckLine> {
    let start = Instant::now();
    let n = opts.fine(96);
    let spec = HomotopySpec::linear();
    let f = Nonlinearity::lambda_u2_u3();
    let mu0 = 0.5;
    let mut checks = Vec::new();

    let w = solve_k(mu0, 2, Parity::Even, &spec, 1e-12).unwrap();
    let mode = EigenMode::new(1, &w, &spec).unwrap();
    let op = assemble(n, mu0, &spec).unwrap();
    let sc = simple_coeffs(&mode, 1, 2, &f, &op).unwrap();
    checks.push(CheckLine::gate(
        "simple point is a pitchfork (q below threshold, c finite)",
        !sc.transcritical && sc.c.is_finite() && sc.c != 0.0,
        format!("a = {:.6}, c = {:.6}, q = {:.2e}", sc.a, sc.c, sc.q),
    ));

    let families = match pitchfork_branches(&sc) {
        Ok(f) => f,
        Err(e) => {
            checks.push(CheckLine::gate("branch construction", false, e.to_string()));
            return checks;
        }
    };
    // kernel mode on the grid, sign-aligned with the closed form
    let near = op.eigs_near(sc.lambda0, 1).unwrap();
    let mut phi_h = near[0].1.clone() / op.norm(&near[0].1);
    let sampled = op.sample(|x, y| mode.value(x, y));
    if op.inner(&phi_h, &sampled) < 0.0 {
        phi_h.mapv_inplace(|v| -v);
    }

    let side = sc.c.signum();
    let sigmas: Vec<f64> = [0.1, 0.05, 0.02, 0.01].iter().map(|s| side * s).collect();
    let reports = validate_against_continuation(
        &op,
        &f,
        sc.lambda0_h,
        &[phi_h],
        &families,
        &sigmas,
        0.0,
    );
    for report in &reports {
        let complete = report.failures.is_empty() && report.samples.len() == sigmas.len();
        let max_err = report.max_rel_err();
        checks.push(CheckLine::gate(
            format!("{}: amplitudes within 10% on sigma in (0, 0.1]", report.label),
            complete && max_err <= 0.1,
            format!(
                "errors {:?}{}",
                report
                    .samples
                    .iter()
                    .map(|(s, e)| format!("sigma {s:+.2}: {e:.4}"))
                    .collect::<Vec<_>>(),
                if report.failures.is_empty() {
                    String::new()
                } else {
                    format!("; failures: {:?}", report.failures)
                }
            ),
        ));
        checks.push(CheckLine::gate(
            format!("{}: error at sigma = 0.01 below error at sigma = 0.1", report.label),
            report.error_shrinks_with_sigma(),
            "truncation error decays toward the bifurcation point".into(),
        ));
    }
    runtime_check(&mut checks, start, Duration::from_secs(300));
    checks
}

// --- criterion 8 -------------------------------------------------------

fn criterion_8(opts: &AcceptanceOptions) -> Vec<CheckLine> {
    let n = opts.fine(96);
    let spec = HomotopySpec::linear();
    let f = Nonlinearity::lambda_u2_u3();
    let nu = 0.01;
    let mut checks = Vec::new();

    // closed-form locus from the tabulated coefficients
    let h_tilde0 = spec.ratio_and_derivative(0.0).unwrap().1;
    let dc = double_coeffs_neumann(0, 1, &f, h_tilde0).unwrap();
    let loci = secondary_loci(&DoubleNormalForm::from(&dc)).unwrap();
    let phi2_locus = loci.iter().find(|l| l.pure_label == "pure-phi2").unwrap();
    let reference_ratio = 76.0 / PI;
    checks.push(CheckLine::gate(
        "closed-form locus sigma/nu = 76/pi to 1e-12",
        rel_gap(phi2_locus.sigma_over_nu, reference_ratio) <= 1e-12,
        format!("emitted {:.15}", phi2_locus.sigma_over_nu),
    ));

    // grid-reduced coefficients and their locus
    let op0 = assemble(n, 0.0, &spec).unwrap();
    let nd = double_coeffs_numeric(0, 1, &f, &op0).unwrap();
    let numeric_ratio = (nd.c1 * nd.d1 - nd.c2 * nd.d2) / (nd.c1 - nd.c2);

    // trace the pure-phi2 branch on the grid at mu = nu
    let op = assemble(n, nu, &spec).unwrap();
    let phi2 = {
        let s = op.sample(|x, _| x.cos());
        &s / op.norm(&s)
    };
    let sigma_seed = 0.008;
    let z2 = ((sigma_seed - nd.d2 * nu) / nd.c1).sqrt();
    let seed = ContinuationState::at(phi2.mapv(|v| z2 * v), nd.lambda0_h + sigma_seed, nu);
    let window_top = nd.lambda0_h + 1.1 * reference_ratio * nu + 0.02;
    let copts = ContinuationOptions {
        initial_step: 0.004,
        max_step: 0.01,
        lambda_window: (0.0, window_top),
        ..Default::default()
    };
    match continue_branch(&op, &f, &seed, 400, &copts) {
        Ok(trace) => {
            if let Some(sp) = trace.singular_points.first() {
                let sigma_star = sp.lambda_estimate - nd.lambda0_h;
                checks.push(CheckLine::gate(
                    "detector sign change within 10% of sigma = 76 nu / pi",
                    rel_gap(sigma_star, reference_ratio * nu) <= 0.10,
                    format!(
                        "detected sigma = {sigma_star:.6}; reference locus {:.6}",
                        reference_ratio * nu
                    ),
                ));
                checks.push(CheckLine::info(
                    "detector sign change within 10% of the grid-coefficient locus",
                    rel_gap(sigma_star, numeric_ratio * nu) <= 0.10,
                    format!(
                        "detected sigma = {sigma_star:.6}; grid-coefficient locus {:.6} (ratio {:.6})",
                        numeric_ratio * nu,
                        numeric_ratio
                    ),
                ));
            } else {
                checks.push(CheckLine::gate(
                    "detector sign change on the pure-phi2 branch",
                    false,
                    format!(
                        "no sign change over sigma in [{sigma_seed}, {:.4}] ({} states)",
                        window_top - nd.lambda0_h,
                        trace.points.len()
                    ),
                ));
            }
        }
        Err(e) => checks.push(CheckLine::gate(
            "continuation of the pure-phi2 branch",
            false,
            e.to_string(),
        )),
    }
    checks
}

// --- criterion 9 -------------------------------------------------------

fn criterion_9() -> Vec<CheckLine> {
    let f = Nonlinearity::lambda_u2_u3();
    let grid_n = 64;
    let mut checks = Vec::new();
    let sample = |mode: &EigenMode| -> Array2<f64> {
        let h = PI / grid_n as f64;
        Array2::from_shape_fn((grid_n, grid_n), |(i, j)| {
            mode.value((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
        })
    };
    let gamma = gamma_for(false, 0.05);

    // (1, 2): pure modes keep their sign-twisted mirror groups, mixed
    // modes carry the diagonal isotropies
    let dc = double_coeffs_neumann(1, 2, &f, 1.0).unwrap();
    let fams = double_branches(&DoubleNormalForm::from(&dc)).unwrap();
    let (m1, m2) = neumann_kernel(1, 2).unwrap();
    let modes = [sample(&m1), sample(&m2)];
    let pure = classify_branch_symmetry(&fams[0], &modes, 0.8, 0.05, &gamma, 1e-8).unwrap();
    let z2d2 = crate::symmetry::SymmetryLabel::from_elements(
        crate::symmetry::d2_elements()
            .into_iter()
            .flat_map(|g| [g, GroupElement::new(-g.sign, g.delta)])
            .collect(),
    );
    let inside = pure.computed.elements.iter().all(|e| z2d2.contains(*e));
    checks.push(CheckLine::gate(
        "(1,2) pure mode keeps its 4-element subgroup of the sign-extended D2",
        pure.consistent && pure.computed.order() == 4 && inside,
        format!("computed {}", pure.computed.name),
    ));
    let mixed_p = classify_branch_symmetry(&fams[2], &modes, 0.8, 0.05, &gamma, 1e-8).unwrap();
    let mixed_m = classify_branch_symmetry(&fams[3], &modes, 0.8, 0.05, &gamma, 1e-8).unwrap();
    checks.push(CheckLine::gate(
        "(1,2) mixed modes carry the diagonal isotropies",
        mixed_p.consistent
            && mixed_m.consistent
            && mixed_p.computed.name == "diag"
            && mixed_m.computed.name == "antidiag",
        format!("computed {} and {}", mixed_p.computed.name, mixed_m.computed.name),
    ));

    // (0, 1): mixed modes with nu != 0 are trivial inside the problem group
    let dc = double_coeffs_neumann(0, 1, &f, 1.0).unwrap();
    let fams = double_branches(&DoubleNormalForm::from(&dc)).unwrap();
    let (m1, m2) = neumann_kernel(0, 1).unwrap();
    let modes = [sample(&m1), sample(&m2)];
    let mixed = classify_branch_symmetry(&fams[2], &modes, 1.5, 0.05, &gamma, 1e-8).unwrap();
    checks.push(CheckLine::gate(
        "(0,1) mixed mode with nu != 0 is trivial within the problem group",
        mixed.consistent && mixed.within_gamma.name == "trivial",
        format!(
            "full-group isotropy {}, within the problem group {}",
            mixed.computed.name, mixed.within_gamma.name
        ),
    ));
    // and the pure phi2 mode keeps a nontrivial mirror pair
    let pure2 = classify_branch_symmetry(&fams[1], &modes, 0.8, 0.05, &gamma, 1e-8).unwrap();
    checks.push(CheckLine::gate(
        "(0,1) pure mode keeps a nontrivial subgroup",
        pure2.consistent && pure2.computed.order() >= 4,
        format!("computed {}", pure2.computed.name),
    ));
    checks
}

// --- criterion 10 ------------------------------------------------------

fn criterion_10(opts: &AcceptanceOptions) -> Vec<CheckLine> {
    let spec = HomotopySpec::linear();
    let f = Nonlinearity::lambda_u2_u3();
    let mut checks = Vec::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);

    // reduced-system residuals of emitted branches
    let mut worst_resid: f64 = 0.0;
    for (n, k) in [(0u32, 1u32), (1, 2)] {
        let dc = double_coeffs_neumann(n, k, &f, 1.0).unwrap();
        let nf = DoubleNormalForm::from(&dc);
        let fams = double_branches(&nf).unwrap();
        for fam in &fams {
            let mut count = 0;
            while count < 100 {
                let sigma = rng.gen_range(-1.0..3.0);
                let nu = rng.gen_range(-0.2..0.2);
                if let Some((z1, z2)) = fam.amplitudes(sigma, nu) {
                    let r1 = (-sigma + nf.d1 * nu + nf.c1 * z1 * z1 + nf.c2 * z2 * z2) * z1;
                    let r2 = (-sigma + nf.d2 * nu + nf.c2 * z1 * z1 + nf.c1 * z2 * z2) * z2;
                    worst_resid = worst_resid.max(r1.abs()).max(r2.abs());
                    count += 1;
                }
            }
        }
    }
    checks.push(CheckLine::gate(
        "reduced-system residuals of emitted branches below 1e-12",
        worst_resid < 1e-12,
        format!("worst residual {worst_resid:.3e} over 100 points per family"),
    ));

    // quartic and orthogonality quadrature identities
    let mut quartic_ok = true;
    let mut detail = Vec::new();
    for (n, k, expect) in [(1u32, 2u32, 9.0 / (4.0 * PI2)), (0, 1, 3.0 / (2.0 * PI2))] {
        let dc = double_coeffs_neumann(n, k, &f, 1.0).unwrap();
        for q in dc.quartic_self_check {
            quartic_ok &= (q - expect).abs() <= 1e-12;
        }
        quartic_ok &= (dc.mixed_square_self_check - 1.0 / PI2).abs() <= 1e-12;
        detail.push(format!("({n},{k}): {:?} vs {expect:.8}", dc.quartic_self_check));
    }
    // <phi_i, phi_j phi_l> = 0 for all index triples
    let (p1, p2) = neumann_kernel(1, 2).unwrap();
    let modes = [p1, p2];
    let mut worst_triple: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for l in 0..2 {
                let v = quad::integrate_square(
                    |x, y| {
                        modes[i].value(x, y) * modes[j].value(x, y) * modes[l].value(x, y)
                    },
                    quad::DEFAULT_NODES,
                );
                worst_triple = worst_triple.max(v.abs());
            }
        }
    }
    checks.push(CheckLine::gate(
        "quartic, mixed-square, and triple-product identities to 1e-12",
        quartic_ok && worst_triple <= 1e-12,
        format!("{}; worst triple product {worst_triple:.3e}", detail.join("; ")),
    ));

    // Jacobian versus finite differences
    let n_grid = opts.fine(48).min(64);
    let op = assemble(n_grid, 0.4, &spec).unwrap();
    let u = Array2::from_shape_fn((n_grid, n_grid), |_| 0.1 * rng.gen_range(-1.0..1.0f64));
    let lambda = 3.0;
    let mut worst_jac: f64 = 0.0;
    for _ in 0..10 {
        let dir = Array2::from_shape_fn((n_grid, n_grid), |_| rng.gen_range(-1.0..1.0f64));
        let dir = &dir / op.norm(&dir);
        let eps = 1e-5;
        let fd = (&op.residual_g(&(&u + &dir.mapv(|v| eps * v)), lambda, &f)
            - &op.residual_g(&(&u - &dir.mapv(|v| eps * v)), lambda, &f))
            / (2.0 * eps);
        let jv = op.jacobian_vec(&u, lambda, &f, &dir);
        worst_jac = worst_jac.max(op.norm(&(&fd - &jv)) / op.norm(&jv));
    }
    checks.push(CheckLine::gate(
        "matrix-free Jacobian matches finite differences to 1e-6",
        worst_jac <= 1e-6,
        format!("worst relative gap {worst_jac:.3e} over 10 directions"),
    ));

    // quadratic coefficient by horizontal mode number
    let mut worst_q: f64 = 0.0;
    for (n, m, parity) in [(1u32, 0u32, Parity::Even), (1, 2, Parity::Even), (2, 1, Parity::Odd)] {
        let w = solve_k(0.5, m, parity, &spec, 1e-12).unwrap();
        let mode = EigenMode::new(n, &w, &spec).unwrap();
        worst_q = worst_q.max(quadratic_coeff(&mode, &f).abs());
    }
    checks.push(CheckLine::gate(
        "quadratic coefficient below 1e-10 for modes with n >= 1",
        worst_q < 1e-10,
        format!("worst |q| = {worst_q:.3e}"),
    ));
    let w0 = solve_k(0.5, 0, Parity::Even, &spec, 1e-12).unwrap();
    let mode0 = EigenMode::new(0, &w0, &spec).unwrap();
    let q0 = quadratic_coeff(&mode0, &f);
    checks.push(CheckLine::info(
        "n = 0 quadratic coefficient reported",
        true,
        format!("q(n = 0, mu = 0.5) = {q0:.8}: quadratically nondegenerate"),
    ));
    checks
}

// --- helpers for callers ----------------------------------------------

/// Renders the per-criterion report as plain text, one block per
/// criterion with one line per sub-check.
pub fn render_report(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&r.summary_line());
        out.push('\n');
        for c in &r.checks {
            let tag = if c.informational {
                if c.passed { "info" } else { "INFO" }
            } else if c.passed {
                "ok  "
            } else {
                "FAIL"
            };
            out.push_str(&format!("    [{tag}] {}: {}\n", c.label, c.detail));
        }
    }
    let total = results.len();
    let passed = results.iter().filter(|r| r.passed()).count();
    out.push_str(&format!("{passed}/{total} criteria passed\n"));
    out
}
