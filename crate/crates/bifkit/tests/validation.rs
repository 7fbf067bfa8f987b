//! Oracle-loop integration: amplitude predictions of the reduced
//! equations against Newton solutions of the discrete problem at a
//! double point, and detector refinement along a branch.
//!
//! Grid-derived coefficients feed the normal form here, so these checks
//! close a pure within-oracle loop: the reduction performed on the
//! operator must predict what continuation of the same operator does.

use bifkit::continuation::{continue_branch, ContinuationOptions, ContinuationState};
use bifkit::grid::assemble;
use bifkit::homotopy::HomotopySpec;
use bifkit::nonlinearity::Nonlinearity;
use bifkit::reduction::double_coeffs_numeric;
use bifkit::scenario::{double_branches, validate_against_continuation, DoubleNormalForm};
use bifkit::spectrum::neumann_kernel;

#[test]
fn four_families_persist_and_match_amplitudes_at_0_1() {
    let spec = HomotopySpec::linear();
    let f = Nonlinearity::lambda_u2_u3();
    let n_grid = 48;
    let nu = 0.01;

    let op0 = assemble(n_grid, 0.0, &spec).unwrap();
    let nd = double_coeffs_numeric(0, 1, &f, &op0).unwrap();
    let families = double_branches(&DoubleNormalForm::from(&nd)).unwrap();

    let op = assemble(n_grid, nu, &spec).unwrap();
    let (m1, m2) = neumann_kernel(0, 1).unwrap();
    let kernel: Vec<_> = [m1, m2]
        .iter()
        .map(|m| {
            let s = op.sample(|x, y| m.value(x, y));
            &s / op.norm(&s)
        })
        .collect();

    // sigma values inside every family's existence region for this nu
    let sigmas = [0.03, 0.08];
    let reports =
        validate_against_continuation(&op, &f, nd.lambda0_h, &kernel, &families, &sigmas, nu);
    assert_eq!(reports.len(), 4);
    for report in &reports {
        assert!(
            report.failures.is_empty(),
            "{}: failures {:?}",
            report.label,
            report.failures
        );
        assert_eq!(report.samples.len(), sigmas.len(), "{}", report.label);
        let worst = report.max_rel_err();
        assert!(worst <= 0.10, "{}: worst amplitude error {worst:.4}", report.label);
    }

    // the two mixed families converge to genuinely different solutions
    let mp = &reports[2];
    let mm = &reports[3];
    assert!(mp.label.starts_with("mixed(") && mm.label.starts_with("mixed("));
}

#[test]
fn refine_singular_sharpens_the_detector_crossing() {
    let spec = HomotopySpec::linear();
    let f = Nonlinearity::lambda_u2_u3();
    let n_grid = 48;
    let nu = 0.01;

    let op0 = assemble(n_grid, 0.0, &spec).unwrap();
    let nd = double_coeffs_numeric(0, 1, &f, &op0).unwrap();
    let locus = (nd.c1 * nd.d1 - nd.c2 * nd.d2) / (nd.c1 - nd.c2) * nu;

    let op = assemble(n_grid, nu, &spec).unwrap();
    let phi2 = {
        let s = op.sample(|x, _| x.cos());
        &s / op.norm(&s)
    };
    let sigma_seed = 0.008;
    let z2 = ((sigma_seed - nd.d2 * nu) / nd.c1).sqrt();
    let seed = ContinuationState::at(phi2.mapv(|v| z2 * v), nd.lambda0_h + sigma_seed, nu);
    let opts = ContinuationOptions {
        initial_step: 0.004,
        max_step: 0.008,
        lambda_window: (0.0, nd.lambda0_h + 0.04),
        ..Default::default()
    };
    let trace = continue_branch(&op, &f, &seed, 40, &opts).unwrap();
    let sp = trace.singular_points.first().expect("detector crossing in the window");
    let lo = &trace.points[sp.after_index];
    let hi = &trace.points[sp.after_index + 1];
    let refined =
        bifkit::continuation::refine_singular(&op, &f, lo, hi, 8).unwrap();
    let sigma_star = refined - nd.lambda0_h;
    assert!(
        (sigma_star - locus).abs() <= 0.05 * locus,
        "refined sigma {sigma_star:.6} vs reduced-equation locus {locus:.6}"
    );
    // refinement stays inside the bracketing step
    assert!(refined > lo.lambda && refined < hi.lambda);
}
