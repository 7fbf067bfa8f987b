//! Command implementations behind the `bifkit` binary: file emission for
//! the spectrum, coefficient records, scenario diagrams, branch traces,
//! and the verification report.
//!
//! All data files are deterministic for a fixed configuration; wall-clock
//! information goes to a sidecar `metadata.txt` only. CSV uses `.` as the
//! decimal mark, `,` as the separator, and a header row; JSON keys keep
//! their declaration order.

use crate::acceptance::{run_all, AcceptanceOptions, CriterionResult};
use crate::config::RunConfig;
use crate::continuation::{continue_branch, ContinuationOptions, ContinuationState};
use crate::error::{Error, Result};
use crate::grid::assemble;
use crate::reduction::{double_coeffs_neumann, double_coeffs_numeric, simple_coeffs};
use crate::scenario::{
    classify_branch_symmetry, double_branches, secondary_loci, simple_branches, BranchFamily,
    DoubleNormalForm, FamilyKind,
};
use crate::spectrum::{bifurcation_curves, find_crossings, neumann_kernel, EigenMode};
use crate::symmetry::gamma_for;
use crate::wavenumber::{solve_k, Parity};
use ndarray::Array2;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Exit code classification: configuration and precondition problems are
/// validation failures (1); solver breakdowns are numerical failures (2).
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. }
        | Error::SpecViolation(_)
        | Error::Domain(_)
        | Error::Evaluation { .. }
        | Error::UnsupportedGrid(_)
        | Error::DegenerateMode(_) => 1,
        _ => 2,
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn write_metadata(dir: &Path, command: &str, cfg: &RunConfig) -> Result<()> {
    // the single place where wall-clock data may appear
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let text = format!(
        "command = {command}\nunix_time = {stamp}\nhomotopy = {}\nnonlinearity = {}\nlambda_max = {}\n",
        cfg.homotopy.family_tag(),
        cfg.nonlinearity.name(),
        cfg.lambda_max,
    );
    write_file(&dir.join("metadata.txt"), &text)
}

// --- spectrum ----------------------------------------------------------

/// Writes the wavenumber curves, the bifurcation-point curves, and their
/// crossings as CSV files. Returns the paths written.
pub fn cmd_spectrum(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let curves = bifurcation_curves(cfg.lambda_max, &cfg.homotopy, cfg.mu_samples)?;

    let mut wav = String::from("mu,k,parity,base_mode\n");
    let mut bif = String::from("mu,lambda,n,base_mode,parity\n");
    for c in &curves {
        for &(mu, k) in &c.curve.samples {
            // the wavenumber file carries each base-mode curve once
            if c.n == 0 {
                writeln!(wav, "{mu},{k},{},{}", c.parity().as_str(), c.base_mode()).unwrap();
            }
            let lambda = (c.n * c.n) as f64 + k * k;
            writeln!(bif, "{mu},{lambda},{},{},{}", c.n, c.base_mode(), c.parity().as_str())
                .unwrap();
        }
    }

    let crossings = find_crossings(&curves, &cfg.homotopy);
    let mut cross = String::from("mu,lambda,n_a,base_mode_a,n_b,base_mode_b\n");
    for x in &crossings {
        let a = &curves[x.pair.0];
        let b = &curves[x.pair.1];
        writeln!(
            cross,
            "{},{},{},{},{},{}",
            x.mu,
            x.lambda,
            a.n,
            a.base_mode(),
            b.n,
            b.base_mode()
        )
        .unwrap();
    }

    let paths = vec![
        out_dir.join("wavenumbers.csv"),
        out_dir.join("bifurcation_points.csv"),
        out_dir.join("crossings.csv"),
    ];
    write_file(&paths[0], &wav)?;
    write_file(&paths[1], &bif)?;
    write_file(&paths[2], &cross)?;
    write_metadata(out_dir, "spectrum", cfg)?;
    Ok(paths)
}

// --- coefficient records -----------------------------------------------

#[derive(Serialize)]
pub struct CoefficientRecord {
    pub n: u32,
    pub k: f64,
    pub mu0: f64,
    pub lambda0: f64,
    pub kind: String,
    pub provenance: String,
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub q: Option<f64>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub cross_checks: CrossChecks,
}

#[derive(Serialize)]
pub struct CrossChecks {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_pairing: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_discrepancy: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2_candidates: Option<C2Candidates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2_verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_grid: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcritical: Option<bool>,
}

#[derive(Serialize)]
pub struct C2Candidates {
    pub formula: f64,
    pub tabulated: Option<f64>,
    pub numeric: f64,
    pub richardson: f64,
}

#[derive(Serialize)]
pub struct NumericBlock {
    pub grid_n: usize,
    pub lambda0_h: f64,
    pub d1: f64,
    pub d2: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Coefficient record at a double point (`mu0 = 0`) or, with `mu0`
/// supplied, at a simple point of the `(n, base mode k)` curve.
pub fn cmd_coeffs(
    cfg: &RunConfig,
    out_dir: &Path,
    n: u32,
    k: u32,
    mu0: Option<f64>,
) -> Result<CoefficientRecord> {
    ensure_dir(out_dir)?;
    let record = match mu0 {
        None | Some(0.0) => double_record(cfg, n, k)?,
        Some(mu) => simple_record(cfg, n, k, mu)?,
    };
    let json = serde_json::to_string_pretty(&record).expect("serializable record");
    let path = out_dir.join(format!(
        "coeffs_n{n}_k{k}{}.json",
        mu0.map(|m| format!("_mu{m}")).unwrap_or_default()
    ));
    write_file(&path, &json)?;
    write_metadata(out_dir, "coeffs", cfg)?;
    Ok(record)
}

fn double_record(cfg: &RunConfig, n: u32, k: u32) -> Result<CoefficientRecord> {
    let h_tilde0 = cfg.homotopy.ratio_and_derivative(0.0)?.1;
    let dc = double_coeffs_neumann(n, k, &cfg.nonlinearity, h_tilde0)?;
    let n_fine = cfg.grid_n.unwrap_or(128);
    let op_fine = assemble(n_fine, 0.0, &cfg.homotopy)?;
    let fine = double_coeffs_numeric(n, k, &cfg.nonlinearity, &op_fine)?;
    let op_coarse = assemble(n_fine / 2, 0.0, &cfg.homotopy)?;
    let coarse = double_coeffs_numeric(n, k, &cfg.nonlinearity, &op_coarse)?;
    let rich_c2 = (4.0 * fine.c2 - coarse.c2) / 3.0;

    let verdict = match dc.c2_tabulated {
        Some(tab) => {
            let to_formula = (rich_c2 - dc.c2).abs() / dc.c2.abs();
            let to_tab = (rich_c2 - tab).abs() / tab.abs();
            match (to_formula <= 0.05, to_tab <= 0.05) {
                (true, false) => "formula",
                (false, true) => "tabulated",
                _ => "unresolved",
            }
        }
        None => {
            if (rich_c2 - dc.c2).abs() / dc.c2.abs() <= 0.05 {
                "formula"
            } else {
                "formula-contradicted"
            }
        }
    };

    Ok(CoefficientRecord {
        n,
        k: k as f64,
        mu0: 0.0,
        lambda0: dc.lambda0,
        kind: "double".into(),
        provenance: "closed_form".into(),
        a: None,
        c: None,
        q: None,
        d1: Some(dc.d1),
        d2: Some(dc.d2),
        c1: Some(dc.c1),
        c2: Some(dc.c2),
        cross_checks: CrossChecks {
            d_pairing: Some([dc.d1_pairing, dc.d2_pairing]),
            d_discrepancy: Some(dc.d_discrepant()),
            c2_candidates: Some(C2Candidates {
                formula: dc.c2,
                tabulated: dc.c2_tabulated,
                numeric: fine.c2,
                richardson: rich_c2,
            }),
            c2_verdict: Some(verdict.into()),
            numeric: Some(NumericBlock {
                grid_n: n_fine,
                lambda0_h: fine.lambda0_h,
                d1: fine.d1,
                d2: fine.d2,
                c1: fine.c1,
                c2: fine.c2,
            }),
            a_grid: None,
            lambda0_h: None,
            transcritical: None,
        },
    })
}

fn simple_record(cfg: &RunConfig, n: u32, base_mode: u32, mu0: f64) -> Result<CoefficientRecord> {
    if !(0.0..1.0).contains(&mu0) || mu0 == 0.0 {
        return Err(Error::Domain(format!("simple points live at mu0 in (0, 1); got {mu0}")));
    }
    let w = solve_k(mu0, base_mode, Parity::of_mode(base_mode), &cfg.homotopy, cfg.tol_root)?;
    let mode = EigenMode::new(n, &w, &cfg.homotopy)?;
    let grid_n = cfg.grid_n.unwrap_or(96);
    let op = assemble(grid_n, mu0, &cfg.homotopy)?;
    let sc = simple_coeffs(&mode, n, base_mode, &cfg.nonlinearity, &op)?;
    Ok(CoefficientRecord {
        n,
        k: w.k,
        mu0,
        lambda0: sc.lambda0,
        kind: "simple".into(),
        provenance: "closed_form+numeric".into(),
        a: Some(sc.a),
        c: Some(sc.c),
        q: Some(sc.q),
        d1: None,
        d2: None,
        c1: None,
        c2: None,
        cross_checks: CrossChecks {
            d_pairing: None,
            d_discrepancy: None,
            c2_candidates: None,
            c2_verdict: None,
            numeric: None,
            a_grid: Some(sc.a_grid),
            lambda0_h: Some(sc.lambda0_h),
            transcritical: Some(sc.transcritical),
        },
    })
}

// --- diagrams ----------------------------------------------------------

#[derive(Serialize)]
pub struct DiagramDto {
    pub lambda0: f64,
    pub mu0: f64,
    pub kernel_dim: usize,
    pub nu: f64,
    pub coefficients_provenance: String,
    pub branches: Vec<BranchDto>,
    pub secondary_loci: Vec<LocusDto>,
    pub mixed_symmetry_preserved: Option<bool>,
}

#[derive(Serialize)]
pub struct BranchDto {
    pub label: String,
    pub kind: String,
    pub z1: Option<[f64; 3]>,
    pub z2: Option<[f64; 3]>,
    pub sign_pattern: [f64; 2],
    pub symmetry: Option<String>,
    pub symmetry_within_problem_group: Option<String>,
}

#[derive(Serialize)]
pub struct LocusDto {
    pub sigma_over_nu: f64,
    pub pure_label: String,
    pub valid_nu_pos: bool,
    pub valid_nu_neg: bool,
}

/// Which coefficient set feeds the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffProvenance {
    ClosedForm,
    Numeric,
}

/// Builds the scenario diagram at the Neumann double point `(n, k)` (or a
/// simple point when `mu0` is supplied), writes JSON and SVG, and returns
/// the DTO.
pub fn cmd_diagram(
    cfg: &RunConfig,
    out_dir: &Path,
    n: u32,
    k: u32,
    mu0: Option<f64>,
    nu: f64,
    provenance: CoeffProvenance,
) -> Result<DiagramDto> {
    ensure_dir(out_dir)?;
    let dto = match mu0 {
        None | Some(0.0) => double_diagram(cfg, n, k, nu, provenance)?,
        Some(mu) => simple_diagram(cfg, n, k, mu, nu)?,
    };
    let json = serde_json::to_string_pretty(&dto).expect("serializable diagram");
    write_file(&out_dir.join(format!("diagram_n{n}_k{k}.json")), &json)?;
    let svg = render_diagram_svg(&dto);
    write_file(&out_dir.join(format!("diagram_n{n}_k{k}.svg")), &svg)?;
    write_metadata(out_dir, "diagram", cfg)?;
    Ok(dto)
}

fn amplitude_dto(a: &Option<crate::scenario::AmplitudeSq>) -> Option<[f64; 3]> {
    a.as_ref().map(|m| [m.sigma_coeff, m.nu_coeff, m.denom])
}

fn double_diagram(
    cfg: &RunConfig,
    n: u32,
    k: u32,
    nu: f64,
    provenance: CoeffProvenance,
) -> Result<DiagramDto> {
    let h_tilde0 = cfg.homotopy.ratio_and_derivative(0.0)?.1;
    let dc = double_coeffs_neumann(n, k, &cfg.nonlinearity, h_tilde0)?;
    let nf = match provenance {
        CoeffProvenance::ClosedForm => DoubleNormalForm::from(&dc),
        CoeffProvenance::Numeric => {
            let grid_n = cfg.grid_n.unwrap_or(96);
            let op = assemble(grid_n, 0.0, &cfg.homotopy)?;
            DoubleNormalForm::from(&double_coeffs_numeric(n, k, &cfg.nonlinearity, &op)?)
        }
    };
    let families = double_branches(&nf)?;
    let loci = secondary_loci(&nf)?;

    // leading-order symmetry labels on a reference grid
    let (m1, m2) = neumann_kernel(n, k)?;
    let grid = 64usize;
    let h = PI / grid as f64;
    let modes = [
        Array2::from_shape_fn((grid, grid), |(i, j)| {
            m1.value((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
        }),
        Array2::from_shape_fn((grid, grid), |(i, j)| {
            m2.value((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
        }),
    ];
    let gamma = gamma_for(cfg.nonlinearity.odd_in_u(), if nu == 0.0 { 0.0 } else { nu });
    let branches = families
        .iter()
        .map(|fam| {
            // pick a sigma inside the family's existence region
            let sigma = sample_sigma(fam, nu);
            let (sym, within) = match sigma {
                Some(s) => match classify_branch_symmetry(fam, &modes, s, nu, &gamma, 1e-8) {
                    Ok(cs) => (Some(cs.computed.name), Some(cs.within_gamma.name)),
                    Err(_) => (None, None),
                },
                None => (None, None),
            };
            BranchDto {
                label: fam.label.clone(),
                kind: kind_str(fam.kind),
                z1: amplitude_dto(&fam.z1),
                z2: amplitude_dto(&fam.z2),
                sign_pattern: [fam.sign_pattern.0, fam.sign_pattern.1],
                symmetry: sym,
                symmetry_within_problem_group: within,
            }
        })
        .collect();

    Ok(DiagramDto {
        lambda0: dc.lambda0,
        mu0: 0.0,
        kernel_dim: 2,
        nu,
        coefficients_provenance: match provenance {
            CoeffProvenance::ClosedForm => "closed_form".into(),
            CoeffProvenance::Numeric => "numeric".into(),
        },
        branches,
        secondary_loci: loci
            .into_iter()
            .map(|l| LocusDto {
                sigma_over_nu: l.sigma_over_nu,
                pure_label: l.pure_label,
                valid_nu_pos: l.valid_nu_pos,
                valid_nu_neg: l.valid_nu_neg,
            })
            .collect(),
        mixed_symmetry_preserved: Some(nf.d1 == nf.d2),
    })
}

fn simple_diagram(cfg: &RunConfig, n: u32, base_mode: u32, mu0: f64, nu: f64) -> Result<DiagramDto> {
    let w = solve_k(mu0, base_mode, Parity::of_mode(base_mode), &cfg.homotopy, cfg.tol_root)?;
    let mode = EigenMode::new(n, &w, &cfg.homotopy)?;
    let grid_n = cfg.grid_n.unwrap_or(96);
    let op = assemble(grid_n, mu0, &cfg.homotopy)?;
    let sc = simple_coeffs(&mode, n, base_mode, &cfg.nonlinearity, &op)?;
    let families = simple_branches(&sc)?;
    let branches = families
        .iter()
        .map(|fam| BranchDto {
            label: fam.label.clone(),
            kind: kind_str(fam.kind),
            z1: amplitude_dto(&fam.z1),
            z2: amplitude_dto(&fam.z2),
            sign_pattern: [fam.sign_pattern.0, fam.sign_pattern.1],
            symmetry: None,
            symmetry_within_problem_group: None,
        })
        .collect();
    Ok(DiagramDto {
        lambda0: sc.lambda0,
        mu0,
        kernel_dim: 1,
        nu,
        coefficients_provenance: "closed_form+numeric".into(),
        branches,
        secondary_loci: Vec::new(),
        mixed_symmetry_preserved: None,
    })
}

fn kind_str(kind: FamilyKind) -> String {
    match kind {
        FamilyKind::SquareRoot => "square-root".into(),
        FamilyKind::Linear => "linear".into(),
    }
}

fn sample_sigma(fam: &BranchFamily, nu: f64) -> Option<f64> {
    [0.05, 0.1, 0.3, 0.8, 1.5, 3.0, -0.05, -0.3, -1.5].into_iter().find(|&trial| {
        fam.amplitudes(trial, nu).is_some_and(|z| z.0.abs() + z.1.abs() > 1e-8)
    })
}

// --- SVG ---------------------------------------------------------------

/// Renders the amplitude picture: branch amplitude against `lambda`, one
/// polyline per family, secondary loci marked as dashed verticals.
pub fn render_diagram_svg(dto: &DiagramDto) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 30.0;
    const MB: f64 = 50.0;
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

    // sample each family over a sigma window
    let families: Vec<(String, Vec<(f64, f64)>)> = dto
        .branches
        .iter()
        .map(|b| {
            let mut pts = Vec::new();
            let span = 0.5 * (1.0 + dto.lambda0.abs() * 0.1);
            for i in 0..=200 {
                let sigma = -span + 2.0 * span * i as f64 / 200.0;
                let z1 = b.z1.map(|m| (m[0] * sigma + m[1] * dto.nu) / m[2]);
                let z2 = b.z2.map(|m| (m[0] * sigma + m[1] * dto.nu) / m[2]);
                let amp = match b.kind.as_str() {
                    "linear" => Some(z1.unwrap_or(0.0).abs()),
                    _ => {
                        let a1 = z1.unwrap_or(0.0);
                        let a2 = z2.unwrap_or(0.0);
                        if a1 < 0.0 || a2 < 0.0 {
                            None
                        } else {
                            Some((a1 + a2).sqrt())
                        }
                    }
                };
                if let Some(a) = amp {
                    pts.push((dto.lambda0 + sigma, a));
                }
            }
            (b.label.clone(), pts)
        })
        .collect();

    let xmin = families
        .iter()
        .flat_map(|f| f.1.iter().map(|p| p.0))
        .fold(dto.lambda0 - 0.5, f64::min);
    let xmax = families
        .iter()
        .flat_map(|f| f.1.iter().map(|p| p.0))
        .fold(dto.lambda0 + 0.5, f64::max);
    let ymax = families
        .iter()
        .flat_map(|f| f.1.iter().map(|p| p.1))
        .fold(1e-6f64, f64::max)
        * 1.1;

    let sx = |x: f64| ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
    let sy = |y: f64| H - MB - y / ymax * (H - MT - MB);

    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">"
    )
    .unwrap();
    writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>").unwrap();
    // axes
    writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        H - MB,
        W - MR,
        H - MB
    )
    .unwrap();
    writeln!(svg, "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>", H - MB)
        .unwrap();
    for i in 0..=5 {
        let x = xmin + (xmax - xmin) * i as f64 / 5.0;
        writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/><text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\">{4:.2}</text>",
            sx(x), H - MB, H - MB + 5.0, H - MB + 20.0, x
        ).unwrap();
        let y = ymax * i as f64 / 5.0;
        writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/><text x=\"{3}\" y=\"{1}\" text-anchor=\"end\" dominant-baseline=\"middle\">{4:.3}</text>",
            ML - 5.0, sy(y), ML, ML - 8.0, y
        ).unwrap();
    }
    writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">lambda</text>",
        (ML + W - MR) / 2.0,
        H - 10.0
    )
    .unwrap();
    writeln!(svg, "<text x=\"15\" y=\"{MT}\">amplitude</text>").unwrap();

    // trivial branch along the axis
    writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#999\" stroke-width=\"2\"/>",
        sy(0.0),
        W - MR
    )
    .unwrap();

    for (idx, (label, pts)) in families.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = palette[idx % palette.len()];
        let path: Vec<String> =
            pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.join(" ")
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{label}</text>",
            W - MR - 120.0,
            MT + 16.0 * idx as f64
        )
        .unwrap();
    }

    for locus in &dto.secondary_loci {
        let lambda = dto.lambda0 + locus.sigma_over_nu * dto.nu;
        if lambda >= xmin && lambda <= xmax {
            writeln!(
                svg,
                "<line x1=\"{0}\" y1=\"{MT}\" x2=\"{0}\" y2=\"{1}\" stroke=\"#444\" stroke-dasharray=\"5,4\"/><text x=\"{0}\" y=\"{2}\" text-anchor=\"middle\">{3}</text>",
                sx(lambda),
                H - MB,
                MT - 8.0,
                locus.pure_label
            ).unwrap();
        }
    }
    svg.push_str("</svg>\n");
    svg
}

// --- trace -------------------------------------------------------------

/// Continues the selected branch and writes a CSV trace plus the final
/// grid function. Returns the trace path.
#[allow(clippy::too_many_arguments)]
pub fn cmd_trace(
    cfg: &RunConfig,
    out_dir: &Path,
    n: u32,
    k: u32,
    branch: &str,
    nu: f64,
    steps: usize,
    sigma0: f64,
    provenance: CoeffProvenance,
) -> Result<PathBuf> {
    ensure_dir(out_dir)?;
    let grid_n = cfg.grid_n.unwrap_or(64);
    let h_tilde0 = cfg.homotopy.ratio_and_derivative(0.0)?.1;
    let dc = double_coeffs_neumann(n, k, &cfg.nonlinearity, h_tilde0)?;
    let op0 = assemble(grid_n, 0.0, &cfg.homotopy)?;
    let numeric = double_coeffs_numeric(n, k, &cfg.nonlinearity, &op0)?;
    let nf = match provenance {
        CoeffProvenance::ClosedForm => DoubleNormalForm::from(&dc),
        CoeffProvenance::Numeric => DoubleNormalForm::from(&numeric),
    };
    let families = double_branches(&nf)?;
    let family = families
        .iter()
        .find(|f| f.label == branch)
        .ok_or_else(|| {
            Error::Domain(format!(
                "unknown branch `{branch}`; available: {}",
                families.iter().map(|f| f.label.clone()).collect::<Vec<_>>().join(", ")
            ))
        })?;
    let (z1, z2) = family.amplitudes(sigma0, nu).ok_or_else(|| {
        Error::Domain(format!("seed sigma = {sigma0} lies outside the existence region"))
    })?;

    let op = assemble(grid_n, nu, &cfg.homotopy)?;
    let (m1, m2) = neumann_kernel(n, k)?;
    let phi = |mode: &EigenMode| {
        let s = op.sample(|x, y| mode.value(x, y));
        &s / op.norm(&s)
    };
    let (phi1, phi2) = (phi(&m1), phi(&m2));
    let mut seed_u = phi1.mapv(|v| z1 * v);
    seed_u.scaled_add(z2, &phi2);
    let seed = ContinuationState::at(seed_u, numeric.lambda0_h + sigma0, nu);

    let opts = ContinuationOptions {
        newton: crate::continuation::NewtonOptions { tol: cfg.tol_newton, ..Default::default() },
        ..Default::default()
    };
    let trace = continue_branch(&op, &cfg.nonlinearity, &seed, steps, &opts)?;

    let mut csv = String::from("step,lambda,mu,amplitude,residual,det_sign\n");
    for (i, p) in trace.points.iter().enumerate() {
        writeln!(
            csv,
            "{i},{},{nu},{},{},{}",
            p.lambda,
            op.norm(&p.u),
            p.residual,
            if p.det_value >= 0.0 { 1 } else { -1 }
        )
        .unwrap();
    }
    let path = out_dir.join(format!("trace_{branch}_n{n}_k{k}.csv"));
    write_file(&path, &csv)?;

    // final state as a grid CSV with the size header
    if let Some(last) = trace.points.last() {
        let mut grid_csv = format!("{grid_n}\n");
        for i in 0..grid_n {
            let row: Vec<String> = (0..grid_n).map(|j| format!("{}", last.u[(i, j)])).collect();
            writeln!(grid_csv, "{}", row.join(",")).unwrap();
        }
        write_file(&out_dir.join(format!("trace_{branch}_n{n}_k{k}_final_u.csv")), &grid_csv)?;
    }
    write_metadata(out_dir, "trace", cfg)?;
    Ok(path)
}

// --- verify ------------------------------------------------------------

#[derive(Serialize)]
struct VerifyReportDto {
    criteria: Vec<CriterionDto>,
    passed: usize,
    total: usize,
}

#[derive(Serialize)]
struct CriterionDto {
    id: usize,
    name: String,
    passed: bool,
    runtime_ms: u128,
    checks: Vec<CheckDto>,
}

#[derive(Serialize)]
struct CheckDto {
    label: String,
    passed: bool,
    informational: bool,
    detail: String,
}

/// Runs the verification suite, writes the JSON report, and returns the
/// results along with the rendered text.
pub fn cmd_verify(
    cfg: &RunConfig,
    out_dir: &Path,
    grid_override: Option<usize>,
) -> Result<(Vec<CriterionResult>, String)> {
    ensure_dir(out_dir)?;
    let opts = AcceptanceOptions { grid_override: grid_override.or(cfg.grid_n) };
    let results = run_all(&opts);
    let text = crate::acceptance::render_report(&results);

    let dto = VerifyReportDto {
        passed: results.iter().filter(|r| r.passed()).count(),
        total: results.len(),
        criteria: results
            .iter()
            .map(|r| CriterionDto {
                id: r.id,
                name: r.name.clone(),
                passed: r.passed(),
                runtime_ms: r.runtime.as_millis(),
                checks: r
                    .checks
                    .iter()
                    .map(|c| CheckDto {
                        label: c.label.clone(),
                        passed: c.passed,
                        informational: c.informational,
                        detail: c.detail.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    write_file(
        &out_dir.join("verify_report.json"),
        &serde_json::to_string_pretty(&dto).expect("serializable report"),
    )?;
    write_metadata(out_dir, "verify", cfg)?;
    Ok((results, text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn tmpdir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("bifkit-cli-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn spectrum_outputs_are_deterministic() {
        let cfg =
            RunConfig { lambda_max: 6.0, mu_samples: 21, ..RunConfig::default() };
        let dir = tmpdir("spectrum");
        let paths = cmd_spectrum(&cfg, &dir).unwrap();
        let first: Vec<String> =
            paths.iter().map(|p| std::fs::read_to_string(p).unwrap()).collect();
        let paths2 = cmd_spectrum(&cfg, &dir).unwrap();
        let second: Vec<String> =
            paths2.iter().map(|p| std::fs::read_to_string(p).unwrap()).collect();
        assert_eq!(first, second, "reruns must be byte-identical");
        // the (1, 2) curve runs from 5 to 10
        let bif = &first[1];
        assert!(bif.lines().any(|l| l.starts_with("0,5,1,2,")));
        assert!(bif.lines().any(|l| l.starts_with("1,10,1,2,")));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn lambda_max_one_keeps_only_the_zero_curve() {
        let cfg =
            RunConfig { lambda_max: 1.0, mu_samples: 11, ..RunConfig::default() };
        let dir = tmpdir("lmax");
        let paths = cmd_spectrum(&cfg, &dir).unwrap();
        let bif = std::fs::read_to_string(&paths[1]).unwrap();
        let data_lines: Vec<&str> = bif.lines().skip(1).collect();
        assert_eq!(data_lines.len(), 11);
        assert!(data_lines.iter().all(|l| l.contains(",0,0,")));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn coeffs_record_carries_candidates_and_flags() {
        let cfg = RunConfig { grid_n: Some(48), ..RunConfig::default() };
        let dir = tmpdir("coeffs");
        let record = cmd_coeffs(&cfg, &dir, 1, 2, None).unwrap();
        assert_eq!(record.kind, "double");
        let cands = record.cross_checks.c2_candidates.as_ref().unwrap();
        assert!(cands.tabulated.is_some());
        assert_eq!(record.cross_checks.c2_verdict.as_deref(), Some("formula"));
        assert_eq!(record.cross_checks.d_discrepancy, Some(false));

        let record = cmd_coeffs(&cfg, &dir, 0, 1, None).unwrap();
        assert_eq!(record.cross_checks.d_discrepancy, Some(true));
        let json = std::fs::read_to_string(dir.join("coeffs_n0_k1.json")).unwrap();
        assert!(json.contains("\"d_pairing\""));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn simple_point_record() {
        let cfg = RunConfig { grid_n: Some(48), ..RunConfig::default() };
        let dir = tmpdir("simple");
        let record = cmd_coeffs(&cfg, &dir, 1, 2, Some(0.5)).unwrap();
        assert_eq!(record.kind, "simple");
        assert!(record.a.is_some() && record.c.is_some());
        assert_eq!(record.cross_checks.transcritical, Some(false));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn diagram_files_written() {
        let cfg = RunConfig { grid_n: Some(32), ..RunConfig::default() };
        let dir = tmpdir("diagram");
        let dto =
            cmd_diagram(&cfg, &dir, 0, 1, None, 0.01, CoeffProvenance::ClosedForm).unwrap();
        assert_eq!(dto.branches.len(), 4);
        assert_eq!(dto.secondary_loci.len(), 2);
        let svg = std::fs::read_to_string(dir.join("diagram_n0_k1.svg")).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        let json = std::fs::read_to_string(dir.join("diagram_n0_k1.json")).unwrap();
        assert!(json.contains("pure-phi2"));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn trace_writes_csv_with_header() {
        let cfg = RunConfig { grid_n: Some(32), ..RunConfig::default() };
        let dir = tmpdir("trace");
        let path =
            cmd_trace(&cfg, &dir, 0, 1, "pure-phi2", 0.01, 10, 0.05, CoeffProvenance::Numeric)
                .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("step,lambda,mu,amplitude,residual,det_sign\n"));
        assert!(text.lines().count() > 5);
        let _ = std::fs::remove_dir_all(&dir);
    }
}
