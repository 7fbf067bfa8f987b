use bifkit::cli::{self, CoeffProvenance};
use bifkit::config::RunConfig;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Bifurcation toolkit for a semilinear elliptic problem on the square
/// under a homotopy of boundary conditions.
#[derive(Parser)]
#[command(name = "bifkit", version, about)]
struct Cli {
    /// Plain-text key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the configured one).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Grid size override.
    #[arg(long, global = true)]
    grid: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PointArgs {
    /// Horizontal mode number.
    #[arg(long)]
    n: u32,
    /// Vertical mode number (the base mode of the curve away from the
    /// Neumann end).
    #[arg(long)]
    k: u32,
    /// Homotopy parameter of a simple point; omit for the Neumann double
    /// point.
    #[arg(long)]
    mu0: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the wavenumber and bifurcation-point curves as CSV.
    Spectrum {
        /// Upper bound on lambda(0) = n^2 + m^2 for the curve family.
        #[arg(long)]
        lambda_max: Option<f64>,
    },
    /// Emit the reduced-coefficient record of a bifurcation point as JSON.
    Coeffs {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Emit the local scenario diagram of a bifurcation point (JSON + SVG).
    Diagram {
        #[command(flatten)]
        point: PointArgs,
        /// Homotopy offset annotated on the diagram.
        #[arg(long, default_value_t = 0.01)]
        nu: f64,
        /// Coefficient set feeding the diagram.
        #[arg(long, default_value = "closed-form")]
        provenance: String,
    },
    /// Continue a branch of a double point on the grid and emit the trace.
    Trace {
        #[command(flatten)]
        point: PointArgs,
        /// Branch label: pure-phi1 | pure-phi2 | mixed(+) | mixed(-).
        #[arg(long)]
        branch: String,
        /// Homotopy offset of the traced problem.
        #[arg(long, default_value_t = 0.01)]
        nu: f64,
        /// Arclength steps.
        #[arg(long, default_value_t = 60)]
        steps: usize,
        /// Seed offset from the bifurcation point.
        #[arg(long, default_value_t = 0.02)]
        sigma0: f64,
        /// Coefficient set for the seed amplitudes.
        #[arg(long, default_value = "numeric")]
        provenance: String,
    },
    /// Run the verification suite and write the report.
    Verify,
}

fn parse_provenance(text: &str) -> Result<CoeffProvenance, bifkit::Error> {
    match text {
        "closed-form" => Ok(CoeffProvenance::ClosedForm),
        "numeric" => Ok(CoeffProvenance::Numeric),
        other => Err(bifkit::Error::Config {
            field: "provenance".into(),
            what: format!("expected closed-form or numeric, got {other}"),
        }),
    }
}

fn run(cli: Cli) -> Result<bool, bifkit::Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(grid) = cli.grid {
        if grid < 8 {
            return Err(bifkit::Error::Config {
                field: "grid".into(),
                what: format!("grid size {grid} below the minimum of 8"),
            });
        }
        cfg.grid_n = Some(grid);
    }
    let out_dir = cli.out.clone().unwrap_or_else(|| cfg.out_dir.clone());

    match cli.command {
        Command::Spectrum { lambda_max } => {
            if let Some(lm) = lambda_max {
                if lm <= 0.0 {
                    return Err(bifkit::Error::Config {
                        field: "lambda_max".into(),
                        what: "must be positive".into(),
                    });
                }
                cfg.lambda_max = lm;
            }
            let paths = cli::cmd_spectrum(&cfg, &out_dir)?;
            for p in paths {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
        Command::Coeffs { point } => {
            let record = cli::cmd_coeffs(&cfg, &out_dir, point.n, point.k, point.mu0)?;
            println!("{}", serde_json::to_string_pretty(&record).expect("serializable"));
            Ok(true)
        }
        Command::Diagram { point, nu, provenance } => {
            let prov = parse_provenance(&provenance)?;
            let dto = cli::cmd_diagram(&cfg, &out_dir, point.n, point.k, point.mu0, nu, prov)?;
            println!(
                "diagram at lambda0 = {} with {} families, {} secondary loci",
                dto.lambda0,
                dto.branches.len(),
                dto.secondary_loci.len()
            );
            Ok(true)
        }
        Command::Trace { point, branch, nu, steps, sigma0, provenance } => {
            let prov = parse_provenance(&provenance)?;
            if point.mu0.is_some() {
                return Err(bifkit::Error::Config {
                    field: "mu0".into(),
                    what: "trace starts from double points; seed simple points via diagram data"
                        .into(),
                });
            }
            let path = cli::cmd_trace(
                &cfg, &out_dir, point.n, point.k, &branch, nu, steps, sigma0, prov,
            )?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Verify => {
            let (results, text) = cli::cmd_verify(&cfg, &out_dir, cli.grid)?;
            print!("{text}");
            Ok(results.iter().all(|r| r.passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bifkit: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
