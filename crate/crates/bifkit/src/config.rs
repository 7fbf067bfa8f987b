//! Plain-text key-value run configuration.
//!
//! Every key has a default, so the verification command runs with no
//! configuration file at all. Unknown keys are rejected rather than
//! silently ignored.

use crate::error::{Error, Result};
use crate::homotopy::{validate_homotopy, HomotopySpec};
use crate::nonlinearity::Nonlinearity;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub homotopy: HomotopySpec,
    pub nonlinearity: Nonlinearity,
    /// Grid size; `None` lets each command or criterion pick its own
    /// published resolution.
    pub grid_n: Option<usize>,
    pub lambda_max: f64,
    pub mu_samples: usize,
    pub tol_root: f64,
    pub tol_newton: f64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            homotopy: HomotopySpec::linear(),
            nonlinearity: Nonlinearity::lambda_u2_u3(),
            grid_n: None,
            lambda_max: 25.0,
            mu_samples: 101,
            tol_root: 1e-12,
            tol_newton: 1e-10,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            field: "config".into(),
            what: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut h0_coeffs: Option<Vec<f64>> = None;
        let mut h1_coeffs: Option<Vec<f64>> = None;
        let mut homotopy_name = "linear".to_string();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                field: format!("line {}", lineno + 1),
                what: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "homotopy" => homotopy_name = value.to_string(),
                "homotopy_h0" => h0_coeffs = Some(parse_floats(key, value)?),
                "homotopy_h1" => h1_coeffs = Some(parse_floats(key, value)?),
                "nonlinearity" => cfg.nonlinearity = parse_nonlinearity(value)?,
                "grid_n" => {
                    let n = parse_number(key, value)? as usize;
                    if n < 8 {
                        return Err(Error::Config {
                            field: key.into(),
                            what: format!("grid size {n} below the minimum of 8"),
                        });
                    }
                    cfg.grid_n = Some(n);
                }
                "lambda_max" => {
                    cfg.lambda_max = parse_number(key, value)?;
                    if cfg.lambda_max <= 0.0 {
                        return Err(Error::Config {
                            field: key.into(),
                            what: "lambda_max must be positive".into(),
                        });
                    }
                }
                "mu_samples" => {
                    cfg.mu_samples = parse_number(key, value)? as usize;
                    if cfg.mu_samples < 3 {
                        return Err(Error::Config {
                            field: key.into(),
                            what: "need at least 3 samples".into(),
                        });
                    }
                }
                "tol_root" => cfg.tol_root = parse_positive(key, value)?,
                "tol_newton" => cfg.tol_newton = parse_positive(key, value)?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                other => {
                    return Err(Error::Config {
                        field: other.into(),
                        what: "unknown configuration key".into(),
                    })
                }
            }
        }

        cfg.homotopy = match homotopy_name.as_str() {
            "linear" => HomotopySpec::linear(),
            "poly" => {
                let h0 = h0_coeffs.ok_or_else(|| Error::Config {
                    field: "homotopy_h0".into(),
                    what: "required when homotopy = poly".into(),
                })?;
                let h1 = h1_coeffs.ok_or_else(|| Error::Config {
                    field: "homotopy_h1".into(),
                    what: "required when homotopy = poly".into(),
                })?;
                HomotopySpec::from_coefficients("poly", h0, h1)
            }
            other => {
                return Err(Error::Config {
                    field: "homotopy".into(),
                    what: format!("unknown family `{other}` (expected linear or poly)"),
                })
            }
        };
        let report = validate_homotopy(&cfg.homotopy, 100)?;
        if !report.is_valid() {
            return Err(Error::Config {
                field: "homotopy".into(),
                what: format!("invalid boundary homotopy: {}", report.violations.join("; ")),
            });
        }
        Ok(cfg)
    }
}

fn parse_nonlinearity(value: &str) -> Result<Nonlinearity> {
    if value == "lambda-u2-u3" {
        return Ok(Nonlinearity::lambda_u2_u3());
    }
    if value == "lambda-u3" {
        return Ok(Nonlinearity::lambda_u3());
    }
    if let Some(rest) = value.strip_prefix("lambda-poly:") {
        return Nonlinearity::polynomial(value, parse_floats("nonlinearity", rest)?, true);
    }
    if let Some(rest) = value.strip_prefix("poly:") {
        return Nonlinearity::polynomial(value, parse_floats("nonlinearity", rest)?, false);
    }
    Err(Error::Config {
        field: "nonlinearity".into(),
        what: format!(
            "unknown selection `{value}` (expected lambda-u2-u3, lambda-u3, lambda-poly:..., poly:...)"
        ),
    })
}

fn parse_floats(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| Error::Config {
                field: key.into(),
                what: format!("`{part}` is not a number"),
            })
        })
        .collect()
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value.parse::<f64>().map_err(|_| Error::Config {
        field: key.into(),
        what: format!("`{value}` is not a number"),
    })
}

fn parse_positive(key: &str, value: &str) -> Result<f64> {
    let v = parse_number(key, value)?;
    if v <= 0.0 {
        return Err(Error::Config { field: key.into(), what: "must be positive".into() });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_need_no_file() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg.lambda_max, 25.0);
        assert_eq!(cfg.grid_n, None);
        assert_eq!(cfg.homotopy.family_tag(), "linear");
        assert_eq!(cfg.nonlinearity.name(), "lambda-u2-u3");
    }

    #[test]
    fn parses_keys_and_comments() {
        let cfg = RunConfig::parse(
            "# comment\nlambda_max = 6\ngrid_n = 64  # inline\nnonlinearity = lambda-u3\n",
        )
        .unwrap();
        assert_eq!(cfg.lambda_max, 6.0);
        assert_eq!(cfg.grid_n, Some(64));
        assert!(cfg.nonlinearity.odd_in_u());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(RunConfig::parse("grid_n = four").is_err());
        assert!(RunConfig::parse("grid_n = 4").is_err());
        assert!(RunConfig::parse("tol_root = -1").is_err());
    }

    #[test]
    fn polynomial_homotopy_roundtrip() {
        let cfg = RunConfig::parse(
            "homotopy = poly\nhomotopy_h0 = 0,0,1\nhomotopy_h1 = 1,-2,1\n",
        )
        .unwrap();
        assert_eq!(cfg.homotopy.h0(0.5), 0.25);
        assert_eq!(cfg.homotopy.h1(0.5), 0.25);
    }

    #[test]
    fn invalid_homotopy_rejected_at_load() {
        let err = RunConfig::parse("homotopy = poly\nhomotopy_h0 = 1\nhomotopy_h1 = 1,-1\n");
        assert!(err.is_err());
    }

    #[test]
    fn custom_nonlinearity_validated_at_load() {
        let cfg = RunConfig::parse("nonlinearity = poly:0.5,0.25").unwrap();
        assert_eq!(cfg.nonlinearity.d2_at(3.0), 1.0);
        assert_eq!(cfg.nonlinearity.d3_at(3.0), 1.5);
    }
}
