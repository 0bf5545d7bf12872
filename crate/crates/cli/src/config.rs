//! Parameter resolution: defaults, then a `key = value` file, then flags.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use triality_core::linalg::Complex;
use triality_core::measures::EntropyBase;
use triality_core::model::{ModelParams, DEFAULT_DELTA_M, TAU_ZERO, WIDTH_RATIO};
use triality_core::verification::{ScanConfig, DEFAULT_STEPS};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Report,
}

/// Flags shared by every subcommand. Unset flags fall through to the file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// K_S decay width (units of 1/tau_S)
    #[arg(long, global = true)]
    pub gamma_s: Option<f64>,
    /// K_L decay width
    #[arg(long, global = true)]
    pub gamma_l: Option<f64>,
    /// Mass difference m_L - m_S
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta_m: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta_re: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta_im: Option<f64>,
    #[arg(long, global = true)]
    pub tau_min: Option<f64>,
    #[arg(long, global = true)]
    pub tau_max: Option<f64>,
    /// Number of grid points, endpoints included
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key = value parameter file; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Non-physical negative control: measure entropy in bits
    #[arg(long, global = true)]
    pub debug_entropy_base2: bool,
    /// Evaluate the grid on one thread
    #[arg(long, global = true)]
    pub serial: bool,
}

/// Scalar settings that may come from either the file or the flags.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub gamma_s: Option<f64>,
    pub gamma_l: Option<f64>,
    pub delta_m: Option<f64>,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub beta_re: Option<f64>,
    pub beta_im: Option<f64>,
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub steps: Option<usize>,
}

impl Overrides {
    /// Values set in `top` win over `self`.
    pub fn layered_under(self, top: Overrides) -> Overrides {
        Overrides {
            gamma_s: top.gamma_s.or(self.gamma_s),
            gamma_l: top.gamma_l.or(self.gamma_l),
            delta_m: top.delta_m.or(self.delta_m),
            alpha_re: top.alpha_re.or(self.alpha_re),
            alpha_im: top.alpha_im.or(self.alpha_im),
            beta_re: top.beta_re.or(self.beta_re),
            beta_im: top.beta_im.or(self.beta_im),
            tau_min: top.tau_min.or(self.tau_min),
            tau_max: top.tau_max.or(self.tau_max),
            steps: top.steps.or(self.steps),
        }
    }

    pub fn parse_file_contents(text: &str) -> Result<Overrides, CliError> {
        let mut o = Overrides::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| CliError::Config {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            let float = || {
                value.parse::<f64>().map_err(|_| CliError::Config {
                    line,
                    message: format!("`{key}`: `{value}` is not a number"),
                })
            };
            let slot = match key.as_str() {
                "gamma_s" => &mut o.gamma_s,
                "gamma_l" => &mut o.gamma_l,
                "delta_m" => &mut o.delta_m,
                "alpha_re" => &mut o.alpha_re,
                "alpha_im" => &mut o.alpha_im,
                "beta_re" => &mut o.beta_re,
                "beta_im" => &mut o.beta_im,
                "tau_min" => &mut o.tau_min,
                "tau_max" => &mut o.tau_max,
                "steps" => {
                    let steps = value.parse::<usize>().map_err(|_| CliError::Config {
                        line,
                        message: format!("`steps`: `{value}` is not a non-negative integer"),
                    })?;
                    o.steps = Some(steps);
                    continue;
                }
                _ => {
                    return Err(CliError::Config {
                        line,
                        message: format!("unknown key `{key}`"),
                    })
                }
            };
            *slot = Some(float()?);
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::parse_file_contents(&text)
    }

    /// Build a validated scan configuration on top of the default setup.
    pub fn resolve(&self, entropy_base: EntropyBase, parallel: bool) -> Result<ScanConfig, CliError> {
        let alpha = Complex::new(self.alpha_re.unwrap_or(FRAC_1_SQRT_2), self.alpha_im.unwrap_or(0.0));
        let beta = Complex::new(self.beta_re.unwrap_or(FRAC_1_SQRT_2), self.beta_im.unwrap_or(0.0));
        let tau_max = self.tau_max.unwrap_or(TAU_ZERO);
        let params = ModelParams {
            tau_max,
            ..ModelParams::default()
        }
        .with_widths(self.gamma_s.unwrap_or(1.0), self.gamma_l.unwrap_or(1.0 / WIDTH_RATIO))
        .with_delta_m(self.delta_m.unwrap_or(DEFAULT_DELTA_M))
        .with_amplitudes(alpha, beta);
        let cfg = ScanConfig {
            tau_min: self.tau_min.unwrap_or(0.0),
            tau_max,
            steps: self.steps.unwrap_or(DEFAULT_STEPS),
            entropy_base,
            parallel,
            ..ScanConfig::new(params)
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<&CommonArgs> for Overrides {
    fn from(a: &CommonArgs) -> Self {
        Overrides {
            gamma_s: a.gamma_s,
            gamma_l: a.gamma_l,
            delta_m: a.delta_m,
            alpha_re: a.alpha_re,
            alpha_im: a.alpha_im,
            beta_re: a.beta_re,
            beta_im: a.beta_im,
            tau_min: a.tau_min,
            tau_max: a.tau_max,
            steps: a.steps,
        }
    }
}

/// Defaults, then `--config`, then flags.
pub fn resolve(args: &CommonArgs) -> Result<ScanConfig, CliError> {
    let file = match &args.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    let merged = file.layered_under(Overrides::from(args));
    let base = if args.debug_entropy_base2 {
        EntropyBase::Binary
    } else {
        EntropyBase::Natural
    };
    merged.resolve(base, !args.serial)
}
