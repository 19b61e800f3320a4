//! Command-line flags, the optional TOML config file, and their merge into a
//! resolved [`RunConfig`]. Precedence: flags > config file > defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use freeze_rmt::freezecov::{Ensemble, EnsembleSpec};
use serde::Deserialize;

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    Hermite,
    Laguerre,
    JacobiTrig,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// TOML file with defaults for any of these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub ensemble: Option<EnsembleKind>,
    /// Dimension, or a comma-separated list for trend tables.
    #[arg(short = 'N', long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Laguerre parameter ν.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Jacobi parameter a.
    #[arg(long)]
    pub a: Option<f64>,
    /// Jacobi parameter b.
    #[arg(long)]
    pub b: Option<f64>,
    /// Edge index (profile) or largest edge index (softedge).
    #[arg(short = 'r', long = "r")]
    pub r: Option<usize>,
    /// Evaluation grid `min:max:step`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Multiplicity k (Hermite) or κ (Laguerre, Jacobi).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Time scale of the Hermite and Laguerre densities.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "burn-in")]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thinning: Option<usize>,
    /// Independent chains; seeds derived from `--seed`.
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Airy zeros to tabulate instead of a grid.
    #[arg(long)]
    pub zeros: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "tol-inverse")]
    pub tol_inverse: Option<f64>,
    #[arg(long = "tol-spectrum")]
    pub tol_spectrum: Option<f64>,
    #[arg(long = "tol-edge")]
    pub tol_edge: Option<f64>,
    #[arg(long = "tol-z")]
    pub tol_z: Option<f64>,
    /// Exit with code 3 when any tolerance fails.
    #[arg(long)]
    #[serde(default)]
    pub check: bool,
}

impl Options {
    fn merge(self, file: Options) -> Options {
        Options {
            config: self.config,
            ensemble: self.ensemble.or(file.ensemble),
            n_list: self.n_list.or(file.n_list),
            nu: self.nu.or(file.nu),
            a: self.a.or(file.a),
            b: self.b.or(file.b),
            r: self.r.or(file.r),
            grid: self.grid.or(file.grid),
            beta: self.beta.or(file.beta),
            t: self.t.or(file.t),
            samples: self.samples.or(file.samples),
            burn_in: self.burn_in.or(file.burn_in),
            thinning: self.thinning.or(file.thinning),
            chains: self.chains.or(file.chains),
            seed: self.seed.or(file.seed),
            zeros: self.zeros.or(file.zeros),
            format: self.format.or(file.format),
            out: self.out.or(file.out),
            tol_inverse: self.tol_inverse.or(file.tol_inverse),
            tol_spectrum: self.tol_spectrum.or(file.tol_spectrum),
            tol_edge: self.tol_edge.or(file.tol_edge),
            tol_z: self.tol_z.or(file.tol_z),
            check: self.check || file.check,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Grid, UsageError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || UsageError(format!("grid '{s}' must be min:max:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let grid = Grid { min: v[0], max: v[1], step: v[2] };
        if !(grid.step > 0.0 && grid.max >= grid.min && grid.min.is_finite() && grid.max.is_finite()) {
            return Err(bad());
        }
        if (grid.max - grid.min) / grid.step > 1e7 {
            return Err(UsageError(format!("grid '{s}' has too many points")));
        }
        Ok(grid)
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|k| self.min + k as f64 * self.step).collect()
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ensemble: EnsembleKind,
    pub n_list: Option<Vec<usize>>,
    pub nu: f64,
    pub a: f64,
    pub b: f64,
    pub r: Option<usize>,
    pub grid: Option<Grid>,
    pub beta: f64,
    pub t: f64,
    pub samples: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub chains: usize,
    pub seed: u64,
    pub zeros: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tol_inverse: f64,
    pub tol_spectrum: f64,
    pub tol_edge: f64,
    pub tol_z: f64,
    pub check: bool,
}

impl RunConfig {
    pub fn resolve(flags: Options) -> Result<RunConfig, UsageError> {
        let file = match &flags.config {
            Some(path) => read_config(path)?,
            None => Options::default(),
        };
        let o = flags.merge(file);
        if let Some(list) = &o.n_list {
            if list.is_empty() {
                return Err(UsageError("N list must be nonempty".into()));
            }
        }
        let grid = o.grid.as_deref().map(Grid::parse).transpose()?;
        Ok(RunConfig {
            ensemble: o.ensemble.unwrap_or(EnsembleKind::Hermite),
            n_list: o.n_list,
            nu: o.nu.unwrap_or(1.0),
            a: o.a.unwrap_or(1.0),
            b: o.b.unwrap_or(1.0),
            r: o.r,
            grid,
            beta: o.beta.unwrap_or(1e4),
            t: o.t.unwrap_or(1.0),
            samples: o.samples.unwrap_or(100_000),
            burn_in: o.burn_in.unwrap_or(10_000),
            thinning: o.thinning.unwrap_or(10),
            chains: o.chains.unwrap_or(1),
            seed: o.seed.unwrap_or(0),
            zeros: o.zeros,
            format: o.format.unwrap_or(Format::Csv),
            out: o.out,
            tol_inverse: o.tol_inverse.unwrap_or(1e-8),
            tol_spectrum: o.tol_spectrum.unwrap_or(1e-8),
            tol_edge: o.tol_edge.unwrap_or(1e-3),
            tol_z: o.tol_z.unwrap_or(4.0),
            check: o.check,
        })
    }

    pub fn ensemble(&self) -> Ensemble {
        match self.ensemble {
            EnsembleKind::Hermite => Ensemble::Hermite,
            EnsembleKind::Laguerre => Ensemble::Laguerre { nu: self.nu },
            EnsembleKind::JacobiTrig => Ensemble::JacobiTrig { a: self.a, b: self.b },
            EnsembleKind::Jacobi => Ensemble::JacobiPlain { a: self.a, b: self.b },
        }
    }

    /// The single dimension for commands that take one `N`.
    pub fn single_n(&self, default: usize) -> Result<usize, UsageError> {
        match self.n_list.as_deref() {
            None => Ok(default),
            Some([n]) => Ok(*n),
            Some(_) => Err(UsageError("this command takes a single N".into())),
        }
    }

    pub fn n_list_or(&self, default: &[usize]) -> Vec<usize> {
        self.n_list.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn spec(&self, n: usize) -> freeze_rmt::Result<EnsembleSpec> {
        EnsembleSpec::new(self.ensemble(), n)
    }

    pub fn out_path(&self, command: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(format!("freeze-rmt-{command}.{}", self.format.extension())))
    }
}

fn read_config(path: &Path) -> Result<Options, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| UsageError(format!("malformed config {}: {e}", path.display())))
}
