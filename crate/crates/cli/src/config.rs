//! Run configuration: a TOML file merged with command-line overrides.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Asymptotic,
}

/// A grid either listed explicitly or given as a range expression.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Expr(String),
}

impl GridSpec {
    /// Expand to values. Accepted expressions: `a,b,c`, `a:b:n` (linear,
    /// inclusive), `log:a:b:n` (geometric) and `gap:a:b:n`, which is geometric
    /// in `1 - x^2` and returns `x = sqrt(1 - gap)`.
    pub fn expand(&self) -> Result<Vec<f64>, String> {
        match self {
            GridSpec::Values(v) => Ok(v.clone()),
            GridSpec::Expr(s) => parse_grid(s),
        }
    }
}

fn num(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number"))
}

fn count(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("'{s}' is not a positive point count")),
    }
}

fn spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn geometric(a: f64, b: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(a > 0.0 && b > 0.0) {
        return Err(format!("geometric grid needs positive ends, got {a} and {b}"));
    }
    Ok(spaced(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect())
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [one] => one.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        [a, b, n] => spaced(num(a)?, num(b)?, count(n)?),
        ["log", a, b, n] => geometric(num(a)?, num(b)?, count(n)?)?,
        ["gap", a, b, n] => geometric(num(a)?, num(b)?, count(n)?)?.into_iter().map(|g| (1.0 - g).sqrt()).collect(),
        _ => return Err(format!("cannot parse grid '{s}'")),
    };
    if values.is_empty() {
        return Err(format!("grid '{s}' is empty"));
    }
    Ok(values)
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub n_max: Option<usize>,
    pub mode: Option<Mode>,
    pub jobs: Option<usize>,
    pub eps: Option<GridSpec>,
    pub p: Option<GridSpec>,
    pub tol: Option<f64>,
    pub interbranch: Option<bool>,
    pub cutoff_pair: Option<[usize; 2]>,
    pub slices: Option<Vec<u32>>,
    pub ell: Option<f64>,
    pub kappa: Option<f64>,
    pub g: Option<f64>,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub n_sites: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        // toml errors already name the line and column
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved configuration, echoed into every output header.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub out: PathBuf,
    pub format: Format,
    pub n_max: usize,
    pub mode: Mode,
    pub jobs: Option<usize>,
    pub eps: Vec<f64>,
    pub p: Vec<f64>,
    pub tol: f64,
    pub interbranch: bool,
    pub cutoff_pair: Option<[usize; 2]>,
    pub slices: Vec<u32>,
    pub ell: f64,
    pub kappa: f64,
    pub g: f64,
    pub t_final: Option<f64>,
    pub dt: f64,
    pub n_sites: usize,
}

/// Per-subcommand defaults, overridden by the file, overridden by flags.
pub struct Defaults {
    pub n_max: usize,
    pub mode: Mode,
    pub eps: &'static str,
    pub p: &'static str,
}

pub fn defaults(subcommand: &str) -> Defaults {
    match subcommand {
        "spectrum" => Defaults { n_max: 10, mode: Mode::Exact, eps: "0,0.5,0.9", p: "0.1" },
        "steady" => Defaults { n_max: 500, mode: Mode::Asymptotic, eps: "0.5", p: "0.3,0.2,0.12,0.08,0.05,0.03" },
        "observables" => Defaults { n_max: 400, mode: Mode::Exact, eps: "gap:1e-3:1e-1:8", p: "0.1" },
        "meanfield" => Defaults { n_max: 2, mode: Mode::Exact, eps: "0.2:1.4:5", p: "0.1" },
        "toy" => Defaults { n_max: 400, mode: Mode::Asymptotic, eps: "0.5", p: "0.05,0.1,0.2" },
        _ => Defaults { n_max: 200, mode: Mode::Exact, eps: "0.5", p: "0.1" },
    }
}

/// Flags that override file values.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Drive grid: `a,b,c`, `a:b:n`, `log:a:b:n` or `gap:a:b:n`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps: Option<String>,
    /// Asymmetry grid, same syntax as `--eps`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Steady-state residual bound relative to the largest rate.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

fn grid(name: &str, flag: &Option<String>, file: &Option<GridSpec>, default: &str) -> Result<Vec<f64>, CliError> {
    let spec = match (flag, file) {
        (Some(s), _) => GridSpec::Expr(s.clone()),
        (None, Some(g)) => g.clone(),
        (None, None) => GridSpec::Expr(default.to_string()),
    };
    let v = spec.expand().map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    if v.is_empty() {
        return Err(CliError::Config(format!("{name}: grid is empty")));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(CliError::Config(format!("{name}: non-finite grid value {x}")));
    }
    Ok(v)
}

impl RunConfig {
    pub fn resolve(subcommand: &str, flags: &Overrides) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let d = defaults(subcommand);
        let cfg = RunConfig {
            subcommand: subcommand.to_string(),
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            n_max: flags.n_max.or(file.n_max).unwrap_or(d.n_max),
            mode: flags.mode.or(file.mode).unwrap_or(d.mode),
            jobs: flags.jobs.or(file.jobs),
            eps: grid("eps", &flags.eps, &file.eps, d.eps)?,
            p: grid("p", &flags.p, &file.p, d.p)?,
            tol: flags.tol.or(file.tol).unwrap_or(blockade_core::steady::DEFAULT_RESIDUAL_TOL),
            interbranch: file.interbranch.unwrap_or(false),
            cutoff_pair: file.cutoff_pair,
            slices: file.slices.unwrap_or_else(|| vec![40, 80, 120]),
            ell: file.ell.unwrap_or(1.0),
            kappa: file.kappa.unwrap_or(0.2),
            g: file.g.unwrap_or(1.0),
            t_final: file.t_final,
            dt: file.dt.unwrap_or(1e-3),
            n_sites: file.n_sites.unwrap_or(400),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.n_max < 2 {
            return bad(format!("n_max must be at least 2, got {}", self.n_max));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0) {
                return bad(format!("t_final must be positive, got {t}"));
            }
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        if let Some([a, b]) = self.cutoff_pair {
            if a < 2 || b < 2 {
                return bad(format!("cutoff_pair entries must be at least 2, got [{a}, {b}]"));
            }
        }
        if self.slices.is_empty() {
            return bad("slices must be nonempty".into());
        }
        Ok(())
    }
}
