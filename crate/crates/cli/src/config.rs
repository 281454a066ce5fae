//! Command-line flags, the optional TOML config file and their merge into a
//! [`RunConfig`]. Precedence is flags, then file, then built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::CliError;
use crate::grid::{parse_int_list, parse_time_list, parse_usize_list};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "tasep",
    version,
    about = "Exact formulas, simulation and identity checks for the TASEP with second class particles"
)]
pub struct Cli {
    /// Worker threads (defaults to TASEP_THREADS, then the number of cores).
    #[arg(long, global = true, env = "TASEP_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact event probabilities.
    Exact(ExactArgs),
    /// Monte Carlo estimates from Gillespie paths.
    Simulate(SimulateArgs),
    /// Master-equation probabilities by uniformization.
    Oracle(OracleArgs),
    /// Exact, oracle and Monte Carlo values side by side.
    Compare(CompareArgs),
    /// Algebraic identity checks at random spectral points.
    Identities(IdentityArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct GridArgs {
    /// Step initial condition Y = (1, ..., N).
    #[arg(long, conflicts_with = "y")]
    pub step: bool,
    /// Particle counts for the step initial condition, e.g. 3 or 1..4.
    #[arg(short = 'N', value_name = "LIST")]
    pub particles: Option<String>,
    /// Explicit initial positions, e.g. 1,3,4.
    #[arg(short = 'Y', value_name = "LIST", allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Block lengths k (default: 0..N).
    #[arg(short = 'k', value_name = "LIST")]
    pub k: Option<String>,
    /// Anchor sites x, e.g. 1,2 or -1..5 (default: a window around the initial block).
    #[arg(short = 'x', value_name = "LIST", allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Times t (default: 1).
    #[arg(short = 't', value_name = "LIST")]
    pub t: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Default, Clone)]
pub struct OutputArgs {
    /// TOML file with defaults for any of these options.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to a file instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Default, Clone)]
pub struct McArgs {
    /// Number of Monte Carlo paths per (N, k, t).
    #[arg(short = 'n', value_name = "PATHS")]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, hide = true, allow_hyphen_values = true)]
    pub perturb: Option<i64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Admissible truncation error.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub mc: McArgs,
    /// Largest admissible |exact - oracle|.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Shift every weight exponent of the exact formula (harness self-test).
    #[arg(long, hide = true, allow_hyphen_values = true)]
    pub perturb: Option<i64>,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random spectral points per (identity, N, k).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Largest admissible relative error.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Largest N in the sweep.
    #[arg(long = "max-n")]
    pub max_n: Option<usize>,
    /// Break one closed form on purpose (harness self-test).
    #[arg(long, hide = true)]
    pub mutate: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A list given either as a string such as `"0..3"` or as a TOML array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    Text(String),
    Int(i64),
    Float(f64),
    Ints(Vec<i64>),
    Floats(Vec<f64>),
}

impl ListValue {
    fn text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        match self {
            ListValue::Text(s) => s.clone(),
            ListValue::Int(v) => v.to_string(),
            ListValue::Float(v) => v.to_string(),
            ListValue::Ints(v) => join(v.iter().map(i64::to_string).collect()),
            ListValue::Floats(v) => join(v.iter().map(f64::to_string).collect()),
        }
    }
}

/// Config file contents; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub step: Option<bool>,
    pub particles: Option<ListValue>,
    pub y: Option<ListValue>,
    pub k: Option<ListValue>,
    pub x: Option<ListValue>,
    pub t: Option<ListValue>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub trials: Option<usize>,
    pub max_n: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))
    }

    fn load_opt(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(FileConfig::default()), FileConfig::load)
    }
}

/// Where the particles start.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    /// `Y = (1, ..., N)` for each listed `N`.
    Step(Vec<usize>),
    Explicit(Vec<i64>),
}

/// Fully resolved options of a grid command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub initial: Initial,
    pub ks: Option<Vec<usize>>,
    pub xs: Option<Vec<i64>>,
    pub ts: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    pub perturb: i64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Defaults that differ between commands.
#[derive(Debug, Clone, Default)]
pub struct GridDefaults {
    pub particles: Option<Vec<usize>>,
    pub ts: Option<Vec<f64>>,
}

impl GridDefaults {
    /// The compare command runs a small step-initial grid when given nothing.
    pub fn compare() -> Self {
        GridDefaults {
            particles: Some(vec![1, 2, 3]),
            ts: Some(vec![0.5, 1.0]),
        }
    }
}

pub fn resolve_grid(
    grid: &GridArgs,
    mc: Option<&McArgs>,
    tol: Option<f64>,
    perturb: Option<i64>,
    defaults: GridDefaults,
) -> Result<RunConfig, CliError> {
    let file = FileConfig::load_opt(grid.out.config.as_deref())?;
    let pick = |flag: &Option<String>, from_file: &Option<ListValue>| {
        flag.clone()
            .or_else(|| from_file.as_ref().map(ListValue::text))
    };

    let initial = if grid.step || grid.y.is_some() || grid.particles.is_some() {
        initial_from(grid.step, grid.particles.clone(), grid.y.clone())?
    } else if file.step.is_some() || file.y.is_some() || file.particles.is_some() {
        initial_from(
            file.step.unwrap_or(false),
            file.particles.as_ref().map(ListValue::text),
            file.y.as_ref().map(ListValue::text),
        )?
    } else if let Some(ns) = defaults.particles {
        Initial::Step(ns)
    } else {
        return Err(CliError::usage(
            "give --step with -N, or explicit positions with -Y",
        ));
    };

    let ks = pick(&grid.k, &file.k)
        .map(|s| parse_usize_list(&s))
        .transpose()?;
    let xs = pick(&grid.x, &file.x)
        .map(|s| parse_int_list(&s))
        .transpose()?;
    let ts = match pick(&grid.t, &file.t) {
        Some(s) => parse_time_list(&s)?,
        None => defaults.ts.unwrap_or_else(|| vec![1.0]),
    };
    let samples = mc
        .and_then(|m| m.samples)
        .or(file.samples)
        .unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::usage("-n must be at least 1"));
    }
    let tol = tol.or(file.tol).unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::usage(format!(
            "--tol must lie in (0, 1), got {tol}"
        )));
    }
    let config = RunConfig {
        initial,
        ks,
        xs,
        ts,
        samples,
        seed: mc.and_then(|m| m.seed).or(file.seed).unwrap_or(0),
        tol,
        perturb: perturb.unwrap_or(0),
        format: grid.out.format.or(file.format).unwrap_or(Format::Csv),
        output: grid.out.output.clone().or(file.output),
    };
    config.validate()?;
    Ok(config)
}

fn initial_from(
    step: bool,
    particles: Option<String>,
    y: Option<String>,
) -> Result<Initial, CliError> {
    match (step, particles, y) {
        (true, _, Some(_)) => Err(CliError::usage("--step and -Y are mutually exclusive")),
        (_, Some(n), None) => {
            let ns = parse_usize_list(&n)?;
            Ok(Initial::Step(ns))
        }
        (true, None, None) => Err(CliError::usage("--step needs -N")),
        (false, n, Some(y)) => {
            let y = parse_int_list(&y)?;
            if let Some(n) = n {
                if parse_usize_list(&n)? != vec![y.len()] {
                    return Err(CliError::usage("-N disagrees with the length of -Y"));
                }
            }
            Ok(Initial::Explicit(y))
        }
        (false, None, None) => Err(CliError::usage("no initial condition given")),
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let max_n = match &self.initial {
            Initial::Step(ns) => {
                if ns.is_empty() || ns.contains(&0) {
                    return Err(CliError::usage("-N must list positive particle counts"));
                }
                *ns.iter().max().unwrap()
            }
            Initial::Explicit(y) => {
                if y.is_empty() || y.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CliError::usage("-Y must be strictly increasing"));
                }
                y.len()
            }
        };
        if max_n > tasep_core::model::DEFAULT_MAX_PARTICLES {
            return Err(CliError::usage(format!(
                "N={max_n} exceeds the cap of {}",
                tasep_core::model::DEFAULT_MAX_PARTICLES
            )));
        }
        if let Some(ks) = &self.ks {
            let min_n = match &self.initial {
                Initial::Step(ns) => *ns.iter().min().unwrap(),
                Initial::Explicit(y) => y.len(),
            };
            if let Some(&k) = ks.iter().find(|&&k| k > min_n) {
                return Err(CliError::usage(format!("k={k} exceeds N={min_n}")));
            }
        }
        if self.ts.is_empty() {
            return Err(CliError::usage("-t needs at least one time"));
        }
        Ok(())
    }
}

/// Resolved options of the identities command.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityConfig {
    pub seed: u64,
    pub trials: usize,
    pub threshold: f64,
    pub max_n: usize,
    pub mutate: bool,
    pub format: Format,
    pub output: Option<PathBuf>,
}

pub fn resolve_identities(args: &IdentityArgs) -> Result<IdentityConfig, CliError> {
    let file = FileConfig::load_opt(args.out.config.as_deref())?;
    let cfg = IdentityConfig {
        seed: args.seed.or(file.seed).unwrap_or(0),
        trials: args.trials.or(file.trials).unwrap_or(100),
        threshold: args
            .threshold
            .or(file.threshold)
            .unwrap_or(tasep_core::identities::DEFAULT_THRESHOLD),
        max_n: args
            .max_n
            .or(file.max_n)
            .unwrap_or(tasep_core::identities::SUITE_MAX_N),
        mutate: args.mutate,
        format: args.out.format.or(file.format).unwrap_or(Format::Json),
        output: args.out.output.clone().or(file.output),
    };
    if cfg.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    if !(2..=8).contains(&cfg.max_n) {
        return Err(CliError::usage("--max-n must lie in 2..=8"));
    }
    if cfg.threshold.is_nan() || cfg.threshold < 0.0 {
        return Err(CliError::usage("--threshold must be nonnegative"));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn grid(args: &[&str]) -> GridArgs {
        #[derive(Parser)]
        struct Wrap {
            #[command(flatten)]
            grid: GridArgs,
        }
        let mut full = vec!["x"];
        full.extend_from_slice(args);
        Wrap::try_parse_from(full).unwrap().grid
    }

    #[test]
    fn flags_resolve() {
        let cfg = resolve_grid(
            &grid(&["--step", "-N", "3", "-k", "1,2", "-x", "-1..1", "-t", "0.5"]),
            None,
            None,
            None,
            GridDefaults::default(),
        )
        .unwrap();
        assert_eq!(cfg.initial, Initial::Step(vec![3]));
        assert_eq!(cfg.ks, Some(vec![1, 2]));
        assert_eq!(cfg.xs, Some(vec![-1, 0, 1]));
        assert_eq!(cfg.ts, vec![0.5]);
        assert_eq!(cfg.format, Format::Csv);
    }

    #[test]
    fn usage_errors() {
        let d = GridDefaults::default;
        assert!(resolve_grid(&grid(&[]), None, None, None, d()).is_err());
        assert!(resolve_grid(&grid(&["--step"]), None, None, None, d()).is_err());
        assert!(resolve_grid(&grid(&["-Y", "3,1"]), None, None, None, d()).is_err());
        assert!(resolve_grid(&grid(&["-N", "2", "-k", "3"]), None, None, None, d()).is_err());
        assert!(resolve_grid(&grid(&["-N", "2", "-Y", "1,2,3"]), None, None, None, d()).is_err());
        assert!(resolve_grid(&grid(&["-N", "2"]), None, Some(2.0), None, d()).is_err());
    }

    #[test]
    fn file_fills_gaps_and_flags_win() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            file,
            "y = [1, 3, 4]\nk = \"1\"\nt = [0.5, 2.0]\nformat = \"json\"\nseed = 9"
        )
        .unwrap();
        let path = file.path().to_str().unwrap();
        let cfg = resolve_grid(
            &grid(&["--config", path, "-t", "1"]),
            None,
            None,
            None,
            GridDefaults::default(),
        )
        .unwrap();
        assert_eq!(cfg.initial, Initial::Explicit(vec![1, 3, 4]));
        assert_eq!(cfg.ks, Some(vec![1]));
        assert_eq!(cfg.ts, vec![1.0]);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.seed, 9);
        let cfg = resolve_grid(
            &grid(&["--config", path, "--step", "-N", "2"]),
            None,
            None,
            None,
            GridDefaults::default(),
        )
        .unwrap();
        assert_eq!(cfg.initial, Initial::Step(vec![2]));
    }

    #[test]
    fn bad_file_is_usage_error() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "bogus = 1").unwrap();
        let path = file.path().to_str().unwrap();
        let err = resolve_grid(
            &grid(&["--config", path]),
            None,
            None,
            None,
            GridDefaults::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn compare_defaults() {
        let cfg = resolve_grid(&grid(&[]), None, None, None, GridDefaults::compare()).unwrap();
        assert_eq!(cfg.initial, Initial::Step(vec![1, 2, 3]));
        assert_eq!(cfg.ts, vec![0.5, 1.0]);
    }
}
