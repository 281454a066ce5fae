//! The five subcommands. Each returns a table and whether every verification
//! it performs passed.

use rayon::prelude::*;
use tasep_core::exact::{self, ExactResult, Perturbation};
use tasep_core::identities::{run_suite_with, Mutation, SuiteConfig};
use tasep_core::model::{ParticleConfig, SpeciesSequence};
use tasep_core::simulator::{mc_event_probabilities, OracleParams, TransientDistribution};

use crate::config::{IdentityConfig, Initial, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Largest admissible |z| in `compare`.
pub const Z_LIMIT: f64 = 5.0;

pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

/// One `(N, k, t)` combination with its anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub n: usize,
    pub y: Vec<i64>,
    pub step: bool,
    pub k: usize,
    pub t: f64,
    pub xs: Vec<i64>,
}

impl Group {
    fn initial(&self) -> Result<ParticleConfig, CliError> {
        let word =
            SpeciesSequence::nu(self.k, self.n).map_err(|e| CliError::usage(e.to_string()))?;
        ParticleConfig::new(self.y.clone(), word).map_err(|e| CliError::usage(e.to_string()))
    }

    fn exact(&self, x: i64, perturb: i64) -> Result<ExactResult, CliError> {
        let p = Perturbation {
            exponent_shift: perturb,
        };
        let r = if self.step {
            exact::step_initial_probability_perturbed(self.n, self.k, x, self.t, p)
        } else {
            exact::event_probability_perturbed(&self.y, self.k, x, self.t, p)
        };
        r.map_err(CliError::resource)
    }

    fn key(&self, x: i64) -> Vec<Cell> {
        vec![self.n.into(), self.k.into(), x.into(), self.t.into()]
    }
}

/// Anchor window `[y_1 - ceil(3t), y_1 + N + ceil(3t)]`.
pub fn default_xs(y: &[i64], t: f64) -> Vec<i64> {
    let pad = (3.0 * t).ceil() as i64;
    ((y[0] - pad)..=(y[0] + y.len() as i64 + pad)).collect()
}

/// Expands a config into groups, ordered by `N`, then `k`, then `t`.
pub fn groups(cfg: &RunConfig) -> Vec<Group> {
    let initials: Vec<(Vec<i64>, bool)> = match &cfg.initial {
        Initial::Step(ns) => ns
            .iter()
            .map(|&n| ((1..=n as i64).collect(), true))
            .collect(),
        Initial::Explicit(y) => vec![(y.clone(), false)],
    };
    let mut out = Vec::new();
    for (y, step) in initials {
        let n = y.len();
        let ks = cfg.ks.clone().unwrap_or_else(|| (0..=n).collect());
        for k in ks {
            for &t in &cfg.ts {
                let xs = cfg.xs.clone().unwrap_or_else(|| default_xs(&y, t));
                out.push(Group {
                    n,
                    y: y.clone(),
                    step,
                    k,
                    t,
                    xs,
                });
            }
        }
    }
    out
}

fn collect_rows(
    cfg: &RunConfig,
    columns: &[&'static str],
    f: impl Fn(&Group) -> Result<Vec<(Vec<Cell>, bool)>, CliError> + Sync + Send,
) -> Result<Outcome, CliError> {
    let per_group: Vec<Vec<(Vec<Cell>, bool)>> =
        groups(cfg).par_iter().map(f).collect::<Result<_, _>>()?;
    let mut table = Table::new(columns);
    let mut passed = true;
    for (row, ok) in per_group.into_iter().flatten() {
        passed &= ok;
        table.push(row);
    }
    Ok(Outcome { table, passed })
}

pub fn exact(cfg: &RunConfig) -> Result<Outcome, CliError> {
    collect_rows(cfg, &["N", "k", "x", "t", "value", "method"], |g| {
        g.xs.iter()
            .map(|&x| {
                let r = g.exact(x, cfg.perturb)?;
                let mut row = g.key(x);
                row.extend([r.value.into(), r.method.as_str().into()]);
                Ok((row, true))
            })
            .collect()
    })
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    collect_rows(
        cfg,
        &["N", "k", "x", "t", "p_hat", "stderr", "n_samples"],
        |g| {
            let est = mc_event_probabilities(&g.initial()?, g.k, &g.xs, g.t, cfg.samples, cfg.seed)
                .map_err(CliError::resource)?;
            Ok(g.xs
                .iter()
                .zip(est)
                .map(|(&x, e)| {
                    let mut row = g.key(x);
                    row.extend([e.p_hat.into(), e.stderr.into(), e.n_samples.into()]);
                    (row, true)
                })
                .collect())
        },
    )
}

fn transient(g: &Group, tol: f64) -> Result<(TransientDistribution, OracleParams), CliError> {
    let params = OracleParams::adaptive(g.n, g.t, tol).map_err(CliError::resource)?;
    let dist =
        TransientDistribution::compute(&g.initial()?, g.t, &params).map_err(CliError::resource)?;
    Ok((dist, params))
}

pub fn oracle(cfg: &RunConfig) -> Result<Outcome, CliError> {
    collect_rows(
        cfg,
        &["N", "k", "x", "t", "value", "jump_cap", "truncation_bound"],
        |g| {
            let (dist, params) = transient(g, cfg.tol)?;
            g.xs.iter()
                .map(|&x| {
                    let p = dist.event_probability(g.k, x).map_err(CliError::resource)?;
                    let mut row = g.key(x);
                    row.extend([
                        p.into(),
                        params.jump_cap.into(),
                        dist.truncation_bound().into(),
                    ]);
                    Ok((row, true))
                })
                .collect()
        },
    )
}

/// Joins the three evaluation paths. The oracle runs at half of `tol` so the
/// comparison threshold `tol` leaves room for rounding.
pub fn compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let columns = [
        "N",
        "k",
        "x",
        "t",
        "exact",
        "oracle",
        "mc_phat",
        "mc_stderr",
        "abs_err",
        "z",
    ];
    collect_rows(cfg, &columns, |g| {
        let (dist, _) = transient(g, cfg.tol / 2.0)?;
        let est = mc_event_probabilities(&g.initial()?, g.k, &g.xs, g.t, cfg.samples, cfg.seed)
            .map_err(CliError::resource)?;
        g.xs.iter()
            .zip(est)
            .map(|(&x, e)| {
                let ex = g.exact(x, cfg.perturb)?;
                let or = dist.event_probability(g.k, x).map_err(CliError::resource)?;
                let abs_err = (ex.raw - or).abs();
                let z = e.z_score(ex.value);
                let ok = ex.in_bounds() && abs_err <= cfg.tol && z.abs() <= Z_LIMIT;
                let mut row = g.key(x);
                row.extend([
                    ex.value.into(),
                    or.into(),
                    e.p_hat.into(),
                    e.stderr.into(),
                    abs_err.into(),
                    z.into(),
                ]);
                Ok((row, ok))
            })
            .collect()
    })
}

pub fn identities(cfg: &IdentityConfig) -> Result<Outcome, CliError> {
    let reports = run_suite_with(SuiteConfig {
        seed: cfg.seed,
        trials: cfg.trials,
        threshold: cfg.threshold,
        max_n: cfg.max_n,
        mutation: cfg.mutate.then_some(Mutation::DiagonalExponent),
    })
    .map_err(CliError::resource)?;
    let mut table = Table::new(&["name", "N", "k", "trials", "max_rel_err", "pass"]);
    let passed = reports.iter().all(|r| r.pass);
    for r in reports {
        table.push(vec![
            r.name.as_str().into(),
            r.n.into(),
            r.k.into(),
            r.trials.into(),
            r.max_rel_err.into(),
            r.pass.into(),
        ]);
    }
    Ok(Outcome { table, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Format;

    fn cfg(initial: Initial) -> RunConfig {
        RunConfig {
            initial,
            ks: None,
            xs: None,
            ts: vec![1.0],
            samples: 1000,
            seed: 0,
            tol: 1e-10,
            perturb: 0,
            format: Format::Csv,
            output: None,
        }
    }

    #[test]
    fn group_expansion_order() {
        let mut c = cfg(Initial::Step(vec![1, 2]));
        c.ts = vec![0.5, 1.0];
        let g = groups(&c);
        let keys: Vec<(usize, usize, f64)> = g.iter().map(|g| (g.n, g.k, g.t)).collect();
        assert_eq!(
            keys,
            vec![
                (1, 0, 0.5),
                (1, 0, 1.0),
                (1, 1, 0.5),
                (1, 1, 1.0),
                (2, 0, 0.5),
                (2, 0, 1.0),
                (2, 1, 0.5),
                (2, 1, 1.0),
                (2, 2, 0.5),
                (2, 2, 1.0)
            ]
        );
        assert_eq!(g[0].xs, vec![-1, 0, 1, 2, 3, 4]);
    }

    #[test]
    fn default_window() {
        assert_eq!(default_xs(&[1, 2, 3], 0.5), (-1..=6).collect::<Vec<_>>());
        assert_eq!(default_xs(&[5, 9], 0.0), vec![5, 6, 7]);
    }

    #[test]
    fn explicit_y_uses_determinant() {
        let mut c = cfg(Initial::Explicit(vec![1, 3, 4]));
        c.ks = Some(vec![1]);
        c.xs = Some(vec![2]);
        c.ts = vec![0.5];
        let out = exact(&c).unwrap();
        assert_eq!(out.table.rows[0][5], Cell::Text("determinant".into()));
        match out.table.rows[0][4] {
            Cell::Float(v) => assert!((v - 0.5 * (-0.5f64).exp()).abs() < 1e-15),
            ref other => panic!("{other:?}"),
        }
    }

    #[test]
    fn compare_flags_perturbation() {
        let mut c = cfg(Initial::Step(vec![2]));
        c.ks = Some(vec![1]);
        assert!(compare(&c).unwrap().passed);
        c.perturb = 1;
        assert!(!compare(&c).unwrap().passed);
    }
}
