//! Gillespie path sampling and a master-equation oracle by uniformization.
//!
//! Every particle has at most one available move, so the total jump rate of
//! any configuration is at most `N`. The oracle uses `Lambda = N` as the
//! uniformization rate: the law at time `t` is the Poisson(`N t`) mixture of
//! powers of the kernel `U = I + Q / N`.
//!
//! Each jump raises the depth `sum_i (x_i - y_i) + inv(word)` by exactly one,
//! where `inv` counts pairs `2 ... 1` that have been undone. After `j` kernel
//! steps only states of depth at most `j` carry mass, so truncating the
//! mixture at `jump_cap` only needs states of depth `<= jump_cap` and the
//! dropped mass is exactly `P(Poisson(N t) > jump_cap)`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, Move, ParticleConfig};

/// Default admissible truncation error of the oracle.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-10;
/// Default bound on the number of enumerated oracle states.
pub const DEFAULT_MAX_STATES: usize = 4_000_000;

const REPLICA_CHUNK: u64 = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("initial labels {labels} are not the word nu({k}, {n})")]
    LabelsNotNu { labels: String, k: usize, n: usize },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    #[error("jump cap {jump_cap} leaves a truncation bound {bound:e} above tol {tol:e}")]
    JumpCapTooSmall {
        jump_cap: usize,
        bound: f64,
        tol: f64,
    },
    #[error("oracle state space exceeds the budget of {budget} states")]
    TooManyStates { budget: usize },
}

/// Monte Carlo estimate of a probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub n_samples: u64,
}

impl ProbEstimate {
    pub fn from_counts(hits: u64, n_samples: u64) -> Self {
        assert!(n_samples > 0 && hits <= n_samples);
        let p_hat = hits as f64 / n_samples as f64;
        ProbEstimate {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt(),
            n_samples,
        }
    }

    /// Standard error floored at `1 / n`, so estimates of exactly 0 or 1 still
    /// give a finite scale.
    pub fn effective_stderr(&self) -> f64 {
        self.stderr.max(1.0 / self.n_samples as f64)
    }

    /// `(p_hat - reference) / effective_stderr`.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.p_hat - reference) / self.effective_stderr()
    }
}

/// Truncation settings for [`master_equation_probability`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    /// Largest number of uniformized steps kept in the Poisson mixture.
    pub jump_cap: usize,
    /// Admissible truncation error.
    pub tol: f64,
    /// Enumeration budget; exceeding it is a resource error.
    pub max_states: usize,
}

impl OracleParams {
    /// Smallest `jump_cap` whose Poisson tail bound meets `tol` for `n`
    /// particles up to time `t`.
    pub fn adaptive(n: usize, t: f64, tol: f64) -> Result<Self, SimError> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(SimError::InvalidTolerance(tol));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(ModelError::InvalidTime(t).into());
        }
        let lambda = n as f64 * t;
        let mut jump_cap = lambda.floor() as usize;
        while poisson_tail(lambda, jump_cap) > tol {
            jump_cap += 1;
        }
        Ok(OracleParams {
            jump_cap,
            tol,
            max_states: DEFAULT_MAX_STATES,
        })
    }

    /// Checks `P(Poisson(n t) > jump_cap) <= tol`.
    pub fn validate(&self, n: usize, t: f64) -> Result<(), SimError> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(SimError::InvalidTolerance(self.tol));
        }
        let bound = poisson_tail(n as f64 * t, self.jump_cap);
        if bound > self.tol {
            return Err(SimError::JumpCapTooSmall {
                jump_cap: self.jump_cap,
                bound,
                tol: self.tol,
            });
        }
        Ok(())
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `e^{-lambda} lambda^j / j!`, evaluated in log space.
pub fn poisson_pmf(lambda: f64, j: usize) -> f64 {
    if lambda == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (j as f64 * lambda.ln() - lambda - ln_factorial(j)).exp()
}

/// `P(Poisson(lambda) > cap)`, summed upward from `cap + 1` so small tails
/// keep full relative accuracy.
pub fn poisson_tail(lambda: f64, cap: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let mut j = cap + 1;
    let mut term = poisson_pmf(lambda, j);
    let mut sum = 0.0;
    loop {
        sum += term;
        j += 1;
        let ratio = lambda / j as f64;
        term *= ratio;
        if ratio < 0.5 && term < 1e-17 * sum || term == 0.0 {
            break;
        }
        if j > cap + 1_000_000 {
            break;
        }
    }
    sum.min(1.0)
}

fn check_nu(initial: &ParticleConfig, k: usize) -> Result<(), SimError> {
    let n = initial.len();
    if k > n {
        return Err(ModelError::BlockOutOfRange { k, n }.into());
    }
    if !initial.labels().is_nu(k) {
        return Err(SimError::LabelsNotNu {
            labels: initial.labels().to_string(),
            k,
            n,
        });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<(), SimError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidTime(t).into())
    }
}

/// Configuration at time `t` of one continuous-time path started at `initial`.
///
/// Every eligible move fires at rate one: the holding time is exponential with
/// rate equal to the number of eligible moves and the move is drawn uniformly.
pub fn simulate_path<R: Rng + ?Sized>(
    initial: &ParticleConfig,
    t: f64,
    rng: &mut R,
) -> ParticleConfig {
    let mut state = initial.clone();
    let mut moves: Vec<Move> = Vec::with_capacity(state.len());
    let mut clock = 0.0;
    loop {
        state.eligible_moves_into(&mut moves);
        let rate = moves.len() as f64;
        // 1 - u lies in (0, 1], so the logarithm is finite
        let u: f64 = rng.random();
        clock += -(1.0 - u).ln() / rate;
        if clock > t {
            return state;
        }
        let pick = rng.random_range(0..moves.len());
        state.apply_in_place(moves[pick]);
    }
}

/// SplitMix64 finalizer applied to `seed` and the replica index; gives each
/// replica its own stream regardless of how replicas are spread over threads.
pub fn replica_seed(seed: u64, replica: u64) -> u64 {
    let mut z = seed ^ replica.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Estimates `P(E_{t,k,x})` for each `x` in `xs` from the same `n` paths.
pub fn mc_event_probabilities(
    initial: &ParticleConfig,
    k: usize,
    xs: &[i64],
    t: f64,
    n: u64,
    seed: u64,
) -> Result<Vec<ProbEstimate>, SimError> {
    check_nu(initial, k)?;
    check_time(t)?;
    if n == 0 {
        return Err(SimError::NoSamples);
    }
    let chunks = n.div_ceil(REPLICA_CHUNK);
    let hits = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut hits = vec![0u64; xs.len()];
            for replica in c * REPLICA_CHUNK..((c + 1) * REPLICA_CHUNK).min(n) {
                let mut rng = Pcg64Mcg::seed_from_u64(replica_seed(seed, replica));
                let end = simulate_path(initial, t, &mut rng);
                for (h, &x) in hits.iter_mut().zip(xs) {
                    if end.event_holds(k, x).expect("k checked above") {
                        *h += 1;
                    }
                }
            }
            hits
        })
        .reduce(
            || vec![0u64; xs.len()],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(a, b)| *a += b);
                a
            },
        );
    Ok(hits
        .into_iter()
        .map(|h| ProbEstimate::from_counts(h, n))
        .collect())
}

/// Estimates `P(E_{t,k,x})` from `n` independent paths. Deterministic in `seed`.
pub fn mc_event_probability(
    initial: &ParticleConfig,
    k: usize,
    x: i64,
    t: f64,
    n: u64,
    seed: u64,
) -> Result<ProbEstimate, SimError> {
    Ok(mc_event_probabilities(initial, k, &[x], t, n, seed)?[0])
}

/// Uniformized one-step kernel over the states of depth at most `jump_cap`.
///
/// States are numbered in breadth-first order, so depth is nondecreasing in
/// the index. Moves leaving the enumerated set are routed to a sink.
#[derive(Debug, Clone)]
pub struct UniformizedKernel {
    states: Vec<ParticleConfig>,
    /// `depth_start[d]` is the first index of depth `d`; one extra entry at the end.
    depth_start: Vec<usize>,
    /// CSR successor lists; `usize::MAX` marks the sink.
    succ_start: Vec<usize>,
    succ: Vec<usize>,
    rate: f64,
}

const SINK: usize = usize::MAX;

impl UniformizedKernel {
    pub fn build(
        initial: &ParticleConfig,
        jump_cap: usize,
        max_states: usize,
    ) -> Result<Self, SimError> {
        let mut index: HashMap<ParticleConfig, usize> = HashMap::new();
        let mut states = vec![initial.clone()];
        index.insert(initial.clone(), 0);
        let mut depth_start = vec![0, 1];
        let mut succ_start = vec![0];
        let mut succ = Vec::new();
        let mut moves = Vec::new();
        for depth in 0..=jump_cap {
            let (lo, hi) = (depth_start[depth], depth_start[depth + 1]);
            for s in lo..hi {
                states[s].eligible_moves_into(&mut moves);
                for &mv in &moves {
                    if depth == jump_cap {
                        succ.push(SINK);
                        continue;
                    }
                    let mut next = states[s].clone();
                    next.apply_in_place(mv);
                    let id = match index.get(&next) {
                        Some(&id) => id,
                        None => {
                            if states.len() >= max_states {
                                return Err(SimError::TooManyStates { budget: max_states });
                            }
                            let id = states.len();
                            index.insert(next.clone(), id);
                            states.push(next);
                            id
                        }
                    };
                    succ.push(id);
                }
                succ_start.push(succ.len());
            }
            if depth < jump_cap {
                depth_start.push(states.len());
            }
        }
        Ok(UniformizedKernel {
            states,
            depth_start,
            succ_start,
            succ,
            rate: initial.len() as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[ParticleConfig] {
        &self.states
    }

    /// The uniformization rate `N`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Row `s` of the kernel as `(target, probability)` pairs, the sink
    /// reported as `None`. The holding probability comes first.
    pub fn row(&self, s: usize) -> Vec<(Option<usize>, f64)> {
        let out = &self.succ[self.succ_start[s]..self.succ_start[s + 1]];
        let mut row = vec![(Some(s), 1.0 - out.len() as f64 / self.rate)];
        row.extend(
            out.iter()
                .map(|&d| ((d != SINK).then_some(d), 1.0 / self.rate)),
        );
        row
    }

    /// Poisson mixture `sum_{j <= jump_cap} pmf(N t, j) U^j delta_0`.
    pub fn transient(&self, t: f64, jump_cap: usize) -> Vec<f64> {
        let lambda = self.rate * t;
        let n = self.states.len();
        let mut v = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut acc = vec![0.0; n];
        v[0] = 1.0;
        let levels = self.depth_start.len() - 1;
        for j in 0..=jump_cap {
            let live = self.depth_start[(j + 1).min(levels)];
            let w = poisson_pmf(lambda, j);
            for s in 0..live {
                acc[s] += w * v[s];
            }
            if j == jump_cap {
                break;
            }
            let reach = self.depth_start[(j + 2).min(levels)];
            next[..reach].iter_mut().for_each(|x| *x = 0.0);
            for s in 0..live {
                let mass = v[s];
                if mass == 0.0 {
                    continue;
                }
                let out = &self.succ[self.succ_start[s]..self.succ_start[s + 1]];
                next[s] += mass * (1.0 - out.len() as f64 / self.rate);
                let share = mass / self.rate;
                for &d in out {
                    if d != SINK {
                        next[d] += share;
                    }
                }
            }
            std::mem::swap(&mut v, &mut next);
        }
        acc
    }
}

/// Law at time `t` of the chain started at a fixed configuration, truncated
/// with a certified error bound.
#[derive(Debug, Clone)]
pub struct TransientDistribution {
    kernel: UniformizedKernel,
    probs: Vec<f64>,
    bound: f64,
}

impl TransientDistribution {
    pub fn compute(
        initial: &ParticleConfig,
        t: f64,
        params: &OracleParams,
    ) -> Result<Self, SimError> {
        check_time(t)?;
        params.validate(initial.len(), t)?;
        let kernel = UniformizedKernel::build(initial, params.jump_cap, params.max_states)?;
        let probs = kernel.transient(t, params.jump_cap);
        let bound = poisson_tail(initial.len() as f64 * t, params.jump_cap);
        Ok(TransientDistribution {
            kernel,
            probs,
            bound,
        })
    }

    /// Upper bound on the total mass dropped by truncation.
    pub fn truncation_bound(&self) -> f64 {
        self.bound
    }

    pub fn states(&self) -> &[ParticleConfig] {
        self.kernel.states()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of one configuration; zero if unreachable within the cap.
    pub fn probability_of(&self, config: &ParticleConfig) -> f64 {
        self.kernel
            .states
            .iter()
            .position(|s| s == config)
            .map_or(0.0, |i| self.probs[i])
    }

    /// Mass on the event `E_{t,k,x}`.
    pub fn event_probability(&self, k: usize, x: i64) -> Result<f64, SimError> {
        let mut sum = 0.0;
        for (s, &p) in self.kernel.states.iter().zip(&self.probs) {
            if s.event_holds(k, x)? {
                sum += p;
            }
        }
        Ok(sum)
    }
}

/// `P(E_{t,k,x})` from the master equation, with absolute error at most
/// `params.tol`.
pub fn master_equation_probability(
    initial: &ParticleConfig,
    k: usize,
    x: i64,
    t: f64,
    params: &OracleParams,
) -> Result<f64, SimError> {
    check_nu(initial, k)?;
    TransientDistribution::compute(initial, t, params)?.event_probability(k, x)
}
