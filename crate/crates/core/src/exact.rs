//! Exact transition and event probabilities.
//!
//! Every formula here is a determinant or a signed permutation sum of contour
//! moments `I(m, r, t)` from [`crate::bethe`]. The event probability for
//! general initial positions `Y` and word `nu(k, N)` is
//!
//! ```text
//! P(E_{t,k,x}) = det[ I(x - y_i - 1 + j - 1, q_i, t) ]_{i,j = 1..N},
//! q_i = [i <= k] - (N - i) - 1.
//! ```
//!
//! For step initial data `Y = (1, ..., N)` the same quantity collapses to a
//! Hankel determinant of moments with one common weight.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bethe::{BetheError, MomentTable};
use crate::dd::Dd;
use crate::linalg::det_lu_dd;
use crate::perm::{all_permutations, Permutation};

/// Largest `N` accepted by the `N!`-term sums.
pub const PERM_CAP: usize = 9;

/// Slack allowed outside `[0, 1]` before a probability is reported as out of bounds.
pub const PROB_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error(transparent)]
    Moment(#[from] BetheError),
    #[error("N={n} exceeds the permutation-sum cap {cap}")]
    TooManyParticles { n: usize, cap: usize },
    #[error("positions must be nonempty and strictly increasing")]
    BadPositions,
    #[error("X has {x} entries but Y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("block length k={k} is out of range {lo}..={n}")]
    BlockOutOfRange { k: usize, lo: usize, n: usize },
    #[error("N must be at least 1")]
    NoParticles,
}

/// Which algorithm produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PermSum,
    Determinant,
    Hankel,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::PermSum => "perm-sum",
            Method::Determinant => "determinant",
            Method::Hankel => "hankel",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    /// `raw` clamped to `[0, 1]`.
    pub value: f64,
    /// Unclamped value as computed.
    pub raw: f64,
    pub method: Method,
    /// Distinct contour moments evaluated.
    pub moment_evals: usize,
}

impl ExactResult {
    fn new(raw: f64, method: Method, moment_evals: usize) -> Self {
        ExactResult {
            value: raw.clamp(0.0, 1.0) + 0.0,
            raw,
            method,
            moment_evals,
        }
    }

    /// Whether the raw value lies in `[-PROB_SLACK, 1 + PROB_SLACK]`.
    pub fn in_bounds(&self) -> bool {
        (-PROB_SLACK..=1.0 + PROB_SLACK).contains(&self.raw)
    }
}

/// A deliberate error injected into the weight exponents, used to check that
/// comparison harnesses notice a wrong formula. The default changes nothing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    /// Added to every `(1 - xi)` exponent.
    pub exponent_shift: i64,
}

fn check_positions(p: &[i64]) -> Result<(), ExactError> {
    if p.is_empty() || p.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExactError::BadPositions);
    }
    Ok(())
}

fn check_k(k: usize, lo: usize, n: usize) -> Result<(), ExactError> {
    if k < lo || k > n {
        return Err(ExactError::BlockOutOfRange { k, lo, n });
    }
    Ok(())
}

/// Exponent `p_j` of `(1 - xi_j)` attached to variable `j` (1-based) by the
/// closed-form diagonal of `A_sigma`.
fn diag_power(j: usize, k: usize) -> i64 {
    if j <= k {
        j as i64 - 1
    } else {
        j as i64 - 2
    }
}

/// Deterministic sum in permutation rank order, accumulated in double-double.
fn ranked_sum(terms: Vec<Dd>) -> f64 {
    terms.into_iter().sum::<Dd>().to_f64()
}

/// `P_{(Y, nu(k))}((X, nu(k)); t)`: probability of being at positions `X`
/// with unchanged word at time `t`.
///
/// Computed as `sum_sigma sgn(sigma) prod_j I(m_j, e_j, t)` with
/// `m_j = x_{sigma^{-1}(j)} - y_j - 1` and `e_j = p_j - p_{sigma^{-1}(j)}`.
pub fn transition_probability(
    y: &[i64],
    x: &[i64],
    k: usize,
    t: f64,
) -> Result<ExactResult, ExactError> {
    check_positions(y)?;
    check_positions(x)?;
    if x.len() != y.len() {
        return Err(ExactError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let n = y.len();
    check_k(k, 0, n)?;
    if n > PERM_CAP {
        return Err(ExactError::TooManyParticles { n, cap: PERM_CAP });
    }
    let mut table = MomentTable::new(t)?;
    // M[j][i] = I(x_i - y_j - 1, p_j - p_i, t): the factor of variable j when sigma^{-1}(j) = i
    let mut m = vec![Dd::ZERO; n * n];
    for j in 0..n {
        for i in 0..n {
            let r = diag_power(j + 1, k) - diag_power(i + 1, k);
            m[j * n + i] = table.get_dd(x[i] - y[j] - 1, r)?;
        }
    }
    let terms = all_permutations(n)
        .into_iter()
        .map(|sigma| {
            let inv = sigma.inverse();
            let prod = (0..n).fold(Dd::ONE, |p, j| p * m[j * n + inv.at(j)]);
            prod * sigma.sign() as f64
        })
        .collect();
    Ok(ExactResult::new(
        ranked_sum(terms),
        Method::PermSum,
        table.evaluations(),
    ))
}

/// Moment matrix `[I(x - y_i - 1 + j - 1, q_i, t)]` with its evaluation count.
fn event_matrix(
    y: &[i64],
    k: usize,
    x: i64,
    t: f64,
    shift: i64,
) -> Result<(Vec<Dd>, usize), ExactError> {
    check_positions(y)?;
    let n = y.len();
    check_k(k, 0, n)?;
    let mut table = MomentTable::new(t)?;
    let mut m = vec![Dd::ZERO; n * n];
    for i in 0..n {
        let q = (i < k) as i64 - (n - 1 - i) as i64 - 1 + shift;
        for j in 0..n {
            m[i * n + j] = table.get_dd(x - y[i] - 1 + j as i64, q)?;
        }
    }
    Ok((m, table.evaluations()))
}

/// `P_{(Y, nu(k))}(E_{t,k,x})` by an LU determinant of contour moments.
pub fn event_probability(y: &[i64], k: usize, x: i64, t: f64) -> Result<ExactResult, ExactError> {
    event_probability_perturbed(y, k, x, t, Perturbation::default())
}

pub fn event_probability_perturbed(
    y: &[i64],
    k: usize,
    x: i64,
    t: f64,
    perturbation: Perturbation,
) -> Result<ExactResult, ExactError> {
    let (m, evals) = event_matrix(y, k, x, t, perturbation.exponent_shift)?;
    let det = det_lu_dd(m, y.len());
    Ok(ExactResult::new(det.to_f64(), Method::Determinant, evals))
}

/// Same quantity as [`event_probability`], expanded over all `N!`
/// permutations and summed in rank order.
pub fn event_probability_permsum(
    y: &[i64],
    k: usize,
    x: i64,
    t: f64,
) -> Result<ExactResult, ExactError> {
    let n = y.len();
    if n > PERM_CAP {
        return Err(ExactError::TooManyParticles { n, cap: PERM_CAP });
    }
    let (m, evals) = event_matrix(y, k, x, t, 0)?;
    let perms: Vec<Permutation> = all_permutations(n);
    let terms: Vec<Dd> = perms
        .par_iter()
        .map(|sigma| {
            let prod = (0..n).fold(Dd::ONE, |p, i| p * m[i * n + sigma.at(i)]);
            prod * sigma.sign() as f64
        })
        .collect();
    Ok(ExactResult::new(ranked_sum(terms), Method::PermSum, evals))
}

fn hankel(n: usize, x: i64, t: f64, r: i64) -> Result<ExactResult, ExactError> {
    if n == 0 {
        return Err(ExactError::NoParticles);
    }
    let mut table = MomentTable::new(t)?;
    let mut m = vec![Dd::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = table.get_dd(x - n as i64 - 1 + (i + j) as i64, r)?;
        }
    }
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let det = det_lu_dd(m, n);
    Ok(ExactResult::new(
        sign * det.to_f64(),
        Method::Hankel,
        table.evaluations(),
    ))
}

/// Event probability for step initial data `Y = (1, ..., N)` and `1 <= k <= N`.
///
/// `(-1)^{N(N-1)/2} det[ I(x - N - 1 + i + j, -(N - 1), t) ]_{i,j = 0..N-1}`,
/// which does not depend on `k`.
pub fn step_event_probability(
    n: usize,
    k: usize,
    x: i64,
    t: f64,
) -> Result<ExactResult, ExactError> {
    step_event_probability_perturbed(n, k, x, t, Perturbation::default())
}

pub fn step_event_probability_perturbed(
    n: usize,
    k: usize,
    x: i64,
    t: f64,
    perturbation: Perturbation,
) -> Result<ExactResult, ExactError> {
    check_k(k, 1, n)?;
    hankel(n, x, t, -(n as i64 - 1) + perturbation.exponent_shift)
}

/// Probability that, from step initial data with all particles second class,
/// the leftmost particle is at or beyond `x` at time `t`.
///
/// `(-1)^{N(N-1)/2} det[ I(x - N - 1 + i + j, -N, t) ]_{i,j = 0..N-1}`.
pub fn tasep_leftmost_tail(n: usize, x: i64, t: f64) -> Result<ExactResult, ExactError> {
    tasep_leftmost_tail_perturbed(n, x, t, Perturbation::default())
}

pub fn tasep_leftmost_tail_perturbed(
    n: usize,
    x: i64,
    t: f64,
    perturbation: Perturbation,
) -> Result<ExactResult, ExactError> {
    hankel(n, x, t, -(n as i64) + perturbation.exponent_shift)
}

/// Step initial data for any `0 <= k <= N`: `k = 0` goes to
/// [`tasep_leftmost_tail`], the rest to [`step_event_probability`].
pub fn step_initial_probability(
    n: usize,
    k: usize,
    x: i64,
    t: f64,
) -> Result<ExactResult, ExactError> {
    step_initial_probability_perturbed(n, k, x, t, Perturbation::default())
}

pub fn step_initial_probability_perturbed(
    n: usize,
    k: usize,
    x: i64,
    t: f64,
    perturbation: Perturbation,
) -> Result<ExactResult, ExactError> {
    if n == 0 {
        return Err(ExactError::NoParticles);
    }
    check_k(k, 0, n)?;
    if k == 0 {
        tasep_leftmost_tail_perturbed(n, x, t, perturbation)
    } else {
        step_event_probability_perturbed(n, k, x, t, perturbation)
    }
}

/// Default sweep range `[1 - ceil(3t), 1 + N + ceil(3t)]` for anchors `x`.
pub fn default_x_range(n: usize, t: f64) -> std::ops::RangeInclusive<i64> {
    let pad = (3.0 * t).ceil() as i64;
    (1 - pad)..=(1 + n as i64 + pad)
}
