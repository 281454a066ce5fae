//! One-dimensional contour moments
//!
//! ```text
//! I(m, r, t) = (1 / 2 pi i) \oint xi^m (1 - xi)^r exp((1/xi - 1) t) d xi
//! ```
//!
//! over a counterclockwise circle of radius below one. Every exact formula in
//! [`crate::exact`] reduces to determinants or signed sums of these numbers.
//!
//! Two independent evaluations are provided. [`moment_series`] takes the
//! residue at the origin: expanding `exp(t / xi)` and `(1 - xi)^r` gives
//!
//! ```text
//! I = e^{-t} sum_{j >= 0} t^j / j! * c_{j - m - 1}(r)
//! ```
//!
//! with `c_n(r)` the coefficient of `xi^n` in `(1 - xi)^r`. [`moment_quadrature`]
//! applies the trapezoidal rule on the circle itself.

pub mod quadrature;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dd::Dd;

pub use quadrature::{moment_quadrature, ContourQuadrature, QuadratureOutcome, IMAGINARY_WARN};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BetheError {
    #[error("time must be finite and nonnegative, got {0}")]
    InvalidTime(f64),
    #[error("contour radius must lie strictly inside (0, 1), got {0}")]
    InvalidRadius(f64),
    #[error("quadrature needs at least 4 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("series for I({m}, {r}, {t}) did not converge within {max_terms} terms")]
    NonConvergence {
        m: i64,
        r: i64,
        t: f64,
        max_terms: usize,
    },
    #[error("series tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

/// Index `(m, r, t)` of a contour moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourMomentKey {
    /// Power of `xi`, may be negative.
    pub m: i64,
    /// Power of `1 - xi`, may be negative.
    pub r: i64,
    pub t: f64,
}

impl ContourMomentKey {
    pub fn new(m: i64, r: i64, t: f64) -> Self {
        ContourMomentKey { m, r, t }
    }
}

/// Series tolerance used when the double-double value itself is wanted.
pub const DD_REL_TOL: f64 = 1e-32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl SeriesSpec {
    /// Same budget with a tolerance matching double-double resolution.
    pub fn double_double(self) -> Self {
        SeriesSpec {
            rel_tol: self.rel_tol.min(DD_REL_TOL),
            ..self
        }
    }

    pub fn for_key(key: &ContourMomentKey) -> Self {
        let scale = key.t + key.m.unsigned_abs() as f64 + key.r.unsigned_abs() as f64;
        SeriesSpec {
            rel_tol: 1e-15,
            max_terms: (10.0 * scale) as usize + 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radius: f64,
    pub nodes: usize,
}

impl QuadratureSpec {
    pub fn new(radius: f64, nodes: usize) -> Result<Self, BetheError> {
        let spec = QuadratureSpec { radius, nodes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), BetheError> {
        if !(self.radius > 0.0 && self.radius < 1.0) {
            return Err(BetheError::InvalidRadius(self.radius));
        }
        if self.nodes < 4 {
            return Err(BetheError::TooFewNodes(self.nodes));
        }
        Ok(())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radius: 0.5,
            nodes: 2048,
        }
    }
}

/// Coefficient of `xi^n` in `(1 - xi)^r`; zero for `n < 0`.
///
/// Uses `c_{n+1} = c_n (n - r) / (n + 1)`, valid for both signs of `r`.
pub fn series_coefficient(n: i64, r: i64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    if r >= 0 && n > r {
        return 0.0;
    }
    let mut c = 1.0;
    for i in 0..n {
        c *= (i - r) as f64 / (i + 1) as f64;
    }
    c
}

fn ln_factorial(n: i64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Residue-series evaluation of `I(m, r, t)`.
pub fn moment_series(key: ContourMomentKey, spec: SeriesSpec) -> Result<f64, BetheError> {
    moment_series_dd(key, spec).map(Dd::to_f64)
}

/// [`moment_series`] carried out entirely in double-double arithmetic.
///
/// For `t` up to a few hundred the start weight `e^{-t} t^j / j!` is built
/// directly in double-double; beyond that it is started in log space to
/// avoid overflow, which limits the result to `f64` relative accuracy.
pub fn moment_series_dd(key: ContourMomentKey, spec: SeriesSpec) -> Result<Dd, BetheError> {
    let ContourMomentKey { m, r, t } = key;
    if !(t.is_finite() && t >= 0.0) {
        return Err(BetheError::InvalidTime(t));
    }
    if spec.rel_tol.is_nan() || spec.rel_tol <= 0.0 {
        return Err(BetheError::InvalidTolerance(spec.rel_tol));
    }
    if t == 0.0 {
        return Ok(coefficient_dd(-m - 1, r));
    }
    let j0 = (m + 1).max(0);
    let n0 = j0 - m - 1;
    if r >= 0 && n0 > r {
        return Ok(Dd::ZERO);
    }
    let td = Dd::new(t);
    let mut weight = if t <= 300.0 {
        (1..=j0).fold(Dd::new(-t).exp(), |w, i| w * td / Dd::new(i as f64))
    } else {
        Dd::new((j0 as f64 * t.ln() - ln_factorial(j0) - t).exp())
    };
    let mut coeff = coefficient_dd(n0, r);
    let (mut j, mut n) = (j0, n0);
    let mut sum = Dd::ZERO;
    for _ in 0..spec.max_terms {
        let term = weight * coeff;
        sum += term;
        if r >= 0 && n == r {
            return Ok(sum);
        }
        let step_w = td / Dd::new((j + 1) as f64);
        let step_c = Dd::new((n - r) as f64) / Dd::new((n + 1) as f64);
        if r < 0 {
            // all terms positive with decreasing ratio; bound the tail geometrically
            let ratio = step_w.hi * step_c.hi;
            if ratio < 1.0 && term.hi * ratio / (1.0 - ratio) <= spec.rel_tol * sum.hi.abs() {
                return Ok(sum);
            }
        }
        weight = weight * step_w;
        coeff = coeff * step_c;
        j += 1;
        n += 1;
    }
    Err(BetheError::NonConvergence {
        m,
        r,
        t,
        max_terms: spec.max_terms,
    })
}

fn coefficient_dd(n: i64, r: i64) -> Dd {
    if n < 0 || (r >= 0 && n > r) {
        return Dd::ZERO;
    }
    (0..n).fold(Dd::ONE, |c, i| {
        c * Dd::new((i - r) as f64) / Dd::new((i + 1) as f64)
    })
}

/// Memo of `I(m, r, t)` at one fixed `t`, owned by a single evaluation.
#[derive(Debug, Clone)]
pub struct MomentTable {
    t: f64,
    cache: HashMap<(i64, i64), Dd>,
    evaluations: usize,
}

impl MomentTable {
    pub fn new(t: f64) -> Result<Self, BetheError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(BetheError::InvalidTime(t));
        }
        Ok(MomentTable {
            t,
            cache: HashMap::new(),
            evaluations: 0,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn get(&mut self, m: i64, r: i64) -> Result<f64, BetheError> {
        self.get_dd(m, r).map(Dd::to_f64)
    }

    /// Double-double value of `I(m, r, t)`.
    pub fn get_dd(&mut self, m: i64, r: i64) -> Result<Dd, BetheError> {
        if let Some(&v) = self.cache.get(&(m, r)) {
            return Ok(v);
        }
        let key = ContourMomentKey::new(m, r, self.t);
        let v = moment_series_dd(key, SeriesSpec::for_key(&key).double_double())?;
        self.evaluations += 1;
        self.cache.insert((m, r), v);
        Ok(v)
    }

    /// Number of distinct moments computed so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(m: i64, r: i64, t: f64) -> f64 {
        let key = ContourMomentKey::new(m, r, t);
        moment_series(key, SeriesSpec::for_key(&key)).unwrap()
    }

    #[test]
    fn coefficients() {
        assert_eq!(series_coefficient(0, 5), 1.0);
        assert_eq!(series_coefficient(2, 4), 6.0);
        assert_eq!(series_coefficient(3, 4), -4.0);
        assert_eq!(series_coefficient(5, 4), 0.0);
        assert_eq!(series_coefficient(-1, -3), 0.0);
        // (1 - xi)^{-1} = sum xi^n
        assert_eq!(series_coefficient(17, -1), 1.0);
        // (1 - xi)^{-3}: binom(n + 2, 2)
        assert_eq!(series_coefficient(4, -3), 15.0);
    }

    #[test]
    fn documented_values() {
        assert!((series(-1, 0, 1.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert!((series(-1, 0, 1.0) - 0.367879441).abs() < 1e-9);
        for m in 0..6 {
            assert_eq!(series(m, 0, 0.0), 0.0);
        }
        assert_eq!(series(-2, 1, 0.0), -1.0);
        for t in [0.0, 0.3, 1.0, 3.0, 10.0] {
            assert!((series(-1, -1, t) - 1.0).abs() < 1e-14, "t={t}");
        }
        // e^{-1} sum (j+3)(j+2)/2 / j! = 13/2
        assert!((series(-2, -3, 1.0) - 6.5).abs() < 1e-14);
    }

    #[test]
    fn zero_time_collapses_to_one_coefficient() {
        for m in -6..4 {
            for r in -4..5 {
                assert_eq!(series(m, r, 0.0), series_coefficient(-m - 1, r));
            }
        }
    }

    #[test]
    fn poisson_point_mass() {
        // I(j - 1, 0, t) = e^{-t} t^j / j!
        let t = 2.5f64;
        let mut p = (-t).exp();
        for j in 0..12 {
            assert!((series(j - 1, 0, t) - p).abs() < 1e-14 * p);
            p *= t / (j + 1) as f64;
        }
    }

    #[test]
    fn double_double_accuracy() {
        // 13/2 exactly, to far below f64 resolution
        let key = ContourMomentKey::new(-2, -3, 1.0);
        let v = moment_series_dd(key, SeriesSpec::for_key(&key).double_double()).unwrap();
        assert!((v - Dd::new(6.5)).abs().hi < 1e-28);
        let key = ContourMomentKey::new(-1, -1, 2.5);
        let v = moment_series_dd(key, SeriesSpec::for_key(&key).double_double()).unwrap();
        assert!((v - Dd::ONE).abs().hi < 1e-28);
    }

    #[test]
    fn rejects_bad_input() {
        let key = ContourMomentKey::new(0, 0, -1.0);
        assert!(matches!(
            moment_series(key, SeriesSpec::for_key(&key)),
            Err(BetheError::InvalidTime(_))
        ));
        let key = ContourMomentKey::new(-3, -2, 50.0);
        let tight = SeriesSpec {
            rel_tol: 1e-15,
            max_terms: 5,
        };
        assert!(matches!(
            moment_series(key, tight),
            Err(BetheError::NonConvergence { .. })
        ));
    }

    #[test]
    fn table_memoizes() {
        let mut table = MomentTable::new(1.0).unwrap();
        let a = table.get(-2, -3).unwrap();
        let b = table.get(-2, -3).unwrap();
        assert_eq!(a, b);
        assert_eq!(table.evaluations(), 1);
        table.get(-1, 0).unwrap();
        assert_eq!(table.evaluations(), 2);
    }
}
