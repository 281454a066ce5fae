//! Trapezoidal rule on the circle `|xi| = radius`.
//!
//! With `xi_k = radius * w^k`, `w = exp(2 pi i / n)`, the rule reads
//! `I ~ (1/n) sum_k f(xi_k) xi_k`. It converges geometrically for this
//! integrand, so the only practical error source is rounding: the summands
//! can exceed the result by twenty orders of magnitude (large negative `m` on
//! a small circle). Each evaluation first runs in `f64` while bounding the
//! rounding error; when the bound misses the target the identical sum is
//! recomputed with multiprecision floats.

use std::collections::HashMap;
use std::f64::consts::PI;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;

use super::{BetheError, ContourMomentKey, QuadratureSpec};
use crate::dd::Dd;

/// Relative size of the imaginary residue that is reported as suspicious.
pub const IMAGINARY_WARN: f64 = 1e-9;

/// Absolute accuracy aimed for, relative to `max(1, |I|)`.
const TARGET: f64 = 1e-14;

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOutcome {
    /// Real part of the trapezoid sum.
    pub value: f64,
    /// Imaginary part; vanishes for exact arithmetic.
    pub imaginary: f64,
    /// Significand bits used for the accepted sum (53 for plain `f64`).
    pub precision_bits: usize,
}

impl QuadratureOutcome {
    pub fn imaginary_warning(&self) -> bool {
        self.imaginary.abs() > IMAGINARY_WARN * self.value.abs().max(1.0)
    }
}

/// One-shot evaluation; prefer [`ContourQuadrature`] for many keys.
pub fn moment_quadrature(
    key: ContourMomentKey,
    spec: QuadratureSpec,
) -> Result<QuadratureOutcome, BetheError> {
    ContourQuadrature::new(spec)?.moment(key)
}

/// Quadrature engine for a fixed circle, caching node data across keys.
pub struct ContourQuadrature {
    spec: QuadratureSpec,
    cos: Vec<f64>,
    sin: Vec<f64>,
    precise: HashMap<usize, PreciseNodes>,
}

impl ContourQuadrature {
    pub fn new(spec: QuadratureSpec) -> Result<Self, BetheError> {
        spec.validate()?;
        let n = spec.nodes;
        let (sin, cos) = (0..n)
            .map(|k| (2.0 * PI * k as f64 / n as f64).sin_cos())
            .unzip();
        Ok(ContourQuadrature {
            spec,
            cos,
            sin,
            precise: HashMap::new(),
        })
    }

    pub fn spec(&self) -> QuadratureSpec {
        self.spec
    }

    pub fn moment(&mut self, key: ContourMomentKey) -> Result<QuadratureOutcome, BetheError> {
        if !(key.t.is_finite() && key.t >= 0.0) {
            return Err(BetheError::InvalidTime(key.t));
        }
        let (out, mean_abs) = self.moment_f64(key);
        // per-term relative error: powi chains, exp of an argument of size t/radius
        let fudge = 16.0 + 2.0 * key.r.unsigned_abs() as f64 + 4.0 * key.t / self.spec.radius;
        let bound = fudge * f64::EPSILON * mean_abs;
        let target = TARGET * out.value.abs().max(1.0);
        if bound <= target {
            return Ok(out);
        }
        let needed = (mean_abs * fudge / target).log2().ceil().max(0.0) as usize + 64;
        let bits = needed.div_ceil(64).clamp(2, 32) * 64;
        let nodes = self
            .precise
            .entry(bits)
            .or_insert_with(|| PreciseNodes::new(self.spec, bits));
        Ok(nodes.moment(key))
    }

    fn moment_f64(&self, key: ContourMomentKey) -> (QuadratureOutcome, f64) {
        let n = self.spec.nodes;
        let rho = self.spec.radius;
        let ContourMomentKey { m, r, t } = key;
        let shift = m + 1;
        let scale = rho.powi(shift as i32);
        let mut re = Dd::ZERO;
        let mut im = Dd::ZERO;
        let mut abs_sum = 0.0;
        for k in 0..n {
            let idx = (shift as i128 * k as i128).rem_euclid(n as i128) as usize;
            let power = Complex64::new(self.cos[idx], self.sin[idx]);
            let xi = Complex64::new(rho * self.cos[k], rho * self.sin[k]);
            let one_minus = (Complex64::new(1.0, 0.0) - xi).powi(r as i32);
            let arg = t * self.cos[k] / rho - t;
            let phase = -t * self.sin[k] / rho;
            let expo = Complex64::from_polar(arg.exp(), phase);
            let term = power * one_minus * expo * scale;
            re += term.re;
            im += term.im;
            abs_sum += term.norm();
        }
        let inv_n = 1.0 / n as f64;
        (
            QuadratureOutcome {
                value: re.to_f64() * inv_n,
                imaginary: im.to_f64() * inv_n,
                precision_bits: 53,
            },
            abs_sum * inv_n,
        )
    }
}

type BigComplex = (BigFloat, BigFloat);

fn cmul(a: &BigComplex, b: &BigComplex, p: usize) -> BigComplex {
    let re = a.0.mul(&b.0, p, RM).sub(&a.1.mul(&b.1, p, RM), p, RM);
    let im = a.0.mul(&b.1, p, RM).add(&a.1.mul(&b.0, p, RM), p, RM);
    (re, im)
}

fn cinv(a: &BigComplex, p: usize) -> BigComplex {
    let d = a.0.mul(&a.0, p, RM).add(&a.1.mul(&a.1, p, RM), p, RM);
    (a.0.div(&d, p, RM), a.1.neg().div(&d, p, RM))
}

fn cpowi(base: &BigComplex, e: u64, p: usize) -> BigComplex {
    let mut acc = (BigFloat::from_f64(1.0, p), BigFloat::from_f64(0.0, p));
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = cmul(&acc, &b, p);
        }
        e >>= 1;
        if e > 0 {
            b = cmul(&b, &b, p);
        }
    }
    acc
}

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    // Display prints a decimal expansion; std parsing rounds it correctly.
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// Node data at one working precision.
struct PreciseNodes {
    p: usize,
    spec: QuadratureSpec,
    consts: Consts,
    cos: Vec<BigFloat>,
    sin: Vec<BigFloat>,
    rho: BigFloat,
    exp_factor: HashMap<u64, Vec<BigComplex>>,
    one_minus_pow: HashMap<i64, Vec<BigComplex>>,
    last_product: Option<((i64, u64), Vec<BigComplex>)>,
}

impl PreciseNodes {
    fn new(spec: QuadratureSpec, p: usize) -> Self {
        let mut consts = Consts::new().expect("astro-float constants cache");
        let n = spec.nodes;
        let two_pi_over_n = consts
            .pi(p, RM)
            .mul(&BigFloat::from_f64(2.0, p), p, RM)
            .div(&BigFloat::from_f64(n as f64, p), p, RM);
        let mut cos = Vec::with_capacity(n);
        let mut sin = Vec::with_capacity(n);
        for k in 0..n {
            let theta = two_pi_over_n.mul(&BigFloat::from_f64(k as f64, p), p, RM);
            cos.push(theta.cos(p, RM, &mut consts));
            sin.push(theta.sin(p, RM, &mut consts));
        }
        PreciseNodes {
            p,
            spec,
            consts,
            cos,
            sin,
            rho: BigFloat::from_f64(spec.radius, p),
            exp_factor: HashMap::new(),
            one_minus_pow: HashMap::new(),
            last_product: None,
        }
    }

    /// `exp(t (1/xi_k - 1))` at every node.
    fn exp_factor(&mut self, t: f64) -> &Vec<BigComplex> {
        let p = self.p;
        let PreciseNodes {
            consts,
            cos,
            sin,
            rho,
            exp_factor,
            ..
        } = self;
        exp_factor.entry(t.to_bits()).or_insert_with(|| {
            let tb = BigFloat::from_f64(t, p);
            let t_over_rho = tb.div(rho, p, RM);
            cos.iter()
                .zip(sin.iter())
                .map(|(c, s)| {
                    let modulus = t_over_rho.mul(c, p, RM).sub(&tb, p, RM).exp(p, RM, consts);
                    let phase = t_over_rho.mul(s, p, RM).neg();
                    (
                        modulus.mul(&phase.cos(p, RM, consts), p, RM),
                        modulus.mul(&phase.sin(p, RM, consts), p, RM),
                    )
                })
                .collect()
        })
    }

    /// `(1 - xi_k)^r` at every node.
    fn one_minus_pow(&mut self, r: i64) -> &Vec<BigComplex> {
        let p = self.p;
        let PreciseNodes {
            cos,
            sin,
            rho,
            one_minus_pow,
            ..
        } = self;
        one_minus_pow.entry(r).or_insert_with(|| {
            let one = BigFloat::from_f64(1.0, p);
            cos.iter()
                .zip(sin.iter())
                .map(|(c, s)| {
                    let base = (one.sub(&rho.mul(c, p, RM), p, RM), rho.mul(s, p, RM).neg());
                    let pow = cpowi(&base, r.unsigned_abs(), p);
                    if r < 0 {
                        cinv(&pow, p)
                    } else {
                        pow
                    }
                })
                .collect()
        })
    }

    fn moment(&mut self, key: ContourMomentKey) -> QuadratureOutcome {
        let p = self.p;
        let n = self.spec.nodes;
        let tag = (key.r, key.t.to_bits());
        if self.last_product.as_ref().map(|(k, _)| *k) != Some(tag) {
            let e = self.exp_factor(key.t).clone();
            let w = self.one_minus_pow(key.r);
            let g = w.iter().zip(&e).map(|(a, b)| cmul(a, b, p)).collect();
            self.last_product = Some((tag, g));
        }
        let g = &self.last_product.as_ref().unwrap().1;
        let shift = key.m + 1;
        let mut re = BigFloat::from_f64(0.0, p);
        let mut im = BigFloat::from_f64(0.0, p);
        for (k, (gr, gi)) in g.iter().enumerate() {
            let idx = (shift as i128 * k as i128).rem_euclid(n as i128) as usize;
            let (c, s) = (&self.cos[idx], &self.sin[idx]);
            re = re.add(&gr.mul(c, p, RM).sub(&gi.mul(s, p, RM), p, RM), p, RM);
            im = im.add(&gr.mul(s, p, RM).add(&gi.mul(c, p, RM), p, RM), p, RM);
        }
        let mut scale = self.rho.powi(shift.unsigned_abs() as usize, p, RM);
        if shift < 0 {
            scale = scale.reciprocal(p, RM);
        }
        let scale = scale.div(&BigFloat::from_f64(n as f64, p), p, RM);
        QuadratureOutcome {
            value: to_f64(&re.mul(&scale, p, RM)),
            imaginary: to_f64(&im.mul(&scale, p, RM)),
            precision_bits: p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{moment_series, SeriesSpec};

    fn series(m: i64, r: i64, t: f64) -> f64 {
        let key = ContourMomentKey::new(m, r, t);
        moment_series(key, SeriesSpec::for_key(&key)).unwrap()
    }

    #[test]
    fn matches_series_on_simple_key() {
        let out = moment_quadrature(
            ContourMomentKey::new(-1, 0, 1.0),
            QuadratureSpec::new(0.5, 512).unwrap(),
        )
        .unwrap();
        assert!((out.value - series(-1, 0, 1.0)).abs() < 1e-12);
        assert!((out.value - 0.367879441).abs() < 1e-9);
        assert!(!out.imaginary_warning());
    }

    #[test]
    fn analytic_integrand_gives_zero() {
        let mut q = ContourQuadrature::new(QuadratureSpec::default()).unwrap();
        for m in 0..4 {
            let out = q.moment(ContourMomentKey::new(m, 3, 0.0)).unwrap();
            assert!(out.value.abs() < 1e-14, "m={m}: {}", out.value);
        }
        // I(0, 0, t) = t e^{-t}
        for t in [0.3, 1.0, 3.0] {
            let out = q.moment(ContourMomentKey::new(0, 0, t)).unwrap();
            assert!(
                (out.value - t * (-t).exp()).abs() < 1e-14,
                "t={t}: {}",
                out.value
            );
        }
    }

    #[test]
    fn golden_dual_path_value() {
        // I(-2, -3, 1) = 13/2, see the series unit tests
        let out = moment_quadrature(
            ContourMomentKey::new(-2, -3, 1.0),
            QuadratureSpec::new(0.5, 2048).unwrap(),
        )
        .unwrap();
        assert!((out.value - 6.5).abs() < 1e-12);
        assert!((series(-2, -3, 1.0) - out.value).abs() < 1e-12);
    }

    #[test]
    fn escalates_when_summands_dwarf_the_result() {
        let mut q = ContourQuadrature::new(QuadratureSpec::new(0.3, 2048).unwrap()).unwrap();
        // (1 - xi)^3 has no xi^{39} term, so the moment vanishes exactly
        let out = q.moment(ContourMomentKey::new(-40, 3, 3.0)).unwrap();
        assert!(out.precision_bits > 53);
        assert!(out.value.abs() < 1e-12, "{}", out.value);
        let key = ContourMomentKey::new(-40, -12, 3.0);
        let out = q.moment(key).unwrap();
        let s = series(-40, -12, 3.0);
        assert!(
            (out.value - s).abs() <= 1e-12 * s.abs(),
            "{} vs {s}",
            out.value
        );
        assert!(!out.imaginary_warning());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            QuadratureSpec::new(1.0, 64),
            Err(BetheError::InvalidRadius(_))
        ));
        assert!(matches!(
            QuadratureSpec::new(0.5, 3),
            Err(BetheError::TooFewNodes(3))
        ));
    }
}
