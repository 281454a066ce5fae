//! Numerical checks of the algebraic identities behind the exact formulas.
//!
//! Each check evaluates both sides of a rational identity at a spectral point
//! and returns `|lhs - rhs| / max(|lhs|, |rhs|)`. Left-hand sides are
//! antisymmetrized sums with heavy cancellation and are accumulated in
//! double-double; right-hand sides are plain products in `f64`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dd::DdComplex;
use crate::matrices::{h_index, t_matrix, MatrixError, SpectralPoint};
use crate::perm::{all_permutations, subsets, Permutation};
use crate::simulator::replica_seed;

/// Default pass threshold on the relative error.
pub const DEFAULT_THRESHOLD: f64 = 1e-10;
/// Minimum pairwise distance between sampled spectral variables.
pub const MIN_SEPARATION: f64 = 1e-3;
/// Largest `N` in the default sweep.
pub const SUITE_MAX_N: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error("need at least {min} spectral variables, got {n}")]
    TooFew { n: usize, min: usize },
    #[error("spectral variables xi_{i} and xi_{j} coincide")]
    NotDistinct { i: usize, j: usize },
    #[error("xi_{0} must lie strictly inside the unit circle")]
    OutsideDisk(usize),
    #[error("spectral variable xi_{0} is 0 or 1")]
    Singular(usize),
    #[error("the identity has a pole at this point")]
    Pole,
    #[error("block length k={k} is out of range for N={n}")]
    BlockOutOfRange { k: usize, n: usize },
    #[error("slot l={l} must lie in 1..N-1 for N={n}")]
    SlotOutOfRange { l: usize, n: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A deliberate error in one closed form, used to confirm the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Raises the exponent of the last factor of the `A_sigma` diagonal by one.
    DiagonalExponent,
}

/// Outcome of one identity over all trials at fixed `(N, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: Option<usize>,
    pub trials: usize,
    pub max_rel_err: f64,
    pub pass: bool,
}

fn rel_err(lhs: Complex64, rhs: Complex64) -> f64 {
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        return 0.0;
    }
    (lhs - rhs).norm() / scale
}

fn finite(z: Complex64) -> Result<Complex64, IdentityError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(IdentityError::Pole)
    }
}

fn check_distinct(xi: &[Complex64], min: usize) -> Result<(), IdentityError> {
    if xi.len() < min {
        return Err(IdentityError::TooFew { n: xi.len(), min });
    }
    for i in 0..xi.len() {
        for j in i + 1..xi.len() {
            if xi[i] == xi[j] {
                return Err(IdentityError::NotDistinct { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(())
}

fn check_not_one(xi: &[Complex64]) -> Result<(), IdentityError> {
    match xi.iter().position(|&z| z == Complex64::new(1.0, 0.0)) {
        Some(i) => Err(IdentityError::Singular(i + 1)),
        None => Ok(()),
    }
}

fn check_k(k: usize, n: usize) -> Result<(), IdentityError> {
    if k > n {
        return Err(IdentityError::BlockOutOfRange { k, n });
    }
    Ok(())
}

fn dd(xi: &[Complex64]) -> Vec<DdComplex> {
    xi.iter().map(|&z| DdComplex::from(z)).collect()
}

fn vandermonde(xi: &[Complex64]) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for j in 0..xi.len() {
        for i in 0..j {
            v *= xi[j] - xi[i];
        }
    }
    v
}

/// Closed-form `[A_sigma]_{h_k,h_k}` in double-double.
fn diag_dd(
    sigma: &Permutation,
    k: usize,
    one_minus: &[DdComplex],
    mutation: Option<Mutation>,
) -> DdComplex {
    let n = sigma.len();
    let mut prod = DdComplex::from(sigma.sign() as f64);
    for j in 1..=n {
        let mut power = if j <= k { j as i32 - 1 } else { j as i32 - 2 };
        if j == n && mutation == Some(Mutation::DiagonalExponent) {
            power += 1;
        }
        prod = prod * (one_minus[j - 1] / one_minus[sigma.at(j - 1)]).powi(power);
    }
    prod
}

/// Sum over `S_N` of the diagonal entries of `A_sigma` against the summed
/// geometric series, compared with the product form:
///
/// ```text
/// sum_sigma [A_sigma]_{h_k,h_k} xi_{s(2)} xi_{s(3)}^2 ... xi_{s(N)}^{N-1}
///     / prod_{l = k+1}^{N} (1 - xi_{s(l)} ... xi_{s(N)})
///   = (1 - xi_1) ... (1 - xi_k) prod_{i<j} (xi_j - xi_i) / (1 - xi_i) prod_i 1 / (1 - xi_i)
/// ```
pub fn check_bethe_sum_identity(
    n: usize,
    k: usize,
    xi: &SpectralPoint,
) -> Result<f64, IdentityError> {
    bethe_sum_with(n, k, xi, None)
}

fn bethe_sum_with(
    n: usize,
    k: usize,
    xi: &SpectralPoint,
    mutation: Option<Mutation>,
) -> Result<f64, IdentityError> {
    let z = &xi.xi;
    check_len(z, n)?;
    check_k(k, n)?;
    check_distinct(z, 2)?;
    if let Some(i) = z.iter().position(|w| w.norm() >= 1.0) {
        return Err(IdentityError::OutsideDisk(i + 1));
    }
    let zd = dd(z);
    let one_minus: Vec<DdComplex> = zd.iter().map(|&w| DdComplex::ONE - w).collect();
    let mut lhs = DdComplex::ZERO;
    for sigma in all_permutations(n) {
        let mut num = diag_dd(&sigma, k, &one_minus, mutation);
        for j in 2..=n {
            num = num * zd[sigma.at(j - 1)].powi(j as i32 - 1);
        }
        let mut den = DdComplex::ONE;
        let mut tail = DdComplex::ONE;
        for l in (k + 1..=n).rev() {
            tail = tail * zd[sigma.at(l - 1)];
            den = den * (DdComplex::ONE - tail);
        }
        lhs += num / den;
    }
    let one = Complex64::new(1.0, 0.0);
    let mut rhs = Complex64::new(1.0, 0.0);
    for zi in &z[..k] {
        rhs *= one - zi;
    }
    for j in 0..n {
        for i in 0..j {
            rhs *= (z[j] - z[i]) / (one - z[i]);
        }
    }
    for &w in z {
        rhs /= one - w;
    }
    Ok(rel_err(finite(lhs.to_complex64())?, finite(rhs)?))
}

fn check_len(z: &[Complex64], n: usize) -> Result<(), IdentityError> {
    if z.len() != n || n < 2 {
        return Err(IdentityError::TooFew {
            n: z.len().min(n),
            min: n.max(2),
        });
    }
    Ok(())
}

/// The same identity after dividing by the diagonal normalization and
/// substituting `xi_i -> 1 / xi_{N-i+1}`:
///
/// ```text
/// sum_sigma sgn(sigma)
///   / [ prod_{j=2}^{k} (xi_{s(N+1-j)} - 1)^{j-1} prod_{j=k+1}^{N} (xi_{s(N+1-j)} - 1)^{j-2} ]
///   * xi_{s(N-k-1)} xi_{s(N-k-2)}^2 ... xi_{s(1)}^{N-k-1}
///   / prod_{l=1}^{N-k} (xi_{s(l)} ... xi_{s(1)} - 1)
///   = prod_i (xi_i - 1)^{-(N-1)} prod_{i<j} (xi_j - xi_i)
/// ```
pub fn check_equivalent_identity(
    n: usize,
    k: usize,
    xi: &SpectralPoint,
) -> Result<f64, IdentityError> {
    let z = &xi.xi;
    check_len(z, n)?;
    check_k(k, n)?;
    check_distinct(z, 2)?;
    check_not_one(z)?;
    if let Some(i) = z.iter().position(|w| w.norm() == 0.0) {
        return Err(IdentityError::Singular(i + 1));
    }
    let zd = dd(z);
    let minus_one: Vec<DdComplex> = zd.iter().map(|&w| w - DdComplex::ONE).collect();
    let mut lhs = DdComplex::ZERO;
    for sigma in all_permutations(n) {
        let s = |i: usize| sigma.at(i - 1);
        let mut term = DdComplex::from(sigma.sign() as f64);
        for j in 2..=n {
            let power = if j <= k { j as i32 - 1 } else { j as i32 - 2 };
            term = term / minus_one[s(n + 1 - j)].powi(power);
        }
        if k < n {
            // the j = 1 factor only appears in the second product, i.e. when k = 0
            if k == 0 {
                term = term * minus_one[s(n)];
            }
            for i in 1..(n - k) {
                term = term * zd[s(i)].powi((n - k - i) as i32);
            }
            let mut head = DdComplex::ONE;
            for l in 1..=(n - k) {
                head = head * zd[s(l)];
                term = term / (head - DdComplex::ONE);
            }
        }
        lhs += term;
    }
    let one = Complex64::new(1.0, 0.0);
    let mut rhs = vandermonde(z);
    for &w in z {
        rhs /= (w - one).powi(n as i32 - 1);
    }
    Ok(rel_err(finite(lhs.to_complex64())?, finite(rhs)?))
}

/// Sign of the generalized Laplace expansion pairing `I` with `J`
/// (0-based sorted index sets).
pub fn laplace_sign(n: usize, i_set: &[usize], j_set: &[usize]) -> i32 {
    let complement = |s: &[usize]| (0..n).filter(|v| !s.contains(v)).collect::<Vec<_>>();
    let top: Vec<usize> = i_set.iter().copied().chain(complement(i_set)).collect();
    let bottom: Vec<usize> = j_set.iter().copied().chain(complement(j_set)).collect();
    let mut image = vec![0; n];
    for (a, b) in top.into_iter().zip(bottom) {
        image[a] = b;
    }
    Permutation::from_images(image)
        .expect("index sets partition 0..n")
        .sign()
}

/// Laplace expansion of the Vandermonde determinant along its last `k` rows:
///
/// ```text
/// sum_{|J| = k} sgn(I, J) prod_{i in J} (xi_i - 1)^{N-k}
///     prod_{i<j in J} (xi_j - xi_i) prod_{i<j in J^c} (xi_j - xi_i)
///   = prod_{i<j} (xi_j - xi_i),   I = {N-k+1, ..., N}
/// ```
pub fn check_laplace_vandermonde(
    n: usize,
    k: usize,
    xi: &SpectralPoint,
) -> Result<f64, IdentityError> {
    let z = &xi.xi;
    if z.len() != n || n == 0 {
        return Err(IdentityError::TooFew {
            n: z.len(),
            min: n.max(1),
        });
    }
    check_k(k, n)?;
    check_distinct(z, 1)?;
    let zd = dd(z);
    let i_set: Vec<usize> = (n - k..n).collect();
    let mut lhs = DdComplex::ZERO;
    for j_set in subsets(n, k) {
        let jc: Vec<usize> = (0..n).filter(|v| !j_set.contains(v)).collect();
        let mut term = DdComplex::from(laplace_sign(n, &i_set, &j_set) as f64);
        for &i in &j_set {
            term = term * (zd[i] - DdComplex::ONE).powi((n - k) as i32);
        }
        for set in [&j_set, &jc] {
            for (b, &j) in set.iter().enumerate() {
                for &i in &set[..b] {
                    term = term * (zd[j] - zd[i]);
                }
            }
        }
        lhs += term;
    }
    Ok(rel_err(lhs.to_complex64(), vandermonde(z)))
}

/// ```text
/// sum_sigma sgn(sigma) prod_{j=2}^{N} (xi_{s(N+1-j)} - 1)^{-(j-1)}
///   = prod_j (xi_j - 1)^{-(N-1)} prod_{i<j} (xi_j - xi_i)
/// ```
pub fn check_vandermonde_shift(n: usize, xi: &SpectralPoint) -> Result<f64, IdentityError> {
    let z = &xi.xi;
    check_len(z, n)?;
    check_distinct(z, 2)?;
    check_not_one(z)?;
    let minus_one: Vec<DdComplex> = dd(z).into_iter().map(|w| w - DdComplex::ONE).collect();
    let mut lhs = DdComplex::ZERO;
    for sigma in all_permutations(n) {
        let mut term = DdComplex::from(sigma.sign() as f64);
        for j in 2..=n {
            term = term / minus_one[sigma.at(n - j)].powi(j as i32 - 1);
        }
        lhs += term;
    }
    let one = Complex64::new(1.0, 0.0);
    let mut rhs = vandermonde(z);
    for &w in z {
        rhs /= (w - one).powi(n as i32 - 1);
    }
    Ok(rel_err(finite(lhs.to_complex64())?, finite(rhs)?))
}

/// `[T_l]_{h_k,h_k}` from the dense tensor product against
/// `-1` if `l = k` and `-(1 - xi_beta) / (1 - xi_alpha)` otherwise.
pub fn check_tl_diagonal(
    n: usize,
    l: usize,
    k: usize,
    pair: (Complex64, Complex64),
) -> Result<f64, IdentityError> {
    if n < 2 {
        return Err(IdentityError::TooFew { n, min: 2 });
    }
    if l == 0 || l >= n {
        return Err(IdentityError::SlotOutOfRange { l, n });
    }
    check_k(k, n)?;
    let (xa, xb) = pair;
    let mut xi = vec![Complex64::new(0.0, 0.0); n];
    xi[0] = xa;
    xi[1] = xb;
    let point = SpectralPoint::new(xi)?;
    let t = t_matrix(l, 1, 2, n, &point)?;
    let h = h_index(k, n) - 1;
    let one = Complex64::new(1.0, 0.0);
    let expect = if l == k {
        -one
    } else {
        -(one - xb) / (one - xa)
    };
    Ok(rel_err(t.get(h, h), expect))
}

/// `n` points on the circle of the given radius with uniform angles and
/// pairwise distance at least [`MIN_SEPARATION`].
pub fn sample_spectral_point<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> SpectralPoint {
    loop {
        let xi: Vec<Complex64> = (0..n)
            .map(|_| Complex64::from_polar(radius, rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let separated = (0..n).all(|j| (0..j).all(|i| (xi[i] - xi[j]).norm() >= MIN_SEPARATION));
        if separated && xi.iter().all(|&z| z != Complex64::new(1.0, 0.0)) {
            return SpectralPoint { xi };
        }
    }
}

/// Suite settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub threshold: f64,
    pub max_n: usize,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            trials: 100,
            threshold: DEFAULT_THRESHOLD,
            max_n: SUITE_MAX_N,
            mutation: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Check {
    BetheSum,
    Equivalent,
    Laplace,
    Shift,
    TlDiagonal,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::BetheSum => "bethe_sum",
            Check::Equivalent => "equivalent",
            Check::Laplace => "laplace_vandermonde",
            Check::Shift => "vandermonde_shift",
            Check::TlDiagonal => "tl_diagonal",
        }
    }
}

fn run_task(
    check: Check,
    n: usize,
    k: Option<usize>,
    task_seed: u64,
    cfg: &SuiteConfig,
) -> Result<f64, IdentityError> {
    let mut rng = Pcg64Mcg::seed_from_u64(task_seed);
    let mut worst = 0.0f64;
    for _ in 0..cfg.trials {
        let err = match check {
            Check::BetheSum => {
                let xi = sample_spectral_point(&mut rng, n, 0.5);
                bethe_sum_with(n, k.unwrap(), &xi, cfg.mutation)?
            }
            Check::Equivalent => {
                let xi = sample_spectral_point(&mut rng, n, 2.0);
                check_equivalent_identity(n, k.unwrap(), &xi)?
            }
            Check::Laplace => {
                let xi = sample_spectral_point(&mut rng, n, 0.5);
                check_laplace_vandermonde(n, k.unwrap(), &xi)?
            }
            Check::Shift => {
                let xi = sample_spectral_point(&mut rng, n, 0.5);
                check_vandermonde_shift(n, &xi)?
            }
            Check::TlDiagonal => {
                let pair = sample_spectral_point(&mut rng, 2, 0.5).xi;
                let mut e = 0.0f64;
                for l in 1..n {
                    e = e.max(check_tl_diagonal(n, l, k.unwrap(), (pair[0], pair[1]))?);
                }
                e
            }
        };
        // NaN must count as a failure
        worst = if err.is_nan() {
            f64::INFINITY
        } else {
            worst.max(err)
        };
    }
    Ok(worst)
}

/// Runs every identity over `N = 2..=max_n` and `k = 0..=N`; reports come
/// back in a fixed order and are deterministic in the seed.
pub fn run_suite_with(cfg: SuiteConfig) -> Result<Vec<IdentityReport>, IdentityError> {
    let mut tasks = Vec::new();
    for check in [
        Check::BetheSum,
        Check::Equivalent,
        Check::Laplace,
        Check::Shift,
        Check::TlDiagonal,
    ] {
        for n in 2..=cfg.max_n {
            if check == Check::Shift {
                tasks.push((check, n, None));
            } else {
                tasks.extend((0..=n).map(|k| (check, n, Some(k))));
            }
        }
    }
    tasks
        .par_iter()
        .enumerate()
        .map(|(idx, &(check, n, k))| {
            let worst = run_task(check, n, k, replica_seed(cfg.seed, idx as u64), &cfg)?;
            Ok(IdentityReport {
                name: check.name().to_string(),
                n,
                k,
                trials: cfg.trials,
                max_rel_err: worst,
                pass: worst <= cfg.threshold,
            })
        })
        .collect()
}

/// [`run_suite_with`] at the default `max_n` and no mutation.
pub fn run_suite(
    seed: u64,
    trials: usize,
    threshold: f64,
) -> Result<Vec<IdentityReport>, IdentityError> {
    run_suite_with(SuiteConfig {
        seed,
        trials,
        threshold,
        ..SuiteConfig::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det_lu_complex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(xi: Vec<Complex64>) -> SpectralPoint {
        SpectralPoint { xi }
    }

    #[test]
    fn bethe_sum_small() {
        let xi = pt(vec![c(0.0, 0.3), c(0.5, 0.0)]);
        for k in 0..=2 {
            assert!(check_bethe_sum_identity(2, k, &xi).unwrap() < 1e-12);
        }
        let mut rng = Pcg64Mcg::seed_from_u64(1);
        for _ in 0..20 {
            let xi = sample_spectral_point(&mut rng, 5, 0.5);
            assert!(check_bethe_sum_identity(5, 2, &xi).unwrap() < 1e-10);
        }
    }

    #[test]
    fn equivalent_small() {
        let xi = pt(vec![c(2.0, 1.0), c(3.0, 0.0)]);
        assert!(check_equivalent_identity(2, 1, &xi).unwrap() < 1e-12);
        let mut rng = Pcg64Mcg::seed_from_u64(2);
        for _ in 0..10 {
            let xi = sample_spectral_point(&mut rng, 4, 2.0);
            assert!(check_equivalent_identity(4, 4, &xi).unwrap() < 1e-10);
        }
    }

    #[test]
    fn substitution_links_the_two_forms() {
        let mut rng = Pcg64Mcg::seed_from_u64(3);
        for n in 2..=4 {
            let xi = sample_spectral_point(&mut rng, n, 0.5);
            let flipped = pt((0..n).map(|i| 1.0 / xi.xi[n - 1 - i]).collect());
            for k in 0..=n {
                let a = check_bethe_sum_identity(n, k, &xi).unwrap() < 1e-10;
                let b = check_equivalent_identity(n, k, &flipped).unwrap() < 1e-10;
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn laplace_small() {
        let xi = pt(vec![c(2.0, 0.0), c(5.0, 0.0), c(7.0, 0.0)]);
        assert!(check_laplace_vandermonde(3, 1, &xi).unwrap() < 1e-12);
        for k in [0, 3] {
            assert_eq!(subsets(3, k).len(), 1);
            assert!(check_laplace_vandermonde(3, k, &xi).unwrap() < 1e-15);
        }
        let mut rng = Pcg64Mcg::seed_from_u64(4);
        let xi = sample_spectral_point(&mut rng, 6, 0.5);
        assert!(check_laplace_vandermonde(6, 3, &xi).unwrap() < 1e-10);
        assert_eq!(laplace_sign(3, &[2], &[2]), 1);
        assert_eq!(laplace_sign(3, &[2], &[0]), 1);
        assert_eq!(laplace_sign(3, &[2], &[1]), -1);
    }

    #[test]
    fn vandermonde_shift_small() {
        let xi = pt(vec![c(0.0, 0.0), c(3.0, 0.0)]);
        assert!(check_vandermonde_shift(2, &xi).unwrap() < 1e-14);
        let mut rng = Pcg64Mcg::seed_from_u64(5);
        let xi = sample_spectral_point(&mut rng, 5, 0.5);
        assert!(check_vandermonde_shift(5, &xi).unwrap() < 1e-10);
        // shifting every variable by one leaves the Vandermonde determinant unchanged
        let n = 5;
        let plain: Vec<Complex64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| xi.xi[i].powi(j as i32))
            .collect();
        let shifted: Vec<Complex64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (xi.xi[i] - 1.0).powi(j as i32))
            .collect();
        let (a, b) = (det_lu_complex(plain, n), det_lu_complex(shifted, n));
        assert!((a - b).norm() < 1e-12 * a.norm().max(1e-300));
    }

    #[test]
    fn tl_diagonal_cases() {
        let pair = (c(0.0, 0.0), c(0.5, 0.0));
        for n in 2..=6 {
            for l in 1..n {
                for k in 0..=n {
                    assert!(check_tl_diagonal(n, l, k, pair).unwrap() < 1e-15);
                }
            }
        }
        assert!(check_tl_diagonal(3, 3, 0, pair).is_err());
    }

    #[test]
    fn input_validation() {
        let dup = pt(vec![c(0.1, 0.0), c(0.1, 0.0)]);
        assert!(matches!(
            check_bethe_sum_identity(2, 0, &dup),
            Err(IdentityError::NotDistinct { .. })
        ));
        let out = pt(vec![c(0.1, 0.0), c(1.5, 0.0)]);
        assert!(matches!(
            check_bethe_sum_identity(2, 0, &out),
            Err(IdentityError::OutsideDisk(2))
        ));
        let xi = pt(vec![c(0.1, 0.0), c(0.2, 0.0)]);
        assert!(matches!(
            check_bethe_sum_identity(2, 3, &xi),
            Err(IdentityError::BlockOutOfRange { .. })
        ));
    }

    #[test]
    fn suite_passes_and_is_reproducible() {
        let cfg = SuiteConfig {
            seed: 11,
            trials: 5,
            max_n: 4,
            ..SuiteConfig::default()
        };
        let a = run_suite_with(cfg).unwrap();
        assert!(a.iter().all(|r| r.pass), "{a:?}");
        assert_eq!(a, run_suite_with(cfg).unwrap());
        let json = serde_json::to_value(&a[0]).unwrap();
        for key in ["name", "N", "k", "trials", "max_rel_err", "pass"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn mutation_is_caught() {
        let cfg = SuiteConfig {
            trials: 3,
            max_n: 3,
            mutation: Some(Mutation::DiagonalExponent),
            ..SuiteConfig::default()
        };
        let reports = run_suite_with(cfg).unwrap();
        assert!(reports
            .iter()
            .filter(|r| r.name == "bethe_sum")
            .any(|r| !r.pass));
        assert!(reports
            .iter()
            .filter(|r| r.name != "bethe_sum")
            .all(|r| r.pass));
    }
}
