//! The `2^N x 2^N` scattering matrices `S`, `T_l` and `A_sigma`.
//!
//! The basis of `(C^2)^{⊗N}` is ordered lexicographically with the first
//! tensor factor most significant. Matrix indices in this module's public
//! contract are 1-based, matching the index `h_k` of the entry for the
//! word `nu(k, N)`; internal storage is 0-based.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::CMatrix;
use crate::perm::Permutation;

/// Largest `N` for which dense `A_sigma` matrices are built.
pub const DENSE_CAP: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("spectral variable xi_{index} equals 1")]
    Singular { index: usize },
    #[error("index {0} is outside the spectral point")]
    IndexOutOfRange(usize),
    #[error("alpha and beta must differ, both are {0}")]
    SameIndex(usize),
    #[error("slot l={l} must lie in 1..={max}")]
    SlotOutOfRange { l: usize, max: usize },
    #[error("N={n} exceeds the dense matrix cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("word {word:?} does not compose to {sigma}")]
    BadWord {
        sigma: Permutation,
        word: Vec<usize>,
    },
    #[error("block length k={k} is out of range for N={n}")]
    BlockOutOfRange { k: usize, n: usize },
    #[error("permutation has {got} letters but the spectral point has {n}")]
    SizeMismatch { got: usize, n: usize },
}

/// The Bethe variables `xi_1, ..., xi_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub xi: Vec<Complex64>,
}

impl SpectralPoint {
    /// Rejects any `xi_i == 1`.
    pub fn new(xi: Vec<Complex64>) -> Result<Self, MatrixError> {
        if let Some(i) = xi.iter().position(|&z| z == Complex64::new(1.0, 0.0)) {
            return Err(MatrixError::Singular { index: i + 1 });
        }
        Ok(SpectralPoint { xi })
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// `xi_i` with 1-based `i`.
    pub fn get(&self, i: usize) -> Result<Complex64, MatrixError> {
        if i == 0 || i > self.xi.len() {
            return Err(MatrixError::IndexOutOfRange(i));
        }
        Ok(self.xi[i - 1])
    }

    fn ratio(&self, beta: usize, alpha: usize) -> Result<Complex64, MatrixError> {
        let one = Complex64::new(1.0, 0.0);
        Ok((one - self.get(beta)?) / (one - self.get(alpha)?))
    }
}

/// A permutation together with adjacent transpositions `a_1, ..., a_n`
/// (1-based slots) whose successive application to the identity word yields it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationWord {
    pub sigma: Permutation,
    pub word: Vec<usize>,
}

impl PermutationWord {
    /// Validates that `word` composes to `sigma`.
    pub fn new(sigma: Permutation, word: Vec<usize>) -> Result<Self, MatrixError> {
        let n = sigma.len();
        let mut cur = Permutation::identity(n);
        for &a in &word {
            if a == 0 || a >= n {
                return Err(MatrixError::BadWord { sigma, word });
            }
            cur.swap_slots(a - 1);
        }
        if cur != sigma {
            return Err(MatrixError::BadWord { sigma, word });
        }
        Ok(PermutationWord { sigma, word })
    }
}

/// Bubble-sort word: its length is the inversion count of `sigma`.
pub fn decompose_permutation(sigma: &Permutation) -> PermutationWord {
    let mut a = sigma.images().to_vec();
    let n = a.len();
    let mut swaps = Vec::new();
    for pass in 0..n {
        for i in 0..n.saturating_sub(pass + 1) {
            if a[i] > a[i + 1] {
                a.swap(i, i + 1);
                swaps.push(i + 1);
            }
        }
    }
    swaps.reverse();
    PermutationWord {
        sigma: sigma.clone(),
        word: swaps,
    }
}

/// A second reduced word: builds `sigma` slot by slot from the left, pulling
/// each required value leftward. Generally differs from
/// [`decompose_permutation`].
pub fn decompose_permutation_leftward(sigma: &Permutation) -> PermutationWord {
    let n = sigma.len();
    let mut cur: Vec<usize> = (0..n).collect();
    let mut word = Vec::new();
    for p in 0..n {
        let q = cur.iter().position(|&v| v == sigma.at(p)).unwrap();
        for s in (p..q).rev() {
            cur.swap(s, s + 1);
            word.push(s + 1);
        }
    }
    PermutationWord {
        sigma: sigma.clone(),
        word,
    }
}

/// The 4x4 block `S_{beta alpha}`.
pub fn s_matrix(alpha: usize, beta: usize, xi: &SpectralPoint) -> Result<CMatrix, MatrixError> {
    if alpha == beta {
        return Err(MatrixError::SameIndex(alpha));
    }
    s_block(alpha, beta, xi)
}

fn s_block(alpha: usize, beta: usize, xi: &SpectralPoint) -> Result<CMatrix, MatrixError> {
    let one = Complex64::new(1.0, 0.0);
    let (xa, xb) = (xi.get(alpha)?, xi.get(beta)?);
    if xa == one {
        return Err(MatrixError::Singular { index: alpha });
    }
    let d = -(one - xb) / (one - xa);
    let mut s = CMatrix::zeros(4, 4);
    s.set(0, 0, d);
    s.set(1, 1, d);
    s.set(2, 2, -one);
    s.set(3, 3, d);
    s.set(1, 2, (xb - xa) / (one - xa));
    Ok(s)
}

/// `T_l = I^{⊗(l-1)} ⊗ S_{beta alpha} ⊗ I^{⊗(N-l-1)}`.
pub fn t_matrix(
    l: usize,
    alpha: usize,
    beta: usize,
    n: usize,
    xi: &SpectralPoint,
) -> Result<CMatrix, MatrixError> {
    if l == 0 || l + 1 > n {
        return Err(MatrixError::SlotOutOfRange {
            l,
            max: n.saturating_sub(1),
        });
    }
    if n > DENSE_CAP {
        return Err(MatrixError::TooLarge { n, cap: DENSE_CAP });
    }
    let s = s_matrix(alpha, beta, xi)?;
    Ok(CMatrix::identity(1 << (l - 1))
        .kron(&s)
        .kron(&CMatrix::identity(1 << (n - l - 1))))
}

/// `A_sigma = T_{a_n} ... T_{a_1}`; the factor for `a_i` interchanges the
/// values `alpha`, `beta` sitting in slots `a_i`, `a_i + 1` of the partial
/// word built by `a_1, ..., a_{i-1}`.
pub fn a_sigma(word: &PermutationWord, xi: &SpectralPoint) -> Result<CMatrix, MatrixError> {
    let n = word.sigma.len();
    if xi.len() != n {
        return Err(MatrixError::SizeMismatch {
            got: n,
            n: xi.len(),
        });
    }
    if n > DENSE_CAP {
        return Err(MatrixError::TooLarge { n, cap: DENSE_CAP });
    }
    let mut cur = Permutation::identity(n);
    let mut a = CMatrix::identity(1 << n);
    for &l in &word.word {
        let alpha = cur.at(l - 1) + 1;
        let beta = cur.at(l) + 1;
        a = t_matrix(l, alpha, beta, n, xi)?.matmul(&a);
        cur.swap_slots(l - 1);
    }
    Ok(a)
}

/// 1-based index `h_k` of the diagonal entry attached to `nu(k, N)`.
pub fn h_index(k: usize, n: usize) -> usize {
    assert!(k <= n, "k={k} exceeds N={n}");
    (1..=k).map(|j| 1usize << (n - j)).sum::<usize>() + 1
}

/// Closed form of `[A_sigma]_{h_k, h_k}`.
pub fn a_sigma_diag_closed(
    sigma: &Permutation,
    k: usize,
    xi: &SpectralPoint,
) -> Result<Complex64, MatrixError> {
    let n = sigma.len();
    if xi.len() != n {
        return Err(MatrixError::SizeMismatch {
            got: n,
            n: xi.len(),
        });
    }
    if k > n {
        return Err(MatrixError::BlockOutOfRange { k, n });
    }
    let mut prod = Complex64::new(sigma.sign() as f64, 0.0);
    for j in 1..=n {
        let power = if j <= k { j as i32 - 1 } else { j as i32 - 2 };
        let sj = sigma.at(j - 1) + 1;
        if xi.get(sj)? == Complex64::new(1.0, 0.0) {
            return Err(MatrixError::Singular { index: sj });
        }
        prod *= xi.ratio(j, sj)?.powi(power);
    }
    Ok(prod)
}
