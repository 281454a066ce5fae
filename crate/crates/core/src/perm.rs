//! Permutations of `{0, .., n-1}` in one-line notation.

use std::fmt;

use serde::{Deserialize, Serialize};

/// `image[i]` is the value at slot `i`, i.e. `sigma(i + 1) - 1` in 1-based terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// Returns `None` unless `image` is a permutation of `0..len`.
    pub fn from_images(image: Vec<usize>) -> Option<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return None;
            }
        }
        Some(Permutation { image })
    }

    /// From 1-based one-line notation, e.g. `[2, 1]`.
    pub fn from_one_based(values: &[usize]) -> Option<Self> {
        if values.contains(&0) {
            return None;
        }
        Self::from_images(values.iter().map(|v| v - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { image: inv }
    }

    pub fn inversions(&self) -> usize {
        let n = self.image.len();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.image[i] > self.image[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Sign via cycle decomposition (independent of [`Self::inversions`]).
    pub fn sign(&self) -> i32 {
        let n = self.image.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            let mut len = 0;
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cur = self.image[cur];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Swaps the values at slots `l` and `l + 1`.
    pub fn swap_slots(&mut self, l: usize) {
        self.image.swap(l, l + 1);
    }

    /// Rearranges to the lexicographically next permutation; false at the last one.
    pub fn advance(&mut self) -> bool {
        let a = &mut self.image;
        let n = a.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && a[i - 1] >= a[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while a[j] <= a[i - 1] {
            j -= 1;
        }
        a.swap(i - 1, j);
        a[i..].reverse();
        true
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.image.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// All permutations of `0..n` in lexicographic order (rank order).
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::with_capacity((1..=n).product());
    let mut p = Permutation::identity(n);
    loop {
        out.push(p.clone());
        if !p.advance() {
            break;
        }
    }
    out
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All `k`-subsets of `0..n` as sorted index lists, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}
