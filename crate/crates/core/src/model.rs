//! Configurations, species words, target events and the jump rules.
//!
//! Particles are stored in left-to-right order. A first class particle
//! overtaking a second class neighbour leaves the sorted positions unchanged
//! and exchanges the two labels instead.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default upper bound on the number of particles.
pub const DEFAULT_MAX_PARTICLES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a configuration needs at least one particle")]
    Empty,
    #[error("{positions} positions but {labels} labels")]
    LengthMismatch { positions: usize, labels: usize },
    #[error("positions must be strictly increasing (violated at index {index})")]
    NotIncreasing { index: usize },
    #[error("{n} particles exceeds the cap of {cap}")]
    TooManyParticles { n: usize, cap: usize },
    #[error("species label must be 1 or 2, got {0}")]
    InvalidLabel(u8),
    #[error("block length k={k} is out of range for N={n}")]
    BlockOutOfRange { k: usize, n: usize },
    #[error("time must be finite and nonnegative, got {0}")]
    InvalidTime(f64),
    #[error("move {0} is not eligible in this configuration")]
    IneligibleMove(Move),
}

/// Particle species. Label 2 has priority over label 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Species {
    /// Second class particle, label 1.
    Second,
    /// First class particle, label 2.
    First,
}

impl Species {
    pub fn label(self) -> u8 {
        match self {
            Species::Second => 1,
            Species::First => 2,
        }
    }

    pub fn from_label(label: u8) -> Result<Self, ModelError> {
        match label {
            1 => Ok(Species::Second),
            2 => Ok(Species::First),
            other => Err(ModelError::InvalidLabel(other)),
        }
    }
}

impl From<Species> for u8 {
    fn from(s: Species) -> u8 {
        s.label()
    }
}

impl TryFrom<u8> for Species {
    type Error = ModelError;
    fn try_from(label: u8) -> Result<Self, ModelError> {
        Species::from_label(label)
    }
}

/// A word over {1, 2}, read left to right along the particles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpeciesSequence(Vec<Species>);

impl SpeciesSequence {
    pub fn new(word: Vec<Species>) -> Self {
        SpeciesSequence(word)
    }

    pub fn from_labels(labels: &[u8]) -> Result<Self, ModelError> {
        labels
            .iter()
            .map(|&l| Species::from_label(l))
            .collect::<Result<Vec<_>, _>>()
            .map(SpeciesSequence)
    }

    /// `k` first class particles followed by `n - k` second class ones.
    pub fn nu(k: usize, n: usize) -> Result<Self, ModelError> {
        if k > n {
            return Err(ModelError::BlockOutOfRange { k, n });
        }
        let mut word = vec![Species::First; k];
        word.resize(n, Species::Second);
        Ok(SpeciesSequence(word))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Species] {
        &self.0
    }

    pub fn labels(&self) -> Vec<u8> {
        self.0.iter().map(|s| s.label()).collect()
    }

    pub fn first_class_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == Species::First).count()
    }

    /// True iff the word has the shape `2..21..1` with exactly `k` twos.
    pub fn is_nu(&self, k: usize) -> bool {
        k <= self.0.len()
            && self.0[..k].iter().all(|&s| s == Species::First)
            && self.0[k..].iter().all(|&s| s == Species::Second)
    }
}

impl fmt::Display for SpeciesSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.label())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    /// Jump to the empty site on the right.
    StepRight,
    /// First class particle exchanges places with the second class particle
    /// on its right.
    SwapRight,
}

/// A jump attempt of the particle at (0-based) index `particle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub particle: usize,
    pub kind: MoveKind,
}

impl Move {
    pub fn step(particle: usize) -> Self {
        Move {
            particle,
            kind: MoveKind::StepRight,
        }
    }

    pub fn swap(particle: usize) -> Self {
        Move {
            particle,
            kind: MoveKind::SwapRight,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            MoveKind::StepRight => "step-right",
            MoveKind::SwapRight => "swap-right",
        };
        write!(f, "({}, {kind})", self.particle + 1)
    }
}

/// Positions and labels of `N` particles on the integer lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParticleConfig {
    positions: Vec<i64>,
    labels: SpeciesSequence,
}

impl ParticleConfig {
    pub fn new(positions: Vec<i64>, labels: SpeciesSequence) -> Result<Self, ModelError> {
        Self::with_cap(positions, labels, DEFAULT_MAX_PARTICLES)
    }

    pub fn with_cap(
        positions: Vec<i64>,
        labels: SpeciesSequence,
        cap: usize,
    ) -> Result<Self, ModelError> {
        if positions.is_empty() {
            return Err(ModelError::Empty);
        }
        if positions.len() != labels.len() {
            return Err(ModelError::LengthMismatch {
                positions: positions.len(),
                labels: labels.len(),
            });
        }
        if positions.len() > cap {
            return Err(ModelError::TooManyParticles {
                n: positions.len(),
                cap,
            });
        }
        if let Some(index) = positions.windows(2).position(|w| w[0] >= w[1]) {
            return Err(ModelError::NotIncreasing { index: index + 1 });
        }
        Ok(ParticleConfig { positions, labels })
    }

    /// Shorthand taking raw labels, e.g. `from_parts(&[1, 2], &[2, 1])`.
    pub fn from_parts(positions: &[i64], labels: &[u8]) -> Result<Self, ModelError> {
        Self::new(positions.to_vec(), SpeciesSequence::from_labels(labels)?)
    }

    /// Step initial data `(1, ..., N)` with word `nu(k, N)`.
    pub fn step(n: usize, k: usize) -> Result<Self, ModelError> {
        Self::new((1..=n as i64).collect(), SpeciesSequence::nu(k, n)?)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn labels(&self) -> &SpeciesSequence {
        &self.labels
    }

    /// The move available to particle `i`, if any. Each particle has at most one.
    #[inline]
    pub fn move_of(&self, i: usize) -> Option<Move> {
        let n = self.positions.len();
        if i + 1 < n && self.positions[i + 1] == self.positions[i] + 1 {
            let w = self.labels.as_slice();
            (w[i] == Species::First && w[i + 1] == Species::Second).then(|| Move::swap(i))
        } else {
            Some(Move::step(i))
        }
    }

    /// Fills `out` with the eligible moves in particle order.
    pub fn eligible_moves_into(&self, out: &mut Vec<Move>) {
        out.clear();
        out.extend((0..self.positions.len()).filter_map(|i| self.move_of(i)));
    }

    pub fn eligible_moves(&self) -> Vec<Move> {
        let mut out = Vec::with_capacity(self.positions.len());
        self.eligible_moves_into(&mut out);
        out
    }

    /// Applies a move known to be eligible.
    #[inline]
    pub(crate) fn apply_in_place(&mut self, mv: Move) {
        match mv.kind {
            MoveKind::StepRight => self.positions[mv.particle] += 1,
            MoveKind::SwapRight => self.labels.0.swap(mv.particle, mv.particle + 1),
        }
    }

    pub fn apply_move(&self, mv: Move) -> Result<ParticleConfig, ModelError> {
        if mv.particle >= self.len() || self.move_of(mv.particle) != Some(mv) {
            return Err(ModelError::IneligibleMove(mv));
        }
        let mut next = self.clone();
        next.apply_in_place(mv);
        Ok(next)
    }

    /// Whether the configuration lies in the target event for block length `k`
    /// anchored at `x`.
    ///
    /// For `k >= 1` the word must be `nu(k, N)` and the first class particles
    /// must sit on `x, x + 1, ..., x + k - 1`. For `k = 0` the word must be all
    /// ones and the leftmost particle must be at `x` or beyond.
    pub fn event_holds(&self, k: usize, x: i64) -> Result<bool, ModelError> {
        let n = self.len();
        if k > n {
            return Err(ModelError::BlockOutOfRange { k, n });
        }
        if !self.labels.is_nu(k) {
            return Ok(false);
        }
        if k == 0 {
            return Ok(self.positions[0] >= x);
        }
        Ok(self.positions[..k]
            .iter()
            .zip(x..)
            .all(|(&p, expected)| p == expected))
    }
}

impl fmt::Display for ParticleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<String> = self.positions.iter().map(|p| p.to_string()).collect();
        write!(f, "(({}), {})", pos.join(","), self.labels)
    }
}

/// Free-function form of [`ParticleConfig::event_holds`].
pub fn event_holds(config: &ParticleConfig, k: usize, x: i64) -> Result<bool, ModelError> {
    config.event_holds(k, x)
}

pub fn eligible_moves(config: &ParticleConfig) -> Vec<Move> {
    config.eligible_moves()
}

pub fn apply_move(config: &ParticleConfig, mv: Move) -> Result<ParticleConfig, ModelError> {
    config.apply_move(mv)
}

/// The target event `E_{t,k,x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub t: f64,
    pub k: usize,
    pub x: i64,
}

impl EventSpec {
    pub fn new(t: f64, k: usize, x: i64) -> Result<Self, ModelError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(ModelError::InvalidTime(t));
        }
        Ok(EventSpec { t, k, x })
    }

    pub fn check_particles(&self, n: usize) -> Result<(), ModelError> {
        if self.k > n {
            Err(ModelError::BlockOutOfRange { k: self.k, n })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(p: &[i64], l: &[u8]) -> ParticleConfig {
        ParticleConfig::from_parts(p, l).unwrap()
    }

    #[test]
    fn nu_words() {
        assert_eq!(SpeciesSequence::nu(2, 3).unwrap().labels(), vec![2, 2, 1]);
        assert_eq!(SpeciesSequence::nu(0, 3).unwrap().labels(), vec![1, 1, 1]);
        assert!(SpeciesSequence::nu(4, 3).is_err());
    }

    #[test]
    fn event_examples() {
        assert!(cfg(&[1, 2, 3], &[2, 2, 1]).event_holds(2, 1).unwrap());
        assert!(!cfg(&[1, 2, 3], &[2, 1, 2]).event_holds(2, 1).unwrap());
        assert!(cfg(&[5, 9], &[1, 1]).event_holds(0, 3).unwrap());
        assert!(!cfg(&[5, 9], &[1, 1]).event_holds(0, 6).unwrap());
        assert!(matches!(
            cfg(&[5, 9], &[1, 1]).event_holds(3, 0),
            Err(ModelError::BlockOutOfRange { k: 3, n: 2 })
        ));
    }

    #[test]
    fn eligible_examples() {
        assert_eq!(
            cfg(&[1, 2], &[2, 1]).eligible_moves(),
            vec![Move::swap(0), Move::step(1)]
        );
        assert_eq!(cfg(&[1, 2], &[1, 2]).eligible_moves(), vec![Move::step(1)]);
        assert_eq!(
            cfg(&[1, 5], &[1, 1]).eligible_moves(),
            vec![Move::step(0), Move::step(1)]
        );
        // 2 followed by 2 is blocked
        assert_eq!(cfg(&[1, 2], &[2, 2]).eligible_moves(), vec![Move::step(1)]);
    }

    #[test]
    fn apply_examples() {
        assert_eq!(
            cfg(&[1, 2], &[2, 1]).apply_move(Move::swap(0)).unwrap(),
            cfg(&[1, 2], &[1, 2])
        );
        assert_eq!(
            cfg(&[1, 5], &[1, 1]).apply_move(Move::step(0)).unwrap(),
            cfg(&[2, 5], &[1, 1])
        );
        assert_eq!(
            cfg(&[1, 2], &[1, 2]).apply_move(Move::step(1)).unwrap(),
            cfg(&[1, 3], &[1, 2])
        );
        assert!(matches!(
            cfg(&[1, 2], &[1, 2]).apply_move(Move::step(0)),
            Err(ModelError::IneligibleMove(_))
        ));
        assert!(cfg(&[1, 2], &[1, 2]).apply_move(Move::swap(0)).is_err());
        assert!(cfg(&[1, 2], &[1, 2]).apply_move(Move::step(7)).is_err());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            ParticleConfig::from_parts(&[1, 1], &[1, 1]),
            Err(ModelError::NotIncreasing { index: 1 })
        );
        assert!(matches!(
            ParticleConfig::from_parts(&[1, 2], &[1]),
            Err(ModelError::LengthMismatch { .. })
        ));
        assert_eq!(
            ParticleConfig::from_parts(&[1], &[3]),
            Err(ModelError::InvalidLabel(3))
        );
        assert!(matches!(
            ParticleConfig::step(13, 0),
            Err(ModelError::TooManyParticles { n: 13, cap: 12 })
        ));
        assert!(EventSpec::new(-1.0, 0, 0).is_err());
    }

    fn arb_config() -> impl Strategy<Value = ParticleConfig> {
        (1usize..=6)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(1i64..4, n),
                    proptest::collection::vec(1u8..=2, n),
                    -5i64..5,
                )
            })
            .prop_map(|(gaps, labels, start)| {
                let mut pos = Vec::with_capacity(gaps.len());
                let mut cur = start;
                for g in gaps {
                    cur += g;
                    pos.push(cur);
                }
                ParticleConfig::from_parts(&pos, &labels).unwrap()
            })
    }

    proptest! {
        #[test]
        fn moves_preserve_invariants(c in arb_config(), picks in proptest::collection::vec(0usize..64, 0..30)) {
            let twos = c.labels().first_class_count();
            let mut labels_sorted = c.labels().labels();
            labels_sorted.sort();
            let mut cur = c;
            for p in picks {
                let moves = cur.eligible_moves();
                prop_assert!(!moves.is_empty(), "rightmost particle can always step");
                for mv in &moves {
                    // target site is free, or holds a second class particle being overtaken
                    let i = mv.particle;
                    let target = cur.positions()[i] + 1;
                    if let Some(j) = cur.positions().iter().position(|&q| q == target) {
                        prop_assert_eq!(mv.kind, MoveKind::SwapRight);
                        prop_assert_eq!(cur.labels().as_slice()[j], Species::Second);
                        prop_assert_eq!(cur.labels().as_slice()[i], Species::First);
                    }
                }
                let mv = moves[p % moves.len()];
                cur = cur.apply_move(mv).unwrap();
                prop_assert!(cur.positions().windows(2).all(|w| w[0] < w[1]));
                prop_assert_eq!(cur.labels().first_class_count(), twos);
                let mut l = cur.labels().labels();
                l.sort();
                prop_assert_eq!(&l, &labels_sorted);
            }
        }
    }
}
