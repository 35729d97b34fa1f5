//! Permutations of `{1, …, n}`.
//!
//! Leaf labels are one-based throughout the crate, so a [`Permutation`] is
//! stored as the list of images `σ(1), …, σ(n)`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PermutationError {
    #[error("image {0} is outside 1..={1}")]
    OutOfRange(usize, usize),
    #[error("image {0} occurs more than once")]
    Repeated(usize),
    #[error("permutation sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

/// An element of the symmetric group `S_n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// Builds `σ` from `[σ(1), …, σ(n)]`.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermutationError> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &k in &images {
            if k == 0 || k > n {
                return Err(PermutationError::OutOfRange(k, n));
            }
            if seen[k] {
                return Err(PermutationError::Repeated(k));
            }
            seen[k] = true;
        }
        Ok(Permutation { images })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (1..=n).collect();
        images.shuffle(rng);
        Permutation { images }
    }

    /// The transposition swapping `a` and `b` in `S_n`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self, PermutationError> {
        let mut images: Vec<usize> = (1..=n).collect();
        for k in [a, b] {
            if k == 0 || k > n {
                return Err(PermutationError::OutOfRange(k, n));
            }
        }
        images.swap(a - 1, b - 1);
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `σ(k)` for `1 ≤ k ≤ n`.
    pub fn apply(&self, k: usize) -> usize {
        self.images[k - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &k) in self.images.iter().enumerate() {
            inv[k - 1] = i + 1;
        }
        Permutation { images: inv }
    }

    /// The product `στ`, i.e. `k ↦ σ(τ(k))`.
    pub fn then_apply_after(&self, tau: &Permutation) -> Result<Self, PermutationError> {
        if self.len() != tau.len() {
            return Err(PermutationError::SizeMismatch(self.len(), tau.len()));
        }
        Ok(Permutation {
            images: tau.images.iter().map(|&k| self.apply(k)).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &k)| k == i + 1)
    }

    /// Block permutation `σ ∘_i id_m` in `S_{n+m-1}`: slot `i` of `σ` is
    /// expanded into `m` consecutive slots which keep their relative order.
    pub fn block_substitute(&self, i: usize, m: usize) -> Self {
        let n = self.len();
        let si = self.apply(i);
        let mut images = Vec::with_capacity(n + m - 1);
        for k in 1..=n {
            let target = self.apply(k);
            let shifted = |t: usize| if t < si { t } else { t + m - 1 };
            if k == i {
                images.extend((0..m).map(|j| si + j));
            } else {
                images.push(shifted(target));
            }
        }
        Permutation { images }
    }

    /// `id_n ∘_i τ` in `S_{n+m-1}` where `m = τ.len()`: `τ` acts on the block
    /// of slots `i..i+m` and everything else is fixed.
    pub fn embed_at(n: usize, i: usize, tau: &Permutation) -> Self {
        let m = tau.len();
        let mut images: Vec<usize> = (1..=n + m - 1).collect();
        for j in 1..=m {
            images[i + j - 2] = tau.apply(j) + i - 1;
        }
        Permutation { images }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}
