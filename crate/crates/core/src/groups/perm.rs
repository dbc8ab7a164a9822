//! Finitely supported permutations of the nonnegative integers.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A permutation stored as the word of images of `0..len`; every index at or
/// beyond `len` is fixed. Trailing fixed points are trimmed so that equal
/// permutations have equal words.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity() -> Self {
        Self { images: Vec::new() }
    }

    /// Builds a permutation from its image word. Returns `None` when the word
    /// is not a bijection of `0..word.len()`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        let mut p = Self { images };
        p.trim();
        Some(p)
    }

    /// Transposition of `a` and `b` (zero-based).
    pub fn transposition(a: usize, b: usize) -> Self {
        let n = a.max(b) + 1;
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        let mut p = Self { images };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while let Some(&last) = self.images.last() {
            if last == self.images.len() - 1 {
                self.images.pop();
            } else {
                break;
            }
        }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images.get(i).copied().unwrap_or(i)
    }

    /// Smallest `n` such that the permutation fixes every index `>= n`.
    pub fn support_len(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let n = self.support_len().max(other.support_len());
        let images = (0..n).map(|i| self.apply(other.apply(i))).collect();
        let mut p = Permutation { images };
        p.trim();
        p
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    /// All permutations of `0..n` in lexicographic order of their words.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut word: Vec<usize> = (0..n).collect();
        loop {
            let mut p = Permutation {
                images: word.clone(),
            };
            p.trim();
            out.push(p);
            if !next_lexicographic(&mut word) {
                break;
            }
        }
        out
    }
}

fn next_lexicographic(word: &mut [usize]) -> bool {
    let n = word.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && word[i - 1] >= word[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while word[j] <= word[i - 1] {
        j -= 1;
    }
    word.swap(i - 1, j);
    word[i..].reverse();
    true
}

impl fmt::Display for Permutation {
    /// One-based image word, e.g. `[2 3 1]` for 1↦2, 2↦3, 3↦1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, i) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "]")
    }
}
