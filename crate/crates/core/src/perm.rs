//! Permutations in one-line notation and the pairwise-disagreement machinery
//! built on top of them.
//!
//! A [`Permutation`] lists objects by rank: `entries[k]` is the object placed
//! at rank `k + 1`. Objects and ranks are both 1-based, so the ranking
//! `4 3 1 2` puts object 4 first and object 2 last. Its [`inverse`] maps
//! each object to its rank, which is exactly the Borda score of that object.
//!
//! Composition follows `(p ∘ q)(k) = p(q(k))`. Right-multiplying by an
//! adjacent transposition `(a a+1)` therefore swaps the objects sitting at
//! ranks `a` and `a + 1`.
//!
//! [`inverse`]: Permutation::inverse

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    entries: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from 1-based one-line notation.
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        let mut seen = vec![false; n];
        for &x in &entries {
            if x == 0 || x > n || seen[x - 1] {
                return Err(Error::NotABijection { n, entries });
            }
            seen[x - 1] = true;
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        Ok(Self { entries: (1..=n).collect() })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Always false; kept for API symmetry with `len`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// The object ranked at position `rank` (1-based).
    #[inline]
    pub fn at(&self, rank: usize) -> usize {
        self.entries[rank - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(k, &x)| x == k + 1)
    }

    /// Rank of every object: `ranks()[j - 1]` is the rank of object `j`.
    /// Same values as `inverse().entries()`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = vec![0; self.len()];
        for (k, &x) in self.entries.iter().enumerate() {
            r[x - 1] = k + 1;
        }
        r
    }

    pub fn inverse(&self) -> Self {
        Self { entries: self.ranks() }
    }

    /// `(self ∘ other)(k) = self(other(k))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_same_len(self, other)?;
        Ok(Self {
            entries: other.entries.iter().map(|&k| self.entries[k - 1]).collect(),
        })
    }

    /// Right-multiplies in place by `(a a+1)`.
    #[inline]
    pub fn apply_adjacent(&mut self, t: AdjacentTransposition) {
        self.entries.swap(t.a - 1, t.a);
    }

    /// Right-multiplies in place by the transposition of ranks `a` and `b`.
    #[inline]
    pub fn swap_ranks(&mut self, a: usize, b: usize) {
        self.entries.swap(a - 1, b - 1);
    }

    pub fn cycle_count(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.entries[k] - 1;
            }
        }
        cycles
    }

    /// Position of this permutation in the lexicographic order of 𝕊ₙ
    /// (the Lehmer-code rank), in `0..n!`.
    pub fn lex_index(&self) -> usize {
        lex_index_of(&self.entries)
    }

    /// Inverse of [`lex_index`](Self::lex_index).
    pub fn from_lex_index(n: usize, index: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        let total = factorial(n);
        if index >= total {
            return Err(Error::InvalidArgument(format!(
                "lex index {index} out of range for n = {n}"
            )));
        }
        let mut entries = vec![0; n];
        decode_lex_index(index, &mut entries);
        Ok(Self { entries })
    }

    /// Every permutation of `1..=n` in lexicographic order.
    pub fn all(n: usize) -> Result<AllPermutations> {
        Ok(AllPermutations { next: Some(Self::identity(n)?) })
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, x) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(entries: Vec<usize>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.entries
    }
}

/// Lexicographic enumeration of 𝕊ₙ, see [`Permutation::all`].
#[derive(Debug, Clone)]
pub struct AllPermutations {
    next: Option<Permutation>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.entries.clone();
        if next_lex(&mut succ) {
            self.next = Some(Permutation { entries: succ });
        }
        Some(current)
    }
}

fn next_lex(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub(crate) fn lex_index_of(entries: &[usize]) -> usize {
    let n = entries.len();
    let mut index = 0;
    for k in 0..n {
        let smaller_after = entries[k + 1..].iter().filter(|&&x| x < entries[k]).count();
        index = index * (n - k) + smaller_after;
    }
    index
}

/// Writes the permutation with the given lexicographic index into `out`.
/// `index` must be below `out.len()!`.
pub(crate) fn decode_lex_index(mut index: usize, out: &mut [usize]) {
    let n = out.len();
    // factorial-base digits, most significant first
    for k in (0..n).rev() {
        let base = n - k;
        out[k] = index % base;
        index /= base;
    }
    let mut used = 0u64;
    for slot in out.iter_mut() {
        let mut d = *slot;
        let mut x = 0;
        loop {
            if used & (1 << x) == 0 {
                if d == 0 {
                    break;
                }
                d -= 1;
            }
            x += 1;
        }
        used |= 1 << x;
        *slot = x + 1;
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// The swap of ranks `a` and `a + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdjacentTransposition {
    a: usize,
}

impl AdjacentTransposition {
    pub fn new(a: usize, n: usize) -> Result<Self> {
        if a == 0 || a >= n {
            return Err(Error::TranspositionOutOfRange { a, n });
        }
        Ok(Self { a })
    }

    /// Lower of the two swapped ranks.
    #[inline]
    pub fn rank(self) -> usize {
        self.a
    }

    pub fn as_permutation(self, n: usize) -> Result<Permutation> {
        let mut p = Permutation::identity(n)?;
        if self.a >= n {
            return Err(Error::TranspositionOutOfRange { a: self.a, n });
        }
        p.apply_adjacent(self);
        Ok(p)
    }
}

impl fmt::Display for AdjacentTransposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.a, self.a + 1)
    }
}

pub(crate) fn check_same_len(p: &Permutation, q: &Permutation) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::SizeMismatch { expected: p.len(), found: q.len() });
    }
    Ok(())
}

/// Number of object pairs on which `p` and `q` disagree. Quadratic pair count.
pub fn kendall_tau(p: &Permutation, q: &Permutation) -> Result<usize> {
    check_same_len(p, q)?;
    let (rp, rq) = (p.ranks(), q.ranks());
    let n = p.len();
    let mut count = 0;
    for a in 0..n {
        for b in a + 1..n {
            if (rp[a] < rp[b]) != (rq[a] < rq[b]) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Same value as [`kendall_tau`], computed as an inversion count by merge
/// sort in `O(n log n)`.
pub fn kendall_tau_fast(p: &Permutation, q: &Permutation) -> Result<usize> {
    check_same_len(p, q)?;
    let rq = q.ranks();
    // ranks in q of the objects, listed in p's order
    let mut seq: Vec<usize> = p.entries().iter().map(|&x| rq[x - 1]).collect();
    let mut buf = vec![0; seq.len()];
    Ok(count_inversions(&mut seq, &mut buf))
}

fn count_inversions(v: &mut [usize], buf: &mut [usize]) -> usize {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (lo, hi) = v.split_at_mut(mid);
        count_inversions(lo, &mut buf[..mid]) + count_inversions(hi, &mut buf[mid..n])
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[i] <= v[j] {
            buf[k] = v[i];
            i += 1;
        } else {
            buf[k] = v[j];
            inv += mid - i;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    inv
}

/// Per-object disagreement counts between two rankings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisagreementProfile {
    /// `counts[i - 1]` is the number of objects `j` such that the two
    /// rankings order `{i, j}` differently.
    pub counts: Vec<usize>,
    /// Total number of disagreeing pairs (the Kendall τ distance).
    pub pairs: usize,
}

impl DisagreementProfile {
    #[inline]
    pub fn count(&self, object: usize) -> usize {
        self.counts[object - 1]
    }
}

pub fn disagreement_profile(p: &Permutation, q: &Permutation) -> Result<DisagreementProfile> {
    check_same_len(p, q)?;
    let (rp, rq) = (p.ranks(), q.ranks());
    let n = p.len();
    let mut counts = vec![0; n];
    let mut pairs = 0;
    for a in 0..n {
        for b in a + 1..n {
            if (rp[a] < rp[b]) != (rq[a] < rq[b]) {
                counts[a] += 1;
                counts[b] += 1;
                pairs += 1;
            }
        }
    }
    Ok(DisagreementProfile { counts, pairs })
}

/// True when `w` agrees with `p` or with `q` on every pair of objects.
pub fn is_between(p: &Permutation, w: &Permutation, q: &Permutation) -> Result<bool> {
    check_same_len(p, w)?;
    check_same_len(p, q)?;
    let (rp, rw, rq) = (p.ranks(), w.ranks(), q.ranks());
    let n = p.len();
    for a in 0..n {
        for b in a + 1..n {
            let ow = rw[a] < rw[b];
            if ow != (rp[a] < rp[b]) && ow != (rq[a] < rq[b]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Uniform draw from 𝕊ₙ.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    let mut p = Permutation::identity(n)?;
    p.entries.shuffle(rng);
    Ok(p)
}
