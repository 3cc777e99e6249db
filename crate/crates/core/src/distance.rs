//! Weighted Kendall and Cayley-type distances.
//!
//! Two routes compute the weighted Kendall distance:
//!
//! * [`weighted_kendall_monotone`] evaluates the closed form over per-object
//!   walks. It only accepts weight functions that are nonincreasing in the
//!   rank position (heavier swaps near the top of the list).
//! * [`weighted_kendall_exact`] runs Dijkstra over the Cayley graph of 𝕊ₙ
//!   generated by adjacent transpositions. It accepts arbitrary nonnegative
//!   weights and is capped at small `n`.
//!
//! Generator-set distances (uniform or weighted, including the Cayley
//! distance over all transpositions) reuse the same shortest-path oracle.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{self, check_same_len, factorial, AdjacentTransposition, Permutation};

/// Largest `n` the exhaustive oracles accept by default (8! = 40320 vertices).
pub const DEFAULT_ORACLE_CAP: usize = 8;

/// Absolute tolerance for comparisons between weight sums.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

fn check_weight(index: usize, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidWeight { index, value });
    }
    Ok(())
}

/// Weights `φ` of the `n - 1` adjacent transpositions; `weights[a - 1]` is
/// the cost of swapping ranks `a` and `a + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacentWeights {
    weights: Vec<f64>,
}

impl AdjacentWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        for (i, &w) in weights.iter().enumerate() {
            check_weight(i, w)?;
        }
        Ok(Self { weights })
    }

    /// All ones: the weighted distance reduces to Kendall's τ.
    pub fn unit(n: usize) -> Self {
        Self { weights: vec![1.0; n.saturating_sub(1)] }
    }

    /// Number of ranked objects these weights apply to.
    pub fn n(&self) -> usize {
        self.weights.len() + 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of `(a a+1)`, 1-based.
    #[inline]
    pub fn weight(&self, a: usize) -> f64 {
        self.weights[a - 1]
    }

    /// First 0-based index `i` with `weights[i] < weights[i + 1]`, if any.
    pub fn first_increase(&self) -> Option<usize> {
        self.weights.windows(2).position(|w| w[0] < w[1])
    }

    pub fn is_decreasing(&self) -> bool {
        self.first_increase().is_none()
    }

    fn check_decreasing(&self) -> Result<()> {
        match self.first_increase() {
            Some(index) => Err(Error::NonMonotoneWeights { index }),
            None => Ok(()),
        }
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::SizeMismatch { expected: n, found: self.n() });
        }
        Ok(())
    }
}

/// Symmetric nonnegative weights over all transpositions `(a b)` of ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranspositionWeights {
    n: usize,
    // row-major n×n, diagonal unused
    table: Vec<f64>,
}

impl TranspositionWeights {
    /// Every transposition costs one: the weighted distance is Cayley's.
    pub fn uniform(n: usize) -> Self {
        Self { n, table: vec![1.0; n * n] }
    }

    /// Builds a table from `(a, b, weight)` triples with 1-based ranks.
    /// Every unordered pair must be given exactly once (either orientation).
    pub fn from_triples(n: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        let mut table = vec![f64::NAN; n * n];
        for (index, &(a, b, w)) in triples.iter().enumerate() {
            if a == 0 || b == 0 || a > n || b > n || a == b {
                return Err(Error::InvalidArgument(format!(
                    "transposition ({a} {b}) is invalid for n = {n}"
                )));
            }
            check_weight(index, w)?;
            let slot = (a - 1) * n + (b - 1);
            if !table[slot].is_nan() {
                return Err(Error::InvalidArgument(format!("pair ({a} {b}) given twice")));
            }
            table[slot] = w;
            table[(b - 1) * n + (a - 1)] = w;
        }
        for a in 1..=n {
            for b in a + 1..=n {
                if table[(a - 1) * n + (b - 1)].is_nan() {
                    return Err(Error::InvalidArgument(format!("missing weight for pair ({a} {b})")));
                }
            }
        }
        Ok(Self { n, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.table[(a - 1) * self.n + (b - 1)]
    }
}

/// A finite generator set of 𝕊ₙ closed under inversion, with a nonnegative
/// weight per generator. Moves act on the right: `π ↦ π ∘ g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    n: usize,
    generators: Vec<Permutation>,
    weights: Vec<f64>,
}

impl GeneratorSet {
    pub fn new(generators: Vec<(Permutation, f64)>) -> Result<Self> {
        let n = match generators.first() {
            Some((g, _)) => g.len(),
            None => return Err(Error::InvalidGenerators("empty generator set".into())),
        };
        let mut gens = Vec::with_capacity(generators.len());
        let mut weights = Vec::with_capacity(generators.len());
        for (index, (g, w)) in generators.into_iter().enumerate() {
            if g.len() != n {
                return Err(Error::SizeMismatch { expected: n, found: g.len() });
            }
            if g.is_identity() {
                return Err(Error::InvalidGenerators("identity is not a valid generator".into()));
            }
            check_weight(index, w)?;
            if gens.contains(&g) {
                return Err(Error::InvalidGenerators(format!("duplicate generator {g}")));
            }
            gens.push(g);
            weights.push(w);
        }
        for (g, &w) in gens.iter().zip(&weights) {
            let inv = g.inverse();
            match gens.iter().position(|h| *h == inv) {
                None => {
                    return Err(Error::InvalidGenerators(format!(
                        "inverse of {g} is missing"
                    )))
                }
                Some(k) if weights[k] != w => {
                    return Err(Error::InvalidGenerators(format!(
                        "{g} and its inverse carry different weights"
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(Self { n, generators: gens, weights })
    }

    /// Adjacent transpositions with the given weights.
    pub fn adjacent(weights: &AdjacentWeights) -> Self {
        let n = weights.n();
        let generators = (1..n)
            .map(|a| {
                let mut g = Permutation::identity(n).expect("n >= 1");
                g.swap_ranks(a, a + 1);
                g
            })
            .collect();
        Self { n, generators, weights: weights.as_slice().to_vec() }
    }

    /// All transpositions with the given weights.
    pub fn transpositions(weights: &TranspositionWeights) -> Self {
        let n = weights.n();
        let mut generators = Vec::new();
        let mut ws = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                let mut g = Permutation::identity(n).expect("n >= 1");
                g.swap_ranks(a, b);
                generators.push(g);
                ws.push(weights.weight(a, b));
            }
        }
        Self { n, generators, weights: ws }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Permutation, f64)> {
        self.generators.iter().zip(self.weights.iter().copied())
    }

    /// Same generators, every weight set to one.
    pub fn with_unit_weights(&self) -> Self {
        Self { weights: vec![1.0; self.len()], ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost(f64);

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Exact shortest-path distances over a Cayley graph of 𝕊ₙ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOracle {
    pub cap: usize,
}

impl Default for ExactOracle {
    fn default() -> Self {
        Self { cap: DEFAULT_ORACLE_CAP }
    }
}

impl ExactOracle {
    pub fn with_cap(cap: usize) -> Self {
        Self { cap }
    }

    fn check_cap(&self, n: usize) -> Result<()> {
        if n > self.cap {
            return Err(Error::CapExceeded { n, cap: self.cap });
        }
        Ok(())
    }

    /// Minimum total generator weight taking `p` to `q`.
    pub fn distance(&self, gens: &GeneratorSet, p: &Permutation, q: &Permutation) -> Result<f64> {
        check_same_len(p, q)?;
        if gens.n() != p.len() {
            return Err(Error::SizeMismatch { expected: p.len(), found: gens.n() });
        }
        self.check_cap(p.len())?;
        let dist = dijkstra(gens, p, Some(q.lex_index()));
        match dist[q.lex_index()] {
            d if d.is_finite() => Ok(d),
            _ => Err(Error::Unreachable),
        }
    }

    /// Distances from `src` to every permutation, indexed by
    /// [`Permutation::lex_index`]. Unreachable entries are `f64::INFINITY`.
    pub fn distances_from(&self, gens: &GeneratorSet, src: &Permutation) -> Result<Vec<f64>> {
        if gens.n() != src.len() {
            return Err(Error::SizeMismatch { expected: src.len(), found: gens.n() });
        }
        self.check_cap(src.len())?;
        Ok(dijkstra(gens, src, None))
    }
}

fn dijkstra(gens: &GeneratorSet, src: &Permutation, target: Option<usize>) -> Vec<f64> {
    let n = src.len();
    let mut dist = vec![f64::INFINITY; factorial(n)];
    let mut done = vec![false; dist.len()];
    let mut heap = BinaryHeap::new();
    let start = src.lex_index();
    dist[start] = 0.0;
    heap.push(Reverse((Cost(0.0), start)));
    let moves: Vec<(&[usize], f64)> = gens.iter().map(|(g, w)| (g.entries(), w)).collect();
    let mut here = vec![0; n];
    let mut next = vec![0; n];
    while let Some(Reverse((Cost(d), v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        if Some(v) == target {
            break;
        }
        perm::decode_lex_index(v, &mut here);
        for &(g, w) in &moves {
            for (slot, &k) in next.iter_mut().zip(g) {
                *slot = here[k - 1];
            }
            let u = perm::lex_index_of(&next);
            let nd = d + w;
            if !done[u] && nd < dist[u] {
                dist[u] = nd;
                heap.push(Reverse((Cost(nd), u)));
            }
        }
    }
    dist
}

/// Closed-form weighted Kendall distance for nonincreasing weights.
///
/// Each object `i` walks from rank `π⁻¹(i)` down to
/// `ℓᵢ = (π⁻¹(i) + σ⁻¹(i) + Iᵢ) / 2` and back up to `σ⁻¹(i)`; the distance
/// is half the total weight of all walks.
pub fn weighted_kendall_monotone(
    p: &Permutation,
    q: &Permutation,
    w: &AdjacentWeights,
) -> Result<f64> {
    check_same_len(p, q)?;
    w.check_n(p.len())?;
    w.check_decreasing()?;
    let peaks = walk_peaks(p, q)?;
    let (rp, rq) = (p.ranks(), q.ranks());
    let segment = |from: usize, to: usize| (from..to).map(|j| w.weight(j)).sum::<f64>();
    let total = peaks
        .iter()
        .enumerate()
        .map(|(i, &l)| 0.5 * (segment(rp[i], l) + segment(rq[i], l)))
        .sum();
    Ok(total)
}

/// Turning point `ℓᵢ` of every object's minimum walk, indexed by object - 1.
pub fn walk_peaks(p: &Permutation, q: &Permutation) -> Result<Vec<usize>> {
    let profile = perm::disagreement_profile(p, q)?;
    let (rp, rq) = (p.ranks(), q.ranks());
    let n = p.len();
    Ok((0..n)
        .map(|i| {
            let sum = rp[i] + rq[i] + profile.counts[i];
            assert!(sum % 2 == 0, "walk peak for object {} is not an integer", i + 1);
            let l = sum / 2;
            assert!(l >= rp[i].max(rq[i]) && l <= n, "walk peak {l} out of range");
            l
        })
        .collect())
}

/// One adjacent swap of a transformation, tagged with the object whose
/// round performed it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub transposition: AdjacentTransposition,
    pub mover: usize,
}

/// A sequence of adjacent transpositions taking one ranking to another,
/// together with the rank walk of every object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transformation {
    pub steps: Vec<Step>,
    pub total_weight: f64,
    /// `walks[i - 1]` lists the ranks visited by object `i`.
    pub walks: Vec<Vec<usize>>,
}

impl Transformation {
    pub fn walk(&self, object: usize) -> &[usize] {
        &self.walks[object - 1]
    }

    /// Deepest rank reached by `object`.
    pub fn peak(&self, object: usize) -> usize {
        self.walk(object).iter().copied().max().unwrap_or(0)
    }

    /// Steps grouped into rounds: consecutive steps sharing a mover.
    pub fn rounds(&self) -> Vec<(usize, Vec<AdjacentTransposition>)> {
        let mut out: Vec<(usize, Vec<AdjacentTransposition>)> = Vec::new();
        for step in &self.steps {
            match out.last_mut() {
                Some((mover, ts)) if *mover == step.mover => ts.push(step.transposition),
                _ => out.push((step.mover, vec![step.transposition])),
            }
        }
        out
    }

    /// How many times each `(a a+1)` is used, indexed by `a - 1`. Dotting
    /// this with the weights gives `total_weight`.
    pub fn coefficients(&self) -> Vec<usize> {
        let n = self.walks.len();
        let mut c = vec![0; n.saturating_sub(1)];
        for step in &self.steps {
            c[step.transposition.rank() - 1] += 1;
        }
        c
    }

    /// Applies the steps to `start` in order.
    pub fn replay(&self, start: &Permutation) -> Permutation {
        let mut cur = start.clone();
        for step in &self.steps {
            cur.apply_adjacent(step.transposition);
        }
        cur
    }
}

/// Minimum-weight transformation of `p` into `q` for nonincreasing weights.
///
/// Round `k` bubbles the object `q(k)` up to rank `k`. Objects not yet placed
/// only ever move down before their own round, so every walk rises to its
/// peak and then falls, and every swap removes one disagreement.
pub fn minimum_weight_transformation(
    p: &Permutation,
    q: &Permutation,
    w: &AdjacentWeights,
) -> Result<Transformation> {
    check_same_len(p, q)?;
    w.check_n(p.len())?;
    w.check_decreasing()?;
    let n = p.len();
    let mut cur = p.clone();
    let mut rank = p.ranks();
    let mut walks: Vec<Vec<usize>> = rank.iter().map(|&r| vec![r]).collect();
    let mut steps = Vec::new();
    let mut total_weight = 0.0;
    for k in 1..=n {
        let mover = q.at(k);
        let from = rank[mover - 1];
        for a in (k..from).rev() {
            let t = AdjacentTransposition::new(a, n)?;
            let (upper, lower) = (cur.at(a), cur.at(a + 1));
            cur.apply_adjacent(t);
            rank[upper - 1] = a + 1;
            rank[lower - 1] = a;
            walks[upper - 1].push(a + 1);
            walks[lower - 1].push(a);
            total_weight += w.weight(a);
            steps.push(Step { transposition: t, mover });
        }
    }
    debug_assert_eq!(&cur, q);
    Ok(Transformation { steps, total_weight, walks })
}

/// Weighted Kendall distance for arbitrary nonnegative weights, by exhaustive
/// shortest path. Capped at [`DEFAULT_ORACLE_CAP`].
pub fn weighted_kendall_exact(
    p: &Permutation,
    q: &Permutation,
    w: &AdjacentWeights,
) -> Result<f64> {
    check_same_len(p, q)?;
    w.check_n(p.len())?;
    ExactOracle::default().distance(&GeneratorSet::adjacent(w), p, q)
}

/// Minimum number of transpositions taking `p` to `q`: `n` minus the number
/// of cycles of `q⁻¹ ∘ p`.
pub fn cayley_distance(p: &Permutation, q: &Permutation) -> Result<usize> {
    check_same_len(p, q)?;
    Ok(p.len() - q.inverse().compose(p)?.cycle_count())
}

/// Minimum-weight `G`-transformation cost, by exhaustive shortest path.
/// [`Error::Unreachable`] when `q` is outside `p`'s coset of `⟨G⟩`.
pub fn weighted_generator_distance(
    p: &Permutation,
    q: &Permutation,
    gens: &GeneratorSet,
) -> Result<f64> {
    ExactOracle::default().distance(gens, p, q)
}

/// A distance selector used by the aggregation rules and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Kendall,
    /// Closed form; requires nonincreasing weights.
    WeightedKendall(AdjacentWeights),
    /// Shortest-path oracle; arbitrary nonnegative weights.
    WeightedKendallExact(AdjacentWeights),
    Cayley,
    WeightedCayley(TranspositionWeights),
    Generators(GeneratorSet),
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Kendall => "kendall",
            Metric::WeightedKendall(_) => "wkendall",
            Metric::WeightedKendallExact(_) => "wkendall-exact",
            Metric::Cayley => "cayley",
            Metric::WeightedCayley(_) => "wcayley",
            Metric::Generators(_) => "gendist",
        }
    }

    /// Fails early on inputs the metric can never accept for size `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Metric::Kendall | Metric::Cayley => Ok(()),
            Metric::WeightedKendall(w) => {
                w.check_n(n)?;
                w.check_decreasing()
            }
            Metric::WeightedKendallExact(w) => w.check_n(n),
            Metric::WeightedCayley(t) if t.n() != n => {
                Err(Error::SizeMismatch { expected: n, found: t.n() })
            }
            Metric::WeightedCayley(_) => Ok(()),
            Metric::Generators(g) if g.n() != n => {
                Err(Error::SizeMismatch { expected: n, found: g.n() })
            }
            Metric::Generators(_) => Ok(()),
        }
    }

    fn oracle_generators(&self) -> Option<GeneratorSet> {
        match self {
            Metric::WeightedKendallExact(w) => Some(GeneratorSet::adjacent(w)),
            Metric::WeightedCayley(t) => Some(GeneratorSet::transpositions(t)),
            Metric::Generators(g) => Some(g.clone()),
            _ => None,
        }
    }

    pub fn distance(&self, p: &Permutation, q: &Permutation) -> Result<f64> {
        match self {
            Metric::Kendall => perm::kendall_tau(p, q).map(|d| d as f64),
            Metric::WeightedKendall(w) => weighted_kendall_monotone(p, q, w),
            Metric::WeightedKendallExact(w) => weighted_kendall_exact(p, q, w),
            Metric::Cayley => cayley_distance(p, q).map(|d| d as f64),
            Metric::WeightedCayley(t) => {
                check_same_len(p, q)?;
                self.validate(p.len())?;
                ExactOracle::default().distance(&GeneratorSet::transpositions(t), p, q)
            }
            Metric::Generators(g) => weighted_generator_distance(p, q, g),
        }
    }

    /// Distances from `src` to every permutation of the same size, indexed by
    /// [`Permutation::lex_index`]. Unreachable targets get `f64::INFINITY`.
    /// All metrics here are symmetric, so this is also the column of
    /// distances *to* `src`.
    pub fn distances_from(&self, src: &Permutation, oracle: &ExactOracle) -> Result<Vec<f64>> {
        let n = src.len();
        self.validate(n)?;
        oracle.check_cap(n)?;
        if let Some(gens) = self.oracle_generators() {
            return oracle.distances_from(&gens, src);
        }
        Permutation::all(n)?.map(|p| self.distance(src, &p)).collect()
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
