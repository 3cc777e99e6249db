//! Profile-level aggregation: classic and positional Borda, exact
//! distance-minimizing (Kemeny-style) aggregation, and an adjacent-swap
//! local search.
//!
//! Ties are broken deterministically everywhere: by ascending object id when
//! sorting scores, and by lexicographically smallest one-line notation when
//! choosing among equally good rankings.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distance::{ExactOracle, Metric, WEIGHT_TOLERANCE};
use crate::error::{Error, Result};
use crate::perm::{AdjacentTransposition, Permutation};

/// Grid used to decide that two averaged scores are tied.
pub const SCORE_GRID: f64 = 1e-9;

/// A non-empty list of full rankings over the same `n` objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    rankings: Vec<Permutation>,
}

impl Profile {
    pub fn new(rankings: Vec<Permutation>) -> Result<Self> {
        let first = rankings.first().ok_or(Error::EmptyProfile)?;
        let n = first.len();
        if let Some(bad) = rankings.iter().find(|r| r.len() != n) {
            return Err(Error::SizeMismatch { expected: n, found: bad.len() });
        }
        Ok(Self { rankings })
    }

    /// Number of objects.
    pub fn n(&self) -> usize {
        self.rankings[0].len()
    }

    /// Number of voters.
    pub fn m(&self) -> usize {
        self.rankings.len()
    }

    pub fn rankings(&self) -> &[Permutation] {
        &self.rankings
    }

    /// `Σᵢ d(candidate, σᵢ)`.
    pub fn cost(&self, candidate: &Permutation, metric: &Metric) -> Result<f64> {
        self.rankings.iter().map(|r| metric.distance(candidate, r)).sum()
    }
}

/// Per-object average scores; `scores[j - 1]` belongs to object `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
}

impl ScoreVector {
    pub fn score(&self, object: usize) -> f64 {
        self.scores[object - 1]
    }

    /// Objects sorted by ascending score, ties (on the [`SCORE_GRID`]) broken
    /// by ascending object id.
    pub fn ranking(&self) -> Permutation {
        let mut objects: Vec<usize> = (1..=self.scores.len()).collect();
        objects.sort_by(|&a, &b| {
            snap(self.scores[a - 1])
                .total_cmp(&snap(self.scores[b - 1]))
                .then(a.cmp(&b))
        });
        Permutation::new(objects).expect("sorted object ids form a permutation")
    }
}

/// Rounds onto the tie-detection grid.
pub(crate) fn snap(x: f64) -> f64 {
    (x / SCORE_GRID).round() * SCORE_GRID
}

/// Positional scores `s[k] = Σ_{l<k} φ_l`: the `k`-th preference of each
/// ranking earns `s[k]`, and lower totals rank higher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionalScores {
    phi: Vec<f64>,
    s: Vec<f64>,
}

impl PositionalScores {
    /// From the `n - 1` nonnegative increments `φ_1, …, φ_{n-1}`.
    pub fn from_increments(phi: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) =
            phi.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidWeight { index, value });
        }
        let mut s = Vec::with_capacity(phi.len() + 1);
        let mut acc = 0.0;
        s.push(acc);
        for &f in &phi {
            acc += f;
            s.push(acc);
        }
        Ok(Self { phi, s })
    }

    /// Unit increments, `s = (0, 1, …, n - 1)`.
    pub fn classic(n: usize) -> Self {
        Self::from_increments(vec![1.0; n.saturating_sub(1)]).expect("unit increments")
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn increments(&self) -> &[f64] {
        &self.phi
    }

    /// Score of the `k`-th preference, 1-based.
    pub fn score(&self, k: usize) -> f64 {
        self.s[k - 1]
    }

    pub fn scores(&self) -> &[f64] {
        &self.s
    }
}

/// Borda count: object `j` scores the average of its ranks `σᵢ⁻¹(j)`; the
/// aggregate puts the lowest average first.
pub fn borda_aggregate(profile: &Profile) -> (Permutation, ScoreVector) {
    let n = profile.n();
    let mut sums = vec![0.0; n];
    for r in profile.rankings() {
        for (j, rank) in r.ranks().into_iter().enumerate() {
            sums[j] += rank as f64;
        }
    }
    average_and_sort(sums, profile.m())
}

/// Positional Borda with arbitrary nondecreasing scores `s`.
pub fn generalized_borda(
    profile: &Profile,
    pos: &PositionalScores,
) -> Result<(Permutation, ScoreVector)> {
    let n = profile.n();
    if pos.n() != n {
        return Err(Error::SizeMismatch { expected: n, found: pos.n() });
    }
    let mut sums = vec![0.0; n];
    for r in profile.rankings() {
        for (j, rank) in r.ranks().into_iter().enumerate() {
            sums[j] += pos.score(rank);
        }
    }
    Ok(average_and_sort(sums, profile.m()))
}

fn average_and_sort(sums: Vec<f64>, m: usize) -> (Permutation, ScoreVector) {
    let scores = ScoreVector { scores: sums.into_iter().map(|s| s / m as f64).collect() };
    (scores.ranking(), scores)
}

/// A ranking together with its cumulative distance to the profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub ranking: Permutation,
    pub cost: f64,
}

/// Exhaustive minimizer of `Σᵢ d(π, σᵢ)` over 𝕊ₙ. Among minimizers (costs
/// within the weight tolerance) the lexicographically smallest wins.
pub fn kemeny_exact(profile: &Profile, metric: &Metric) -> Result<Aggregate> {
    kemeny_exact_with(profile, metric, &ExactOracle::default())
}

pub fn kemeny_exact_with(
    profile: &Profile,
    metric: &Metric,
    oracle: &ExactOracle,
) -> Result<Aggregate> {
    let costs = kemeny_costs(profile, metric, oracle)?;
    let mut best = 0;
    for (k, &c) in costs.iter().enumerate().skip(1) {
        if c < costs[best] - WEIGHT_TOLERANCE {
            best = k;
        }
    }
    Ok(Aggregate {
        ranking: Permutation::from_lex_index(profile.n(), best)?,
        cost: costs[best],
    })
}

/// Cumulative cost of every candidate, indexed by lexicographic index.
pub fn kemeny_costs(profile: &Profile, metric: &Metric, oracle: &ExactOracle) -> Result<Vec<f64>> {
    let n = profile.n();
    metric.validate(n)?;
    if n > oracle.cap {
        return Err(Error::CapExceeded { n, cap: oracle.cap });
    }
    let mut total = vec![0.0; crate::perm::factorial(n)];
    for r in profile.rankings() {
        let column = metric.distances_from(r, oracle)?;
        for (t, d) in total.iter_mut().zip(column) {
            *t += d;
        }
    }
    Ok(total)
}

/// First-improvement descent over adjacent swaps.
///
/// Starts from `start` (Borda's ranking when `None`). The scan order over
/// the `n - 1` swap positions is shuffled once from `rng` and then fixed, so
/// the result is deterministic given the seed. Stops at a ranking no single
/// adjacent swap improves by more than the weight tolerance.
pub fn local_search_aggregate<R: Rng + ?Sized>(
    profile: &Profile,
    metric: &Metric,
    start: Option<&Permutation>,
    rng: &mut R,
) -> Result<Aggregate> {
    let n = profile.n();
    metric.validate(n)?;
    let mut current = match start {
        Some(s) if s.len() != n => {
            return Err(Error::SizeMismatch { expected: n, found: s.len() })
        }
        Some(s) => s.clone(),
        None => borda_aggregate(profile).0,
    };
    let mut cost = profile.cost(&current, metric)?;
    let mut order: Vec<usize> = (1..n).collect();
    order.shuffle(rng);
    loop {
        let mut improved = false;
        for &a in &order {
            let t = AdjacentTransposition::new(a, n)?;
            let mut candidate = current.clone();
            candidate.apply_adjacent(t);
            let c = profile.cost(&candidate, metric)?;
            if c < cost - WEIGHT_TOLERANCE {
                current = candidate;
                cost = c;
                improved = true;
                break;
            }
        }
        if !improved {
            return Ok(Aggregate { ranking: current, cost });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::AdjacentWeights;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn profile(rs: &[&[usize]]) -> Profile {
        Profile::new(rs.iter().map(|r| perm(r)).collect()).unwrap()
    }

    #[test]
    fn profile_validation() {
        assert_eq!(Profile::new(vec![]), Err(Error::EmptyProfile));
        assert!(matches!(
            Profile::new(vec![perm(&[1, 2]), perm(&[1, 2, 3])]),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn borda_examples() {
        let (r, s) = borda_aggregate(&profile(&[&[1, 2, 3]]));
        assert_eq!((r, s.scores), (perm(&[1, 2, 3]), vec![1.0, 2.0, 3.0]));

        let (r, s) = borda_aggregate(&profile(&[&[1, 2, 3], &[3, 2, 1]]));
        assert_eq!((r, s.scores), (perm(&[1, 2, 3]), vec![2.0, 2.0, 2.0]));

        let (r, s) = borda_aggregate(&profile(&[&[1, 2, 3, 4], &[2, 1, 3, 4], &[1, 2, 4, 3]]));
        assert_eq!(r, perm(&[1, 2, 3, 4]));
        let want = [4.0 / 3.0, 5.0 / 3.0, 10.0 / 3.0, 11.0 / 3.0];
        for (got, want) in s.scores.iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn near_ties_snap_to_grid() {
        let s = ScoreVector { scores: vec![1.0 + 1e-12, 1.0] };
        assert_eq!(s.ranking(), perm(&[1, 2]));
    }

    #[test]
    fn positional_scores() {
        let pos = PositionalScores::from_increments(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(pos.scores(), &[0.0, 1.0, 1.0, 1.0]);
        assert!(PositionalScores::from_increments(vec![1.0, -0.5]).is_err());
        assert_eq!(PositionalScores::classic(3).scores(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn generalized_borda_examples() {
        let pos = PositionalScores::from_increments(vec![1.0, 0.0, 0.0]).unwrap();
        let (r, s) = generalized_borda(&profile(&[&[2, 1, 3, 4], &[2, 3, 1, 4]]), &pos).unwrap();
        assert_eq!(s.scores, vec![1.0, 0.0, 1.0, 1.0]);
        assert_eq!(r.at(1), 2);

        let single = profile(&[&[3, 1, 4, 2]]);
        let pos = PositionalScores::from_increments(vec![0.5, 2.0, 0.25]).unwrap();
        assert_eq!(generalized_borda(&single, &pos).unwrap().0, perm(&[3, 1, 4, 2]));

        let p = profile(&[&[3, 1, 2], &[1, 3, 2], &[2, 3, 1]]);
        assert_eq!(
            generalized_borda(&p, &PositionalScores::classic(3)).unwrap().0,
            borda_aggregate(&p).0
        );
        assert!(generalized_borda(&p, &PositionalScores::classic(4)).is_err());
    }

    #[test]
    fn kemeny_examples() {
        let single = profile(&[&[3, 1, 4, 2]]);
        let a = kemeny_exact(&single, &Metric::Kendall).unwrap();
        assert_eq!((a.ranking, a.cost), (perm(&[3, 1, 4, 2]), 0.0));

        let p = profile(&[&[1, 2, 3], &[1, 2, 3], &[3, 2, 1]]);
        let a = kemeny_exact(&p, &Metric::Kendall).unwrap();
        assert_eq!((a.ranking, a.cost), (perm(&[1, 2, 3]), 3.0));

        let all: Vec<Permutation> = Permutation::all(3).unwrap().collect();
        let p = Profile::new(all).unwrap();
        let a = kemeny_exact(&p, &Metric::Kendall).unwrap();
        assert_eq!(a.ranking, perm(&[1, 2, 3]));
        let costs = kemeny_costs(&p, &Metric::Kendall, &ExactOracle::default()).unwrap();
        assert!(costs.iter().all(|&c| c == costs[0]));
    }

    #[test]
    fn kemeny_cap() {
        let p = Profile::new(vec![Permutation::identity(9).unwrap()]).unwrap();
        assert!(matches!(kemeny_exact(&p, &Metric::Kendall), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn kemeny_rejects_non_monotone_closed_form() {
        let p = profile(&[&[1, 2, 3]]);
        let m = Metric::WeightedKendall(AdjacentWeights::new(vec![1.0, 2.0]).unwrap());
        assert!(matches!(kemeny_exact(&p, &m), Err(Error::NonMonotoneWeights { .. })));
    }

    #[test]
    fn local_search_keeps_optimal_start() {
        let p = profile(&[&[1, 2, 3, 4], &[1, 2, 4, 3], &[2, 1, 3, 4]]);
        let best = kemeny_exact(&p, &Metric::Kendall).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = local_search_aggregate(&p, &Metric::Kendall, Some(&best.ranking), &mut rng).unwrap();
        assert_eq!(a.ranking, best.ranking);
        assert_eq!(a.cost, best.cost);
    }

    #[test]
    fn local_search_is_deterministic_and_not_worse() {
        let p = profile(&[&[4, 3, 2, 1], &[1, 2, 3, 4], &[2, 4, 1, 3], &[3, 1, 4, 2]]);
        let start = perm(&[4, 1, 3, 2]);
        let start_cost = p.cost(&start, &Metric::Kendall).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            local_search_aggregate(&p, &Metric::Kendall, Some(&start), &mut rng).unwrap()
        };
        assert_eq!(run(9), run(9));
        assert!(run(9).cost <= start_cost);
    }
}
