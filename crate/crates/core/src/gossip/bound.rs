//! Tail bound on the consensus time of gossiped Borda vectors:
//!
//! ```text
//! P(T > t) ≤ 4 m λ₂(W)ᵗ Σⱼ (dʲ / rʲ)²
//! ```
//!
//! where `rʲ` is the gap between object `j`'s average score and its nearest
//! neighbor in sorted order, and `dʲ` is the initial spread of agents' scores
//! for `j`.

use serde::{Deserialize, Serialize};

use crate::aggregate::{snap, Profile};
use crate::error::{Error, Result};
use crate::gossip::BordaState;
use crate::perm::Permutation;

/// Gaps and spreads of a profile, listed in sorted-mean order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSpread {
    /// Objects sorted by ascending mean (ties by id).
    pub order: Permutation,
    /// Sorted means `b̄¹ ≤ … ≤ b̄ⁿ`.
    pub means: Vec<f64>,
    pub r: Vec<f64>,
    pub d: Vec<f64>,
    /// Objects whose gap is zero on the score grid.
    pub degenerate: Vec<usize>,
}

impl GapSpread {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate.is_empty()
    }
}

pub fn gap_and_spread(profile: &Profile) -> GapSpread {
    let state = BordaState::from_profile(profile);
    let target = state.column_means();
    let order = target.ranking();
    let means: Vec<f64> = order.entries().iter().map(|&j| target.score(j)).collect();
    let n = means.len();

    let mut r = Vec::with_capacity(n);
    let mut degenerate = Vec::new();
    for k in 0..n {
        let below = (k > 0).then(|| means[k] - means[k - 1]);
        let above = (k + 1 < n).then(|| means[k + 1] - means[k]);
        let gap = match (below, above) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            // a single object has no neighbor to be confused with
            (None, None) => f64::INFINITY,
        };
        if snap(gap) == 0.0 {
            degenerate.push(order.at(k + 1));
            r.push(0.0);
        } else {
            r.push(gap);
        }
    }

    let d = order
        .entries()
        .iter()
        .map(|&j| {
            let col = state.rows().map(|row| row[j - 1]);
            let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            });
            hi - lo
        })
        .collect();

    GapSpread { order, means, r, d, degenerate }
}

/// Everything the tail bound depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub r: Vec<f64>,
    pub d: Vec<f64>,
    pub lambda2: f64,
    pub m: usize,
}

impl BoundInputs {
    pub fn new(gaps: &GapSpread, lambda2: f64, m: usize) -> Result<Self> {
        if gaps.is_degenerate() {
            return Err(Error::DegenerateGaps { objects: gaps.degenerate.clone() });
        }
        let inputs = Self { r: gaps.r.clone(), d: gaps.d.clone(), lambda2, m };
        inputs.validate()?;
        Ok(inputs)
    }

    fn validate(&self) -> Result<()> {
        if self.r.len() != self.d.len() {
            return Err(Error::SizeMismatch { expected: self.r.len(), found: self.d.len() });
        }
        let zero: Vec<usize> =
            self.r.iter().enumerate().filter(|(_, &r)| !(r > 0.0)).map(|(k, _)| k + 1).collect();
        if !zero.is_empty() {
            return Err(Error::DegenerateGaps { objects: zero });
        }
        if self.d.iter().any(|&d| !(d >= 0.0)) {
            return Err(Error::InvalidArgument("spreads must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.lambda2) {
            return Err(Error::InvalidArgument(format!(
                "lambda2 = {} is outside [0, 1]",
                self.lambda2
            )));
        }
        Ok(())
    }

    /// `Σⱼ (dʲ / rʲ)²`.
    pub fn ratio_sum(&self) -> f64 {
        self.d.iter().zip(&self.r).map(|(d, r)| (d / r).powi(2)).sum()
    }
}

/// `4 m λ₂ᵗ Σⱼ (dʲ/rʲ)²`. Not clamped to 1.
pub fn theoretical_bound(t: u64, inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let decay = match i32::try_from(t) {
        Ok(t) => inputs.lambda2.powi(t),
        Err(_) => inputs.lambda2.powf(t as f64),
    };
    Ok(4.0 * inputs.m as f64 * decay * inputs.ratio_sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(rs: &[&[usize]]) -> Profile {
        Profile::new(rs.iter().map(|r| Permutation::new(r.to_vec()).unwrap()).collect()).unwrap()
    }

    #[test]
    fn unanimous_profile() {
        let g = gap_and_spread(&profile(&[&[1, 2, 3], &[1, 2, 3]]));
        assert_eq!(g.means, vec![1.0, 2.0, 3.0]);
        assert_eq!(g.r, vec![1.0, 1.0, 1.0]);
        assert_eq!(g.d, vec![0.0, 0.0, 0.0]);
        assert!(!g.is_degenerate());
    }

    #[test]
    fn opposed_voters_are_degenerate() {
        let g = gap_and_spread(&profile(&[&[1, 2], &[2, 1]]));
        assert_eq!(g.degenerate, vec![1, 2]);
        assert!(matches!(BoundInputs::new(&g, 0.5, 2), Err(Error::DegenerateGaps { .. })));
    }

    #[test]
    fn partial_tie_is_flagged() {
        let g = gap_and_spread(&profile(&[&[1, 2, 3], &[1, 3, 2]]));
        assert_eq!(g.means, vec![1.0, 2.5, 2.5]);
        assert_eq!(g.degenerate, vec![2, 3]);
        assert_eq!(g.r[0], 1.5);
    }

    #[test]
    fn spreads_follow_sorted_order() {
        // means 4/3, 5/3, 3
        let g = gap_and_spread(&profile(&[&[1, 2, 3], &[2, 1, 3], &[1, 2, 3]]));
        assert_eq!(g.order.entries(), &[1, 2, 3]);
        assert_eq!(g.d, vec![1.0, 1.0, 0.0]);
        let third = 1.0 / 3.0;
        assert!((g.r[0] - third).abs() < 1e-12);
        assert!((g.r[1] - third).abs() < 1e-12);
        assert!((g.r[2] - (3.0 - 5.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn bound_values() {
        let inputs = BoundInputs { r: vec![0.5, 1.0], d: vec![1.0, 2.0], lambda2: 0.0, m: 3 };
        assert_eq!(theoretical_bound(0, &inputs).unwrap(), 4.0 * 3.0 * 8.0);
        assert_eq!(theoretical_bound(1, &inputs).unwrap(), 0.0);
        let inputs = BoundInputs { lambda2: 0.8, ..inputs };
        let b: Vec<f64> = (0..20).map(|t| theoretical_bound(t, &inputs).unwrap()).collect();
        assert!(b.windows(2).all(|w| w[1] < w[0]));
        let bad = BoundInputs { r: vec![0.0, 1.0], ..inputs };
        assert!(matches!(theoretical_bound(3, &bad), Err(Error::DegenerateGaps { .. })));
    }
}
