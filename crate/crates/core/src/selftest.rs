//! Fast invariant suite: exhaustive checks on small symmetric groups plus
//! golden values from the 4312 worked example. Runs in well under a second.

use serde::{Deserialize, Serialize};

use crate::aggregate::{borda_aggregate, kemeny_costs, kemeny_exact, Profile};
use crate::distance::{
    cayley_distance, minimum_weight_transformation, weighted_generator_distance,
    weighted_kendall_exact, weighted_kendall_monotone, AdjacentWeights, ExactOracle,
    GeneratorSet, Metric, TranspositionWeights, WEIGHT_TOLERANCE,
};
use crate::gossip::{BordaState, GossipNetwork, MixingMatrix};
use crate::perm::{is_between, kendall_tau, kendall_tau_fast, Permutation};

/// Deliberate corruption used to confirm failures are reported by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    /// Feed increasing weights to the monotone-weight check.
    NonMonotoneWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(Option<Fault>) -> Result<String, String>;

const CHECKS: &[(&str, Check)] = &[
    ("worked-example-4312-walks", worked_example_walks),
    ("worked-example-4312-distance", worked_example_distance),
    ("weight-monotonicity", weight_monotonicity),
    ("kendall-metric-laws-s4", kendall_metric_laws),
    ("kendall-fast-path-s5", kendall_fast_path),
    ("betweenness-additivity-s4", betweenness_additivity),
    ("closed-form-vs-oracle-s4", closed_form_vs_oracle),
    ("cayley-vs-transposition-oracle-s4", cayley_vs_oracle),
    ("borda-examples", borda_examples),
    ("kemeny-s3", kemeny_s3),
    ("mixing-matrix-spectrum", spectrum),
    ("gossip-conservation", gossip_conservation),
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|(name, _)| *name)
}

pub fn run_selftest(fault: Option<Fault>) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(name, check)| match check(fault) {
            Ok(detail) => CheckResult { name, passed: true, detail },
            Err(detail) => CheckResult { name, passed: false, detail },
        })
        .collect()
}

fn p(v: &[usize]) -> Permutation {
    Permutation::new(v.to_vec()).expect("literal permutation")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all(n: usize) -> Vec<Permutation> {
    Permutation::all(n).expect("n >= 1").collect()
}

fn fmt_walk(w: &[usize]) -> String {
    let parts: Vec<String> = w.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn worked_example_walks(_: Option<Fault>) -> Result<String, String> {
    let w = AdjacentWeights::new(vec![3.0, 2.0, 1.0]).map_err(|e| e.to_string())?;
    let t = minimum_weight_transformation(&p(&[4, 3, 1, 2]), &p(&[1, 2, 3, 4]), &w)
        .map_err(|e| e.to_string())?;
    let want: [&[usize]; 4] = [&[3, 2, 1], &[4, 3, 2], &[2, 3, 4, 3], &[1, 2, 3, 4]];
    let detail = (1..=4)
        .map(|i| format!("p{i}={}", fmt_walk(t.walk(i))))
        .collect::<Vec<_>>()
        .join(" ");
    ensure((1..=4).all(|i| t.walk(i) == want[i - 1]), || format!("got {detail}"))?;
    Ok(detail)
}

fn worked_example_distance(_: Option<Fault>) -> Result<String, String> {
    let w = AdjacentWeights::new(vec![0.9, 0.4, 0.1]).map_err(|e| e.to_string())?;
    let (pi, e) = (p(&[4, 3, 1, 2]), p(&[1, 2, 3, 4]));
    let t = minimum_weight_transformation(&pi, &e, &w).map_err(|e| e.to_string())?;
    let coeff = t.coefficients();
    ensure(coeff == [1, 2, 2], || format!("coefficients {coeff:?}"))?;
    let d = weighted_kendall_monotone(&pi, &e, &w).map_err(|e| e.to_string())?;
    let want = 0.9 + 2.0 * 0.4 + 2.0 * 0.1;
    ensure((d - want).abs() < WEIGHT_TOLERANCE, || format!("distance {d}, want {want}"))?;
    Ok(format!("coefficients {coeff:?}"))
}

fn weight_monotonicity(fault: Option<Fault>) -> Result<String, String> {
    let decreasing = match fault {
        Some(Fault::NonMonotoneWeights) => vec![1.0, 2.0, 3.0],
        None => vec![3.0, 2.0, 1.0],
    };
    let w = AdjacentWeights::new(decreasing).map_err(|e| e.to_string())?;
    let (pi, e) = (p(&[4, 3, 1, 2]), p(&[1, 2, 3, 4]));
    weighted_kendall_monotone(&pi, &e, &w)
        .map_err(|e| format!("decreasing weights rejected: {e}"))?;
    let increasing = AdjacentWeights::new(vec![1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    ensure(weighted_kendall_monotone(&pi, &e, &increasing).is_err(), || {
        "increasing weights accepted by the closed form".into()
    })?;
    Ok("decreasing accepted, increasing rejected".into())
}

fn kendall_metric_laws(_: Option<Fault>) -> Result<String, String> {
    let s4 = all(4);
    let d = |a: &Permutation, b: &Permutation| kendall_tau(a, b).expect("same n");
    for a in &s4 {
        for b in &s4 {
            ensure((d(a, b) == 0) == (a == b), || format!("identity of indiscernibles at {a}, {b}"))?;
            ensure(d(a, b) == d(b, a), || format!("asymmetric at {a}, {b}"))?;
            for c in &s4 {
                ensure(d(a, c) <= d(a, b) + d(b, c), || format!("triangle at {a}, {b}, {c}"))?;
                let (ca, cb) = (c.compose(a).expect("n"), c.compose(b).expect("n"));
                ensure(d(&ca, &cb) == d(a, b), || format!("left-invariance at {a}, {b}, {c}"))?;
            }
        }
    }
    Ok(format!("{} triples", s4.len().pow(3)))
}

fn kendall_fast_path(_: Option<Fault>) -> Result<String, String> {
    let s5 = all(5);
    for a in &s5 {
        for b in &s5 {
            let (slow, fast) = (kendall_tau(a, b).expect("n"), kendall_tau_fast(a, b).expect("n"));
            ensure(slow == fast, || format!("{a} vs {b}: {slow} != {fast}"))?;
        }
    }
    Ok(format!("{} pairs", s5.len().pow(2)))
}

fn betweenness_additivity(_: Option<Fault>) -> Result<String, String> {
    let s4 = all(4);
    let d = |a: &Permutation, b: &Permutation| kendall_tau(a, b).expect("same n");
    let mut between = 0;
    for a in &s4 {
        for w in &s4 {
            for b in &s4 {
                let additive = d(a, b) == d(a, w) + d(w, b);
                let is_b = is_between(a, w, b).expect("same n");
                ensure(additive == is_b, || format!("{a} – {w} – {b}"))?;
                between += usize::from(is_b);
            }
        }
    }
    Ok(format!("{between} betweenness triples"))
}

fn closed_form_vs_oracle(_: Option<Fault>) -> Result<String, String> {
    let weights = [[1.0, 1.0, 1.0], [3.0, 2.0, 1.0], [5.0, 0.5, 0.25], [2.0, 2.0, 0.0]];
    let s4 = all(4);
    for w in weights {
        let w = AdjacentWeights::new(w.to_vec()).map_err(|e| e.to_string())?;
        for a in &s4 {
            let column = ExactOracle::default()
                .distances_from(&GeneratorSet::adjacent(&w), a)
                .map_err(|e| e.to_string())?;
            for b in &s4 {
                let closed = weighted_kendall_monotone(a, b, &w).map_err(|e| e.to_string())?;
                let exact = column[b.lex_index()];
                ensure((closed - exact).abs() < WEIGHT_TOLERANCE, || {
                    format!("{a} vs {b} with {:?}: {closed} != {exact}", w.as_slice())
                })?;
            }
        }
    }
    let spot = weighted_kendall_exact(&p(&[4, 3, 1, 2]), &p(&[1, 2, 3, 4]), &AdjacentWeights::new(vec![3.0, 2.0, 1.0]).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(spot == 9.0, || format!("4312 with (3,2,1) gave {spot}"))?;
    Ok(format!("{} weight functions × {} pairs", weights.len(), s4.len().pow(2)))
}

fn cayley_vs_oracle(_: Option<Fault>) -> Result<String, String> {
    let gens = GeneratorSet::transpositions(&TranspositionWeights::uniform(4));
    let s4 = all(4);
    for a in &s4 {
        for b in &s4 {
            let c = cayley_distance(a, b).expect("n") as f64;
            let g = weighted_generator_distance(a, b, &gens).map_err(|e| e.to_string())?;
            ensure(c == g, || format!("{a} vs {b}: {c} != {g}"))?;
        }
    }
    Ok(format!("{} pairs", s4.len().pow(2)))
}

fn borda_examples(_: Option<Fault>) -> Result<String, String> {
    let prof = Profile::new(vec![p(&[1, 2, 3, 4]), p(&[2, 1, 3, 4]), p(&[1, 2, 4, 3])])
        .map_err(|e| e.to_string())?;
    let (r, s) = borda_aggregate(&prof);
    let want = [4.0 / 3.0, 5.0 / 3.0, 10.0 / 3.0, 11.0 / 3.0];
    ensure(r == p(&[1, 2, 3, 4]), || format!("aggregate {r}"))?;
    ensure(s.scores.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12), || {
        format!("scores {:?}", s.scores)
    })?;
    let total: f64 = s.scores.iter().sum();
    ensure((total - 10.0).abs() < WEIGHT_TOLERANCE, || format!("score sum {total}"))?;
    Ok(format!("aggregate {r}"))
}

fn kemeny_s3(_: Option<Fault>) -> Result<String, String> {
    let prof = Profile::new(vec![p(&[1, 2, 3]), p(&[1, 2, 3]), p(&[3, 2, 1])])
        .map_err(|e| e.to_string())?;
    let a = kemeny_exact(&prof, &Metric::Kendall).map_err(|e| e.to_string())?;
    ensure(a.ranking == p(&[1, 2, 3]) && a.cost == 3.0, || format!("{} at cost {}", a.ranking, a.cost))?;
    let full = Profile::new(all(3)).map_err(|e| e.to_string())?;
    let costs = kemeny_costs(&full, &Metric::Kendall, &ExactOracle::default())
        .map_err(|e| e.to_string())?;
    ensure(costs.iter().all(|&c| c == costs[0]), || format!("costs {costs:?}"))?;
    Ok(format!("all-of-S3 cost {}", costs[0]))
}

fn spectrum(_: Option<Fault>) -> Result<String, String> {
    let two = MixingMatrix::build(&GossipNetwork::complete(2).map_err(|e| e.to_string())?).lambda2();
    ensure(two.abs() < 1e-12, || format!("m=2 lambda2 {two}"))?;
    let three = MixingMatrix::build(&GossipNetwork::complete(3).map_err(|e| e.to_string())?).lambda2();
    ensure((three - 0.5).abs() < 1e-8, || format!("K3 lambda2 {three}"))?;
    let split = GossipNetwork::uniform(4, vec![(0, 1), (2, 3)]).map_err(|e| e.to_string())?;
    let one = MixingMatrix::build(&split).lambda2();
    ensure((one - 1.0).abs() < 1e-12, || format!("disconnected lambda2 {one}"))?;
    Ok(format!("lambda2: single edge {two:.1e}, K3 {three:.12}, two components {one:.12}"))
}

fn gossip_conservation(_: Option<Fault>) -> Result<String, String> {
    let prof = Profile::new(vec![p(&[1, 2, 3]), p(&[3, 1, 2]), p(&[2, 3, 1]), p(&[1, 3, 2])])
        .map_err(|e| e.to_string())?;
    let net = GossipNetwork::complete(4).map_err(|e| e.to_string())?;
    let mut state = BordaState::from_profile(&prof);
    let before = state.column_sums();
    let mut rng = crate::gossip::trial_rng(0, 0);
    for _ in 0..1000 {
        let (i, j) = net.sample_edge(&mut rng);
        state.gossip_step(&net, i, j).map_err(|e| e.to_string())?;
    }
    let drift = before
        .iter()
        .zip(state.column_sums())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(drift < 1e-9, || format!("drift {drift}"))?;
    Ok(format!("drift {drift:.1e} after 1000 steps"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for r in run_selftest(None) {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn injected_fault_is_named() {
        let failed: Vec<_> =
            run_selftest(Some(Fault::NonMonotoneWeights)).into_iter().filter(|r| !r.passed).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].name, "weight-monotonicity");
    }
}
