//! Acceptance criteria. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line whether or not output capture is on. Exits non-zero when any
//! criterion fails.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rankagg::aggregate::{kemeny_costs, kemeny_exact, local_search_aggregate};
use rankagg::distance::{
    cayley_distance, minimum_weight_transformation, weighted_kendall_monotone,
};
use rankagg::gossip::{
    gap_and_spread, monte_carlo_tail, trial_rng, GossipRun, MonteCarloConfig, MonteCarloReport,
};
use rankagg::perm::{is_between, kendall_tau, random_permutation};
use rankagg::{
    AdjacentTransposition, AdjacentWeights, ExactOracle, GeneratorSet, GossipNetwork,
    MixingMatrix, Metric, Permutation, Profile, TranspositionWeights,
};

const TOL: f64 = 1e-9;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn perm(entries: &[usize]) -> Permutation {
    Permutation::new(entries.to_vec()).unwrap()
}

fn all(n: usize) -> Vec<Permutation> {
    Permutation::all(n).unwrap().collect()
}

fn random_decreasing(n: usize, rng: &mut impl Rng) -> AdjacentWeights {
    let mut w: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.0..10.0)).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    AdjacentWeights::new(w).unwrap()
}

fn random_profile(n: usize, m: usize, rng: &mut impl Rng) -> Profile {
    Profile::new((0..m).map(|_| random_permutation(n, rng).unwrap()).collect()).unwrap()
}

/// First profile drawn from `seed` whose Borda means are pairwise distinct.
fn distinct_means_profile(n: usize, m: usize, seed: u64) -> Profile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let p = random_profile(n, m, &mut rng);
        if !gap_and_spread(&p).is_degenerate() {
            return p;
        }
    }
}

fn example_reproduction() -> Outcome {
    let pi = perm(&[4, 3, 1, 2]);
    let e = Permutation::identity(4).unwrap();
    let w = AdjacentWeights::new(vec![3.0, 2.0, 1.0]).unwrap();
    let start = Instant::now();
    let tr = minimum_weight_transformation(&pi, &e, &w).unwrap();
    let elapsed = start.elapsed();

    let walks_ok = tr.walks == vec![vec![3, 2, 1], vec![4, 3, 2], vec![2, 3, 4, 3], vec![1, 2, 3, 4]];
    let t = |a| AdjacentTransposition::new(a, 4).unwrap();
    let rounds_ok = tr.rounds()
        == vec![(1, vec![t(2), t(1)]), (2, vec![t(3), t(2)]), (3, vec![t(3)])];
    let steps: Vec<usize> = tr.steps.iter().map(|s| s.transposition.rank()).collect();
    let steps_ok = steps == [2, 1, 3, 2, 3];
    let coeff_ok = tr.coefficients() == [1, 2, 2];
    // a second, unrelated decreasing weight vector must give the same combinatorics
    let w2 = AdjacentWeights::new(vec![10.0, 0.5, 0.25]).unwrap();
    let tr2 = minimum_weight_transformation(&pi, &e, &w2).unwrap();
    let symbolic_ok = tr2.coefficients() == [1, 2, 2] && tr2.walks == tr.walks;
    let time_ok = elapsed < Duration::from_millis(1);
    Outcome::new(
        walks_ok && rounds_ok && steps_ok && coeff_ok && symbolic_ok && time_ok,
        format!(
            "walks={walks_ok} rounds={rounds_ok} steps={steps:?} coefficients={:?} time={elapsed:?}",
            tr.coefficients()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let oracle = ExactOracle::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut max_err: f64 = 0.0;
    let mut pairs = 0usize;

    let s5 = all(5);
    for _ in 0..5 {
        let w = random_decreasing(5, &mut rng);
        let gens = GeneratorSet::adjacent(&w);
        for p in &s5 {
            let column = oracle.distances_from(&gens, p).unwrap();
            for q in &s5 {
                let closed = weighted_kendall_monotone(p, q, &w).unwrap();
                max_err = max_err.max((closed - column[q.lex_index()]).abs());
                pairs += 1;
            }
        }
    }
    for n in [6, 7] {
        for _ in 0..20 {
            let w = random_decreasing(n, &mut rng);
            let gens = GeneratorSet::adjacent(&w);
            for _ in 0..200 {
                let p = random_permutation(n, &mut rng).unwrap();
                let q = random_permutation(n, &mut rng).unwrap();
                let exact = oracle.distance(&gens, &p, &q).unwrap();
                let closed = weighted_kendall_monotone(&p, &q, &w).unwrap();
                max_err = max_err.max((closed - exact).abs());
                pairs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        max_err <= TOL && elapsed < Duration::from_secs(60),
        format!("{pairs} pairs, max |closed - oracle| = {max_err:e}, time={elapsed:.2?}"),
    )
}

fn reductions() -> Outcome {
    let start = Instant::now();
    let oracle = ExactOracle::default();
    let s5 = all(5);
    let unit = AdjacentWeights::unit(5);
    let adjacent = GeneratorSet::adjacent(&unit);
    let transpositions = GeneratorSet::transpositions(&TranspositionWeights::uniform(5));
    let mut kendall_bad = 0;
    let mut cayley_bad = 0;
    for p in &s5 {
        let wk = oracle.distances_from(&adjacent, p).unwrap();
        let gd = oracle.distances_from(&transpositions, p).unwrap();
        for q in &s5 {
            let k = kendall_tau(p, q).unwrap() as f64;
            let closed = weighted_kendall_monotone(p, q, &unit).unwrap();
            if (wk[q.lex_index()] - k).abs() > TOL || (closed - k).abs() > TOL {
                kendall_bad += 1;
            }
            if (gd[q.lex_index()] - cayley_distance(p, q).unwrap() as f64).abs() > TOL {
                cayley_bad += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        kendall_bad == 0 && cayley_bad == 0 && elapsed < Duration::from_secs(30),
        format!("14400 pairs: kendall mismatches={kendall_bad} cayley mismatches={cayley_bad}, time={elapsed:.2?}"),
    )
}

fn metric_laws() -> Outcome {
    let s4 = all(4);
    let mut kendall_violations = 0;
    for p in &s4 {
        for q in &s4 {
            let d = kendall_tau(p, q).unwrap();
            if d != kendall_tau(q, p).unwrap() || (d == 0) != (p == q) {
                kendall_violations += 1;
            }
            for r in &s4 {
                if d > kendall_tau(p, r).unwrap() + kendall_tau(r, q).unwrap() {
                    kendall_violations += 1;
                }
                let (sp, sq) = (r.compose(p).unwrap(), r.compose(q).unwrap());
                if kendall_tau(&sp, &sq).unwrap() != d {
                    kendall_violations += 1;
                }
            }
        }
    }

    let oracle = ExactOracle::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut weighted_violations = 0;
    for _ in 0..10_000 {
        // every weight is zero with probability 1/5, so pseudo-metrics show up too
        let w: Vec<f64> = (0..4)
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..5.0) })
            .collect();
        let gens = GeneratorSet::adjacent(&AdjacentWeights::new(w).unwrap());
        let [p, q, r, s] = std::array::from_fn(|_| random_permutation(5, &mut rng).unwrap());
        let from_p = oracle.distances_from(&gens, &p).unwrap();
        let from_q = oracle.distances_from(&gens, &q).unwrap();
        let d_pq = from_p[q.lex_index()];
        let d_qp = from_q[p.lex_index()];
        let d_pr = from_p[r.lex_index()];
        let d_rq = from_q[r.lex_index()];
        let d_spq = oracle
            .distance(&gens, &s.compose(&p).unwrap(), &s.compose(&q).unwrap())
            .unwrap();
        if (d_pq - d_qp).abs() > TOL {
            weighted_violations += 1;
        }
        if d_pq > d_pr + d_rq + TOL {
            weighted_violations += 1;
        }
        if (d_spq - d_pq).abs() > TOL {
            weighted_violations += 1;
        }
    }
    Outcome::new(
        kendall_violations == 0 && weighted_violations == 0,
        format!(
            "kendall on S4: {kendall_violations} violations; weighted exact on 10^4 triples: {weighted_violations} violations"
        ),
    )
}

fn betweenness() -> Outcome {
    let start = Instant::now();
    let s4 = all(4);
    let mut mismatches = 0;
    let mut between = 0;
    for p in &s4 {
        for w in &s4 {
            for q in &s4 {
                let additive = kendall_tau(p, w).unwrap() + kendall_tau(w, q).unwrap()
                    == kendall_tau(p, q).unwrap();
                let b = is_between(p, w, q).unwrap();
                between += usize::from(b);
                if additive != b {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        mismatches == 0 && elapsed < Duration::from_secs(10),
        format!("13824 triples, {between} between, {mismatches} mismatches, time={elapsed:.2?}"),
    )
}

fn kemeny_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let metric = Metric::Kendall;
    let mut below = 0;
    let mut equal = 0;
    for _ in 0..100 {
        let profile = random_profile(4, 5, &mut rng);
        let exact = kemeny_exact(&profile, &metric).unwrap();
        let local = local_search_aggregate(&profile, &metric, None, &mut rng).unwrap();
        if local.cost < exact.cost - TOL {
            below += 1;
        } else if (local.cost - exact.cost).abs() <= TOL {
            equal += 1;
        }
    }

    let s3 = Profile::new(all(3)).unwrap();
    let costs = kemeny_costs(&s3, &metric, &ExactOracle::default()).unwrap();
    let enumerated: Vec<usize> = all(3)
        .iter()
        .map(|c| s3.rankings().iter().map(|r| kendall_tau(c, r).unwrap()).sum())
        .collect();
    let flat = enumerated.iter().all(|&c| c == enumerated[0])
        && costs.iter().zip(&enumerated).all(|(&a, &b)| (a - b as f64).abs() <= TOL);
    let winner = kemeny_exact(&s3, &metric).unwrap();
    Outcome::new(
        below == 0 && flat && (winner.cost - enumerated[0] as f64).abs() <= TOL,
        format!(
            "local < exact in {below}/100; equality frequency {equal}/100; all-of-S3 costs {enumerated:?}"
        ),
    )
}

fn conservation_and_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let profile = random_profile(5, 8, &mut rng);
    let net = GossipNetwork::complete(8).unwrap();
    let mut run = GossipRun::new(&profile, &net).unwrap();
    let initial = run.state().column_sums();
    for _ in 0..10_000 {
        run.step(&mut rng);
    }
    let drift = run
        .state()
        .column_sums()
        .iter()
        .zip(&initial)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let fixed = distinct_means_profile(5, 8, 70);
    let mut worst = f64::INFINITY;
    for seed in 0..20 {
        let mut rng = trial_rng(71, seed);
        let mut run = GossipRun::new(&fixed, &net).unwrap();
        let before = run.max_deviation();
        for _ in 0..5000 {
            run.step(&mut rng);
        }
        let after = run.max_deviation();
        let factor = if after == 0.0 { f64::INFINITY } else { before / after };
        worst = worst.min(factor);
    }
    Outcome::new(
        drift < TOL && worst >= 1e6,
        format!("column-sum drift {drift:e} over 10^4 steps; smallest shrink factor over 20 seeds {worst:e}"),
    )
}

const SHARED_SEED: u64 = 20_240_801;

fn shared_setup() -> (Profile, GossipNetwork) {
    (distinct_means_profile(4, 8, 80), GossipNetwork::complete(8).unwrap())
}

fn shared_grid() -> Vec<u64> {
    (0..=40).map(|k| 5 * k).collect()
}

fn persistence(report: &MonteCarloReport) -> Outcome {
    Outcome::new(
        report.reversals == 0 && report.timeouts == 0,
        format!(
            "{} trials to t_max=1e5: {} reversals, {} timeouts, max T = {}",
            report.consensus_times.len(),
            report.reversals,
            report.timeouts,
            report.consensus_times.iter().flatten().max().copied().unwrap_or(0)
        ),
    )
}

fn tail_bound(report: &MonteCarloReport, elapsed: Duration) -> Outcome {
    let active: Vec<_> = report.tail.iter().filter(|p| p.bound < 1.0).collect();
    let violations: Vec<u64> = active
        .iter()
        .filter(|p| p.empirical > p.bound + p.wilson_half_width())
        .map(|p| p.t)
        .collect();
    let worst = active
        .iter()
        .map(|p| p.empirical - p.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    Outcome::new(
        !active.is_empty() && violations.is_empty() && elapsed < Duration::from_secs(180),
        format!(
            "{} grid points with bound < 1 (from t={}), violations at {violations:?}, max(empirical - bound) = {worst:.4}, time={elapsed:.2?}",
            active.len(),
            active.first().map_or(0, |p| p.t)
        ),
    )
}

fn second_moment(report: &MonteCarloReport) -> Outcome {
    let mut violations = Vec::new();
    let mut worst: f64 = f64::NEG_INFINITY;
    for point in &report.second_moment {
        for j in 0..point.mean.len() {
            // SE is the standard error of the trial mean; the 1e-12 relative term
            // only absorbs summation rounding at t = 0 where SE = 0
            let allowance = point.predicted[j] + 3.0 * point.std_err[j] + 1e-12 * point.predicted[j];
            if point.mean[j] > allowance {
                violations.push((point.t, j + 1));
            }
            if point.predicted[j] > 0.0 {
                worst = worst.max(point.mean[j] / point.predicted[j]);
            }
        }
    }
    Outcome::new(
        violations.is_empty() && !report.second_moment.is_empty(),
        format!(
            "{} grid points x {} objects, violations (t, object) {violations:?}, max mean/predicted = {worst:.4}",
            report.second_moment.len(),
            report.second_moment.first().map_or(0, |p| p.mean.len())
        ),
    )
}

fn spectral() -> Outcome {
    let single = GossipNetwork::new(2, vec![(0, 1, 1.0)]).unwrap();
    let l_single = MixingMatrix::build(&single).lambda2();
    let ok_single = l_single.abs() <= 1e-12;

    let triangle = GossipNetwork::complete(3).unwrap();
    let w = MixingMatrix::build(&triangle);
    let l_tri = w.lambda2();
    // det(W - λI) for the 3 x 3 matrix, written out
    let charpoly = |l: f64| {
        let a = |i, j| w.get(i, j) - if i == j { l } else { 0.0 };
        a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
    };
    // W = (1/2)I + (1/6)J, so det(W - λI) = (1/2 - λ)²(1 - λ): a double root at 1/2
    let ok_tri = (l_tri - 0.5).abs() <= 1e-8
        && charpoly(0.5).abs() <= 1e-12
        && charpoly(l_tri).abs() <= 1e-12
        && (charpoly(0.0) - 0.25).abs() <= 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut connected_bad = 0;
    for _ in 0..50 {
        let m = rng.random_range(3..=12);
        let net = random_network(m, &[(0..m).collect()], &mut rng);
        assert!(net.is_connected());
        if MixingMatrix::build(&net).lambda2() >= 1.0 - 1e-12 {
            connected_bad += 1;
        }
    }
    let mut disconnected_bad = 0;
    for _ in 0..10 {
        let m = rng.random_range(4..=12);
        let mut agents: Vec<usize> = (0..m).collect();
        agents.shuffle(&mut rng);
        let cut = rng.random_range(2..=m - 2);
        let parts = vec![agents[..cut].to_vec(), agents[cut..].to_vec()];
        let net = random_network(m, &parts, &mut rng);
        assert!(!net.is_connected());
        if (MixingMatrix::build(&net).lambda2() - 1.0).abs() > 1e-12 {
            disconnected_bad += 1;
        }
    }
    Outcome::new(
        ok_single && ok_tri && connected_bad == 0 && disconnected_bad == 0,
        format!(
            "single edge {l_single:e}, K3 {l_tri}, connected with λ₂ >= 1: {connected_bad}/50, disconnected with λ₂ != 1: {disconnected_bad}/10"
        ),
    )
}

/// Random spanning tree inside each part plus random extra edges within
/// parts, with random positive probabilities.
fn random_network(m: usize, parts: &[Vec<usize>], rng: &mut impl Rng) -> GossipNetwork {
    let mut edges = Vec::new();
    for part in parts {
        for k in 1..part.len() {
            let parent = part[rng.random_range(0..k)];
            edges.push((parent.min(part[k]), parent.max(part[k])));
        }
        for a in 0..part.len() {
            for b in a + 1..part.len() {
                let e = (part[a].min(part[b]), part[a].max(part[b]));
                if !edges.contains(&e) && rng.random_bool(0.3) {
                    edges.push(e);
                }
            }
        }
    }
    let raw: Vec<f64> = edges.iter().map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    GossipNetwork::new(m, edges.iter().zip(&raw).map(|(&(i, j), &p)| (i, j, p / total)).collect())
        .unwrap()
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome, Duration)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        results.push((id, name, outcome, start.elapsed()));
        let (id, name, o, t) = results.last().unwrap();
        println!(
            "{} criterion {id:>2} {name}: {} [{t:.2?}]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    };

    run(1, "worked example 4312", &example_reproduction);
    run(2, "closed form = oracle", &oracle_equivalence);
    run(3, "reductions on S5", &reductions);
    run(4, "metric laws", &metric_laws);
    run(5, "betweenness on S4", &betweenness);
    run(6, "kemeny exactness", &kemeny_exactness);
    run(7, "gossip conservation and convergence", &conservation_and_convergence);

    let (profile, net) = shared_setup();
    let mut config = MonteCarloConfig::new(2000, shared_grid(), 100_000, SHARED_SEED);
    config.second_moment = true;
    config.check_persistence = true;
    let start = Instant::now();
    let report = monte_carlo_tail(&profile, &net, &config).unwrap();
    let mc_elapsed = start.elapsed();
    run(8, "consensus persistence", &|| persistence(&report));

    // the tail estimate alone, timed on its own
    let tail_config = MonteCarloConfig::new(2000, shared_grid(), 100_000, SHARED_SEED);
    let start = Instant::now();
    let tail_report = monte_carlo_tail(&profile, &net, &tail_config).unwrap();
    let tail_elapsed = start.elapsed();
    let same = tail_report.tail == report.tail;
    run(9, "tail bound", &|| {
        let mut o = tail_bound(&tail_report, tail_elapsed);
        o.passed &= same;
        o
    });
    run(10, "spectral checks", &spectral);
    run(11, "second-moment contraction", &|| second_moment(&report));

    println!("shared Monte Carlo run (persistence + second moment): {mc_elapsed:.2?}");
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
