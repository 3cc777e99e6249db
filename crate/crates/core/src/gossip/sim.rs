//! Randomized gossip simulation: single runs to consensus and the seeded
//! Monte Carlo harness used to check the tail bound empirically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::{Profile, ScoreVector};
use crate::error::{Error, Result};
use crate::gossip::{
    gap_and_spread, theoretical_bound, BordaState, BoundInputs, ConsensusTarget, GossipNetwork,
    MixingMatrix,
};

/// z-score of a two-sided 95% interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// RNG for trial `trial` of a run seeded with `master`. Each trial gets its
/// own ChaCha stream, so results do not depend on scheduling.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng
}

/// A gossip run that tracks, row by row, whether the consensus ordering is
/// reached. Only the two averaged rows are rechecked after each step.
#[derive(Debug, Clone)]
pub struct GossipRun<'a> {
    network: &'a GossipNetwork,
    state: BordaState,
    means: ScoreVector,
    target: ConsensusTarget,
    row_ok: Vec<bool>,
    disagreeing: usize,
}

impl<'a> GossipRun<'a> {
    pub fn new(profile: &Profile, network: &'a GossipNetwork) -> Result<Self> {
        if profile.m() != network.m() {
            return Err(Error::SizeMismatch { expected: network.m(), found: profile.m() });
        }
        let state = BordaState::from_profile(profile);
        let means = state.column_means();
        let target = ConsensusTarget::new(&means);
        let row_ok: Vec<bool> = state.rows().map(|r| target.accepts(r)).collect();
        let disagreeing = row_ok.iter().filter(|ok| !**ok).count();
        Ok(Self { network, state, means, target, row_ok, disagreeing })
    }

    pub fn state(&self) -> &BordaState {
        &self.state
    }

    /// The invariant average `b̄` fixed at `t = 0`.
    pub fn means(&self) -> &ScoreVector {
        &self.means
    }

    pub fn t(&self) -> u64 {
        self.state.t()
    }

    pub fn is_consensus(&self) -> bool {
        self.disagreeing == 0
    }

    /// Samples an edge and averages its endpoints.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (usize, usize) {
        let (i, j) = self.network.sample_edge(rng);
        self.state.average_pair(i, j);
        for k in [i, j] {
            let ok = self.target.accepts(self.state.row(k));
            match (self.row_ok[k], ok) {
                (false, true) => self.disagreeing -= 1,
                (true, false) => self.disagreeing += 1,
                _ => {}
            }
            self.row_ok[k] = ok;
        }
        (i, j)
    }

    pub fn max_deviation(&self) -> f64 {
        self.state.max_row_deviation(&self.means.scores)
    }

    /// `‖yʲ(t)‖²` per object id.
    pub fn object_deviation_sq(&self) -> Vec<f64> {
        self.state.object_deviation_sq(&self.means.scores)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: u64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusRun {
    /// First consensus time, `None` on timeout.
    pub consensus_time: Option<u64>,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl ConsensusRun {
    pub fn time(&self, t_max: u64) -> Result<u64> {
        self.consensus_time.ok_or(Error::Timeout { t_max })
    }
}

/// Gossips until the first consensus time or `t_max` steps. The maximum row
/// deviation from `b̄` is logged every `log_every` steps (0 logs only the
/// start and the end).
pub fn run_to_consensus<R: Rng + ?Sized>(
    profile: &Profile,
    network: &GossipNetwork,
    rng: &mut R,
    t_max: u64,
    log_every: u64,
) -> Result<ConsensusRun> {
    let mut run = GossipRun::new(profile, network)?;
    let mut trajectory = vec![TrajectoryPoint { t: 0, max_deviation: run.max_deviation() }];
    while !run.is_consensus() && run.t() < t_max {
        run.step(rng);
        if log_every > 0 && run.t() % log_every == 0 {
            trajectory.push(TrajectoryPoint { t: run.t(), max_deviation: run.max_deviation() });
        }
    }
    if trajectory.last().map(|p| p.t) != Some(run.t()) {
        trajectory.push(TrajectoryPoint { t: run.t(), max_deviation: run.max_deviation() });
    }
    Ok(ConsensusRun {
        consensus_time: run.is_consensus().then(|| run.t()),
        trajectory,
    })
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    // the closed form is exactly 0 at k = 0 and 1 at k = n; keep rounding out
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub trials: usize,
    /// Time points at which the tail is estimated.
    pub grid: Vec<u64>,
    /// Trials that have not reached consensus after this many steps count
    /// as `T = ∞`.
    pub t_max: u64,
    pub seed: u64,
    /// Record `‖yʲ(t)‖²` on the grid (simulates every trial to the last grid
    /// point even after consensus).
    pub second_moment: bool,
    /// Keep simulating every trial to `t_max` and count consensus reversals.
    pub check_persistence: bool,
}

impl MonteCarloConfig {
    pub fn new(trials: usize, grid: Vec<u64>, t_max: u64, seed: u64) -> Self {
        Self { trials, grid, t_max, seed, second_moment: false, check_persistence: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub t: u64,
    /// Trials with `T > t`.
    pub exceed: usize,
    pub trials: usize,
    pub empirical: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub bound: f64,
}

impl TailPoint {
    pub fn wilson_half_width(&self) -> f64 {
        0.5 * (self.wilson_hi - self.wilson_lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentPoint {
    pub t: u64,
    /// Trial mean of `‖yʲ(t)‖²`, by object id.
    pub mean: Vec<f64>,
    /// Standard error of `mean`.
    pub std_err: Vec<f64>,
    /// `λ₂ᵗ ‖yʲ(0)‖²`.
    pub predicted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub m: usize,
    pub lambda2: f64,
    pub inputs: BoundInputs,
    pub consensus_times: Vec<Option<u64>>,
    pub timeouts: usize,
    /// Steps at which some trial left consensus after reaching it.
    pub reversals: usize,
    pub tail: Vec<TailPoint>,
    pub second_moment: Vec<SecondMomentPoint>,
}

struct TrialOutcome {
    consensus_time: Option<u64>,
    reversals: usize,
    // grid.len() × n, row per grid point
    y_sq: Vec<f64>,
}

fn run_trial(
    profile: &Profile,
    network: &GossipNetwork,
    config: &MonteCarloConfig,
    grid: &[u64],
    trial: u64,
) -> TrialOutcome {
    let mut rng = trial_rng(config.seed, trial);
    let mut run = GossipRun::new(profile, network).expect("sizes checked by caller");
    let n = profile.n();
    let horizon = if config.second_moment { grid.last().copied().unwrap_or(0) } else { 0 };
    let mut y_sq = Vec::with_capacity(if config.second_moment { grid.len() * n } else { 0 });
    let mut next_grid = 0;
    let mut consensus_time = None;
    let mut reversals = 0;
    loop {
        let t = run.t();
        if run.is_consensus() {
            consensus_time.get_or_insert(t);
        } else if consensus_time.is_some() {
            reversals += 1;
        }
        if config.second_moment {
            while next_grid < grid.len() && grid[next_grid] == t {
                y_sq.extend(run.object_deviation_sq());
                next_grid += 1;
            }
        }
        let done_tail = consensus_time.is_some() && !config.check_persistence;
        if (done_tail && t >= horizon) || (t >= config.t_max && t >= horizon) {
            break;
        }
        run.step(&mut rng);
    }
    let consensus_time = consensus_time.filter(|&t| t <= config.t_max);
    TrialOutcome { consensus_time, reversals, y_sq }
}

/// Empirical `P(T > t)` over independent seeded trials, with Wilson 95%
/// intervals and the theoretical bound at each grid point. Trials run in
/// parallel; the report only depends on the seed.
pub fn monte_carlo_tail(
    profile: &Profile,
    network: &GossipNetwork,
    config: &MonteCarloConfig,
) -> Result<MonteCarloReport> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if profile.m() != network.m() {
        return Err(Error::SizeMismatch { expected: network.m(), found: profile.m() });
    }
    let gaps = gap_and_spread(profile);
    let lambda2 = MixingMatrix::build(network).lambda2().clamp(0.0, 1.0);
    let inputs = BoundInputs::new(&gaps, lambda2, network.m())?;

    let mut grid = config.grid.clone();
    grid.sort_unstable();
    grid.dedup();

    let outcomes: Vec<TrialOutcome> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| run_trial(profile, network, config, &grid, trial))
        .collect();

    let consensus_times: Vec<Option<u64>> = outcomes.iter().map(|o| o.consensus_time).collect();
    let timeouts = consensus_times.iter().filter(|t| t.is_none()).count();
    let reversals = outcomes.iter().map(|o| o.reversals).sum();

    let tail = grid
        .iter()
        .map(|&t| {
            let exceed = consensus_times.iter().filter(|c| c.is_none_or(|c| c > t)).count();
            let (wilson_lo, wilson_hi) = wilson_interval(exceed, config.trials, Z_95);
            Ok(TailPoint {
                t,
                exceed,
                trials: config.trials,
                empirical: exceed as f64 / config.trials as f64,
                wilson_lo,
                wilson_hi,
                bound: theoretical_bound(t, &inputs)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let second_moment = if config.second_moment {
        second_moment_summary(profile, &grid, &outcomes, lambda2)
    } else {
        Vec::new()
    };

    Ok(MonteCarloReport {
        m: network.m(),
        lambda2,
        inputs,
        consensus_times,
        timeouts,
        reversals,
        tail,
        second_moment,
    })
}

fn second_moment_summary(
    profile: &Profile,
    grid: &[u64],
    outcomes: &[TrialOutcome],
    lambda2: f64,
) -> Vec<SecondMomentPoint> {
    let n = profile.n();
    let trials = outcomes.len() as f64;
    let state = BordaState::from_profile(profile);
    let y0 = state.object_deviation_sq(&state.column_means().scores);
    grid.iter()
        .enumerate()
        .map(|(g, &t)| {
            let mut mean = vec![0.0; n];
            let mut sq = vec![0.0; n];
            for o in outcomes {
                for j in 0..n {
                    let y = o.y_sq[g * n + j];
                    mean[j] += y;
                    sq[j] += y * y;
                }
            }
            let std_err = (0..n)
                .map(|j| {
                    mean[j] /= trials;
                    if trials < 2.0 {
                        return 0.0;
                    }
                    let var = (sq[j] / trials - mean[j] * mean[j]).max(0.0) * trials / (trials - 1.0);
                    (var / trials).sqrt()
                })
                .collect();
            let decay = lambda2.powf(t as f64);
            SecondMomentPoint { t, mean, std_err, predicted: y0.iter().map(|y| decay * y).collect() }
        })
        .collect()
}
