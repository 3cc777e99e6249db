use serde::{Deserialize, Serialize};

use crate::aggregate::{snap, Profile, ScoreVector};
use crate::error::{Error, Result};
use crate::gossip::GossipNetwork;

/// The `m × n` matrix of agent score estimates `bᵢ(t)` and the step counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BordaState {
    m: usize,
    n: usize,
    // row-major, row i is agent i
    b: Vec<f64>,
    t: u64,
}

impl BordaState {
    /// Agent `i` starts from the Borda vector `σᵢ⁻¹`.
    pub fn from_profile(profile: &Profile) -> Self {
        let (m, n) = (profile.m(), profile.n());
        let b = profile
            .rankings()
            .iter()
            .flat_map(|r| r.ranks().into_iter().map(|x| x as f64))
            .collect();
        Self { m, n, b, t: 0 }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument("state needs at least one row and column".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::SizeMismatch { expected: n, found: r.len() });
        }
        Ok(Self { m, n, b: rows.concat(), t: 0 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.b[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.b.chunks_exact(self.n)
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for row in self.rows() {
            for (s, x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        sums
    }

    /// `b̄ = (1/m) Σᵢ bᵢ`.
    pub fn column_means(&self) -> ScoreVector {
        let m = self.m as f64;
        ScoreVector { scores: self.column_sums().into_iter().map(|s| s / m).collect() }
    }

    /// Replaces rows `i` and `j` by their mean, without checking the network.
    pub(crate) fn average_pair(&mut self, i: usize, j: usize) {
        let n = self.n;
        for k in 0..n {
            let mean = 0.5 * (self.b[i * n + k] + self.b[j * n + k]);
            self.b[i * n + k] = mean;
            self.b[j * n + k] = mean;
        }
        self.t += 1;
    }

    /// One gossip update along `{i, j}`.
    pub fn gossip_step(&mut self, network: &GossipNetwork, i: usize, j: usize) -> Result<()> {
        if i == j || !network.contains(i, j) {
            return Err(Error::EdgeNotInNetwork(i, j));
        }
        self.average_pair(i, j);
        Ok(())
    }

    /// Synchronous update: every agent takes the mean of its own row and its
    /// neighbors' rows. Column sums are not conserved in general.
    pub fn neighbor_aggregation_step(&mut self, network: &GossipNetwork) {
        let n = self.n;
        let mut next = vec![0.0; self.b.len()];
        for i in 0..self.m {
            let mut members = network.neighbors(i);
            members.push(i);
            let k = members.len() as f64;
            for &a in &members {
                for c in 0..n {
                    next[i * n + c] += self.b[a * n + c];
                }
            }
            for c in 0..n {
                next[i * n + c] /= k;
            }
        }
        self.b = next;
        self.t += 1;
    }

    /// `maxᵢ ‖bᵢ − target‖₂`.
    pub fn max_row_deviation(&self, target: &[f64]) -> f64 {
        self.rows()
            .map(|row| row.iter().zip(target).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// `‖yʲ‖² = Σᵢ (bᵢʲ − targetʲ)²` for every object `j`, by object id.
    pub fn object_deviation_sq(&self, target: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for row in self.rows() {
            for ((o, x), y) in out.iter_mut().zip(row).zip(target) {
                *o += (x - y).powi(2);
            }
        }
        out
    }
}

/// The ordering an agent's row must reproduce for consensus.
///
/// Objects are grouped by the target's sorted order; exactly tied target
/// values (on the score grid) share a group and may appear in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusTarget {
    // group[j] for object j + 1
    group: Vec<usize>,
}

impl ConsensusTarget {
    pub fn new(target: &ScoreVector) -> Self {
        let order = target.ranking();
        let mut group = vec![0; order.len()];
        let mut g = 0;
        let mut prev: Option<f64> = None;
        for &obj in order.entries() {
            let v = snap(target.score(obj));
            if prev.is_some_and(|p| p != v) {
                g += 1;
            }
            prev = Some(v);
            group[obj - 1] = g;
        }
        Self { group }
    }

    pub fn n(&self) -> usize {
        self.group.len()
    }

    /// True when sorting `row` by (value, object id) lists the target's groups
    /// in order.
    pub fn accepts(&self, row: &[f64]) -> bool {
        let n = self.group.len();
        for x in 0..n {
            for y in 0..n {
                if self.group[x] < self.group[y] {
                    let before = row[x] < row[y] || (row[x] == row[y] && x < y);
                    if !before {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Whether every agent's ordering matches the ordering of `target`.
pub fn is_consensus_time(state: &BordaState, target: &ScoreVector) -> bool {
    let ct = ConsensusTarget::new(target);
    state.rows().all(|row| ct.accepts(row))
}
