use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance on `Σ P = 1`.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Undirected simple graph over agents `0..m`, with a selection probability
/// per edge. Edges are stored with the smaller endpoint first.
#[derive(Debug, Clone)]
pub struct GossipNetwork {
    m: usize,
    edges: Vec<(usize, usize)>,
    probs: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl GossipNetwork {
    pub fn new(m: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidNetwork("network has no edges".into()));
        }
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        let mut probs = Vec::with_capacity(edges.len());
        for &(i, j, p) in &edges {
            if i >= m || j >= m {
                return Err(Error::InvalidNetwork(format!(
                    "edge {{{i}, {j}}} has an endpoint outside 0..{m}"
                )));
            }
            if i == j {
                return Err(Error::InvalidNetwork(format!("self-loop at agent {i}")));
            }
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidNetwork(format!(
                    "edge {{{i}, {j}}} has probability {p}; must be positive"
                )));
            }
            let e = (i.min(j), i.max(j));
            if normalized.contains(&e) {
                return Err(Error::InvalidNetwork(format!("duplicate edge {{{i}, {j}}}")));
            }
            normalized.push(e);
            probs.push(p);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidNetwork(format!(
                "edge probabilities sum to {total}, expected 1"
            )));
        }
        let sampler = WeightedIndex::new(&probs)
            .map_err(|e| Error::InvalidNetwork(e.to_string()))?;
        Ok(Self { m, edges: normalized, probs, sampler })
    }

    /// Every edge equally likely.
    pub fn uniform(m: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let p = 1.0 / edges.len().max(1) as f64;
        Self::new(m, edges.into_iter().map(|(i, j)| (i, j, p)).collect())
    }

    pub fn complete(m: usize) -> Result<Self> {
        let edges = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        Self::uniform(m, edges)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (a == i, b == i) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect()
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.m).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut count = self.m;
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                count -= 1;
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.components() == 1
    }

    /// Draws an edge according to the selection probabilities.
    pub fn sample_edge<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        self.edges[self.sampler.sample(rng)]
    }
}

impl PartialEq for GossipNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.edges == other.edges && self.probs == other.probs
    }
}
