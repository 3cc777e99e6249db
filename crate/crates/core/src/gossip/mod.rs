//! Distributed Borda aggregation by randomized pairwise gossip.
//!
//! Agents are indexed `0..m`. Each agent starts from its Borda vector; at
//! every step one edge is drawn and its two endpoints replace their vectors
//! by the mean. The column averages `b̄` never change, and on a connected
//! network every agent's vector converges to `b̄`. What matters for ranking
//! is the first time every agent orders the objects like `b̄` does.

mod bound;
mod network;
mod sim;
mod spectral;
mod state;

pub use bound::{gap_and_spread, theoretical_bound, BoundInputs, GapSpread};
pub use network::{GossipNetwork, PROBABILITY_TOLERANCE};
pub use sim::{
    monte_carlo_tail, run_to_consensus, trial_rng, wilson_interval, ConsensusRun, GossipRun,
    MonteCarloConfig, MonteCarloReport, SecondMomentPoint, TailPoint, TrajectoryPoint, Z_95,
};
pub use spectral::{symmetric_eigenvalues, MixingMatrix, JACOBI_TOLERANCE};
pub use state::{is_consensus_time, BordaState, ConsensusTarget};
