//! Rank aggregation with weighted Kendall and Cayley-type distances.
//!
//! * [`perm`]: permutations, Kendall's τ, disagreement counts and betweenness.
//! * [`distance`]: weighted Kendall distance (closed form for decreasing
//!   weights and an exhaustive shortest-path oracle), minimum-weight
//!   transformations, Cayley and generator-set distances.
//! * [`aggregate`]: Borda, positional Borda, exact Kemeny-style aggregation
//!   and local search.
//! * [`gossip`]: distributed Borda aggregation by randomized gossip, the
//!   mixing matrix and its second eigenvalue, and the consensus-time tail
//!   bound with a Monte Carlo harness.
//! * [`io`]: the plain-text file formats used by the command-line tool.
//!
//! ```
//! use rankagg::{perm::Permutation, distance::{AdjacentWeights, weighted_kendall_monotone}};
//!
//! let pi = Permutation::new(vec![4, 3, 1, 2])?;
//! let e = Permutation::identity(4)?;
//! let w = AdjacentWeights::new(vec![3.0, 2.0, 1.0])?;
//! assert_eq!(weighted_kendall_monotone(&pi, &e, &w)?, 9.0);
//! # Ok::<(), rankagg::Error>(())
//! ```

pub mod aggregate;
pub mod distance;
mod error;
pub mod gossip;
pub mod io;
pub mod perm;
pub mod selftest;

pub use aggregate::{Aggregate, PositionalScores, Profile, ScoreVector};
pub use distance::{
    AdjacentWeights, ExactOracle, GeneratorSet, Metric, Transformation, TranspositionWeights,
};
pub use error::{Error, Result};
pub use gossip::{BordaState, BoundInputs, GossipNetwork, MixingMatrix};
pub use perm::{AdjacentTransposition, DisagreementProfile, Permutation};
