//! Finite multiple zeta value relation discovery.
//!
//! * [`modarith`]: prime fields, modular inverses, Garner reconstruction.
//! * [`indices`]: compositions, `K_w`, trees of indices.
//! * [`harmonic`]: mod-`p` multiple harmonic sums (naive, horizontal, vertical, tree DP).
//! * [`mitm`]: meet-in-the-middle for bounded additive relations.
//! * [`dynamic`]: greedy minimal generating systems with a persistent dictionary.
//! * [`pipeline`]: multi-prime relation discovery and verification.
//! * [`oracle`]: brute-force reference implementations.
//! * [`report`]: relation tables, the bundled weight-10 table and config files.

pub mod dynamic;
pub mod error;
pub mod harmonic;
pub mod indices;
pub mod mitm;
pub mod modarith;
pub mod oracle;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
pub use indices::{Index, IndexTree};
pub use mitm::{AbelianGroup, CoefficientArray, Cyclic, RelationSolution, ResidueTuples};
pub use modarith::{Prime, Residue};
pub use pipeline::{PipelineConfig, PipelineOutput, RelationRecord};

/// The eleven primes behind the bundled weight-10 relation table.
pub const W10_PRIMES: [u64; 11] = [
    10007, 10009, 10037, 10039, 10061, 10067, 10069, 10079, 10091, 10093, 10099,
];
