//! Approximation algorithms for Euclidean k-supplier variants.
//!
//! * [`priority`]: (1+√3)-approximation for priority k-supplier, built on a
//!   minimum edge cover over greedily chosen representative clients.
//! * [`outliers`]: (1+√3)-approximation for k-supplier with outliers, a
//!   round-or-cut loop over an LP strengthened by well-separated set rows.
//! * [`graph`]: loop multigraphs, blossom matching, edge covers, and the
//!   cardinality-constrained min-weight edge cover solved through its LP.
//! * [`lp`]: a small dense simplex solver with extreme-point refinement.
//! * [`oracle`]: exhaustive optimum solvers used as ground truth.
//! * [`hardness`]: the 1-in-3-SAT to Euclidean matroid supplier gadget.
//! * [`baseline`]: the classical greedy 3-approximation for comparison.

pub mod baseline;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hardness;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod outliers;
pub mod priority;

pub use error::{Error, Result};
pub use instance::{Instance, Point, ScaledInstance, Tolerance, SQRT_3};
