//! Two-stage stochastic bipartite matching.
//!
//! Offline nodes are matched against a first batch of online nodes that is
//! known in advance and a second batch drawn from an explicit finite
//! distribution. The crate provides the LP relaxations of the best online and
//! offline policies, GKPS dependent rounding, the Round-Augment algorithm and
//! an offline two-stage rounding, contention resolution schemes, and oracles
//! that check the approximation bounds on small instances.

pub mod crs;
pub mod instance;
pub mod lp;
pub mod matching;
pub mod numeric;
pub mod rng;
pub mod rounding;
pub mod twostage;
pub mod verify;
