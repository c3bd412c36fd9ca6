//! Epidemic spread with mask-wearing on random contact networks.
//!
//! Two routes to the same quantities: a Monte Carlo heterogeneous
//! bond-percolation (SIR) engine over two-type configuration-model graphs
//! ([`simulate`]), and closed-form/fixed-point predictions of emergence
//! probability, epidemic size and the critical threshold ([`analytic`]).
//! The [`experiment`] module orchestrates parameter sweeps and writes the
//! CSV outputs consumed by plotting tools.

pub mod analytic;
pub mod degree;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod model;
pub mod simulate;

pub use degree::DegreeDistribution;
pub use graph::ContactNetwork;
pub use model::{MaskModelParams, NodeType};
