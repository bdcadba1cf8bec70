//! Random walks, spectral profiles and bond percolation on finite graphs
//! that stand in for infinite vertex-transitive ones.

pub mod error;
pub mod graph;
pub mod montecarlo;
pub mod percolation;
pub mod rng;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Domain, Family, Graph};
pub use walk::MassVector;
