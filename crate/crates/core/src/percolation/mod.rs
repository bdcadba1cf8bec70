//! Bernoulli bond percolation: configurations, local cluster exploration,
//! Monte Carlo estimators and the inequality checks built on them.
//!
//! Edge `e` is open iff the `e`-th uniform of the configuration's stream is
//! below `p`, so configurations at different `p` with the same seed are
//! monotonically coupled.

mod checks;
mod config;
mod estimate;
mod estimators;
mod explore;
mod union_find;

pub use checks::{
    graph_json, insertion_tolerance_check, kappapk_bound_check, mtp_distance_check, mtp_percolation_check,
    optimization_check, representative_edge, surgery_check, surgery_factor, target_degree, transport_sides,
    two_ghost_bound, two_ghost_check, two_ghost_hat, walk_rows, DistanceTransport, KappaPkParams, NamedEstimate,
    OptimizationCheck, PercReport, SurgeryReport, TransportReport, BASE_VERTEX, MIN_CHECK_SAMPLES,
    TRANSPORT_TOLERANCE,
};
pub use config::{sample, two_ghost_event, PercConfig};
pub use estimate::{Estimate, EstimateKind, MeanTally};
pub use estimators::{
    bootstrap_functional, bootstrap_report, bootstrap_weight, cluster_tail_hat, implied_c6, kappa_hat, tail_hats,
    tau_hat, BootstrapReport, ClusterMeasure, KappaEstimate,
};
pub use explore::{ClusterExplorer, ClusterStats, StopRule};
pub use union_find::UnionFind;
