use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::montecarlo::MonteCarlo;
use crate::rng::{pool_seed, EdgeField};

use super::config::check_p;
use super::estimate::{Estimate, MeanTally};
use super::explore::{ClusterExplorer, StopRule};

/// Which size of a cluster a tail refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterMeasure {
    /// `|K|`
    Vertices,
    /// `|E(K)|`
    TouchedEdges,
}

/// Count successes of a per-sample event over all replicas.
pub(crate) fn count_events<F>(g: &Graph, mc: &MonteCarlo, slots: usize, event: F) -> Result<Vec<u64>>
where
    F: Fn(&mut ClusterExplorer, &mut EdgeField, &mut [u64]) + Sync,
{
    let per_replica = mc.run(|seeds| {
        let mut ex = ClusterExplorer::new(g);
        let mut hits = vec![0u64; slots];
        for seed in seeds {
            let mut field = EdgeField::new(seed, g.edge_count());
            event(&mut ex, &mut field, &mut hits);
        }
        hits
    })?;
    let mut total = vec![0u64; slots];
    for hits in per_replica {
        for (t, h) in total.iter_mut().zip(hits) {
            *t += h;
        }
    }
    Ok(total)
}

/// `tau_p(u, v)`: probability that `u` and `v` share a cluster.
pub fn tau_hat(g: &Graph, u: usize, v: usize, p: f64, mc: &MonteCarlo) -> Result<Estimate> {
    check_p(p)?;
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let hits = count_events(g, mc, 1, |ex, field, hits| {
        ex.explore(field, p, u, StopRule::Target(v));
        hits[0] += u64::from(ex.contains(v));
    })?;
    Estimate::proportion(hits[0], mc.n_samples, mc.confidence)
}

/// `kappa_p(k)` estimated as the smallest `tau_p(base, w)` over
/// `d(base, w) <= k`, each pair read off the same cluster samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub estimate: Estimate,
    pub argmin: usize,
    pub distance: usize,
    /// `(w, d(base, w), tau estimate)` for every representative.
    pub pairs: Vec<(usize, usize, Estimate)>,
}

pub fn kappa_hat(g: &Graph, base: usize, p: f64, k: usize, mc: &MonteCarlo) -> Result<KappaEstimate> {
    check_p(p)?;
    g.check_vertex(base)?;
    let dist = g.bfs_distances(base);
    let targets: Vec<usize> = (0..g.vertex_count()).filter(|&w| (dist[w] as usize) <= k).collect();
    let hits = count_events(g, mc, targets.len(), |ex, field, hits| {
        ex.explore(field, p, base, StopRule::Full);
        for (h, &w) in hits.iter_mut().zip(&targets) {
            *h += u64::from(ex.contains(w));
        }
    })?;
    let pairs = targets
        .iter()
        .zip(&hits)
        .map(|(&w, &h)| Ok((w, dist[w] as usize, Estimate::proportion(h, mc.n_samples, mc.confidence)?)))
        .collect::<Result<Vec<_>>>()?;
    let &(argmin, distance, estimate) = pairs
        .iter()
        .min_by(|a, b| a.2.mean.total_cmp(&b.2.mean).then(b.1.cmp(&a.1)))
        .expect("base is its own representative");
    Ok(KappaEstimate {
        estimate,
        argmin,
        distance,
        pairs,
    })
}

/// `Pr(|E(K_v)| >= n)`
pub fn cluster_tail_hat(g: &Graph, v: usize, p: f64, n: usize, mc: &MonteCarlo) -> Result<Estimate> {
    Ok(tail_hats(g, v, p, &[n], ClusterMeasure::TouchedEdges, mc)?[0])
}

/// `Pr(size(K_v) >= n)` for each `n`, from one set of explorations.
pub fn tail_hats(
    g: &Graph,
    v: usize,
    p: f64,
    ns: &[usize],
    measure: ClusterMeasure,
    mc: &MonteCarlo,
) -> Result<Vec<Estimate>> {
    check_p(p)?;
    g.check_vertex(v)?;
    if ns.contains(&0) {
        return Err(invalid("tail thresholds must be at least 1"));
    }
    let top = ns.iter().copied().max().unwrap_or(1);
    let stop = match measure {
        ClusterMeasure::Vertices => StopRule::SizeAtLeast(top),
        ClusterMeasure::TouchedEdges => StopRule::EdgesAtLeast(top),
    };
    let hits = count_events(g, mc, ns.len(), |ex, field, hits| {
        let s = ex.explore(field, p, v, stop);
        let size = match measure {
            ClusterMeasure::Vertices => s.size,
            ClusterMeasure::TouchedEdges => s.edges_touched,
        };
        for (h, &n) in hits.iter_mut().zip(ns) {
            *h += u64::from(size >= n);
        }
    })?;
    hits.iter()
        .map(|&h| Estimate::proportion(h, mc.n_samples, mc.confidence))
        .collect()
}

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..1.0).contains(&beta) {
        Ok(())
    } else {
        Err(invalid(format!("beta {beta} not in [0, 1)")))
    }
}

/// `exp(log^beta s)`, with `log^0 1 = 1`.
pub fn bootstrap_weight(size: usize, beta: f64) -> f64 {
    (size as f64).ln().powf(beta).exp()
}

fn functional_tally(g: &Graph, v: usize, p: f64, beta: f64, mc: &MonteCarlo) -> Result<MeanTally> {
    let parts = mc.run(|seeds| {
        let mut ex = ClusterExplorer::new(g);
        let mut tally = MeanTally::default();
        for seed in seeds {
            let mut field = EdgeField::new(seed, g.edge_count());
            let s = ex.explore(&mut field, p, v, StopRule::Full);
            tally.push(bootstrap_weight(s.size, beta));
        }
        tally
    })?;
    let mut total = MeanTally::default();
    for t in &parts {
        total.merge(t);
    }
    Ok(total)
}

/// Monte Carlo `E_p exp(log^beta |K_v|)` with a t-interval.
pub fn bootstrap_functional(g: &Graph, v: usize, p: f64, beta: f64, mc: &MonteCarlo) -> Result<Estimate> {
    check_p(p)?;
    check_beta(beta)?;
    g.check_vertex(v)?;
    functional_tally(g, v, p, beta, mc)?.estimate(mc.confidence)
}

/// Bound on `E` implied by `E <= c5 (1 + E)^{1/2}`.
pub fn implied_c6(c5: f64) -> f64 {
    let c5sq = c5 * c5;
    (c5sq + (c5sq * c5sq + 4.0 * c5sq).sqrt()) / 2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapReport {
    /// Estimates from the first quarter, first half and all samples.
    pub quarter: Estimate,
    pub half: Estimate,
    pub full: Estimate,
    /// Consecutive intervals overlap.
    pub stable: bool,
    pub c5: Option<f64>,
    pub c6: Option<f64>,
    /// `E <= c6` at the full estimate (conditional on the supplied `c5`).
    pub within_c6: Option<bool>,
}

/// The functional from four independent quarter pools, with the implied
/// `c6` for a supplied `c5`.
pub fn bootstrap_report(
    g: &Graph,
    v: usize,
    p: f64,
    beta: f64,
    c5: Option<f64>,
    mc: &MonteCarlo,
) -> Result<BootstrapReport> {
    check_p(p)?;
    check_beta(beta)?;
    g.check_vertex(v)?;
    if let Some(c) = c5 {
        if c <= 0.0 {
            return Err(invalid("c5 must be positive"));
        }
    }
    let quarter_samples = mc.n_samples / 4;
    let mut tallies = Vec::with_capacity(4);
    for pool in 0..4 {
        let sub = mc.with_seed(pool_seed(mc.master_seed, pool)).with_samples(quarter_samples);
        tallies.push(functional_tally(g, v, p, beta, &sub)?);
    }
    let prefix = |upto: usize| {
        let mut t = MeanTally::default();
        for x in &tallies[..upto] {
            t.merge(x);
        }
        t.estimate(mc.confidence)
    };
    let (quarter, half, full) = (prefix(1)?, prefix(2)?, prefix(4)?);
    let overlap = |a: &Estimate, b: &Estimate| a.ci_low <= b.ci_high && b.ci_low <= a.ci_high;
    let c6 = c5.map(implied_c6);
    Ok(BootstrapReport {
        stable: overlap(&quarter, &half) && overlap(&half, &full),
        within_c6: c6.map(|c| full.mean <= c),
        quarter,
        half,
        full,
        c5,
        c6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mc(n: u64) -> MonteCarlo {
        MonteCarlo::new(n, 2024)
    }

    #[test]
    fn trivial_values() {
        let g = Graph::tree_ball(3, 6).unwrap();
        assert_eq!(tau_hat(&g, 4, 4, 0.3, &mc(50)).unwrap().mean, 1.0);
        let k0 = kappa_hat(&g, 0, 0.3, 0, &mc(50)).unwrap();
        assert_eq!(k0.estimate.mean, 1.0);
        assert_eq!(cluster_tail_hat(&g, 0, 0.4, 1, &mc(50)).unwrap().mean, 1.0);
        assert_eq!(cluster_tail_hat(&g, 0, 0.0, 3, &mc(50)).unwrap().mean, 1.0);
        assert_eq!(cluster_tail_hat(&g, 0, 0.0, 4, &mc(50)).unwrap().mean, 0.0);
        let e = bootstrap_functional(&g, 0, 0.3, 0.0, &mc(50)).unwrap();
        assert!((e.mean - std::f64::consts::E).abs() < 1e-12);
        assert_eq!(bootstrap_functional(&g, 0, 0.0, 0.5, &mc(50)).unwrap().mean, 1.0);
        assert!(bootstrap_functional(&g, 0, 0.3, 1.0, &mc(50)).is_err());
    }

    #[test]
    fn isolated_root_at_criticality() {
        let g = Graph::tree_ball(3, 8).unwrap();
        let e = tail_hats(&g, 0, 0.5, &[2], ClusterMeasure::Vertices, &mc(100_000)).unwrap()[0];
        let isolated = 1.0 - e.mean;
        let lo = 1.0 - e.ci_high;
        let hi = 1.0 - e.ci_low;
        assert!(lo <= 0.125 && 0.125 <= hi, "{isolated} [{lo}, {hi}]");
    }

    #[test]
    fn c6_solves_the_quadratic() {
        let c5 = 1.7;
        let c6 = implied_c6(c5);
        assert!((c6 - c5 * (1.0 + c6).sqrt()).abs() < 1e-12);
    }
}
