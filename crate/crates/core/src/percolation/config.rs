use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::rng::EdgeField;

use super::union_find::UnionFind;

/// One Bernoulli bond configuration with its clusters.
///
/// Cluster statistics are indexed by label, where the label of a vertex is
/// the union-find root of its cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PercConfig {
    open: Vec<u64>,
    labels: Vec<u32>,
    sizes: Vec<u32>,
    edge_counts: Vec<u32>,
    seed: u64,
    p_bits: u64,
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("retention probability {p} not in [0, 1]")))
    }
}

/// Draw every edge once, in edge order, and build the clusters.
pub fn sample(g: &Graph, p: f64, seed: u64) -> Result<PercConfig> {
    check_p(p)?;
    let m = g.edge_count();
    let n = g.vertex_count();
    let mut field = EdgeField::new(seed, m);
    let mut open = vec![0u64; m.div_ceil(64)];
    let mut uf = UnionFind::new(n);
    for e in 0..m {
        if field.is_open(e, p) {
            open[e / 64] |= 1 << (e % 64);
            let (u, v) = g.edge(e);
            uf.union(u, v);
        }
    }
    let labels: Vec<u32> = (0..n).map(|v| uf.find(v) as u32).collect();
    let mut sizes = vec![0u32; n];
    for &l in &labels {
        sizes[l as usize] += 1;
    }
    // edges inside a cluster count once, edges between clusters count for both
    let mut edge_counts = vec![0u32; n];
    for &(u, v) in g.edges() {
        let (lu, lv) = (labels[u as usize], labels[v as usize]);
        edge_counts[lu as usize] += 1;
        if lv != lu {
            edge_counts[lv as usize] += 1;
        }
    }
    Ok(PercConfig {
        open,
        labels,
        sizes,
        edge_counts,
        seed,
        p_bits: p.to_bits(),
    })
}

impl PercConfig {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn p(&self) -> f64 {
        f64::from_bits(self.p_bits)
    }

    pub fn is_open(&self, e: usize) -> bool {
        self.open[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    pub fn connected(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
    }

    /// `|K_v|`
    pub fn cluster_size(&self, v: usize) -> usize {
        self.sizes[self.label(v)] as usize
    }

    /// `|E(K_v)|`: edges with at least one endpoint in `K_v`.
    pub fn cluster_edge_count(&self, v: usize) -> usize {
        self.edge_counts[self.label(v)] as usize
    }

    /// Labels of all clusters, increasing.
    pub fn cluster_labels(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] as usize == v).collect()
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_labels().len()
    }

    /// Vertices of each cluster, keyed by position in [`Self::cluster_labels`].
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let labels = self.cluster_labels();
        let mut index = vec![usize::MAX; self.labels.len()];
        for (i, &l) in labels.iter().enumerate() {
            index[l] = i;
        }
        let mut out = vec![Vec::new(); labels.len()];
        for v in 0..self.labels.len() {
            out[index[self.labels[v] as usize]].push(v);
        }
        out
    }

    pub fn open_edge_count(&self) -> usize {
        self.open.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// The edge `e` is closed and its endpoints lie in distinct clusters that
/// each touch at least `n` edges. Every cluster of a finite graph counts as
/// finite.
pub fn two_ghost_event(g: &Graph, cfg: &PercConfig, e: usize, n: usize) -> bool {
    let (a, b) = g.edge(e);
    !cfg.is_open(e) && !cfg.connected(a, b) && cfg.cluster_edge_count(a) >= n && cfg.cluster_edge_count(b) >= n
}
