use crate::graph::Graph;
use crate::rng::EdgeField;

/// When a local exploration may stop early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Explore the whole cluster.
    Full,
    /// Stop once the cluster touches at least this many edges.
    EdgesAtLeast(usize),
    /// Stop once this many vertices are reached.
    SizeAtLeast(usize),
    /// Stop once the given vertex is reached.
    Target(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterStats {
    /// Vertices reached.
    pub size: usize,
    /// Edges touching the processed part of the cluster.
    pub edges_touched: usize,
    /// Whether the whole cluster was explored.
    pub complete: bool,
}

/// Breadth-first cluster exploration that reads edge states on demand.
///
/// Buffers are reused between explorations: a vertex is "seen" in the
/// current round when its stamp equals `2 * round` and "processed" when it
/// equals `2 * round + 1`.
pub struct ClusterExplorer<'g> {
    graph: &'g Graph,
    stamp: Vec<u64>,
    round: u64,
    queue: Vec<u32>,
}

impl<'g> ClusterExplorer<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        ClusterExplorer {
            graph,
            stamp: vec![0; graph.vertex_count()],
            round: 0,
            queue: Vec::new(),
        }
    }

    /// Explore the open cluster of `root`. Edge `e` is open iff its uniform
    /// in `field` is below `p`.
    pub fn explore(&mut self, field: &mut EdgeField, p: f64, root: usize, stop: StopRule) -> ClusterStats {
        self.round += 1;
        let seen = 2 * self.round;
        let done = seen + 1;
        let g = self.graph;
        self.queue.clear();
        self.queue.push(root as u32);
        self.stamp[root] = seen;
        let mut edges_touched = 0;
        let mut head = 0;
        let reached = |edges: usize, size: usize| match stop {
            StopRule::Full => false,
            StopRule::EdgesAtLeast(n) => edges >= n,
            StopRule::SizeAtLeast(n) => size >= n,
            StopRule::Target(_) => false,
        };
        let target = match stop {
            StopRule::Target(t) => t,
            _ => usize::MAX,
        };
        if reached(0, 1) || target == root {
            return ClusterStats { size: 1, edges_touched: 0, complete: false };
        }
        while head < self.queue.len() {
            let u = self.queue[head] as usize;
            head += 1;
            self.stamp[u] = done;
            for (&w, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
                let w = w as usize;
                if self.stamp[w] == done {
                    continue;
                }
                // counted from whichever endpoint is processed first
                edges_touched += 1;
                if self.stamp[w] != seen && field.is_open(e as usize, p) {
                    self.stamp[w] = seen;
                    self.queue.push(w as u32);
                }
            }
            if reached(edges_touched, self.queue.len()) || (target != usize::MAX && self.stamp[target] >= seen) {
                return ClusterStats {
                    size: self.queue.len(),
                    edges_touched,
                    complete: head == self.queue.len(),
                };
            }
        }
        ClusterStats {
            size: self.queue.len(),
            edges_touched,
            complete: true,
        }
    }

    /// Whether `v` was reached by the last exploration.
    pub fn contains(&self, v: usize) -> bool {
        self.stamp[v] >= 2 * self.round
    }

    /// Vertices reached by the last exploration, in discovery order.
    pub fn members(&self) -> &[u32] {
        &self.queue
    }
}
