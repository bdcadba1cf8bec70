//! Finite stand-ins for the infinite graphs under study.
//!
//! A [`Graph`] is an immutable, simple, connected graph stored as compressed
//! neighbour lists. Vertex ids are dense and 0-based; each family documents
//! its coordinate encoding on its builder. The stationary measure of the
//! simple random walk is `pi(v) = deg(v)`.
//!
//! Statements about infinite graphs only transfer inside the *interior
//! validity radius* of a vertex (see [`Graph::interior_radius`]): the
//! largest `R` such that the ball of radius `R` around the vertex, together
//! with the degrees of every vertex at distance `< R`, agrees with the
//! infinite target graph.

mod build;
mod domain;
mod io;

pub use build::{DEFAULT_MAX_VERTICES, LAMPLIGHTER_MAX_LENGTH};
pub use domain::Domain;
pub use io::{parse_edge_list, write_edge_list};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Build recipe and tag of a graph family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Cartesian product of cycles, a stand-in for `Z^d`.
    Torus { dims: Vec<usize> },
    /// Rooted ball in the `degree`-regular tree.
    TreeBall { degree: usize, radius: usize },
    /// Window of `Z_2 wr Z` with lamp positions `0..length`.
    LamplighterSegment { length: usize },
    /// Cycle, a stand-in for `Z`.
    Cycle { length: usize },
    /// Anything built from an explicit edge list.
    Custom,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Torus { .. } => "torus",
            Family::TreeBall { .. } => "tree_ball",
            Family::LamplighterSegment { .. } => "lamplighter_segment",
            Family::Cycle { .. } => "cycle",
            Family::Custom => "custom",
        }
    }

    /// Build the family with the default vertex cap.
    pub fn build(&self) -> Result<Graph> {
        self.build_capped(DEFAULT_MAX_VERTICES)
    }

    pub fn build_capped(&self, max_vertices: usize) -> Result<Graph> {
        match self {
            Family::Torus { dims } => build::torus(dims, max_vertices),
            Family::TreeBall { degree, radius } => build::tree_ball(*degree, *radius, max_vertices),
            Family::LamplighterSegment { length } => build::lamplighter_segment(*length, max_vertices),
            Family::Cycle { length } => build::cycle(*length, max_vertices),
            Family::Custom => Err(Error::InvalidParameter(
                "custom graphs are built from an edge list".into(),
            )),
        }
    }

    /// Vertex-transitive families, plus the tree ball whose interior is a
    /// piece of the transitive regular tree.
    pub fn is_transitive_standin(&self) -> bool {
        matches!(
            self,
            Family::Torus { .. } | Family::Cycle { .. } | Family::TreeBall { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    family: Family,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    /// Edge index of every adjacency slot, parallel to `neighbors`.
    slot_edges: Vec<u32>,
    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    edges: Vec<(u32, u32)>,
}

impl Graph {
    pub fn torus(dims: &[usize]) -> Result<Graph> {
        build::torus(dims, DEFAULT_MAX_VERTICES)
    }

    pub fn cycle(length: usize) -> Result<Graph> {
        build::cycle(length, DEFAULT_MAX_VERTICES)
    }

    pub fn tree_ball(degree: usize, radius: usize) -> Result<Graph> {
        build::tree_ball(degree, radius, DEFAULT_MAX_VERTICES)
    }

    pub fn lamplighter_segment(length: usize) -> Result<Graph> {
        build::lamplighter_segment(length, DEFAULT_MAX_VERTICES)
    }

    /// Build a graph from an explicit edge list. Rejects self-loops,
    /// duplicate edges, out-of-range ids and disconnected inputs.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)], family: Family) -> Result<Graph> {
        if vertex_count == 0 {
            return Err(Error::InvalidParameter("graph needs at least one vertex".into()));
        }
        if vertex_count > u32::MAX as usize {
            return Err(Error::CapExceeded {
                requested: vertex_count as u128,
                cap: u32::MAX as usize,
            });
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for x in [a, b] {
                if x >= vertex_count {
                    return Err(Error::VertexOutOfRange { vertex: x, vertex_count });
                }
            }
            if a == b {
                return Err(Error::InvalidEdge(a, b));
            }
            normalized.push((a.min(b) as u32, a.max(b) as u32));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidEdge(w[0].0 as usize, w[0].1 as usize));
        }

        let mut degree = vec![0usize; vertex_count];
        for &(u, v) in &normalized {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..vertex_count].to_vec();
        let mut slots = vec![(0u32, 0u32); offsets[vertex_count]];
        for (e, &(u, v)) in normalized.iter().enumerate() {
            slots[fill[u as usize]] = (v, e as u32);
            fill[u as usize] += 1;
            slots[fill[v as usize]] = (u, e as u32);
            fill[v as usize] += 1;
        }
        for v in 0..vertex_count {
            slots[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let (neighbors, slot_edges) = slots.into_iter().unzip();

        let graph = Graph {
            family,
            offsets,
            neighbors,
            slot_edges,
            edges: normalized,
        };
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.edges[e];
        (u as usize, v as usize)
    }

    /// Index of the edge `{u, v}`, if present.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.vertex_count() || v >= self.vertex_count() {
            return None;
        }
        let key = (u.min(v) as u32, u.max(v) as u32);
        self.edges.binary_search(&key).ok()
    }

    /// Sorted neighbour list of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge indices parallel to [`Graph::neighbors`].
    #[inline]
    pub fn incident_edges(&self, v: usize) -> &[u32] {
        &self.slot_edges[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Stationary weight `pi(v) = deg(v)`.
    #[inline]
    pub fn pi(&self, v: usize) -> f64 {
        self.degree(v) as f64
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Common degree, if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.max_degree();
        (d == self.min_degree()).then_some(d)
    }

    /// Degree ratio `max deg / min deg` of the infinite target graph. The
    /// boundary of a tree ball or lamplighter window is an artefact, so those
    /// families report the ratio of their (regular) targets.
    pub fn target_degree_ratio(&self) -> f64 {
        match self.family {
            Family::Custom => self.max_degree() as f64 / self.min_degree() as f64,
            _ => 1.0,
        }
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                vertex_count: self.vertex_count(),
            })
        }
    }

    /// BFS distances from `source`; unreachable vertices get `u32::MAX`.
    pub fn bfs_distances(&self, source: usize) -> Vec<u32> {
        self.bfs_limited(source, usize::MAX)
    }

    fn bfs_limited(&self, source: usize, radius: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if du as usize >= radius {
                continue;
            }
            for &w in self.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<usize> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(0);
        }
        Ok(self.bfs_distances(u)[v] as usize)
    }

    /// `{u : d(v, u) <= r}`.
    pub fn ball(&self, v: usize, r: usize) -> Result<Domain> {
        self.check_vertex(v)?;
        let dist = self.bfs_limited(v, r);
        let members = (0..self.vertex_count())
            .filter(|&u| (dist[u] as usize) <= r && dist[u] != u32::MAX)
            .collect::<Vec<_>>();
        Domain::new(self.vertex_count(), members)
    }

    /// Vertices within distance `r` of any vertex of `set`.
    pub fn neighborhood(&self, set: &Domain, r: usize) -> Result<Domain> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &v in set.members() {
            dist[v as usize] = 0;
            queue.push_back(v as usize);
        }
        while let Some(u) = queue.pop_front() {
            if dist[u] as usize >= r {
                continue;
            }
            for &w in self.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        let members = (0..self.vertex_count()).filter(|&u| dist[u] != u32::MAX).collect();
        Domain::new(self.vertex_count(), members)
    }

    pub fn eccentricity(&self, v: usize) -> usize {
        self.bfs_distances(v).into_iter().max().unwrap_or(0) as usize
    }

    pub fn diameter(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.eccentricity(v)).max().unwrap_or(0)
    }

    fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != u32::MAX)
    }

    /// Interior validity radius of `v`; `None` when the graph has no
    /// infinite target (custom graphs stand for themselves).
    pub fn interior_radius(&self, v: usize) -> Option<usize> {
        match &self.family {
            Family::Torus { dims } => {
                let side = *dims.iter().min().expect("torus has dimensions");
                Some(side / 2 - 1)
            }
            Family::Cycle { length } => Some(length / 2 - 1),
            Family::TreeBall { degree, radius } => Some(radius - build::tree_depth(*degree, v)),
            Family::LamplighterSegment { length } => {
                let pos = v % length;
                Some(pos.min(length - 1 - pos))
            }
            Family::Custom => None,
        }
    }

    /// Fail unless `ball(v, required)` lies inside the interior region.
    pub fn require_interior(&self, v: usize, required: usize) -> Result<()> {
        match self.interior_radius(v) {
            Some(available) if available < required => Err(Error::ValidityRadius {
                vertex: v,
                required,
                available,
            }),
            _ => Ok(()),
        }
    }

    /// Total stationary mass `pi(V) = 2|E|`.
    pub fn total_pi(&self) -> f64 {
        2.0 * self.edge_count() as f64
    }
}
