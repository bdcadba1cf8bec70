use crate::error::{Error, Result};

use super::Graph;

/// A finite vertex subset with O(1) membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    vertex_count: usize,
    members: Vec<u32>,
    indicator: Vec<u64>,
}

impl Domain {
    /// Members are sorted and deduplicated; ids must be below `vertex_count`.
    pub fn new(vertex_count: usize, mut members: Vec<usize>) -> Result<Domain> {
        members.sort_unstable();
        members.dedup();
        if let Some(&v) = members.iter().find(|&&v| v >= vertex_count) {
            return Err(Error::VertexOutOfRange { vertex: v, vertex_count });
        }
        let mut indicator = vec![0u64; vertex_count.div_ceil(64)];
        for &v in &members {
            indicator[v / 64] |= 1 << (v % 64);
        }
        Ok(Domain {
            vertex_count,
            members: members.into_iter().map(|v| v as u32).collect(),
            indicator,
        })
    }

    pub fn full(vertex_count: usize) -> Domain {
        Domain::new(vertex_count, (0..vertex_count).collect()).expect("ids in range")
    }

    pub fn singleton(vertex_count: usize, v: usize) -> Result<Domain> {
        Domain::new(vertex_count, vec![v])
    }

    /// Subset of `base` selected by the bits of `mask` (bit `i` picks the
    /// `i`-th member of `base`).
    pub fn from_mask(base: &Domain, mask: u64) -> Domain {
        let members = base
            .members
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v as usize)
            .collect();
        Domain::new(base.vertex_count(), members).expect("subset of a valid domain")
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.indicator
            .get(v / 64)
            .is_some_and(|word| word >> (v % 64) & 1 == 1)
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&v| v as usize)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn is_full(&self, g: &Graph) -> bool {
        self.members.len() == g.vertex_count()
    }

    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyDomain)
        } else {
            Ok(())
        }
    }

    /// `pi(A) = sum of degrees`.
    pub fn pi_mass(&self, g: &Graph) -> f64 {
        self.iter().map(|v| g.pi(v)).sum()
    }

    /// Number of edges with exactly one endpoint in the set.
    pub fn edge_boundary(&self, g: &Graph) -> usize {
        self.iter()
            .map(|v| g.neighbors(v).iter().filter(|&&u| !self.contains(u as usize)).count())
            .sum()
    }

    pub fn max_pi(&self, g: &Graph) -> f64 {
        self.iter().map(|v| g.pi(v)).fold(0.0, f64::max)
    }

    pub fn min_pi(&self, g: &Graph) -> f64 {
        self.iter().map(|v| g.pi(v)).fold(f64::INFINITY, f64::min)
    }
}
