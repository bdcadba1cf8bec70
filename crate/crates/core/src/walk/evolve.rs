use crate::graph::{Domain, Graph};

use super::MassVector;

/// Exact evolution `mu -> mu P` (or `mu P_A`) that only touches the
/// vertices currently carrying mass, so `k` steps from a point cost
/// `O(k |ball(v, k)| deg)` rather than `O(k |V|)`.
#[derive(Debug, Clone)]
pub struct Evolver<'g> {
    graph: &'g Graph,
    killing: Option<Domain>,
    current: Vec<f64>,
    next: Vec<f64>,
    active: Vec<u32>,
    next_active: Vec<u32>,
    marked: Vec<bool>,
    steps: usize,
}

impl<'g> Evolver<'g> {
    pub fn new(graph: &'g Graph, mu: &MassVector) -> Self {
        let n = graph.vertex_count();
        let current = mu.values().to_vec();
        let active = current
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(v, _)| v as u32)
            .collect();
        Evolver {
            graph,
            killing: None,
            current,
            next: vec![0.0; n],
            active,
            next_active: Vec::new(),
            marked: vec![false; n],
            steps: 0,
        }
    }

    pub fn point(graph: &'g Graph, v: usize) -> Self {
        Self::new(graph, &MassVector::delta(graph.vertex_count(), v))
    }

    /// Evolve under `P_A` instead of `P`. Mass outside `A` is dropped at
    /// the first step.
    pub fn killed(graph: &'g Graph, domain: &Domain, mu: &MassVector) -> Self {
        let mut ev = Self::new(graph, mu);
        ev.killing = Some(domain.clone());
        ev
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&mut self) {
        let g = self.graph;
        for &u in &self.active {
            let u = u as usize;
            let m = self.current[u];
            self.current[u] = 0.0;
            if m == 0.0 {
                continue;
            }
            if let Some(a) = &self.killing {
                if !a.contains(u) {
                    continue;
                }
            }
            let share = m / g.degree(u) as f64;
            for &w in g.neighbors(u) {
                let wi = w as usize;
                if self.killing.as_ref().is_some_and(|a| !a.contains(wi)) {
                    continue;
                }
                self.next[wi] += share;
                if !self.marked[wi] {
                    self.marked[wi] = true;
                    self.next_active.push(w);
                }
            }
        }
        for &w in &self.next_active {
            self.marked[w as usize] = false;
        }
        std::mem::swap(&mut self.current, &mut self.next);
        std::mem::swap(&mut self.active, &mut self.next_active);
        self.next_active.clear();
        self.steps += 1;
    }

    pub fn run(&mut self, k: usize) {
        for _ in 0..k {
            self.step();
        }
    }

    pub fn mass_at(&self, v: usize) -> f64 {
        self.current[v]
    }

    pub fn mass_in(&self, set: &Domain) -> f64 {
        if set.len() < self.active.len() {
            set.iter().map(|v| self.current[v]).sum()
        } else {
            self.active
                .iter()
                .filter(|&&v| set.contains(v as usize))
                .map(|&v| self.current[v as usize])
                .sum()
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.active.iter().map(|&v| self.current[v as usize]).sum()
    }

    /// `||mu_t||_{2,1/pi}`
    pub fn norm_2_inv_pi(&self) -> f64 {
        self.active
            .iter()
            .map(|&v| {
                let x = self.current[v as usize];
                x * x / self.graph.pi(v as usize)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Number of vertices that may carry mass.
    pub fn support_size(&self) -> usize {
        self.active.len()
    }

    pub fn to_mass_vector(&self) -> MassVector {
        MassVector::from_values(self.current.clone())
    }
}
