//! Exact and sampled simple random walk.
//!
//! Measures evolve on the right (`mu -> mu P`), functions on the left
//! (`phi -> P phi`). The killed operator `P_A(u, v) = P(u, v) 1(u, v in A)`
//! drops every transition that leaves or starts outside `A`.

mod evolve;
mod hk;
mod mass;

pub use evolve::Evolver;
pub use hk::{hk_fit, hk_fit_sequence, write_return_csv, DecayRegime, HkFit, HkFitConfig};
pub use mass::MassVector;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{Domain, Graph};
use crate::rng::rng_from_seed;

/// `mu P` over the whole graph.
pub fn step(g: &Graph, mu: &MassVector) -> MassVector {
    let mut out = vec![0.0; g.vertex_count()];
    for (u, &m) in mu.values().iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let share = m / g.degree(u) as f64;
        for &w in g.neighbors(u) {
            out[w as usize] += share;
        }
    }
    MassVector::from_values(out)
}

/// `mu P_A`: the output is supported in `A` and mass outside `A` is dropped.
pub fn killed_step(g: &Graph, domain: &Domain, mu: &MassVector) -> MassVector {
    let mut out = vec![0.0; g.vertex_count()];
    for u in domain.iter() {
        let m = mu.values()[u];
        if m == 0.0 {
            continue;
        }
        let share = m / g.degree(u) as f64;
        for &w in g.neighbors(u) {
            if domain.contains(w as usize) {
                out[w as usize] += share;
            }
        }
    }
    MassVector::from_values(out).with_support(domain.clone())
}

/// Function-side killed operator `(P_A phi)(u) = 1(u in A) sum_{v in A} P(u, v) phi(v)`.
pub fn killed_apply(g: &Graph, domain: &Domain, phi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.vertex_count()];
    for u in domain.iter() {
        let acc: f64 = g
            .neighbors(u)
            .iter()
            .filter(|&&w| domain.contains(w as usize))
            .map(|&w| phi[w as usize])
            .sum();
        out[u] = acc / g.degree(u) as f64;
    }
    out
}

/// Exact `p_n(v, v)`.
///
/// Requires `ball(v, ceil(n/2) + 1)` inside the interior validity region,
/// otherwise boundary effects of the finite stand-in would leak in.
pub fn return_probability(g: &Graph, v: usize, n: usize) -> Result<f64> {
    Ok(return_probabilities(g, v, n)?[n - 1])
}

/// `[p_1(v, v), ..., p_n(v, v)]` from a single evolution.
pub fn return_probabilities(g: &Graph, v: usize, n: usize) -> Result<Vec<f64>> {
    g.check_vertex(v)?;
    if n == 0 {
        return Err(invalid("return probabilities need n >= 1"));
    }
    g.require_interior(v, n.div_ceil(2) + 1)?;
    let mut ev = Evolver::point(g, v);
    Ok((0..n)
        .map(|_| {
            ev.step();
            ev.mass_at(v)
        })
        .collect())
}

/// Both sides of the reversibility identity for the killed walk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReversibilityReport {
    /// `<mu P_A^t, nu>_{1/pi}`
    pub lhs: f64,
    /// `<mu, nu P_A^t>_{1/pi}`
    pub rhs: f64,
    /// `|lhs - rhs| / (||mu||_{2,1/pi} ||nu||_{2,1/pi})`
    pub residual: f64,
    pub pass: bool,
}

pub const REVERSIBILITY_TOLERANCE: f64 = 1e-10;

pub fn reversibility_check(
    g: &Graph,
    domain: &Domain,
    mu: &MassVector,
    nu: &MassVector,
    t: usize,
) -> ReversibilityReport {
    let evolve = |m: &MassVector| {
        let mut out = m.clone();
        for _ in 0..t {
            out = killed_step(g, domain, &out);
        }
        out
    };
    let lhs = evolve(mu).inner_inv_pi(g, nu);
    let rhs = mu.inner_inv_pi(g, &evolve(nu));
    let scale = mu.norm_2_inv_pi(g) * nu.norm_2_inv_pi(g);
    let residual = if scale > 0.0 { (lhs - rhs).abs() / scale } else { 0.0 };
    ReversibilityReport {
        lhs,
        rhs,
        residual,
        pass: residual <= REVERSIBILITY_TOLERANCE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartMeasure {
    /// `mu_D`, uniform on `D`.
    UniformOnD,
    /// `pi_D(v) = pi(v) / pi(D)` on `D`.
    PiOnD,
}

/// Whether a result is read as a statement about the infinite target graph
/// (and must respect interior validity) or about the finite graph itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Infinite,
    Finite,
}

pub fn start_measure(g: &Graph, set: &Domain, start: StartMeasure) -> MassVector {
    match start {
        StartMeasure::UniformOnD => MassVector::uniform_on(g, set),
        StartMeasure::PiOnD => MassVector::pi_on(g, set),
    }
}

/// Exact `Pr(X_k in D)` for the unkilled walk started from `mu_D` or `pi_D`.
pub fn escape_probability(
    g: &Graph,
    set: &Domain,
    k: usize,
    start: StartMeasure,
    semantics: Semantics,
) -> Result<f64> {
    set.require_nonempty()?;
    if semantics == Semantics::Infinite {
        for v in set.iter() {
            g.require_interior(v, k)?;
        }
    }
    let mut ev = Evolver::new(g, &start_measure(g, set, start));
    ev.run(k);
    Ok(ev.mass_in(set))
}

/// A sampled trajectory `X_0, ..., X_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkPath {
    pub vertices: Vec<usize>,
    pub seed: u64,
}

pub fn sample_walk(g: &Graph, v: usize, k: usize, seed: u64) -> Result<WalkPath> {
    g.check_vertex(v)?;
    let mut rng = rng_from_seed(seed);
    let mut vertices = Vec::with_capacity(k + 1);
    vertices.push(v);
    let mut at = v;
    for _ in 0..k {
        let nb = g.neighbors(at);
        at = nb[rng.random_range(0..nb.len())] as usize;
        vertices.push(at);
    }
    Ok(WalkPath { vertices, seed })
}
