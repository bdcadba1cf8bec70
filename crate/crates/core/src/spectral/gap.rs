use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Domain, Graph};
use crate::rng::{derive_seed, rng_from_seed};
use crate::walk::MassVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    /// Relative tolerance on the top eigenvalue of `P_A^2`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            tolerance: 1e-10,
            max_iterations: 100_000,
            seed: 0x6c61_6d62_6461,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapEstimate {
    /// `lambda(A) = 1 - rho(P_A)^2`
    pub lambda: f64,
    /// `rho(P_A)^2`
    pub top: f64,
    pub iterations: usize,
    /// Non-negative vector attaining `top` up to the tolerance, supported
    /// on the dominant component.
    pub vector: MassVector,
}

/// `lambda(A)` with the default configuration.
pub fn lambda_a(g: &Graph, domain: &Domain) -> Result<f64> {
    Ok(lambda_a_with(g, domain, &PowerConfig::default())?.lambda)
}

/// `lambda(A)` by power iteration, one run per connected component of the
/// subgraph induced by `A`.
pub fn lambda_a_with(g: &Graph, domain: &Domain, cfg: &PowerConfig) -> Result<GapEstimate> {
    domain.require_nonempty()?;
    let mut best: Option<(f64, usize, Vec<usize>, Vec<f64>)> = None;
    let mut iterations = 0;
    for comp in components(g, domain) {
        let (mut top, iters, vec) = top_eigenvalue(g, &comp, cfg)?;
        iterations += iters;
        if is_closed(g, domain, &comp) {
            // P restricted to a closed component is stochastic
            top = 1.0;
        }
        if best.as_ref().is_none_or(|b| top > b.0) {
            best = Some((top, iters, comp, vec));
        }
    }
    let (top, _, comp, vec) = best.expect("non-empty domain has a component");
    let mut values = vec![0.0; g.vertex_count()];
    for (&v, &x) in comp.iter().zip(&vec) {
        values[v] = x;
    }
    Ok(GapEstimate {
        lambda: (1.0 - top).clamp(0.0, 1.0),
        top,
        iterations,
        vector: MassVector::from_values(values),
    })
}

fn is_closed(g: &Graph, domain: &Domain, comp: &[usize]) -> bool {
    comp.iter().all(|&v| g.neighbors(v).iter().all(|&w| domain.contains(w as usize)))
}

/// Connected components of the subgraph induced by `domain`, each sorted.
pub fn components(g: &Graph, domain: &Domain) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    for start in domain.iter() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut head = 0;
        while head < comp.len() {
            let u = comp[head];
            head += 1;
            for &w in g.neighbors(u) {
                let w = w as usize;
                if domain.contains(w) && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Top eigenvalue of `P_C^2` for a connected `C`, with the iterate.
fn top_eigenvalue(g: &Graph, comp: &[usize], cfg: &PowerConfig) -> Result<(f64, usize, Vec<f64>)> {
    let m = comp.len();
    if m == 1 {
        return Ok((0.0, 0, vec![1.0]));
    }
    let local = |v: usize| comp.binary_search(&v).ok();
    let adj: Vec<Vec<usize>> = comp
        .iter()
        .map(|&u| g.neighbors(u).iter().filter_map(|&w| local(w as usize)).collect())
        .collect();
    let pi: Vec<f64> = comp.iter().map(|&u| g.pi(u)).collect();
    let norm_sq = |x: &[f64]| x.iter().zip(&pi).map(|(a, p)| p * a * a).sum::<f64>();
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..m {
            out[i] = adj[i].iter().map(|&j| x[j]).sum::<f64>() / pi[i];
        }
    };

    let mut rng = rng_from_seed(derive_seed(cfg.seed, comp[0] as u64 ^ (m as u64) << 32));
    let mut phi: Vec<f64> = (0..m).map(|_| 0.5 + rng.random::<f64>()).collect();
    let n0 = norm_sq(&phi).sqrt();
    phi.iter_mut().for_each(|x| *x /= n0);
    let mut next = vec![0.0; m];

    let mut prev_rq = 0.0;
    let mut prev_delta = f64::NAN;
    for it in 1..=cfg.max_iterations {
        apply(&phi, &mut next);
        // phi has unit norm, so this is <P_C^2 phi, phi>_pi / ||phi||^2
        let rq = norm_sq(&next);
        if rq == 0.0 {
            return Ok((0.0, it, phi));
        }
        let scale = rq.sqrt();
        for (p, x) in phi.iter_mut().zip(&next) {
            *p = x / scale;
        }
        let delta = rq - prev_rq;
        if it > 2 {
            if delta.abs() <= 4.0 * f64::EPSILON * rq {
                return Ok((rq, it, phi));
            }
            let ratio = delta / prev_delta;
            if ratio > 0.0 && ratio < 1.0 && delta * ratio / (1.0 - ratio) <= cfg.tolerance * rq {
                return Ok((rq, it, phi));
            }
        }
        prev_delta = delta;
        prev_rq = rq;
    }
    let ratio = {
        apply(&phi, &mut next);
        let rq = norm_sq(&next);
        (rq - prev_rq) / prev_delta
    };
    let upper = if ratio > 0.0 && ratio < 1.0 {
        (prev_rq + prev_delta * ratio / (1.0 - ratio)).min(1.0)
    } else {
        1.0
    };
    Err(Error::NonConvergence {
        iterations: cfg.max_iterations,
        lower: prev_rq,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_has_full_gap() {
        let g = Graph::cycle(8).unwrap();
        assert_eq!(lambda_a(&g, &Domain::singleton(8, 3).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn adjacent_pair_in_tree() {
        let g = Graph::tree_ball(3, 4).unwrap();
        let a = Domain::new(g.vertex_count(), vec![0, 1]).unwrap();
        assert!((lambda_a(&g, &a).unwrap() - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn paths_in_a_long_cycle() {
        let g = Graph::cycle(256).unwrap();
        for k in [3usize, 7, 20, 50] {
            let a = Domain::new(256, (10..10 + k).collect()).unwrap();
            let exact = (std::f64::consts::PI / (k + 1) as f64).sin().powi(2);
            let got = lambda_a(&g, &a).unwrap();
            assert!((got - exact).abs() < 1e-9, "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn dominant_component_wins() {
        let g = Graph::cycle(20).unwrap();
        let a = Domain::new(20, vec![0, 1, 5, 6, 7, 8]).unwrap();
        let est = lambda_a_with(&g, &a, &PowerConfig::default()).unwrap();
        assert!((est.lambda - (std::f64::consts::PI / 5.0).sin().powi(2)).abs() < 1e-9);
        assert!(est.vector.values()[0] == 0.0 && est.vector.values()[6] != 0.0);
    }

    #[test]
    fn non_convergence_reports_bracket() {
        let g = Graph::cycle(256).unwrap();
        let a = Domain::new(256, (0..100).collect()).unwrap();
        let cfg = PowerConfig { max_iterations: 5, ..PowerConfig::default() };
        match lambda_a_with(&g, &a, &cfg) {
            Err(Error::NonConvergence { lower, upper, .. }) => assert!(lower <= upper),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
