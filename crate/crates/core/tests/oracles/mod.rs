//! Independent reference computations used by the integration and
//! acceptance tests. Nothing here calls into the library's numerics.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use perclab::Graph;

/// `C(2n, n) / 4^n`, from exact integers.
pub fn central_binomial_ratio(n: u32) -> f64 {
    let mut c: u128 = 1;
    for i in 0..n as u128 {
        c = c * (2 * n as u128 - i) / (i + 1);
    }
    c as f64 / 4f64.powi(n as i32)
}

/// `1 - rho(P_A)^2` from a dense symmetric eigensolver on
/// `D^{1/2} P_A D^{-1/2}`.
pub fn dense_lambda(g: &Graph, members: &[usize]) -> f64 {
    let m = members.len();
    let mut s = DMatrix::<f64>::zeros(m, m);
    for (i, &u) in members.iter().enumerate() {
        for (j, &v) in members.iter().enumerate() {
            if g.neighbors(u).contains(&(v as u32)) {
                s[(i, j)] = 1.0 / ((g.degree(u) * g.degree(v)) as f64).sqrt();
            }
        }
    }
    let rho = SymmetricEigen::new(s).eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    (1.0 - rho * rho).max(0.0)
}

pub struct SubsetFacts {
    pub members: Vec<usize>,
    pub mass: f64,
    pub lambda: f64,
    pub boundary: usize,
}

/// Every non-empty subset of `base`.
pub fn all_subsets(g: &Graph, base: &[usize]) -> Vec<SubsetFacts> {
    assert!(base.len() <= 16);
    (1u32..1 << base.len())
        .map(|mask| {
            let members: Vec<usize> = (0..base.len()).filter(|i| mask >> i & 1 == 1).map(|i| base[i]).collect();
            let mass = members.iter().map(|&v| g.degree(v) as f64).sum();
            let boundary = g
                .edges()
                .iter()
                .filter(|&&(a, b)| members.contains(&(a as usize)) != members.contains(&(b as usize)))
                .count();
            SubsetFacts {
                lambda: dense_lambda(g, &members),
                members,
                mass,
                boundary,
            }
        })
        .collect()
}

/// `min lambda(B)` over subsets of mass at most `x`, or 1 when none fits.
pub fn brute_lambda_profile(subsets: &[SubsetFacts], x: f64) -> f64 {
    subsets.iter().filter(|s| s.mass <= x).map(|s| s.lambda).fold(1.0, f64::min)
}

/// `min |boundary B| / pi(B)` over subsets of mass at most `x`, or 1 when none fits.
pub fn brute_iso_profile(subsets: &[SubsetFacts], x: f64) -> f64 {
    subsets
        .iter()
        .filter(|s| s.mass <= x)
        .map(|s| s.boundary as f64 / s.mass)
        .fold(1.0, f64::min)
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact law of `|K_root|` for bond percolation on the rooted ball of
/// radius `radius` in the `degree`-regular tree: entry `s` is `Pr(|K| = s)`.
pub fn tree_cluster_law(degree: usize, radius: usize, p: f64) -> Vec<f64> {
    if radius == 0 {
        return vec![0.0, 1.0];
    }
    // law of a vertex's cluster inside its own subtree, from the leaves up
    let mut below = vec![0.0, 1.0];
    for _ in 1..radius {
        below = grow(&below, degree - 1, p);
    }
    // the root has one more child than every other vertex
    let mut law = grow(&below, degree, p);
    while law.last() == Some(&0.0) {
        law.pop();
    }
    law
}

fn grow(child: &[f64], children: usize, p: f64) -> Vec<f64> {
    let mut branch: Vec<f64> = child.iter().map(|x| p * x).collect();
    branch[0] += 1.0 - p;
    let mut next = vec![0.0, 1.0];
    for _ in 0..children {
        next = convolve(&next, &branch);
    }
    next
}

/// `Pr(|K| >= n)` from a law.
pub fn tail(law: &[f64], n: usize) -> f64 {
    law.iter().skip(n).sum()
}

/// `E f(|K|)` from a law.
pub fn expectation(law: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    law.iter().enumerate().filter(|&(_, &q)| q > 0.0).map(|(s, &q)| q * f(s)).sum()
}

/// The law above truncated at `cutoff`: the sum up to `cutoff` and the
/// mass left beyond it.
pub fn truncated_expectation(law: &[f64], cutoff: usize, f: impl Fn(usize) -> f64) -> (f64, f64) {
    let head = law.iter().take(cutoff + 1).enumerate().filter(|&(_, &q)| q > 0.0).map(|(s, &q)| q * f(s)).sum();
    let rest = law.iter().skip(cutoff + 1).sum();
    (head, rest)
}

/// Small connected graphs, optionally with a vertex domain the sets are
/// restricted to.
pub struct BatteryCase {
    pub name: String,
    pub graph: Graph,
    pub domain: Option<perclab::Domain>,
}

impl BatteryCase {
    /// Vertices the subsets are drawn from.
    pub fn base(&self) -> Vec<usize> {
        match &self.domain {
            Some(d) => d.iter().collect(),
            None => (0..self.graph.vertex_count()).collect(),
        }
    }
}

/// Cycles of length 3 to 10, paths inside a longer cycle, `torus[3, 3]`
/// and the radius-2 ball of the 3-regular tree.
pub fn battery() -> Vec<BatteryCase> {
    let mut cases = Vec::new();
    for n in 3..=10 {
        cases.push(BatteryCase {
            name: format!("cycle{n}"),
            graph: Graph::cycle(n).unwrap(),
            domain: None,
        });
    }
    for k in [3usize, 6, 10] {
        let graph = Graph::cycle(32).unwrap();
        let domain = perclab::Domain::new(32, (0..k).collect()).unwrap();
        cases.push(BatteryCase {
            name: format!("path{k}_in_cycle32"),
            graph,
            domain: Some(domain),
        });
    }
    cases.push(BatteryCase {
        name: "torus3x3".into(),
        graph: Graph::torus(&[3, 3]).unwrap(),
        domain: None,
    });
    cases.push(BatteryCase {
        name: "tree3_r2".into(),
        graph: Graph::tree_ball(3, 2).unwrap(),
        domain: None,
    });
    cases
}

/// Domains of at most 14 vertices on which every set has a positive gap,
/// so every decay threshold is finite.
pub fn decay_battery() -> Vec<BatteryCase> {
    let mut cases = Vec::new();
    for k in [1usize, 4, 9, 14] {
        cases.push(BatteryCase {
            name: format!("path{k}_in_cycle64"),
            graph: Graph::cycle(64).unwrap(),
            domain: Some(perclab::Domain::new(64, (0..k).collect()).unwrap()),
        });
    }
    let torus = Graph::torus(&[8, 8]).unwrap();
    let ball = torus.ball(27, 2).unwrap();
    cases.push(BatteryCase {
        name: "ball2_in_torus8x8".into(),
        graph: torus,
        domain: Some(ball),
    });
    let tree = Graph::tree_ball(3, 4).unwrap();
    let ball = tree.ball(0, 2).unwrap();
    cases.push(BatteryCase {
        name: "ball2_in_tree3_r4".into(),
        graph: tree,
        domain: Some(ball),
    });
    cases
}
