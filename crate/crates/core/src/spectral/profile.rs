use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Domain, Graph};

use super::gap::{lambda_a_with, PowerConfig};

/// Largest domain enumerated subset by subset.
pub const EXHAUSTIVE_MAX_VERTICES: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    /// True infimum over every subset of the domain.
    Exhaustive,
    /// Minimum over balls and small connected sets: an upper bound.
    BallFamily,
    /// User-supplied lower bound, see [`ProfileModel`].
    Analytic,
}

impl ProfileMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileMode::Exhaustive => "exhaustive",
            ProfileMode::BallFamily => "ball_family",
            ProfileMode::Analytic => "analytic",
        }
    }

    /// Whether values are certified lower bounds on the true profile.
    pub fn is_lower_bound(self) -> bool {
        self != ProfileMode::BallFamily
    }
}

/// `x -> min(1, c log^{-alpha}(x / max pi))` for `x >= 2 max pi`, else 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileModel {
    pub alpha: f64,
    pub c: f64,
}

impl ProfileModel {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha >= 0.0 && c > 0.0 && alpha.is_finite() && c.is_finite()) {
            return Err(invalid(format!("profile model needs alpha >= 0 and c > 0, got {alpha}, {c}")));
        }
        Ok(ProfileModel { alpha, c })
    }

    pub fn value(&self, x: f64, max_pi: f64) -> f64 {
        if x < 2.0 * max_pi {
            1.0
        } else {
            (self.c * (x / max_pi).ln().powf(-self.alpha)).min(1.0)
        }
    }
}

/// How to build a profile.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    /// Enumerate every non-empty subset of `domain` (the whole graph when
    /// `None`). At most [`EXHAUSTIVE_MAX_VERTICES`] vertices.
    Exhaustive { domain: Option<Domain> },
    /// Balls `B(v, r)` around every vertex plus every connected set of at
    /// most `connected_size` vertices.
    BallFamily { connected_size: usize },
    Analytic(ProfileModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub threshold: f64,
    pub value: f64,
}

/// Step function `L -> Lambda(L)`, evaluated at requested thresholds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub mode: ProfileMode,
    pub graph_ref: String,
    /// Sets are restricted to subsets of this domain when present.
    pub domain: Option<Vec<u32>>,
    pub points: Vec<ProfilePoint>,
    /// `(mass, running minimum)` at every mass where the minimum drops.
    steps: Vec<(f64, f64)>,
    model: Option<ProfileModel>,
    max_pi: f64,
}

impl SpectralProfile {
    pub fn value_at(&self, threshold: f64) -> f64 {
        if let Some(model) = &self.model {
            return model.value(threshold, self.max_pi);
        }
        step_value(&self.steps, threshold, 1.0)
    }

    pub fn is_lower_bound(&self) -> bool {
        self.mode.is_lower_bound()
    }

    pub fn domain(&self, vertex_count: usize) -> Option<Domain> {
        self.domain
            .as_ref()
            .map(|m| Domain::new(vertex_count, m.iter().map(|&v| v as usize).collect()).expect("stored domain is valid"))
    }

    /// Masses at which the step function can change.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.0).collect()
    }

    pub fn model(&self) -> Option<&ProfileModel> {
        self.model.as_ref()
    }
}

/// Isoperimetric profile `x -> min |dB| / pi(B)` over `pi(B) <= x`, with
/// value 1 below the smallest mass (every ratio is at most 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoProfile {
    pub graph_ref: String,
    pub domain: Option<Vec<u32>>,
    pub points: Vec<ProfilePoint>,
    steps: Vec<(f64, f64)>,
}

impl IsoProfile {
    pub fn value_at(&self, x: f64) -> f64 {
        step_value(&self.steps, x, 1.0)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.0).collect()
    }
}

/// Tolerance for comparing integer-valued masses stored as floats.
const MASS_EPS: f64 = 1e-9;

fn step_value(steps: &[(f64, f64)], x: f64, floor: f64) -> f64 {
    let idx = steps.partition_point(|&(mass, _)| mass <= x + MASS_EPS);
    if idx == 0 {
        floor
    } else {
        steps[idx - 1].1
    }
}

/// Sort `(mass, value)` pairs and keep the running minimum.
fn running_min(mut pairs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut steps: Vec<(f64, f64)> = Vec::new();
    for (mass, value) in pairs {
        let current = steps.last().map_or(f64::INFINITY, |s| s.1);
        if value < current {
            if steps.last().is_some_and(|s| (s.0 - mass).abs() <= MASS_EPS) {
                steps.last_mut().unwrap().1 = value;
            } else {
                steps.push((mass, value));
            }
        }
    }
    steps
}

pub fn graph_ref(g: &Graph) -> String {
    format!(
        "{}:{}v:{}e",
        serde_json::to_string(g.family()).expect("family serializes"),
        g.vertex_count(),
        g.edge_count()
    )
}

/// One non-empty subset of an enumerated domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetRecord {
    pub mask: u64,
    pub mass: f64,
    pub lambda: f64,
    pub boundary: usize,
}

fn enumeration_domain(g: &Graph, domain: Option<&Domain>) -> Result<Domain> {
    let d = domain.cloned().unwrap_or_else(|| Domain::full(g.vertex_count()));
    d.require_nonempty()?;
    if d.vertex_count() != g.vertex_count() {
        return Err(invalid("domain belongs to a different graph"));
    }
    if d.len() > EXHAUSTIVE_MAX_VERTICES {
        return Err(Error::ModeMismatch(format!(
            "exhaustive enumeration needs at most {EXHAUSTIVE_MAX_VERTICES} vertices, domain has {}",
            d.len()
        )));
    }
    Ok(d)
}

/// `lambda`, mass and edge boundary of every non-empty subset of `domain`,
/// ordered by mask.
pub fn enumerate_subsets(g: &Graph, domain: Option<&Domain>, cfg: &PowerConfig) -> Result<Vec<SubsetRecord>> {
    let base = enumeration_domain(g, domain)?;
    (1u64..1 << base.len())
        .into_par_iter()
        .map(|mask| {
            let b = Domain::from_mask(&base, mask);
            Ok(SubsetRecord {
                mask,
                mass: b.pi_mass(g),
                lambda: lambda_a_with(g, &b, cfg)?.lambda,
                boundary: b.edge_boundary(g),
            })
        })
        .collect()
}

pub fn spectral_profile(g: &Graph, thresholds: &[f64], spec: &ProfileSpec) -> Result<SpectralProfile> {
    spectral_profile_with(g, thresholds, spec, &PowerConfig::default())
}

pub fn spectral_profile_with(
    g: &Graph,
    thresholds: &[f64],
    spec: &ProfileSpec,
    cfg: &PowerConfig,
) -> Result<SpectralProfile> {
    let (mode, domain, steps, model) = match spec {
        ProfileSpec::Exhaustive { domain } => {
            let base = enumeration_domain(g, domain.as_ref())?;
            let records = enumerate_subsets(g, Some(&base), cfg)?;
            let steps = running_min(records.iter().map(|r| (r.mass, r.lambda)).collect());
            let stored = domain.as_ref().map(|d| d.members().to_vec());
            (ProfileMode::Exhaustive, stored, steps, None)
        }
        ProfileSpec::BallFamily { connected_size } => {
            let max_mass = thresholds.iter().copied().fold(0.0, f64::max);
            let sets = ball_family_sets(g, max_mass, *connected_size);
            let pairs = sets
                .par_iter()
                .map(|b| Ok((b.pi_mass(g), lambda_a_with(g, b, cfg)?.lambda)))
                .collect::<Result<Vec<_>>>()?;
            (ProfileMode::BallFamily, None, running_min(pairs), None)
        }
        ProfileSpec::Analytic(model) => (ProfileMode::Analytic, None, Vec::new(), Some(*model)),
    };
    let mut profile = SpectralProfile {
        mode,
        graph_ref: graph_ref(g),
        domain,
        points: Vec::new(),
        steps,
        model,
        max_pi: g.max_degree() as f64,
    };
    profile.points = thresholds
        .iter()
        .map(|&threshold| ProfilePoint {
            threshold,
            value: profile.value_at(threshold),
        })
        .collect();
    Ok(profile)
}

/// Balls of mass at most `max_mass` (never the whole graph) together with
/// every connected set of at most `connected_size` vertices.
fn ball_family_sets(g: &Graph, max_mass: f64, connected_size: usize) -> Vec<Domain> {
    let n = g.vertex_count();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    for v in 0..n {
        let dist = g.bfs_distances(v);
        let mut r = 0;
        loop {
            let members: Vec<u32> = (0..n as u32).filter(|&u| dist[u as usize] <= r).collect();
            let mass: f64 = members.iter().map(|&u| g.pi(u as usize)).sum();
            if mass > max_mass + MASS_EPS || members.len() == n {
                break;
            }
            seen.insert(members);
            r += 1;
        }
    }
    // connected sets grown one neighbour at a time
    let mut frontier: Vec<Vec<u32>> = (0..n as u32).map(|v| vec![v]).collect();
    for size in 1..=connected_size.min(n.saturating_sub(1)) {
        let mut next = HashSet::new();
        for set in &frontier {
            seen.insert(set.clone());
            if size == connected_size {
                continue;
            }
            for &u in set {
                for &w in g.neighbors(u as usize) {
                    if let Err(pos) = set.binary_search(&w) {
                        let mut grown = set.clone();
                        grown.insert(pos, w);
                        next.insert(grown);
                    }
                }
            }
        }
        frontier = next.into_iter().collect();
        frontier.sort_unstable();
    }
    let mut sets: Vec<Vec<u32>> = seen.into_iter().collect();
    sets.sort_unstable();
    sets.into_iter()
        .map(|m| Domain::new(n, m.into_iter().map(|v| v as usize).collect()).expect("ids in range"))
        .collect()
}

/// Exhaustive isoperimetric profile over subsets of `domain`.
pub fn iso_profile(g: &Graph, thresholds: &[f64], domain: Option<&Domain>) -> Result<IsoProfile> {
    let base = enumeration_domain(g, domain)?;
    let pairs: Vec<(f64, f64)> = (1u64..1 << base.len())
        .into_par_iter()
        .map(|mask| {
            let b = Domain::from_mask(&base, mask);
            let mass = b.pi_mass(g);
            (mass, b.edge_boundary(g) as f64 / mass)
        })
        .collect();
    let steps = running_min(pairs);
    let points = thresholds
        .iter()
        .map(|&threshold| ProfilePoint {
            threshold,
            value: step_value(&steps, threshold, 1.0),
        })
        .collect();
    Ok(IsoProfile {
        graph_ref: graph_ref(g),
        domain: domain.map(|d| d.members().to_vec()),
        points,
        steps,
    })
}

/// `|dA| / pi(A)`
pub fn boundary_ratio(g: &Graph, set: &Domain) -> Result<f64> {
    set.require_nonempty()?;
    Ok(set.edge_boundary(g) as f64 / set.pi_mass(g))
}

/// CSV with header `L,lambda,mode`.
pub fn write_profile_csv(profile: &SpectralProfile) -> String {
    let mut out = String::from("L,lambda,mode\n");
    for p in &profile.points {
        writeln!(out, "{},{},{}", p.threshold, p.value, profile.mode.as_str()).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_smallest_mass_is_one() {
        let g = Graph::cycle(8).unwrap();
        let p = spectral_profile(&g, &[0.5, 1.9], &ProfileSpec::Exhaustive { domain: None }).unwrap();
        assert!(p.points.iter().all(|pt| pt.value == 1.0));
    }

    #[test]
    fn cycle8_at_four() {
        let g = Graph::cycle(8).unwrap();
        let p = spectral_profile(&g, &[4.0], &ProfileSpec::Exhaustive { domain: None }).unwrap();
        assert!((p.points[0].value - 0.75).abs() < 1e-12);
        let iso = iso_profile(&g, &[4.0], None).unwrap();
        assert_eq!(iso.points[0].value, 0.5);
    }

    #[test]
    fn whole_graph_has_zero_gap() {
        let g = Graph::cycle(6).unwrap();
        let p = spectral_profile(&g, &[12.0], &ProfileSpec::Exhaustive { domain: None }).unwrap();
        assert!(p.points[0].value.abs() < 1e-9);
    }

    #[test]
    fn ball_family_bounds_from_above() {
        let g = Graph::torus(&[3, 3]).unwrap();
        let exact = spectral_profile(&g, &[8.0], &ProfileSpec::Exhaustive { domain: None }).unwrap();
        let upper = spectral_profile(&g, &[8.0], &ProfileSpec::BallFamily { connected_size: 2 }).unwrap();
        assert!(upper.points[0].value >= exact.points[0].value - 1e-12);
        assert!(!upper.is_lower_bound());
    }

    #[test]
    fn exhaustive_size_cap() {
        let g = Graph::cycle(15).unwrap();
        assert!(matches!(
            spectral_profile(&g, &[4.0], &ProfileSpec::Exhaustive { domain: None }),
            Err(Error::ModeMismatch(_))
        ));
    }

    #[test]
    fn analytic_model_shape() {
        let m = ProfileModel::new(2.0, 0.5).unwrap();
        assert_eq!(m.value(5.0, 3.0), 1.0);
        let x = 3.0 * std::f64::consts::E.powi(2);
        assert!((m.value(x, 3.0) - 0.125).abs() < 1e-12);
        assert!(ProfileModel::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn csv_header() {
        let g = Graph::cycle(4).unwrap();
        let p = spectral_profile(&g, &[1.0, 2.0], &ProfileSpec::Exhaustive { domain: None }).unwrap();
        let csv = write_profile_csv(&p);
        assert_eq!(csv.lines().next(), Some("L,lambda,mode"));
        assert_eq!(csv.lines().nth(2), Some("2,1,exhaustive"));
    }
}
