use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::graph::{Domain, Family, Graph};
use crate::montecarlo::MonteCarlo;
use crate::rng::{derive_seed, pool_seed, EdgeField};
use crate::walk::{Evolver, MassVector};

use super::config::{check_p, sample};
use super::estimate::{Estimate, EstimateKind, MeanTally};
use super::estimators::{bootstrap_weight, count_events, kappa_hat, tail_hats, ClusterMeasure};
use super::explore::{ClusterExplorer, StopRule};

/// Estimate with a name, as it appears in result records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedEstimate {
    pub name: String,
    #[serde(flatten)]
    pub estimate: Estimate,
}

fn named(name: &str, estimate: Estimate) -> NamedEstimate {
    NamedEstimate {
        name: name.into(),
        estimate,
    }
}

/// Result record of a percolation check or estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercReport {
    pub check: String,
    pub graph: Value,
    pub p: f64,
    pub n: Option<u64>,
    pub k: Option<u64>,
    pub estimates: Vec<NamedEstimate>,
    pub bound: Option<f64>,
    pub pass: bool,
    pub seed: u64,
    pub n_samples: u64,
    /// The bound is at least 1 (or the left side is non-positive), so the
    /// inequality holds for any probability.
    pub vacuous: bool,
    /// Depends on a user-supplied constant.
    pub conditional: bool,
    pub detail: Value,
}

/// `{"family": tag, "params": {...}}`
pub fn graph_json(g: &Graph) -> Value {
    let mut v = serde_json::to_value(g.family()).expect("family serializes");
    let params = v.as_object_mut().map(|o| {
        o.remove("family");
        Value::Object(o.clone())
    });
    let mut params = params.unwrap_or_else(|| json!({}));
    if matches!(g.family(), Family::Custom) {
        params = json!({ "vertices": g.vertex_count(), "edges": g.edge_count() });
    }
    json!({ "family": g.family().tag(), "params": params })
}

/// Degree of the infinite graph the finite one stands in for.
pub fn target_degree(g: &Graph) -> Result<usize> {
    match g.family() {
        Family::TreeBall { degree, .. } => Ok(*degree),
        Family::Torus { dims } => Ok(2 * dims.len()),
        Family::Cycle { .. } => Ok(2),
        other => Err(Error::NonTransitive(other.tag().into())),
    }
}

fn require_transitive(g: &Graph) -> Result<()> {
    if g.family().is_transitive_standin() {
        Ok(())
    } else {
        Err(Error::NonTransitive(g.family().tag().into()))
    }
}

/// Base vertex used as the root on transitive stand-ins.
pub const BASE_VERTEX: usize = 0;

/// Representative edge `(0, w)` with `w` the smallest neighbour of 0.
pub fn representative_edge(g: &Graph) -> usize {
    let w = g.neighbors(BASE_VERTEX)[0] as usize;
    g.edge_index(BASE_VERTEX, w).expect("neighbour edge exists")
}

/// Two-sided level whose ends are one-sided bounds at `one_sided`.
fn two_sided(one_sided: f64) -> f64 {
    2.0 * one_sided - 1.0
}

/// `82 d sqrt((1 - p) / (p n))`
pub fn two_ghost_bound(d: usize, p: f64, n: usize) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("two-ghost bound needs p in (0, 1], got {p}")));
    }
    if n == 0 {
        return Err(invalid("two-ghost bound needs n >= 1"));
    }
    Ok(82.0 * d as f64 * ((1.0 - p) / (p * n as f64)).sqrt())
}

/// `Pr(S_{e,n})` at the representative edge, one cluster pair per sample.
pub fn two_ghost_hat(g: &Graph, p: f64, n: usize, mc: &MonteCarlo) -> Result<Estimate> {
    check_p(p)?;
    let e = representative_edge(g);
    let (a, b) = g.edge(e);
    let hits = count_events(g, mc, 1, |ex, field, hits| {
        if field.is_open(e, p) {
            return;
        }
        let ka = ex.explore(field, p, a, StopRule::Full);
        if ex.contains(b) || ka.edges_touched < n {
            return;
        }
        let kb = ex.explore(field, p, b, StopRule::EdgesAtLeast(n));
        hits[0] += u64::from(kb.edges_touched >= n);
    })?;
    Estimate::proportion(hits[0], mc.n_samples, mc.confidence)
}

/// Checks `Pr(S_{e,n}) <= 82 d sqrt((1 - p) / (p n))` at one-sided level
/// `mc.confidence`.
pub fn two_ghost_check(g: &Graph, p: f64, n: usize, mc: &MonteCarlo) -> Result<PercReport> {
    require_transitive(g)?;
    let d = target_degree(g)?;
    let bound = two_ghost_bound(d, p, n)?;
    let est = two_ghost_hat(g, p, n, &mc.with_confidence(two_sided(mc.confidence)))?;
    Ok(PercReport {
        check: "two_ghost".into(),
        graph: graph_json(g),
        p,
        n: Some(n as u64),
        k: None,
        estimates: vec![named("two_ghost", est)],
        bound: Some(bound),
        pass: est.ci_low <= bound,
        seed: mc.master_seed,
        n_samples: mc.n_samples,
        vacuous: bound >= 1.0,
        conditional: false,
        detail: json!({ "degree": d, "edge": g.edge(representative_edge(g)), "one_sided_level": mc.confidence }),
    })
}

/// `sum_{i<k} p^{-i}`
pub fn surgery_factor(p: f64, k: usize) -> f64 {
    (0..k).map(|i| p.powi(-(i as i32))).sum()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurgeryReport {
    /// `[sum_{i<k} p^{-i}] (P_p(n)^2 - kappa_p(k)) <= sup_e Pr(S_{e,n})`
    pub stated: PercReport,
    /// `P_p(n)^2 - kappa_p(k) <= [sum_{i<k} p^{-i}] sup_e Pr(S_{e,n})`
    pub factor_on_ghost: PercReport,
}

pub const MIN_CHECK_SAMPLES: u64 = 30;

/// The three quantities come from independent pools; the left side uses
/// the lower ends and the right side the upper ends of one-sided intervals.
pub fn surgery_check(g: &Graph, p: f64, n: usize, k: usize, mc: &MonteCarlo) -> Result<SurgeryReport> {
    require_transitive(g)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("surgery check needs p in (0, 1), got {p}")));
    }
    if k == 0 {
        return Err(invalid("surgery check needs k >= 1"));
    }
    if mc.n_samples < MIN_CHECK_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: mc.n_samples,
            need: MIN_CHECK_SAMPLES,
        });
    }
    let level = two_sided(mc.confidence);
    let pool = |i| mc.with_seed(pool_seed(mc.master_seed, i)).with_confidence(level);
    let tail = tail_hats(g, BASE_VERTEX, p, &[n], ClusterMeasure::TouchedEdges, &pool(0))?[0];
    let kappa = kappa_hat(g, BASE_VERTEX, p, k, &pool(1))?;
    let ghost = two_ghost_hat(g, p, n, &pool(2))?;

    let factor = surgery_factor(p, k);
    let gap_low = tail.ci_low * tail.ci_low - kappa.estimate.ci_high;
    let gap_point = tail.mean * tail.mean - kappa.estimate.mean;
    let estimates = vec![
        named("tail", tail),
        named("kappa", kappa.estimate),
        named("two_ghost", ghost),
    ];
    let detail = json!({
        "factor": factor,
        "gap_point": gap_point,
        "gap_low": gap_low,
        "kappa_argmin": kappa.argmin,
        "kappa_distance": kappa.distance,
        "one_sided_level": mc.confidence,
    });
    let report = |check: &str, lhs_low: f64, rhs_high: f64, lhs_point: f64, rhs_point: f64| PercReport {
        check: check.into(),
        graph: graph_json(g),
        p,
        n: Some(n as u64),
        k: Some(k as u64),
        estimates: estimates.clone(),
        bound: Some(rhs_high),
        pass: lhs_low <= rhs_high,
        seed: mc.master_seed,
        n_samples: mc.n_samples,
        vacuous: lhs_low <= 0.0,
        conditional: false,
        detail: {
            let mut d = detail.clone();
            d["lhs_low"] = json!(lhs_low);
            d["lhs_point"] = json!(lhs_point);
            d["rhs_point"] = json!(rhs_point);
            d
        },
    };
    Ok(SurgeryReport {
        stated: report("surgery", factor * gap_low, ghost.ci_high, factor * gap_point, ghost.mean),
        factor_on_ghost: report(
            "surgery_factor_on_ghost",
            gap_low,
            factor * ghost.ci_high,
            gap_point,
            factor * ghost.mean,
        ),
    })
}

/// `tau_p(u, v) >= p^{d(u, v)}` using the upper end of `tau`'s interval.
pub fn insertion_tolerance_check(g: &Graph, u: usize, v: usize, p: f64, tau: &Estimate) -> Result<PercReport> {
    check_p(p)?;
    if tau.kind != EstimateKind::Exact && tau.n_samples < MIN_CHECK_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: tau.n_samples,
            need: MIN_CHECK_SAMPLES,
        });
    }
    let d = g.distance(u, v)?;
    let bound = p.powi(d as i32);
    Ok(PercReport {
        check: "insertion_tolerance".into(),
        graph: graph_json(g),
        p,
        n: None,
        k: None,
        estimates: vec![named("tau", *tau)],
        bound: Some(bound),
        pass: tau.ci_high >= bound,
        seed: 0,
        n_samples: tau.n_samples,
        vacuous: false,
        conditional: false,
        detail: json!({ "u": u, "v": v, "distance": d }),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceTransport {
    pub r: usize,
    /// Average over roots of mass sent, `sum_v 1(d(rho, v) = r)`.
    pub sent: f64,
    /// Average over roots of mass received, `sum_v 1(d(v, rho) = r)`.
    pub received: f64,
    pub pass: bool,
    /// Largest per-root difference (zero on vertex-transitive graphs).
    pub max_root_difference: u64,
}

/// Mass transport for `F(u, v) = 1(d(u, v) = r)`, in exact integers.
pub fn mtp_distance_check(g: &Graph, r: usize) -> Result<DistanceTransport> {
    require_transitive(g)?;
    let n = g.vertex_count();
    let mut sent = vec![0u64; n];
    let mut received = vec![0u64; n];
    for u in 0..n {
        for (v, &d) in g.bfs_distances(u).iter().enumerate() {
            if d as usize == r {
                sent[u] += 1;
                received[v] += 1;
            }
        }
    }
    let total_sent: u64 = sent.iter().sum();
    let total_received: u64 = received.iter().sum();
    Ok(DistanceTransport {
        r,
        sent: total_sent as f64 / n as f64,
        received: total_received as f64 / n as f64,
        pass: total_sent == total_received,
        max_root_difference: sent.iter().zip(&received).map(|(a, b)| a.abs_diff(*b)).max().unwrap_or(0),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportReport {
    pub p: f64,
    pub ks: Vec<usize>,
    pub configurations: usize,
    /// Largest `|lhs - rhs| / max(1, |lhs|)` over configurations and `k`.
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
}

pub const TRANSPORT_TOLERANCE: f64 = 1e-10;

/// `p_k(rho, .)` for every `rho`, row-major. Independent of the configuration.
pub fn walk_rows(g: &Graph, k: usize) -> Vec<Vec<f64>> {
    (0..g.vertex_count())
        .map(|rho| {
            let mut ev = Evolver::point(g, rho);
            ev.run(k);
            ev.to_mass_vector().into_values()
        })
        .collect()
}

/// `(sum_rho P_rho(X_k in K_rho), sum_rho |K_rho|^{-1} sum_{u in K_rho} P_u(X_k in K_u))`
/// for one configuration.
///
/// The left side reads the precomputed rows; the right side evolves the
/// uniform measure on every cluster.
pub fn transport_sides(g: &Graph, clusters: &[Vec<usize>], label_of: &[usize], rows: &[Vec<f64>], k: usize) -> (f64, f64) {
    let lhs = (0..g.vertex_count())
        .map(|rho| clusters[label_of[rho]].iter().map(|&v| rows[rho][v]).sum::<f64>())
        .sum();
    let mut rhs = 0.0;
    for cluster in clusters {
        let dom = Domain::new(g.vertex_count(), cluster.clone()).expect("cluster vertices are valid");
        let mut ev = Evolver::new(g, &MassVector::uniform_on(g, &dom));
        ev.run(k);
        // every rho in the cluster contributes the same average
        rhs += cluster.len() as f64 * ev.mass_in(&dom);
    }
    (lhs, rhs)
}

/// Per-configuration transport identity on `configurations` samples.
pub fn mtp_percolation_check(
    g: &Graph,
    p: f64,
    ks: &[usize],
    configurations: usize,
    seed: u64,
) -> Result<TransportReport> {
    require_transitive(g)?;
    check_p(p)?;
    let rows: Vec<Vec<Vec<f64>>> = ks.iter().map(|&k| walk_rows(g, k)).collect();
    let mut max_residual: f64 = 0.0;
    for c in 0..configurations {
        let cfg = sample(g, p, derive_seed(seed, c as u64))?;
        let clusters = cfg.clusters();
        let mut label_of = vec![0; g.vertex_count()];
        for (i, cl) in clusters.iter().enumerate() {
            for &v in cl {
                label_of[v] = i;
            }
        }
        for (&k, r) in ks.iter().zip(&rows) {
            let (lhs, rhs) = transport_sides(g, &clusters, &label_of, r, k);
            max_residual = max_residual.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    Ok(TransportReport {
        p,
        ks: ks.to_vec(),
        configurations,
        max_residual,
        tolerance: TRANSPORT_TOLERANCE,
        pass: max_residual <= TRANSPORT_TOLERANCE,
        seed,
    })
}

/// Grid search for `min_{t > 0} t^beta + c1 k t^{-alpha}` against the
/// stationary point `t^{alpha + beta} = alpha c1 k / beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationCheck {
    pub closed_form_t: f64,
    pub closed_form_value: f64,
    pub grid_t: f64,
    pub grid_value: f64,
    pub relative_difference: f64,
    pub pass: bool,
}

pub const GRID_STEP: f64 = 1e-4;
pub const GRID_MAX: f64 = 50.0;

pub fn optimization_check(alpha: f64, beta: f64, c1: f64, k: f64) -> Result<OptimizationCheck> {
    if !(alpha >= 0.0 && beta > 0.0 && beta <= 1.0 && c1 > 0.0 && k > 0.0) {
        return Err(invalid("optimization check needs alpha >= 0, beta in (0, 1], c1 > 0, k > 0"));
    }
    let f = |t: f64| t.powf(beta) + c1 * k * t.powf(-alpha);
    let (closed_form_t, closed_form_value) = if alpha == 0.0 {
        (0.0, c1 * k)
    } else {
        let t = (alpha * c1 * k / beta).powf(1.0 / (alpha + beta));
        (t, f(t))
    };
    let steps = (GRID_MAX / GRID_STEP).round() as usize;
    let (grid_t, grid_value) = (1..=steps)
        .map(|i| {
            let t = i as f64 * GRID_STEP;
            (t, f(t))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is non-empty");
    let relative_difference = (grid_value - closed_form_value).abs() / closed_form_value;
    Ok(OptimizationCheck {
        closed_form_t,
        closed_form_value,
        grid_t,
        grid_value,
        relative_difference,
        pass: relative_difference <= 1e-3 && closed_form_value <= grid_value * (1.0 + 1e-12),
    })
}

/// Parameters of the conditional bound on `E_p[P_rho(X_k in K_rho)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaPkParams {
    pub k: usize,
    pub beta: f64,
    pub alpha: f64,
    /// User-supplied constant in the exponent.
    pub c2: f64,
    /// When present, the interior optimization step is also checked.
    pub c1: Option<f64>,
}

/// `E_p[P_rho(X_k in K_rho)] <= sqrt(ratio) (1 + E_p exp(log^beta |K_rho|)) exp(-c2 k^{beta/(alpha+beta)})`.
///
/// Both expectations come from the same cluster samples. The walk
/// distribution does not depend on the configuration, so it is evolved once.
pub fn kappapk_bound_check(g: &Graph, p: f64, params: &KappaPkParams, mc: &MonteCarlo) -> Result<PercReport> {
    require_transitive(g)?;
    check_p(p)?;
    let KappaPkParams { k, beta, alpha, c2, c1 } = *params;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid(format!("beta {beta} not in (0, 1]")));
    }
    if !(alpha >= 0.0 && c2 > 0.0) {
        return Err(invalid("need alpha >= 0 and c2 > 0"));
    }
    g.require_interior(BASE_VERTEX, k)?;
    let mut ev = Evolver::point(g, BASE_VERTEX);
    ev.run(k);
    let walk = ev.to_mass_vector();

    let parts = mc.run(|seeds| {
        let mut ex = ClusterExplorer::new(g);
        let mut inside = MeanTally::default();
        let mut weight = MeanTally::default();
        for seed in seeds {
            let mut field = EdgeField::new(seed, g.edge_count());
            let s = ex.explore(&mut field, p, BASE_VERTEX, StopRule::Full);
            inside.push(ex.members().iter().map(|&v| walk.values()[v as usize]).sum());
            weight.push(bootstrap_weight(s.size, beta));
        }
        (inside, weight)
    })?;
    let mut inside = MeanTally::default();
    let mut weight = MeanTally::default();
    for (a, b) in &parts {
        inside.merge(a);
        weight.merge(b);
    }
    let lhs = inside.estimate(mc.confidence)?;
    let functional = weight.estimate(mc.confidence)?;

    let exponent = (k as f64).powf(beta / (alpha + beta));
    let prefactor = g.target_degree_ratio().sqrt() * (1.0 + functional.mean);
    let rhs = prefactor * (-c2 * exponent).exp();
    let c2_max = if lhs.mean > 0.0 && exponent > 0.0 {
        Some((prefactor / lhs.mean).ln() / exponent)
    } else {
        None
    };
    let optimization = match c1 {
        Some(c1) if k > 0 => Some(optimization_check(alpha, beta, c1, k as f64)?),
        _ => None,
    };
    Ok(PercReport {
        check: "kappapk_bound".into(),
        graph: graph_json(g),
        p,
        n: None,
        k: Some(k as u64),
        estimates: vec![named("walk_in_cluster", lhs), named("bootstrap_functional", functional)],
        bound: Some(rhs),
        pass: lhs.mean <= rhs && optimization.is_none_or(|o| o.pass),
        seed: mc.master_seed,
        n_samples: mc.n_samples,
        vacuous: false,
        conditional: true,
        detail: json!({
            "beta": beta,
            "alpha": alpha,
            "c2": c2,
            "c2_max": c2_max,
            "optimization": optimization,
        }),
    })
}
