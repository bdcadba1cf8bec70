use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::graph::{Domain, Graph};
use crate::walk::{start_measure, Evolver, MassVector, Semantics, StartMeasure};

use super::profile::{iso_profile, ProfileMode, SpectralProfile};
use super::rayleigh_quotient;

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    /// sha256 of the canonical JSON of the inputs.
    pub inputs_digest: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub pass: bool,
    /// Margin by which the inequality holds; negative on failure.
    pub slack: Option<f64>,
    /// False when the profile used is not a certified lower bound.
    pub rigorous: bool,
    /// True when the threshold is infinite and nothing is asserted.
    pub vacuous: bool,
    pub detail: Value,
}

pub fn inputs_digest(inputs: &Value) -> String {
    hex::encode(Sha256::digest(inputs.to_string().as_bytes()))
}

impl CheckReport {
    fn new(check: &str, inputs: &Value, lhs: f64, rhs: f64, slack: f64, pass: bool) -> Self {
        CheckReport {
            check: check.into(),
            inputs_digest: inputs_digest(inputs),
            lhs: Some(lhs),
            rhs: Some(rhs),
            pass,
            slack: Some(slack),
            rigorous: true,
            vacuous: false,
            detail: Value::Null,
        }
    }

    fn vacuous(check: &str, inputs: &Value) -> Self {
        CheckReport {
            check: check.into(),
            inputs_digest: inputs_digest(inputs),
            lhs: None,
            rhs: None,
            pass: true,
            slack: None,
            rigorous: true,
            vacuous: true,
            detail: Value::Null,
        }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

fn mass_tag(profile: &SpectralProfile) -> Value {
    json!({
        "graph": profile.graph_ref,
        "mode": profile.mode,
        "domain": profile.domain,
        "model": profile.model(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheegerRow {
    pub x: f64,
    pub lambda: f64,
    pub phi: f64,
    /// `Phi^2 / 4 <= Lambda`
    pub lower: bool,
    /// `Lambda <= Phi`
    pub upper: bool,
    /// `Lambda <= 2 Phi`
    pub upper_factor_two: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheegerReport {
    pub rows: Vec<CheegerRow>,
    /// `Phi^2 / 4 <= Lambda <= Phi` at every threshold.
    pub sandwich: CheckReport,
    /// `Phi^2 / 4 <= Lambda <= 2 Phi` at every threshold.
    pub sandwich_factor_two: CheckReport,
}

const CHEEGER_EPS: f64 = 1e-12;

/// Profile-level sandwich between the spectral and isoperimetric profiles,
/// both computed exhaustively over the same domain.
pub fn cheeger_check(g: &Graph, profile: &SpectralProfile, thresholds: &[f64]) -> Result<CheegerReport> {
    if profile.mode != ProfileMode::Exhaustive {
        return Err(Error::ModeMismatch(format!(
            "sandwich needs an exhaustive profile, got {}",
            profile.mode.as_str()
        )));
    }
    let domain = profile.domain(g.vertex_count());
    let iso = iso_profile(g, thresholds, domain.as_ref())?;
    let rows: Vec<CheegerRow> = thresholds
        .iter()
        .map(|&x| {
            let lambda = profile.value_at(x);
            let phi = iso.value_at(x);
            CheegerRow {
                x,
                lambda,
                phi,
                lower: 0.25 * phi * phi <= lambda + CHEEGER_EPS,
                upper: lambda <= phi + CHEEGER_EPS,
                upper_factor_two: lambda <= 2.0 * phi + CHEEGER_EPS,
            }
        })
        .collect();
    let inputs = json!({ "profile": mass_tag(profile), "thresholds": thresholds });
    let summarize = |name: &str, factor: f64| {
        // the binding side at the row with the smallest margin
        let mut worst: Option<(f64, f64, f64)> = None;
        for r in &rows {
            for (lhs, rhs) in [(0.25 * r.phi * r.phi, r.lambda), (r.lambda, factor * r.phi)] {
                if worst.is_none_or(|w| rhs - lhs < w.2) {
                    worst = Some((lhs, rhs, rhs - lhs));
                }
            }
        }
        let (lhs, rhs, slack) = worst.unwrap_or((0.0, 0.0, 0.0));
        let failures: Vec<f64> = rows
            .iter()
            .filter(|r| !(r.lower && if factor == 1.0 { r.upper } else { r.upper_factor_two }))
            .map(|r| r.x)
            .collect();
        CheckReport::new(name, &inputs, lhs, rhs, slack, failures.is_empty())
            .with_detail(json!({ "violations_at": failures, "upper_factor": factor }))
    };
    Ok(CheegerReport {
        sandwich: summarize("cheeger_sandwich", 1.0),
        sandwich_factor_two: summarize("cheeger_sandwich_factor_two", 2.0),
        rows,
    })
}

pub const KEY_LEMMA_SLACK: f64 = 1e-9;

/// `E_A(phi) / ||phi||_{2,pi}^2 >= Lambda(4 ||phi||_{1,pi}^2 / ||phi||_{2,pi}^2) / 2`
pub fn key_lemma_check(g: &Graph, domain: &Domain, phi: &MassVector, profile: &SpectralProfile) -> Result<CheckReport> {
    if profile.mode != ProfileMode::Exhaustive {
        return Err(Error::ModeMismatch(format!(
            "the lower bound needs an exhaustive profile, got {}",
            profile.mode.as_str()
        )));
    }
    require_within_profile(g, domain, profile)?;
    let lhs = rayleigh_quotient(g, domain, phi)?;
    let l1 = phi.norm_1_pi(g);
    let arg = 4.0 * l1 * l1 / phi.norm_2_pi_sq(g);
    let rhs = 0.5 * profile.value_at(arg);
    let inputs = json!({ "profile": mass_tag(profile), "domain": domain.members(), "phi": phi.values() });
    Ok(CheckReport::new("key_lemma", &inputs, lhs, rhs, lhs - rhs, lhs >= rhs - KEY_LEMMA_SLACK)
        .with_detail(json!({ "profile_argument": arg })))
}

fn require_within_profile(g: &Graph, set: &Domain, profile: &SpectralProfile) -> Result<()> {
    if let Some(a) = profile.domain(g.vertex_count()) {
        if let Some(v) = set.iter().find(|&v| !a.contains(v)) {
            return Err(Error::SupportViolation { vertex: v });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Only certified lower-bound profiles are accepted.
    Rigorous,
    /// Upper-bound profiles are accepted and the report is flagged.
    Diagnostic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub mode: CheckMode,
    /// Largest threshold that will be evolved.
    pub step_cap: u64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions {
            mode: CheckMode::Rigorous,
            step_cap: 1_000_000,
        }
    }
}

fn rigour(profile: &SpectralProfile, mode: CheckMode) -> Result<bool> {
    match (profile.is_lower_bound(), mode) {
        (true, _) => Ok(true),
        (false, CheckMode::Diagnostic) => Ok(false),
        (false, CheckMode::Rigorous) => Err(Error::ModeMismatch(format!(
            "{} profile is an upper bound; only diagnostic checks may use it",
            profile.mode.as_str()
        ))),
    }
}

/// Smallest integer `k >= l + 1 + sum_{i=1..l} 2 log 4 / Lambda(4^{i+1} base)`,
/// or `None` when some profile value is zero.
pub fn decay_threshold(profile: &SpectralProfile, ell: u32, base: f64) -> Option<u64> {
    let mut total = ell as f64 + 1.0;
    for i in 1..=ell {
        let value = profile.value_at(4f64.powi(i as i32 + 1) * base);
        if value <= 0.0 {
            return None;
        }
        total += 2.0 * 4f64.ln() / value;
    }
    if total >= u64::MAX as f64 {
        return None;
    }
    Some(total.ceil() as u64)
}

fn evolver<'g>(g: &'g Graph, profile: &SpectralProfile, mu: &MassVector) -> Evolver<'g> {
    match profile.domain(g.vertex_count()) {
        Some(a) => Evolver::killed(g, &a, mu),
        None => Evolver::new(g, mu),
    }
}

fn require_cap(k: u64, opts: &DecayOptions) -> Result<()> {
    if k > opts.step_cap {
        Err(Error::StepCapExceeded {
            required: k,
            cap: opts.step_cap,
        })
    } else {
        Ok(())
    }
}

/// `||mu P^k||_{2,1/pi} <= 2^{-l} ||mu||_{2,1/pi}` at the threshold `k`.
///
/// With a domain-restricted profile the walk is killed on leaving the
/// domain, and `mu` must live inside it.
pub fn l2_decay_check(
    g: &Graph,
    mu: &MassVector,
    ell: u32,
    profile: &SpectralProfile,
    opts: &DecayOptions,
) -> Result<CheckReport> {
    let rigorous = rigour(profile, opts.mode)?;
    if !mu.is_nonnegative() || mu.is_zero() {
        return Err(Error::NotPositive);
    }
    if mu.sum() > 1.0 + 1e-12 {
        return Err(invalid(format!("measure has total mass {} > 1", mu.sum())));
    }
    if let Some(a) = profile.domain(g.vertex_count()) {
        mu.require_support(&a)?;
    }
    let norm = mu.norm_2_inv_pi(g);
    let inputs = json!({ "profile": mass_tag(profile), "mu": mu.values(), "ell": ell });
    let Some(k) = decay_threshold(profile, ell, 1.0 / (norm * norm)) else {
        let mut r = CheckReport::vacuous("l2_decay", &inputs);
        r.rigorous = rigorous;
        return Ok(r);
    };
    require_cap(k, opts)?;
    let mut ev = evolver(g, profile, mu);
    ev.run(k as usize);
    let lhs = ev.norm_2_inv_pi();
    let rhs = norm * 0.5f64.powi(ell as i32);
    let mut r = CheckReport::new("l2_decay", &inputs, lhs, rhs, rhs - lhs, lhs <= rhs * (1.0 + 1e-12))
        .with_detail(json!({ "k_star": k, "ell": ell }));
    r.rigorous = rigorous;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeVariant {
    /// Start from the uniform measure on `D`.
    Uniform,
    /// Start from `pi` restricted to `D` and normalized.
    Pi,
}

impl EscapeVariant {
    fn start(self) -> StartMeasure {
        match self {
            EscapeVariant::Uniform => StartMeasure::UniformOnD,
            EscapeVariant::Pi => StartMeasure::PiOnD,
        }
    }
}

/// Threshold for `Pr(X_k in D)` to drop below the variant's bound.
/// `None` when the threshold is infinite.
pub fn escape_threshold(
    g: &Graph,
    set: &Domain,
    ell: u32,
    profile: &SpectralProfile,
    variant: EscapeVariant,
    opts: &DecayOptions,
) -> Result<Option<u64>> {
    rigour(profile, opts.mode)?;
    set.require_nonempty()?;
    require_within_profile(g, set, profile)?;
    let base = match variant {
        EscapeVariant::Uniform => set.max_pi(g) * set.len() as f64,
        EscapeVariant::Pi => set.pi_mass(g),
    };
    Ok(decay_threshold(profile, ell, base))
}

/// `Pr(X_{k*} in D) <= bound` where the bound is `2^{-l}` for the `pi`
/// start and `sqrt(max pi / min pi over D) 2^{-l}` for the uniform start.
pub fn escape_check(
    g: &Graph,
    set: &Domain,
    ell: u32,
    profile: &SpectralProfile,
    variant: EscapeVariant,
    opts: &DecayOptions,
    semantics: Semantics,
) -> Result<CheckReport> {
    let rigorous = profile.is_lower_bound();
    let k = escape_threshold(g, set, ell, profile, variant, opts)?;
    let inputs = json!({
        "profile": mass_tag(profile),
        "set": set.members(),
        "ell": ell,
        "variant": variant,
    });
    let Some(k) = k else {
        let mut r = CheckReport::vacuous("escape", &inputs);
        r.rigorous = rigorous;
        return Ok(r);
    };
    require_cap(k, opts)?;
    if semantics == Semantics::Infinite {
        for v in set.iter() {
            g.require_interior(v, k as usize)?;
        }
    }
    let mut ev = evolver(g, profile, &start_measure(g, set, variant.start()));
    ev.run(k as usize);
    let lhs = ev.mass_in(set);
    let halving = 0.5f64.powi(ell as i32);
    let rhs = match variant {
        EscapeVariant::Uniform => (set.max_pi(g) / set.min_pi(g)).sqrt() * halving,
        EscapeVariant::Pi => halving,
    };
    let mut r = CheckReport::new("escape", &inputs, lhs, rhs, rhs - lhs, lhs <= rhs * (1.0 + 1e-12))
        .with_detail(json!({ "k_star": k, "ell": ell }));
    r.rigorous = rigorous;
    Ok(r)
}

/// `sqrt(ratio) exp(-c1 min{k / log^alpha |D|, k^{1/(1+alpha)}})`.
///
/// For `|D| = 1` and `alpha > 0` the first term is taken as infinite.
pub fn escape_bound_rhs(d_size: f64, k: f64, alpha: f64, c1: f64, degree_ratio: f64) -> Result<f64> {
    if !(d_size >= 1.0 && k >= 0.0 && alpha >= 0.0 && c1 > 0.0 && degree_ratio > 0.0) {
        return Err(invalid(format!(
            "escape bound needs |D| >= 1, k >= 0, alpha >= 0, c1 > 0, ratio > 0; got {d_size}, {k}, {alpha}, {c1}, {degree_ratio}"
        )));
    }
    let prefactor = degree_ratio.sqrt();
    if k == 0.0 {
        return Ok(prefactor);
    }
    let log_term = d_size.ln().powf(alpha);
    let first = if log_term == 0.0 { f64::INFINITY } else { k / log_term };
    let second = k.powf(1.0 / (1.0 + alpha));
    Ok(prefactor * (-c1 * first.min(second)).exp())
}
