//! Registered operations: parsing of `task.*` parameters and execution.

use rand::Rng;
use serde_json::json;

use perclab::percolation::{
    bootstrap_functional, bootstrap_report, insertion_tolerance_check, kappa_hat, kappapk_bound_check,
    mtp_distance_check, mtp_percolation_check, sample, surgery_check, tail_hats, target_degree, tau_hat,
    two_ghost_bound, two_ghost_check, ClusterMeasure, Estimate, KappaPkParams,
};
use perclab::rng::rng_from_seed;
use perclab::spectral::{
    cheeger_check, escape_check, iso_profile, key_lemma_check, l2_decay_check, lambda_a_with, spectral_profile,
    write_profile_csv, DecayOptions, EscapeVariant, PowerConfig, ProfileModel, ProfileSpec, SpectralProfile,
};
use perclab::walk::{
    escape_probability, hk_fit, return_probabilities, sample_walk, write_return_csv, HkFitConfig, Semantics,
    StartMeasure,
};
use perclab::{Domain, Graph, MassVector};

use crate::error::{CliError, CliResult};
use crate::record::{exact, named, record_csv, Record};
use crate::spec::{Params, Sampling};

/// Subcommand a task belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Walk,
    Spectral,
    Perc,
    Verify,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Walk => "walk",
            Group::Spectral => "spectral",
            Group::Perc => "perc",
            Group::Verify => "verify",
        }
    }
}

pub const TASKS: &[(&str, Group)] = &[
    ("return_probability", Group::Walk),
    ("hk_fit", Group::Walk),
    ("escape_probability", Group::Walk),
    ("sample_walk", Group::Walk),
    ("lambda", Group::Spectral),
    ("spectral_profile", Group::Spectral),
    ("iso_profile", Group::Spectral),
    ("tau", Group::Perc),
    ("kappa", Group::Perc),
    ("cluster_tail", Group::Perc),
    ("bootstrap_functional", Group::Perc),
    ("two_ghost_bound", Group::Perc),
    ("sample", Group::Perc),
    ("key_lemma", Group::Verify),
    ("l2_decay", Group::Verify),
    ("escape", Group::Verify),
    ("cheeger", Group::Verify),
    ("two_ghost", Group::Verify),
    ("surgery", Group::Verify),
    ("insertion_tolerance", Group::Verify),
    ("mtp", Group::Verify),
    ("kappapk", Group::Verify),
    ("bootstrap", Group::Verify),
];

pub fn group_of(name: &str) -> Option<Group> {
    TASKS.iter().find(|(n, _)| *n == name).map(|&(_, g)| g)
}

/// Cluster statistics that only grow with `p` under the monotone coupling.
pub fn is_monotone_in_p(name: &str) -> bool {
    matches!(name, "tau" | "kappa" | "cluster_tail" | "bootstrap_functional")
}

#[derive(Debug, Clone)]
pub enum MtpMode {
    Distance { r: usize },
    Percolation { p: f64, ks: Vec<usize>, configurations: usize },
}

/// A validated task, ready to run.
#[derive(Debug, Clone)]
pub enum Task {
    ReturnProbability { v: usize, n: usize },
    HkFit { v: usize, n_max: usize, cfg: HkFitConfig },
    EscapeProbability { set: Domain, k: usize, start: StartMeasure, semantics: Semantics },
    SampleWalk { v: usize, k: usize },
    Lambda { set: Domain, cfg: PowerConfig },
    SpectralProfile { thresholds: Vec<f64>, spec: ProfileSpec },
    IsoProfile { thresholds: Vec<f64>, domain: Option<Domain> },
    Tau { u: usize, v: usize, p: f64 },
    Kappa { base: usize, p: f64, k: usize },
    ClusterTail { v: usize, p: f64, n: Vec<usize>, measure: ClusterMeasure },
    BootstrapFunctional { v: usize, p: f64, beta: f64 },
    TwoGhostBound { p: f64, n: usize },
    Sample { p: f64 },
    KeyLemma { domain: Option<Domain>, trials: usize },
    L2Decay { domain: Option<Domain>, ell: u32, start: Option<usize>, step_cap: u64 },
    Escape { domain: Option<Domain>, set: Domain, ell: u32, variant: EscapeVariant, step_cap: u64 },
    Cheeger { domain: Option<Domain>, thresholds: Option<Vec<f64>> },
    TwoGhost { p: f64, n: usize },
    Surgery { p: f64, n: usize, k: usize },
    InsertionTolerance { u: usize, v: usize, p: f64 },
    Mtp(MtpMode),
    KappaPk { p: f64, params: KappaPkParams },
    Bootstrap { v: usize, p: f64, beta: f64, c5: Option<f64> },
}

fn choice<T>(value: &str, key: &str, options: &[(&str, T)]) -> CliResult<T>
where
    T: Copy,
{
    options
        .iter()
        .find(|(n, _)| *n == value)
        .map(|&(_, t)| t)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|o| o.0).collect();
            CliError::parse(format!("`task.{key}` must be one of {}, got `{value}`", names.join("|")))
        })
}

fn semantics(params: &mut Params, default: Semantics) -> CliResult<Semantics> {
    match params.opt::<String>("semantics")? {
        Some(s) => choice(&s, "semantics", &[("infinite", Semantics::Infinite), ("finite", Semantics::Finite)]),
        None => Ok(default),
    }
}

impl Task {
    /// Parse and validate the parameters of `name`. Unknown keys are errors.
    pub fn parse(name: &str, params: &mut Params, g: &Graph) -> CliResult<Task> {
        let task = Self::parse_known(name, params, g)?;
        params.finish()?;
        Ok(task)
    }

    /// Like [`Task::parse`] but leaves unread keys for the caller to check.
    pub fn parse_known(name: &str, params: &mut Params, g: &Graph) -> CliResult<Task> {
        let task = match name {
            "return_probability" => Task::ReturnProbability { v: params.or("v", 0)?, n: params.req("n")? },
            "hk_fit" => Task::HkFit {
                v: params.or("v", 0)?,
                n_max: params.req("n_max")?,
                cfg: HkFitConfig {
                    gamma_steps: params.or("gamma_steps", HkFitConfig::default().gamma_steps)?,
                    ..HkFitConfig::default()
                },
            },
            "escape_probability" => {
                let start = params.or("start", "uniform".to_string())?;
                Task::EscapeProbability {
                    set: params.req_vertex_set("set", g)?,
                    k: params.req("k")?,
                    start: choice(&start, "start", &[("uniform", StartMeasure::UniformOnD), ("pi", StartMeasure::PiOnD)])?,
                    semantics: semantics(params, Semantics::Infinite)?,
                }
            }
            "sample_walk" => Task::SampleWalk { v: params.or("v", 0)?, k: params.req("k")? },
            "lambda" => Task::Lambda {
                set: params.req_vertex_set("set", g)?,
                cfg: PowerConfig {
                    tolerance: params.or("tolerance", PowerConfig::default().tolerance)?,
                    max_iterations: params.or("max_iterations", PowerConfig::default().max_iterations)?,
                    ..PowerConfig::default()
                },
            },
            "spectral_profile" => {
                let mode = params.or("mode", "exhaustive".to_string())?;
                let thresholds = params.req_list("thresholds")?;
                let spec = match mode.as_str() {
                    "exhaustive" => ProfileSpec::Exhaustive { domain: params.vertex_set("domain", g)? },
                    "ball_family" => ProfileSpec::BallFamily { connected_size: params.or("connected_size", 4)? },
                    "analytic" => ProfileSpec::Analytic(ProfileModel::new(params.req("alpha")?, params.req("c")?)?),
                    other => return Err(CliError::parse(format!("unknown profile mode `{other}`"))),
                };
                Task::SpectralProfile { thresholds, spec }
            }
            "iso_profile" => Task::IsoProfile {
                thresholds: params.req_list("thresholds")?,
                domain: params.vertex_set("domain", g)?,
            },
            "tau" => Task::Tau { u: params.or("u", 0)?, v: params.req("v")?, p: params.req("p")? },
            "kappa" => Task::Kappa { base: params.or("base", 0)?, p: params.req("p")?, k: params.req("k")? },
            "cluster_tail" => {
                let measure = params.or("measure", "edges".to_string())?;
                Task::ClusterTail {
                    v: params.or("v", 0)?,
                    p: params.req("p")?,
                    n: params.req_list("n")?,
                    measure: choice(
                        &measure,
                        "measure",
                        &[("edges", ClusterMeasure::TouchedEdges), ("vertices", ClusterMeasure::Vertices)],
                    )?,
                }
            }
            "bootstrap_functional" => {
                Task::BootstrapFunctional { v: params.or("v", 0)?, p: params.req("p")?, beta: params.req("beta")? }
            }
            "two_ghost_bound" => Task::TwoGhostBound { p: params.req("p")?, n: params.req("n")? },
            "sample" => Task::Sample { p: params.req("p")? },
            "key_lemma" => Task::KeyLemma { domain: params.vertex_set("domain", g)?, trials: params.or("trials", 100)? },
            "l2_decay" => Task::L2Decay {
                domain: params.vertex_set("domain", g)?,
                ell: params.req("ell")?,
                start: params.opt("v")?,
                step_cap: params.or("step_cap", DecayOptions::default().step_cap)?,
            },
            "escape" => {
                let variant = params.or("variant", "uniform".to_string())?;
                Task::Escape {
                    domain: params.vertex_set("domain", g)?,
                    set: params.req_vertex_set("set", g)?,
                    ell: params.req("ell")?,
                    variant: choice(&variant, "variant", &[("uniform", EscapeVariant::Uniform), ("pi", EscapeVariant::Pi)])?,
                    step_cap: params.or("step_cap", DecayOptions::default().step_cap)?,
                }
            }
            "cheeger" => Task::Cheeger { domain: params.vertex_set("domain", g)?, thresholds: params.list("thresholds")? },
            "two_ghost" => Task::TwoGhost { p: params.req("p")?, n: params.req("n")? },
            "surgery" => Task::Surgery { p: params.req("p")?, n: params.req("n")?, k: params.req("k")? },
            "insertion_tolerance" => {
                Task::InsertionTolerance { u: params.or("u", 0)?, v: params.req("v")?, p: params.req("p")? }
            }
            "mtp" => match params.or("mode", "percolation".to_string())?.as_str() {
                "distance" => Task::Mtp(MtpMode::Distance { r: params.req("r")? }),
                "percolation" => Task::Mtp(MtpMode::Percolation {
                    p: params.req("p")?,
                    ks: params.req_list("k")?,
                    configurations: params.or("configurations", 100)?,
                }),
                other => return Err(CliError::parse(format!("unknown mtp mode `{other}`"))),
            },
            "kappapk" => Task::KappaPk {
                p: params.req("p")?,
                params: KappaPkParams {
                    k: params.req("k")?,
                    beta: params.req("beta")?,
                    alpha: params.or("alpha", 0.0)?,
                    c2: params.req("c2")?,
                    c1: params.opt("c1")?,
                },
            },
            "bootstrap" => Task::Bootstrap {
                v: params.or("v", 0)?,
                p: params.req("p")?,
                beta: params.req("beta")?,
                c5: params.opt("c5")?,
            },
            other => return Err(CliError::parse(format!("unknown task `{other}`"))),
        };
        Ok(task)
    }
}

/// Result of one task: its record and, when the task has a natural table,
/// that table as CSV.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: Record,
    pub table: Option<String>,
}

impl Outcome {
    fn record(record: Record) -> Self {
        Outcome { record, table: None }
    }

    pub fn csv(&self) -> String {
        self.table.clone().unwrap_or_else(|| record_csv(std::slice::from_ref(&self.record)))
    }
}

fn exhaustive(g: &Graph, domain: &Option<Domain>) -> CliResult<SpectralProfile> {
    Ok(spectral_profile(g, &[], &ProfileSpec::Exhaustive { domain: domain.clone() })?)
}

fn base_vertices(g: &Graph, domain: &Option<Domain>) -> Vec<usize> {
    match domain {
        Some(d) => d.iter().collect(),
        None => (0..g.vertex_count()).collect(),
    }
}

pub fn run(name: &str, task: &Task, g: &Graph, sampling: &Sampling) -> CliResult<Outcome> {
    let seed = sampling.master_seed;
    let mc = sampling.monte_carlo();
    let mut rec = Record::new(name, g, seed);
    let sampled = |mut r: Record| {
        r.n_samples = mc.n_samples;
        r
    };
    let outcome = match task {
        Task::ReturnProbability { v, n } => {
            let p = return_probabilities(g, *v, *n)?;
            rec.n = Some(*n as u64);
            rec.estimates.push(exact("p_n", p[n - 1]));
            rec.detail = json!({ "v": v, "values": p });
            Outcome { record: rec, table: Some(write_return_csv(&p)) }
        }
        Task::HkFit { v, n_max, cfg } => {
            let fit = hk_fit(g, *v, *n_max, cfg)?;
            rec.n = Some(*n_max as u64);
            rec.estimates.push(exact("gamma", fit.gamma));
            rec.estimates.push(exact("c", fit.c));
            Outcome::record(rec.with_detail(json!({ "v": v, "fit": fit })))
        }
        Task::EscapeProbability { set, k, start, semantics } => {
            let q = escape_probability(g, set, *k, *start, *semantics)?;
            rec.k = Some(*k as u64);
            rec.estimates.push(exact("escape_probability", q));
            Outcome::record(rec.with_detail(json!({ "set": set.members(), "start": start })))
        }
        Task::SampleWalk { v, k } => {
            let path = sample_walk(g, *v, *k, seed)?;
            rec.k = Some(*k as u64);
            Outcome::record(rec.with_detail(json!({ "path": path.vertices })))
        }
        Task::Lambda { set, cfg } => {
            let est = lambda_a_with(g, set, cfg)?;
            rec.estimates.push(exact("lambda", est.lambda));
            Outcome::record(rec.with_detail(json!({ "set": set.members(), "iterations": est.iterations, "top": est.top })))
        }
        Task::SpectralProfile { thresholds, spec } => {
            let profile = spectral_profile(g, thresholds, spec)?;
            let table = write_profile_csv(&profile);
            rec.estimates = profile.points.iter().map(|pt| exact(&format!("L={}", pt.threshold), pt.value)).collect();
            let detail = json!({ "mode": profile.mode, "lower_bound": profile.is_lower_bound(), "points": profile.points });
            Outcome { record: rec.with_detail(detail), table: Some(table) }
        }
        Task::IsoProfile { thresholds, domain } => {
            let profile = iso_profile(g, thresholds, domain.as_ref())?;
            let mut table = String::from("x,phi\n");
            for pt in &profile.points {
                table.push_str(&format!("{},{}\n", pt.threshold, pt.value));
            }
            rec.estimates = profile.points.iter().map(|pt| exact(&format!("x={}", pt.threshold), pt.value)).collect();
            Outcome { record: rec.with_detail(json!({ "points": profile.points })), table: Some(table) }
        }
        Task::Tau { u, v, p } => {
            let est = tau_hat(g, *u, *v, *p, &mc)?;
            rec.p = Some(*p);
            rec.estimates.push(named("tau", est));
            Outcome::record(sampled(rec.with_detail(json!({ "u": u, "v": v, "distance": g.distance(*u, *v)? }))))
        }
        Task::Kappa { base, p, k } => {
            let est = kappa_hat(g, *base, *p, *k, &mc)?;
            rec.p = Some(*p);
            rec.k = Some(*k as u64);
            rec.estimates.push(named("kappa", est.estimate));
            let detail = json!({ "base": base, "argmin": est.argmin, "distance": est.distance });
            Outcome::record(sampled(rec.with_detail(detail)))
        }
        Task::ClusterTail { v, p, n, measure } => {
            let est = tail_hats(g, *v, *p, n, *measure, &mc)?;
            rec.p = Some(*p);
            rec.n = n.first().map(|&x| x as u64);
            rec.estimates = est.iter().zip(n).map(|(e, n)| named(&format!("tail_{n}"), *e)).collect();
            Outcome::record(sampled(rec.with_detail(json!({ "v": v, "measure": measure, "n": n }))))
        }
        Task::BootstrapFunctional { v, p, beta } => {
            let est = bootstrap_functional(g, *v, *p, *beta, &mc)?;
            rec.p = Some(*p);
            rec.estimates.push(named("bootstrap_functional", est));
            Outcome::record(sampled(rec.with_detail(json!({ "v": v, "beta": beta }))))
        }
        Task::TwoGhostBound { p, n } => {
            let d = target_degree(g)?;
            let b = two_ghost_bound(d, *p, *n)?;
            rec.p = Some(*p);
            rec.n = Some(*n as u64);
            rec.estimates.push(exact("two_ghost_bound", b));
            rec.bound = Some(b);
            rec.vacuous = b >= 1.0;
            Outcome::record(rec.with_detail(json!({ "degree": d })))
        }
        Task::Sample { p } => {
            let cfg = sample(g, *p, seed)?;
            let sizes: Vec<usize> = cfg.clusters().iter().map(Vec::len).collect();
            rec.p = Some(*p);
            rec.estimates.push(exact("largest_cluster", sizes.iter().copied().max().unwrap_or(0) as f64));
            let detail = json!({
                "open_edges": cfg.open_edge_count(),
                "cluster_count": sizes.len(),
                "root_cluster_size": cfg.cluster_size(0),
                "root_cluster_edges": cfg.cluster_edge_count(0),
            });
            Outcome::record(rec.with_detail(detail))
        }
        Task::KeyLemma { domain, trials } => key_lemma_trials(g, domain, *trials, sampling, rec)?,
        Task::L2Decay { domain, ell, start, step_cap } => {
            let profile = exhaustive(g, domain)?;
            let support = match domain {
                Some(d) => d.clone(),
                None => Domain::full(g.vertex_count()),
            };
            let mu = match start {
                Some(v) => MassVector::delta(g.vertex_count(), *v),
                None => MassVector::uniform_on(g, &support),
            };
            let opts = DecayOptions { step_cap: *step_cap, ..DecayOptions::default() };
            Outcome::record(Record::from_check(g, sampling, l2_decay_check(g, &mu, *ell, &profile, &opts)?))
        }
        Task::Escape { domain, set, ell, variant, step_cap } => {
            let profile = exhaustive(g, domain)?;
            let opts = DecayOptions { step_cap: *step_cap, ..DecayOptions::default() };
            let r = escape_check(g, set, *ell, &profile, *variant, &opts, Semantics::Finite)?;
            Outcome::record(Record::from_check(g, sampling, r))
        }
        Task::Cheeger { domain, thresholds } => {
            let profile = exhaustive(g, domain)?;
            let xs = thresholds.clone().unwrap_or_else(|| profile.breakpoints());
            let r = cheeger_check(g, &profile, &xs)?;
            let mut record = Record::from_check(g, sampling, r.sandwich.clone());
            record.detail = json!({
                "rows": r.rows,
                "sandwich_factor_two": r.sandwich_factor_two.pass,
                "inputs_digest": r.sandwich.inputs_digest,
            });
            Outcome::record(record)
        }
        Task::TwoGhost { p, n } => Outcome::record(Record::from_perc(two_ghost_check(g, *p, *n, &mc)?)),
        Task::Surgery { p, n, k } => {
            let r = surgery_check(g, *p, *n, *k, &mc)?;
            let mut record = Record::from_perc(r.stated);
            record.detail["factor_on_ghost"] = json!({
                "pass": r.factor_on_ghost.pass,
                "bound": r.factor_on_ghost.bound,
                "lhs_low": r.factor_on_ghost.detail["lhs_low"],
            });
            Outcome::record(record)
        }
        Task::InsertionTolerance { u, v, p } => {
            let tau = tau_hat(g, *u, *v, *p, &mc)?;
            let mut r = Record::from_perc(insertion_tolerance_check(g, *u, *v, *p, &tau)?);
            r.seed = seed;
            Outcome::record(r)
        }
        Task::Mtp(MtpMode::Distance { r }) => {
            let t = mtp_distance_check(g, *r)?;
            rec.estimates = vec![exact("sent", t.sent), exact("received", t.received)];
            rec.pass = Some(t.pass);
            Outcome::record(rec.with_detail(json!(t)))
        }
        Task::Mtp(MtpMode::Percolation { p, ks, configurations }) => {
            let t = mtp_percolation_check(g, *p, ks, *configurations, seed)?;
            rec.p = Some(*p);
            rec.n_samples = *configurations as u64;
            rec.estimates = vec![exact("max_residual", t.max_residual)];
            rec.bound = Some(t.tolerance);
            rec.pass = Some(t.pass);
            Outcome::record(rec.with_detail(json!(t)))
        }
        Task::KappaPk { p, params } => Outcome::record(Record::from_perc(kappapk_bound_check(g, *p, params, &mc)?)),
        Task::Bootstrap { v, p, beta, c5 } => {
            let r = bootstrap_report(g, *v, *p, *beta, *c5, &mc)?;
            rec.p = Some(*p);
            rec.estimates = vec![named("quarter", r.quarter), named("half", r.half), named("full", r.full)];
            rec.bound = r.c6;
            rec.pass = Some(r.stable && r.within_c6.unwrap_or(true));
            rec.conditional = r.c5.is_some();
            let detail = json!({ "v": v, "beta": beta, "stable": r.stable, "c5": r.c5, "c6": r.c6, "within_c6": r.within_c6 });
            Outcome::record(sampled(rec.with_detail(detail)))
        }
    };
    Ok(outcome)
}

/// Random pairs `(A, phi >= 0)` inside the profile's domain.
fn key_lemma_trials(
    g: &Graph,
    domain: &Option<Domain>,
    trials: usize,
    sampling: &Sampling,
    mut rec: Record,
) -> CliResult<Outcome> {
    let profile = exhaustive(g, domain)?;
    let base = base_vertices(g, domain);
    let mut rng = rng_from_seed(sampling.master_seed);
    let mut violations = 0usize;
    let mut min_slack = f64::INFINITY;
    let mut done = 0usize;
    while done < trials {
        let members: Vec<usize> = base.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if members.is_empty() {
            continue;
        }
        let a = Domain::new(g.vertex_count(), members)?;
        let mut phi = vec![0.0; g.vertex_count()];
        for v in a.iter() {
            phi[v] = rng.random::<f64>();
        }
        let phi = MassVector::from_values(phi);
        if phi.is_zero() {
            continue;
        }
        let r = key_lemma_check(g, &a, &phi, &profile)?;
        violations += usize::from(!r.pass);
        min_slack = min_slack.min(r.slack.unwrap_or(0.0));
        done += 1;
    }
    rec.estimates.push(exact("min_slack", min_slack));
    rec.pass = Some(violations == 0);
    rec.n_samples = trials as u64;
    Ok(Outcome::record(rec.with_detail(json!({ "trials": trials, "violations": violations }))))
}

/// First estimate of a record, for sweeps and monotonicity flags.
pub fn headline(record: &Record) -> Option<Estimate> {
    record.estimates.first().map(|e| e.estimate)
}
