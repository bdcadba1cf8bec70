use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use perclab::percolation::{graph_json, NamedEstimate, PercReport};
use perclab::spectral::CheckReport;
use perclab::Graph;

use crate::spec::Sampling;

/// Uniform result record emitted by every task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check: String,
    pub graph: Value,
    pub p: Option<f64>,
    pub n: Option<u64>,
    pub k: Option<u64>,
    pub estimates: Vec<NamedEstimate>,
    pub bound: Option<f64>,
    /// `None` for tasks that compute a value rather than test an inequality.
    pub pass: Option<bool>,
    pub seed: u64,
    pub n_samples: u64,
    pub vacuous: bool,
    pub conditional: bool,
    pub detail: Value,
}

impl Record {
    pub fn new(check: &str, g: &Graph, seed: u64) -> Self {
        Record {
            check: check.into(),
            graph: graph_json(g),
            p: None,
            n: None,
            k: None,
            estimates: Vec::new(),
            bound: None,
            pass: None,
            seed,
            n_samples: 0,
            vacuous: false,
            conditional: false,
            detail: json!({}),
        }
    }

    pub fn from_perc(r: PercReport) -> Self {
        Record {
            check: r.check,
            graph: r.graph,
            p: Some(r.p),
            n: r.n,
            k: r.k,
            estimates: r.estimates,
            bound: r.bound,
            pass: Some(r.pass),
            seed: r.seed,
            n_samples: r.n_samples,
            vacuous: r.vacuous,
            conditional: r.conditional,
            detail: r.detail,
        }
    }

    /// Spectral checks are exact: both sides become exact estimates.
    pub fn from_check(g: &Graph, sampling: &Sampling, r: CheckReport) -> Self {
        let mut rec = Record::new(&r.check, g, sampling.master_seed);
        if let Some(lhs) = r.lhs {
            rec.estimates.push(exact("lhs", lhs));
        }
        if let Some(rhs) = r.rhs {
            rec.estimates.push(exact("rhs", rhs));
        }
        rec.bound = r.rhs;
        rec.pass = Some(r.pass);
        rec.vacuous = r.vacuous;
        rec.detail = json!({
            "inputs_digest": r.inputs_digest,
            "slack": r.slack,
            "rigorous": r.rigorous,
            "check": r.detail,
        });
        rec
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    /// One-line description for the terminal.
    pub fn summary(&self) -> String {
        let mut s = format!("{} on {}", self.check, self.graph["family"].as_str().unwrap_or("graph"));
        if let Some(e) = self.estimates.first() {
            write!(s, ": {} = {}", e.name, e.estimate.mean).unwrap();
        }
        if let Some(b) = self.bound {
            write!(s, ", bound {b}").unwrap();
        }
        match self.pass {
            Some(true) => s.push_str(", pass"),
            Some(false) => s.push_str(", FAIL"),
            None => {}
        }
        if self.vacuous {
            s.push_str(" (vacuous)");
        }
        if self.conditional {
            s.push_str(" (conditional)");
        }
        s
    }
}

pub fn exact(name: &str, value: f64) -> NamedEstimate {
    NamedEstimate { name: name.into(), estimate: perclab::percolation::Estimate::exact(value) }
}

pub fn named(name: &str, estimate: perclab::percolation::Estimate) -> NamedEstimate {
    NamedEstimate { name: name.into(), estimate }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub const RECORD_CSV_HEADER: &str = "check,p,n,k,name,estimate,ci_low,ci_high,bound,pass";

/// One row per estimate (one row with empty estimate columns if none).
pub fn record_csv(records: &[Record]) -> String {
    let mut out = format!("{RECORD_CSV_HEADER}\n");
    for r in records {
        let head = format!("{},{},{},{}", r.check, opt(r.p), opt(r.n), opt(r.k));
        let tail = format!("{},{}", opt(r.bound), opt(r.pass));
        if r.estimates.is_empty() {
            writeln!(out, "{head},,,,,{tail}").unwrap();
        }
        for e in &r.estimates {
            let e2 = &e.estimate;
            writeln!(out, "{head},{},{},{},{},{tail}", e.name, e2.mean, e2.ci_low, e2.ci_high).unwrap();
        }
    }
    out
}

pub const SWEEP_CSV_HEADER: &str = "p,n,estimate,ci_low,ci_high,bound";

/// `p,n,estimate,ci_low,ci_high,bound` using each record's first estimate.
pub fn sweep_csv(records: &[Record]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for r in records {
        let (mean, lo, hi) = match r.estimates.first() {
            Some(e) => (Some(e.estimate.mean), Some(e.estimate.ci_low), Some(e.estimate.ci_high)),
            None => (None, None, None),
        };
        writeln!(out, "{},{},{},{},{},{}", opt(r.p), opt(r.n), opt(mean), opt(lo), opt(hi), opt(r.bound)).unwrap();
    }
    out
}
