//! One task repeated over the values of a numeric parameter.
//!
//! Sweeps over `p` reuse the master seed for every value so that the
//! configurations are monotonically coupled; sweeps over any other axis
//! derive one seed per value.

use serde_json::json;

use perclab::rng::derive_seed;
use perclab::Graph;

use crate::error::{CliError, CliResult};
use crate::record::{sweep_csv, Record};
use crate::spec::{ExperimentSpec, Format, Params, Sampling};
use crate::tasks::{headline, is_monotone_in_p, run, Task};
use crate::RunOutput;

pub const COUPLED_AXIS: &str = "p";

pub fn run_sweep(spec: &ExperimentSpec, g: &Graph) -> CliResult<RunOutput> {
    let sweep = spec.sweep.as_ref().ok_or_else(|| CliError::parse("missing `sweep.axis`"))?;
    let name = spec.task.as_deref().ok_or_else(|| CliError::parse("missing `task.name`"))?;
    if sweep.values.is_empty() {
        return Err(CliError::precondition("sweep has no values"));
    }
    let mut prepared = Vec::with_capacity(sweep.values.len());
    for (i, value) in sweep.values.iter().enumerate() {
        let numeric: f64 = value
            .parse()
            .map_err(|_| CliError::precondition(format!("sweep value `{value}` is not numeric")))?;
        let mut params = Params::new("task", spec.params.clone());
        params.set(&sweep.axis, value);
        let task = Task::parse_known(name, &mut params, g)?;
        if !params.was_read(&sweep.axis) {
            return Err(CliError::precondition(format!("`{}` is not a parameter of task `{name}`", sweep.axis)));
        }
        params.finish()?;
        let sampling = Sampling {
            master_seed: if sweep.axis == COUPLED_AXIS {
                spec.sampling.master_seed
            } else {
                derive_seed(spec.sampling.master_seed, i as u64)
            },
            ..spec.sampling.clone()
        };
        prepared.push((numeric, task, sampling));
    }
    let records: Vec<Record> = prepared
        .iter()
        .map(|(_, task, sampling)| Ok(run(name, task, g, sampling)?.record))
        .collect::<CliResult<_>>()?;

    let monotone = (sweep.axis == COUPLED_AXIS && is_monotone_in_p(name)).then(|| {
        let mut pairs: Vec<(f64, f64)> = prepared
            .iter()
            .zip(&records)
            .filter_map(|((x, _, _), r)| headline(r).map(|e| (*x, e.mean)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.windows(2).all(|w| w[0].1 <= w[1].1)
    });
    let content = match spec.output.format {
        Format::Csv => sweep_csv(&records),
        Format::Json => {
            let doc = json!({
                "axis": sweep.axis,
                "values": sweep.values,
                "monotone": monotone,
                "rows": records,
            });
            serde_json::to_string_pretty(&doc).expect("records serialize") + "\n"
        }
    };
    let mut summary = format!("sweep of {name} over {} ({} values)", sweep.axis, records.len());
    if let Some(m) = monotone {
        summary.push_str(if m { ", monotone" } else { ", NOT monotone" });
    }
    Ok(RunOutput { content, summary })
}
