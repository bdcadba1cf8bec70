use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::str::FromStr;

use perclab::graph::{parse_edge_list, DEFAULT_MAX_VERTICES};
use perclab::montecarlo::{MonteCarlo, DEFAULT_CONFIDENCE, DEFAULT_REPLICAS};
use perclab::{Domain, Family, Graph};

use crate::config::ConfigMap;
use crate::error::{CliError, CliResult};

pub const MAX_VERTICES_ENV: &str = "PERCLAB_MAX_VERTICES";
pub const DEFAULT_SAMPLES: u64 = 10_000;

const SECTIONS: [&str; 5] = ["graph", "task", "sampling", "output", "sweep"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::parse(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    pub n_samples: u64,
    pub master_seed: u64,
    pub replicas: u32,
    pub confidence: f64,
    /// `None` uses every available core.
    pub threads: Option<usize>,
}

impl Sampling {
    pub fn monte_carlo(&self) -> MonteCarlo {
        MonteCarlo {
            n_samples: self.n_samples,
            master_seed: self.master_seed,
            replicas: self.replicas,
            threads: self.threads,
            confidence: self.confidence,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub format: Format,
    /// Standard output when absent.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub graph: GraphSpec,
    /// Task name, if the configuration names one.
    pub task: Option<String>,
    pub params: BTreeMap<String, String>,
    pub sampling: Sampling,
    pub output: OutputSpec,
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub family: Family,
    /// Edge-list file for custom graphs.
    pub path: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> CliResult<T> {
    raw.parse()
        .map_err(|_| CliError::parse(format!("cannot parse `{raw}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> CliResult<Vec<T>> {
    raw.split(',').map(|s| parse_value(key, s.trim())).collect()
}

/// Parameters of one section with parsing helpers. Every key must be read
/// by the time [`Params::finish`] is called.
#[derive(Debug, Clone)]
pub struct Params {
    section: String,
    map: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl Params {
    pub fn new(section: &str, map: BTreeMap<String, String>) -> Self {
        Params { section: section.into(), map, used: BTreeSet::new() }
    }

    fn full(&self, key: &str) -> String {
        format!("{}.{key}", self.section)
    }

    pub fn raw(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.map.get(key).cloned()
    }

    pub fn opt<T: FromStr>(&mut self, key: &str) -> CliResult<Option<T>> {
        let full = self.full(key);
        self.raw(key).map(|r| parse_value(&full, &r)).transpose()
    }

    pub fn req<T: FromStr>(&mut self, key: &str) -> CliResult<T> {
        let full = self.full(key);
        self.opt(key)?.ok_or_else(|| CliError::parse(format!("missing `{full}`")))
    }

    pub fn or<T: FromStr>(&mut self, key: &str, default: T) -> CliResult<T> {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    pub fn list<T: FromStr>(&mut self, key: &str) -> CliResult<Option<Vec<T>>> {
        let full = self.full(key);
        self.raw(key).map(|r| parse_list(&full, &r)).transpose()
    }

    pub fn req_list<T: FromStr>(&mut self, key: &str) -> CliResult<Vec<T>> {
        let full = self.full(key);
        self.list(key)?.ok_or_else(|| CliError::parse(format!("missing `{full}`")))
    }

    /// A vertex set: comma-separated ids or `a..b` ranges, or `ball:v:r`.
    pub fn vertex_set(&mut self, key: &str, g: &Graph) -> CliResult<Option<Domain>> {
        let full = self.full(key);
        let Some(raw) = self.raw(key) else { return Ok(None) };
        if let Some(rest) = raw.strip_prefix("ball:") {
            let (v, r) = rest
                .split_once(':')
                .ok_or_else(|| CliError::parse(format!("`{full}`: expected ball:<v>:<r>")))?;
            let v: usize = parse_value(&full, v)?;
            let r: usize = parse_value(&full, r)?;
            return Ok(Some(g.ball(v, r)?));
        }
        let mut members = Vec::new();
        for item in raw.split(',').map(str::trim) {
            match item.split_once("..") {
                Some((a, b)) => {
                    let (a, b): (usize, usize) = (parse_value(&full, a)?, parse_value(&full, b)?);
                    members.extend(a..b);
                }
                None => members.push(parse_value(&full, item)?),
            }
        }
        Ok(Some(Domain::new(g.vertex_count(), members)?))
    }

    pub fn req_vertex_set(&mut self, key: &str, g: &Graph) -> CliResult<Domain> {
        let full = self.full(key);
        self.vertex_set(key, g)?.ok_or_else(|| CliError::parse(format!("missing `{full}`")))
    }

    pub fn was_read(&self, key: &str) -> bool {
        self.used.contains(key)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.map.insert(key.into(), value.into());
    }

    /// Fails on keys nobody asked for.
    pub fn finish(&self) -> CliResult<()> {
        match self.map.keys().find(|k| !self.used.contains(*k)) {
            Some(k) => Err(CliError::parse(format!("unknown key `{}`", self.full(k)))),
            None => Ok(()),
        }
    }
}

fn parse_family(params: &mut Params) -> CliResult<GraphSpec> {
    let name: String = params.req("family")?;
    let mut path = None;
    let family = match name.as_str() {
        "torus" => Family::Torus { dims: params.req_list("dims")? },
        "tree_ball" => Family::TreeBall { degree: params.req("degree")?, radius: params.req("radius")? },
        "cycle" => Family::Cycle { length: params.req("length")? },
        "lamplighter_segment" => Family::LamplighterSegment { length: params.req("length")? },
        "custom" => {
            path = Some(PathBuf::from(params.req::<String>("path")?));
            Family::Custom
        }
        other => return Err(CliError::parse(format!("unknown graph family `{other}`"))),
    };
    params.finish()?;
    Ok(GraphSpec { family, path })
}

/// Vertex cap from the environment.
pub fn max_vertices() -> CliResult<usize> {
    match std::env::var(MAX_VERTICES_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::parse(format!("{MAX_VERTICES_ENV}=`{v}` is not a vertex count"))),
        Err(_) => Ok(DEFAULT_MAX_VERTICES),
    }
}

impl GraphSpec {
    pub fn build(&self) -> CliResult<Graph> {
        let cap = max_vertices()?;
        match &self.path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
                let g = parse_edge_list(&text)?;
                if g.vertex_count() > cap {
                    return Err(perclab::Error::CapExceeded { requested: g.vertex_count() as u128, cap }.into());
                }
                Ok(g)
            }
            None => Ok(self.family.build_capped(cap)?),
        }
    }
}

/// Command-line values that take precedence over the configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicas: Option<u32>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_config(config: &ConfigMap, overrides: &Overrides) -> CliResult<Self> {
        for key in config.keys() {
            match key.split_once('.') {
                Some((section, _)) if SECTIONS.contains(&section) => {}
                _ => return Err(CliError::parse(format!("unknown key `{key}`"))),
            }
        }
        let graph = parse_family(&mut Params::new("graph", config.section("graph")))?;

        let mut s = Params::new("sampling", config.section("sampling"));
        let master_seed = match (overrides.seed, s.opt::<u64>("master_seed")?) {
            (Some(seed), _) | (None, Some(seed)) => seed,
            (None, None) => return Err(CliError::parse("missing `sampling.master_seed`; runs are never seeded implicitly")),
        };
        let replicas = s.or("replicas", DEFAULT_REPLICAS)?;
        let sampling = Sampling {
            n_samples: s.or("n_samples", DEFAULT_SAMPLES)?,
            master_seed,
            replicas: overrides.replicas.unwrap_or(replicas),
            confidence: s.or("confidence", DEFAULT_CONFIDENCE)?,
            threads: s.opt("threads")?,
        };
        s.finish()?;
        sampling.monte_carlo().validate()?;

        let mut o = Params::new("output", config.section("output"));
        let format = o.or("format", Format::Json)?;
        let path: Option<String> = o.opt("path")?;
        o.finish()?;
        let output = OutputSpec {
            format: overrides.format.unwrap_or(format),
            path: overrides.out.clone().or(path.map(PathBuf::from)),
        };

        let mut w = Params::new("sweep", config.section("sweep"));
        let sweep = match w.opt::<String>("axis")? {
            Some(axis) => {
                let values = w.raw("values").unwrap_or_default();
                let values = values.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
                Some(SweepSpec { axis, values })
            }
            None => None,
        };
        w.finish()?;

        let mut params = config.section("task");
        let task = params.remove("name");
        Ok(ExperimentSpec { graph, task, params, sampling, output, sweep })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn spec(text: &str) -> CliResult<ExperimentSpec> {
        ExperimentSpec::from_config(&parse_config(text).unwrap(), &Overrides::default())
    }

    #[test]
    fn seed_is_required() {
        let e = spec("graph.family = cycle\ngraph.length = 8\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let o = Overrides { seed: Some(4), ..Default::default() };
        let s = ExperimentSpec::from_config(&parse_config("graph.family = cycle\ngraph.length = 8\n").unwrap(), &o).unwrap();
        assert_eq!(s.sampling.master_seed, 4);
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        for bad in [
            "graph.family = cycle\ngraph.length = 8\nsampling.master_seed = 1\nsampling.speed = 3\n",
            "graph.family = cycle\ngraph.length = 8\ngraph.radius = 2\nsampling.master_seed = 1\n",
            "graph.family = cycle\ngraph.length = 8\nsampling.master_seed = 1\nextra.x = 1\n",
            "graph.family = moebius\nsampling.master_seed = 1\n",
        ] {
            assert_eq!(spec(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn vertex_sets() {
        let g = Graph::cycle(20).unwrap();
        let mut p = Params::new("task", BTreeMap::from([("a".into(), "0..3,7".into()), ("b".into(), "ball:5:1".into())]));
        assert_eq!(p.vertex_set("a", &g).unwrap().unwrap().members(), &[0, 1, 2, 7]);
        assert_eq!(p.vertex_set("b", &g).unwrap().unwrap().members(), &[4, 5, 6]);
        p.finish().unwrap();
    }
}
