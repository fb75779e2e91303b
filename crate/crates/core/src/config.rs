//! Experiment configuration: defaults, the `key = value` file format and
//! validation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::churn::{ChurnKind, DEFAULT_FAIL_PROBABILITY};
use crate::error::{Error, Result};
use crate::gossip::CountRounding;
use crate::workload::WorkloadKind;

pub const DEFAULT_QUANTILES: [f64; 11] = [0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];

/// Per-vertex edge count of the preferential attachment graphs.
pub const BA_EDGES_PER_VERTEX: usize = 5;

/// Networks above this size are queried on a sample of peers each round.
pub const QUERY_ALL_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyChoice {
    Ba,
    Er,
    Complete,
}

impl TopologyChoice {
    pub fn name(self) -> &'static str {
        match self {
            TopologyChoice::Ba => "ba",
            TopologyChoice::Er => "er",
            TopologyChoice::Complete => "complete",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub buckets: usize,
    pub peers: usize,
    pub rounds: usize,
    pub fan_out: usize,
    pub items_per_peer: usize,
    pub quantiles: Vec<f64>,
    pub topology: TopologyChoice,
    pub churn: ChurnKind,
    pub workload: WorkloadKind,
    pub seed: u64,
    pub out: PathBuf,
    /// Divisor applied to `peers` and `items_per_peer`.
    pub scale: usize,
    pub query_sample: usize,
    pub dump_topology: Option<PathBuf>,
    pub rounding: CountRounding,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha: 0.001,
            buckets: 1024,
            peers: 1000,
            rounds: 25,
            fan_out: 1,
            items_per_peer: 100_000,
            quantiles: DEFAULT_QUANTILES.to_vec(),
            topology: TopologyChoice::Ba,
            churn: ChurnKind::None,
            workload: WorkloadKind::Adversarial,
            seed: 1,
            out: PathBuf::from("run.csv"),
            scale: 1,
            query_sample: 500,
            dump_topology: None,
            rounding: CountRounding::Nearest,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn parse_churn(value: &str) -> Result<ChurnKind> {
    Ok(match value {
        "none" => ChurnKind::None,
        "failstop" => ChurnKind::FailStop {
            p_fail: DEFAULT_FAIL_PROBABILITY,
        },
        "yao-pareto" => ChurnKind::YaoPareto,
        "yao-exp" => ChurnKind::YaoExp,
        other => return Err(Error::config("churn", format!("unknown model `{other}`"))),
    })
}

impl ExperimentConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "alpha" => self.alpha = parse(key, value)?,
            "buckets" => self.buckets = parse(key, value)?,
            "peers" => self.peers = parse(key, value)?,
            "rounds" => self.rounds = parse(key, value)?,
            "fanout" => self.fan_out = parse(key, value)?,
            "items" => self.items_per_peer = parse(key, value)?,
            "quantiles" => {
                self.quantiles = value
                    .split(',')
                    .map(|q| parse(key, q.trim()))
                    .collect::<Result<_>>()?
            }
            "topology" => {
                self.topology = match value {
                    "ba" => TopologyChoice::Ba,
                    "er" => TopologyChoice::Er,
                    "complete" => TopologyChoice::Complete,
                    other => {
                        return Err(Error::config(key, format!("unknown topology `{other}`")))
                    }
                }
            }
            "churn" => {
                let p_fail = match self.churn {
                    ChurnKind::FailStop { p_fail } => p_fail,
                    _ => DEFAULT_FAIL_PROBABILITY,
                };
                self.churn = match parse_churn(value)? {
                    ChurnKind::FailStop { .. } => ChurnKind::FailStop { p_fail },
                    kind => kind,
                }
            }
            "fail_probability" => {
                let p_fail = parse(key, value)?;
                match &mut self.churn {
                    ChurnKind::FailStop { p_fail: p } => *p = p_fail,
                    _ => return Err(Error::config(key, "only applies to churn = failstop")),
                }
            }
            "workload" => {
                self.workload = match value {
                    "adversarial" => WorkloadKind::Adversarial,
                    "uniform" => WorkloadKind::Uniform,
                    "exponential" => WorkloadKind::Exponential,
                    "normal" => WorkloadKind::Normal,
                    "power" => WorkloadKind::PowerFile(match &self.workload {
                        WorkloadKind::PowerFile(path) => path.clone(),
                        _ => PathBuf::new(),
                    }),
                    other => {
                        return Err(Error::config(key, format!("unknown workload `{other}`")))
                    }
                }
            }
            "power_file" => self.workload = WorkloadKind::PowerFile(PathBuf::from(value)),
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "scale" => self.scale = parse(key, value)?,
            "query_sample" => self.query_sample = parse(key, value)?,
            "dump_topology" => self.dump_topology = Some(PathBuf::from(value)),
            "rounding" => {
                self.rounding = match value {
                    "nearest" => CountRounding::Nearest,
                    "ceiling" => CountRounding::Ceiling,
                    other => return Err(Error::config(key, format!("unknown rounding `{other}`"))),
                }
            }
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_str(text)?;
        Ok(config)
    }

    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}", n + 1), "expected `key = value`"))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse_str(&std::fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?)
    }

    /// Network size after applying the scale divisor.
    pub fn effective_peers(&self) -> usize {
        (self.peers / self.scale).max(1)
    }

    pub fn effective_items(&self) -> usize {
        (self.items_per_peer / self.scale).max(1)
    }

    /// Number of peers queried per round, or `None` when every peer is.
    pub fn sample_size(&self) -> Option<usize> {
        (self.effective_peers() > QUERY_ALL_LIMIT).then_some(self.query_sample)
    }

    /// The config in the same `key = value` format [`parse_str`] reads.
    ///
    /// [`parse_str`]: ExperimentConfig::parse_str
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let quantiles: Vec<String> = self.quantiles.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "buckets = {}", self.buckets);
        let _ = writeln!(s, "peers = {}", self.peers);
        let _ = writeln!(s, "rounds = {}", self.rounds);
        let _ = writeln!(s, "fanout = {}", self.fan_out);
        let _ = writeln!(s, "items = {}", self.items_per_peer);
        let _ = writeln!(s, "quantiles = {}", quantiles.join(","));
        let _ = writeln!(s, "topology = {}", self.topology.name());
        let _ = writeln!(s, "churn = {}", self.churn.name());
        if let ChurnKind::FailStop { p_fail } = self.churn {
            let _ = writeln!(s, "fail_probability = {p_fail}");
        }
        let _ = writeln!(s, "workload = {}", self.workload.name());
        if let WorkloadKind::PowerFile(path) = &self.workload {
            let _ = writeln!(s, "power_file = {}", path.display());
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "scale = {}", self.scale);
        let _ = writeln!(s, "query_sample = {}", self.query_sample);
        if let Some(path) = &self.dump_topology {
            let _ = writeln!(s, "dump_topology = {}", path.display());
        }
        let rounding = match self.rounding {
            CountRounding::Nearest => "nearest",
            CountRounding::Ceiling => "ceiling",
        };
        let _ = writeln!(s, "rounding = {rounding}");
        s
    }
}

/// Checks every field and returns the config unchanged when it is usable.
pub fn validate_config(config: ExperimentConfig) -> Result<ExperimentConfig> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(Error::config("alpha", "must lie in (0, 1)"));
    }
    if config.buckets < 2 {
        return Err(Error::config("buckets", "need at least two buckets"));
    }
    if config.fan_out < 1 {
        return Err(Error::config("fanout", "must be at least 1"));
    }
    if config.scale < 1 {
        return Err(Error::config("scale", "must be at least 1"));
    }
    if config.effective_peers() < 2 {
        return Err(Error::config("peers", "need at least two peers after scaling"));
    }
    if config.quantiles.is_empty() {
        return Err(Error::config("quantiles", "need at least one quantile"));
    }
    if let Some(q) = config.quantiles.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::config("quantiles", format!("{q} is outside [0, 1]")));
    }
    if config.query_sample < 1 {
        return Err(Error::config("query_sample", "must be at least 1"));
    }
    if let ChurnKind::FailStop { p_fail } = config.churn {
        if !(0.0..=1.0).contains(&p_fail) {
            return Err(Error::config("fail_probability", "must lie in [0, 1]"));
        }
    }
    if let WorkloadKind::PowerFile(path) = &config.workload {
        if path.as_os_str().is_empty() {
            return Err(Error::config("power_file", "workload = power needs a file"));
        }
    }
    Ok(config)
}
