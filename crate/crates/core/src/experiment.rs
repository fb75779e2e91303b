//! End-to-end experiment runs: workload, reference, simulation, per-round
//! scoring and the CSV and metadata outputs.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::churn::ChurnModel;
use crate::config::{validate_config, ExperimentConfig, TopologyChoice, BA_EDGES_PER_VERTEX};
use crate::error::{Error, Result};
use crate::gossip::PeerState;
use crate::metrics::{relative_error, sequential_reference, ErrorReport, ErrorSummary, QuantileErrors};
use crate::sim::Simulation;
use crate::topology::{gen_ba, gen_er, Topology};
use crate::workload::WorkloadSpec;

pub const CSV_HEADER: &str =
    "round,quantile,are,re_min,re_q1,re_median,re_q3,re_max,online_peers,p_est_mode";

/// Relative error charged to a peer that cannot answer yet.
pub const UNANSWERED_ERROR: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundResult {
    pub report: ErrorReport,
    pub online_peers: usize,
    /// Peers whose answers were scored.
    pub queried: usize,
    /// Peers that had no network-size estimate yet.
    pub unanswered: usize,
    /// Most frequent `p̃` among answering peers, 0 when none answered.
    pub p_est_mode: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyStats {
    pub peers: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub connected: bool,
    pub attempts: u32,
    pub reduced_to_component: bool,
}

impl TopologyStats {
    fn of(t: &Topology) -> Self {
        Self {
            peers: t.peer_count(),
            edges: t.edge_count(),
            mean_degree: t.mean_degree(),
            connected: t.is_connected(),
            attempts: t.attempts,
            reduced_to_component: t.reduced_to_component,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub total_items: usize,
    /// Sequential estimate for each configured quantile.
    pub reference: Vec<f64>,
    pub reference_alpha: f64,
    pub topology: TopologyStats,
    /// Rounds `0..=R`.
    pub rounds: Vec<RoundResult>,
}

impl RunResult {
    pub fn final_round(&self) -> &RoundResult {
        self.rounds.last().expect("round 0 is always present")
    }

    /// Largest ARE over all quantiles at `round`.
    pub fn worst_are(&self, round: usize) -> f64 {
        self.rounds[round].report.worst_are()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for round in &self.rounds {
            for q in &round.report.quantiles {
                let s = &q.summary;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    round.report.round,
                    q.quantile,
                    s.are,
                    s.min,
                    s.q1,
                    s.median,
                    s.q3,
                    s.max,
                    round.online_peers,
                    round.p_est_mode
                )?;
            }
        }
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Resolved config followed by `#` comment lines with run statistics.
    pub fn metadata(&self) -> String {
        let mut s = self.config.to_config_string();
        let t = &self.topology;
        let peers = self.config.effective_peers();
        s.push_str(&format!("# effective_peers = {peers}\n"));
        s.push_str(&format!("# effective_items = {}\n", self.config.effective_items()));
        s.push_str(&format!("# total_items = {}\n", self.total_items));
        s.push_str(&format!("# reference_alpha = {}\n", self.reference_alpha));
        let reference: Vec<String> = self.reference.iter().map(f64::to_string).collect();
        s.push_str(&format!("# reference = {}\n", reference.join(",")));
        s.push_str(&format!(
            "# topology: peers = {}, edges = {}, mean_degree = {}, connected = {}, attempts = {}, reduced_to_component = {}\n",
            t.peers, t.edges, t.mean_degree, t.connected, t.attempts, t.reduced_to_component
        ));
        match self.config.sample_size() {
            Some(k) => s.push_str(&format!(
                "# are computed over a uniform sample of at most {k} online peers per round\n"
            )),
            None => s.push_str("# are computed over all online peers\n"),
        }
        s
    }
}

/// Independent seeds for each random component of a run.
struct Seeds {
    workload: u64,
    topology: u64,
    churn: u64,
    simulation: u64,
    sampling: u64,
}

impl Seeds {
    fn derive(seed: u64) -> Self {
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        Self {
            workload: master.random(),
            topology: master.random(),
            churn: master.random(),
            simulation: master.random(),
            sampling: master.random(),
        }
    }
}

fn build_topology(config: &ExperimentConfig, p: usize, seed: u64) -> Result<Topology> {
    match config.topology {
        TopologyChoice::Ba => gen_ba(p, BA_EDGES_PER_VERTEX, seed),
        TopologyChoice::Er => gen_er(p, seed),
        TopologyChoice::Complete => Ok(Topology::complete(p)),
    }
}

/// Runs one experiment in memory.
pub fn simulate(config: &ExperimentConfig) -> Result<RunResult> {
    let config = validate_config(config.clone())?;
    let seeds = Seeds::derive(config.seed);
    let requested = config.effective_peers();

    let topology = build_topology(&config, requested, seeds.topology)?;
    if let Some(path) = &config.dump_topology {
        create_parent(path)?;
        let file = File::create(path).map_err(|e| Error::io_at(path, e))?;
        topology.write_edge_list(BufWriter::new(file))?;
    }
    // a reduced random graph simulates only its largest component
    let p = topology.peer_count();
    if p < 2 {
        return Err(Error::config("peers", "topology has fewer than two peers"));
    }
    let topology_stats = TopologyStats::of(&topology);

    let spec = WorkloadSpec {
        kind: config.workload.clone(),
        items_per_peer: config.effective_items(),
        seed: seeds.workload,
    };
    let streams = spec.peer_streams(p)?;
    let (reference_sketch, total_items) =
        sequential_reference(streams.iter().map(Vec::as_slice), config.alpha, config.buckets)?;
    let reference = config
        .quantiles
        .iter()
        .map(|&q| reference_sketch.local_quantile(q, total_items as f64))
        .collect::<Result<Vec<_>>>()?;

    let peers = streams
        .iter()
        .enumerate()
        .map(|(l, s)| PeerState::init(l + 1, s.iter().copied(), config.alpha, config.buckets))
        .collect::<Result<Vec<_>>>()?;
    drop(streams);

    let mut churn_rng = ChaCha8Rng::seed_from_u64(seeds.churn);
    let churn = ChurnModel::new(config.churn, p, &mut churn_rng)?;
    let mut sim = Simulation::new(topology, churn, peers, config.fan_out, seeds.simulation)?;
    let mut sample_rng = ChaCha8Rng::seed_from_u64(seeds.sampling);

    let mut rounds = Vec::with_capacity(config.rounds + 1);
    rounds.push(score_round(&sim, &config, &reference, &mut sample_rng)?);
    for _ in 0..config.rounds {
        sim.run_round()?;
        rounds.push(score_round(&sim, &config, &reference, &mut sample_rng)?);
    }

    Ok(RunResult {
        config,
        total_items,
        reference,
        reference_alpha: reference_sketch.alpha(),
        topology: topology_stats,
        rounds,
    })
}

fn score_round<R: Rng>(
    sim: &Simulation<f64>,
    config: &ExperimentConfig,
    reference: &[f64],
    rng: &mut R,
) -> Result<RoundResult> {
    let round = sim.round();
    let online: Vec<usize> = (0..sim.peers().len()).filter(|&l| sim.is_online(l)).collect();
    let queried: Vec<usize> = match config.sample_size() {
        Some(k) if k < online.len() => {
            let mut picked: Vec<usize> =
                index::sample(rng, online.len(), k).into_iter().map(|i| online[i]).collect();
            picked.sort_unstable();
            picked
        }
        _ => online.clone(),
    };

    let mut errors = vec![Vec::with_capacity(queried.len()); reference.len()];
    let mut p_est: BTreeMap<usize, usize> = BTreeMap::new();
    let mut unanswered = 0;
    for &l in &queried {
        let state = &sim.peers()[l];
        let wrap = |source: Error| Error::Round {
            round,
            peer: state.peer_id,
            source: Box::new(source),
        };
        match state.query_many(&config.quantiles, config.rounding) {
            Ok(answers) => {
                let estimate = state.estimated_peers(config.rounding).map_err(wrap)?;
                *p_est.entry(estimate as usize).or_default() += 1;
                for (k, (&a, &r)) in answers.iter().zip(reference).enumerate() {
                    errors[k].push(relative_error(a, r).map_err(wrap)?);
                }
            }
            Err(Error::InvalidEstimate | Error::EmptySketch) => {
                unanswered += 1;
                for e in errors.iter_mut() {
                    e.push(UNANSWERED_ERROR);
                }
            }
            Err(other) => return Err(wrap(other)),
        }
    }

    let quantiles = if queried.is_empty() {
        Vec::new()
    } else {
        config
            .quantiles
            .iter()
            .zip(reference)
            .zip(errors)
            .map(|((&quantile, &reference), errors)| {
                Ok(QuantileErrors {
                    quantile,
                    reference,
                    summary: ErrorSummary::from_errors(&errors)?,
                    errors,
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    let p_est_mode = p_est
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map_or(0, |(&p, _)| p);

    Ok(RoundResult {
        report: ErrorReport { round, quantiles },
        online_peers: online.len(),
        queried: queried.len(),
        unanswered,
        p_est_mode,
    })
}

/// Path of the metadata file written next to `csv`.
pub fn metadata_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_stem().unwrap_or_default().to_os_string();
    name.push(".meta");
    csv.with_file_name(name)
}

/// Runs one experiment and writes its CSV and metadata files.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult> {
    let result = simulate(config)?;
    write_outputs(&result, &config.out)?;
    Ok(result)
}

fn write_outputs(result: &RunResult, csv: &Path) -> Result<()> {
    create_parent(csv)?;
    let mut out = BufWriter::new(File::create(csv).map_err(|e| Error::io_at(csv, e))?);
    result.write_csv(&mut out)?;
    out.flush()?;
    std::fs::write(metadata_path(csv), result.metadata())?;
    Ok(())
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(dir) => std::fs::create_dir_all(dir).map_err(|e| Error::io_at(dir, e)),
        None => Ok(()),
    }
}

/// `config` with `seed` replaced, in sweep order.
fn sweep_configs(config: &ExperimentConfig, seeds: &[u64]) -> Vec<ExperimentConfig> {
    seeds
        .iter()
        .map(|&seed| ExperimentConfig {
            seed,
            ..config.clone()
        })
        .collect()
}

/// Runs one in-memory experiment per seed on the rayon pool.
pub fn simulate_sweep(config: &ExperimentConfig, seeds: &[u64]) -> Vec<Result<RunResult>> {
    sweep_configs(config, seeds).par_iter().map(simulate).collect()
}

/// Like [`simulate_sweep`], writing each run to `<stem>-seed<n>.csv` next
/// to the configured output.
pub fn run_sweep(config: &ExperimentConfig, seeds: &[u64]) -> Vec<Result<RunResult>> {
    sweep_configs(config, seeds)
        .into_par_iter()
        .map(|mut c| {
            let stem = c.out.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            c.out = c.out.with_file_name(format!("{stem}-seed{}.csv", c.seed));
            if let Some(dump) = &c.dump_topology {
                let stem = dump.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                c.dump_topology = Some(dump.with_file_name(format!("{stem}-seed{}.txt", c.seed)));
            }
            run_experiment(&c)
        })
        .collect()
}
