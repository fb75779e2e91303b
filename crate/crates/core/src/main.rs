use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gossip_sketch::config::{validate_config, ExperimentConfig};
use gossip_sketch::experiment::{metadata_path, run_experiment, run_sweep};
use gossip_sketch::Error;

#[derive(Parser)]
#[command(name = "gossip-sketch", version, about = "Gossip quantile tracking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment, or a seed sweep with --sweep.
    Run(RunArgs),
    /// Print the resolved configuration without running.
    Config(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    buckets: Option<String>,
    #[arg(long)]
    peers: Option<String>,
    #[arg(long)]
    rounds: Option<String>,
    #[arg(long)]
    fanout: Option<String>,
    #[arg(long)]
    items: Option<String>,
    /// Comma separated quantiles in [0, 1].
    #[arg(long)]
    quantiles: Option<String>,
    /// ba, er or complete.
    #[arg(long)]
    topology: Option<String>,
    /// none, failstop, yao-pareto or yao-exp.
    #[arg(long)]
    churn: Option<String>,
    #[arg(long)]
    fail_probability: Option<String>,
    /// adversarial, uniform, exponential, normal or power.
    #[arg(long)]
    workload: Option<String>,
    /// Household power file, implies --workload power.
    #[arg(long)]
    power_file: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// CSV output path; metadata goes to `<stem>.meta` beside it.
    #[arg(long)]
    out: Option<String>,
    /// Divides --peers and --items.
    #[arg(long)]
    scale: Option<String>,
    /// Peers queried per round when the network exceeds 2000 peers.
    #[arg(long)]
    query_sample: Option<String>,
    /// Write the topology as an `i j` edge list.
    #[arg(long)]
    dump_topology: Option<String>,
    /// nearest or ceiling.
    #[arg(long)]
    rounding: Option<String>,
    /// Run this many consecutive seeds in parallel.
    #[arg(long)]
    sweep: Option<u64>,
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("alpha", &self.alpha),
            ("buckets", &self.buckets),
            ("peers", &self.peers),
            ("rounds", &self.rounds),
            ("fanout", &self.fanout),
            ("items", &self.items),
            ("quantiles", &self.quantiles),
            ("topology", &self.topology),
            ("churn", &self.churn),
            ("fail_probability", &self.fail_probability),
            ("power_file", &self.power_file),
            ("workload", &self.workload),
            ("seed", &self.seed),
            ("out", &self.out),
            ("scale", &self.scale),
            ("query_sample", &self.query_sample),
            ("dump_topology", &self.dump_topology),
            ("rounding", &self.rounding),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                config.set(key, value)?;
            }
        }
        validate_config(config)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Config(args) => {
            print!("{}", args.resolve()?.to_config_string());
        }
        Command::Run(args) => {
            let config = args.resolve()?;
            match args.sweep {
                None | Some(0) => {
                    let result = run_experiment(&config)?;
                    let last = result.final_round();
                    println!(
                        "{}: round {} worst ARE {:.3e}, {} online, metadata {}",
                        config.out.display(),
                        last.report.round,
                        last.report.worst_are(),
                        last.online_peers,
                        metadata_path(&config.out).display()
                    );
                }
                Some(n) => {
                    let seeds: Vec<u64> = (config.seed..config.seed + n).collect();
                    for (seed, result) in seeds.iter().zip(run_sweep(&config, &seeds)) {
                        let result = result?;
                        println!(
                            "seed {seed}: worst ARE {:.3e}",
                            result.final_round().report.worst_are()
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
