//! Relative-error quantile sketches that stay mergeable under averaging,
//! and a round-based simulator for tracking quantiles over a P2P network by
//! gossip.

pub mod churn;
pub mod config;
pub mod error;
pub mod experiment;
pub mod gossip;
pub mod metrics;
pub mod scalar;
pub mod sim;
pub mod sketch;
pub mod topology;
pub mod workload;

pub use churn::{ChurnKind, ChurnModel, PeerStatus};
pub use config::{validate_config, ExperimentConfig};
pub use error::{Error, Result};
pub use experiment::{run_experiment, simulate, RunResult};
pub use gossip::{distributed_query, exchange, init_peer, update, CountRounding, PeerId, PeerState};
pub use metrics::{are, empirical_variance, exact_quantile, gossip_bound, sequential_reference};
pub use scalar::Scalar;
pub use sim::{FailurePoint, RoundTrace, Simulation};
pub use sketch::{bucket_index, merge_avg, theoretical_bound, Sketch};
pub use topology::{gen_ba, gen_er, Topology, TopologyModel};

pub type Sketch64 = Sketch<f64>;
pub type Sketch32 = Sketch<f32>;
pub type PeerState64 = PeerState<f64>;
pub type PeerState32 = PeerState<f32>;
pub type Simulation64 = Simulation<f64>;
