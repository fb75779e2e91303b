//! Synchronous round scheduler.
//!
//! Each round first advances the churn process. Peers going down this round
//! fail at a uniformly random instant inside it, so they may be caught in the
//! middle of an exchange. Online peers then initiate exchanges in a fresh
//! random order; every exchange is atomic and serialized.
//!
//! Time inside a round is measured in initiator slots: the peer at position
//! `s` of the permutation owns `[s, s + 1)`, split evenly among its targets.
//! An exchange is vulnerable between its push (start) and its pull
//! (midpoint).

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::churn::{ChurnModel, PeerStatus};
use crate::error::{Error, Result};
use crate::gossip::{exchange, ExchangeFault, ExchangeOutcome, PeerState};
use crate::scalar::Scalar;
use crate::topology::Topology;

/// When a failing peer goes down within a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FailurePoint {
    /// At this instant, in initiator-slot units.
    At(f64),
    /// While its `n`-th exchange of the round (0-based) is in flight.
    DuringExchange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Up,
    FailsDuring,
    Down,
}

fn phase(point: Option<FailurePoint>, start: f64, pull_at: f64, involvement: usize) -> Phase {
    match point {
        None => Phase::Up,
        Some(FailurePoint::At(t)) if t < start => Phase::Down,
        Some(FailurePoint::At(t)) if t < pull_at => Phase::FailsDuring,
        Some(FailurePoint::At(_)) => Phase::Up,
        Some(FailurePoint::DuringExchange(n)) if involvement > n => Phase::Down,
        Some(FailurePoint::DuringExchange(n)) if involvement == n => Phase::FailsDuring,
        Some(FailurePoint::DuringExchange(_)) => Phase::Up,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeRecord {
    pub initiator: usize,
    pub responder: usize,
    pub outcome: ExchangeOutcome,
}

/// Lightweight per-peer view recorded every round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeerSnapshot {
    pub status: PeerStatus,
    pub n_est: f64,
    pub q_est: f64,
    pub collapse_count: u32,
    pub buckets: usize,
    pub mass: f64,
}

impl PeerSnapshot {
    pub fn online(&self) -> bool {
        self.status == PeerStatus::Online
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    pub round: usize,
    pub peers: Vec<PeerSnapshot>,
    pub exchanges: Vec<ExchangeRecord>,
}

impl RoundTrace {
    pub fn online_peers(&self) -> usize {
        self.peers.iter().filter(|p| p.online()).count()
    }

    pub fn count(&self, outcome: ExchangeOutcome) -> usize {
        self.exchanges.iter().filter(|e| e.outcome == outcome).count()
    }
}

fn snapshot<F: Scalar>(churn: &ChurnModel, peers: &[PeerState<F>]) -> Vec<PeerSnapshot> {
    peers
        .iter()
        .enumerate()
        .map(|(i, p)| PeerSnapshot {
            status: churn.status(i),
            n_est: p.n_est.as_f64(),
            q_est: p.q_est.as_f64(),
            collapse_count: p.sketch.collapse_count(),
            buckets: p.sketch.len(),
            mass: p.sketch.total_count().as_f64(),
        })
        .collect()
}

fn pair_mut<T>(items: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = items.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = items.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Runs one round: churn, then exchanges.
pub fn run_round<F: Scalar, R: Rng>(
    topology: &Topology,
    churn: &mut ChurnModel,
    peers: &mut [PeerState<F>],
    fan_out: usize,
    round: usize,
    rng: &mut R,
) -> Result<RoundTrace> {
    let p = peers.len();
    let transitions = churn.step(rng);
    let mut failures = vec![None; p];
    for t in transitions {
        if t.from == PeerStatus::Online {
            failures[t.peer] = Some(FailurePoint::At(rng.random::<f64>() * p as f64));
        }
    }
    exchange_round(topology, churn, peers, fan_out, round, &failures, rng)
}

/// Runs the exchange phase of a round with explicitly scripted failures and
/// no churn step. Statuses in `churn` are left as they are.
pub fn run_round_scripted<F: Scalar, R: Rng>(
    topology: &Topology,
    churn: &ChurnModel,
    peers: &mut [PeerState<F>],
    fan_out: usize,
    round: usize,
    failures: &[(usize, FailurePoint)],
    rng: &mut R,
) -> Result<RoundTrace> {
    let mut plan = vec![None; peers.len()];
    for &(peer, point) in failures {
        plan[peer] = Some(point);
    }
    exchange_round(topology, churn, peers, fan_out, round, &plan, rng)
}

fn exchange_round<F: Scalar, R: Rng>(
    topology: &Topology,
    churn: &ChurnModel,
    peers: &mut [PeerState<F>],
    fan_out: usize,
    round: usize,
    failures: &[Option<FailurePoint>],
    rng: &mut R,
) -> Result<RoundTrace> {
    let p = peers.len();
    if topology.peer_count() != p || churn.peer_count() != p {
        return Err(Error::Precondition("topology, churn and peers must agree on size"));
    }
    if fan_out == 0 {
        return Err(Error::invalid("fan_out", "must be at least 1"));
    }
    // Peers failing this round are live until their failure point.
    let live: Vec<bool> = (0..p).map(|i| churn.is_online(i) || failures[i].is_some()).collect();
    let mut involvement = vec![0usize; p];
    let mut records = Vec::new();

    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(rng);
    let mut candidates = Vec::new();
    for (slot, &initiator) in order.iter().enumerate() {
        let slot_start = slot as f64;
        let up = |i: usize, involvement: &[usize]| {
            live[i] && phase(failures[i], slot_start, slot_start, involvement[i]) != Phase::Down
        };
        if !up(initiator, &involvement) {
            continue;
        }
        candidates.clear();
        candidates.extend(
            topology
                .neighbours(initiator)
                .iter()
                .copied()
                .filter(|&j| up(j, &involvement)),
        );
        let k = fan_out.min(candidates.len());
        if k == 0 {
            continue;
        }
        let targets: Vec<usize> = candidates.choose_multiple(rng, k).copied().collect();
        let width = 1.0 / k as f64;
        for (e, &responder) in targets.iter().enumerate() {
            let start = slot_start + e as f64 * width;
            let pull_at = start + 0.5 * width;
            let init_phase = phase(failures[initiator], start, pull_at, involvement[initiator]);
            if init_phase == Phase::Down {
                break;
            }
            let resp_phase = phase(failures[responder], start, pull_at, involvement[responder]);
            let fault = match (init_phase, resp_phase) {
                (_, Phase::Down) => {
                    // responder vanished after being selected: the push goes
                    // unanswered and the initiator cancels
                    records.push(ExchangeRecord {
                        initiator,
                        responder,
                        outcome: ExchangeOutcome::CancelledByInitiator,
                    });
                    continue;
                }
                (_, Phase::FailsDuring) => Some(ExchangeFault::ResponderFailsBeforePull),
                (Phase::FailsDuring, _) => Some(ExchangeFault::InitiatorFailsBeforePull),
                _ => None,
            };
            involvement[initiator] += 1;
            involvement[responder] += 1;
            let (a, b) = pair_mut(peers, initiator, responder);
            let outcome = exchange(a, b, fault).map_err(|source| Error::Round {
                round,
                peer: initiator + 1,
                source: Box::new(source),
            })?;
            records.push(ExchangeRecord {
                initiator,
                responder,
                outcome,
            });
            if init_phase == Phase::FailsDuring {
                break;
            }
        }
    }

    Ok(RoundTrace {
        round,
        peers: snapshot(churn, peers),
        exchanges: records,
    })
}

/// A complete simulated network: topology, churn process, peer states and
/// the seeded random stream driving them.
#[derive(Debug, Clone)]
pub struct Simulation<F> {
    topology: Topology,
    churn: ChurnModel,
    peers: Vec<PeerState<F>>,
    initial: Vec<PeerState<F>>,
    fan_out: usize,
    rng: ChaCha8Rng,
    round: usize,
}

impl<F: Scalar> Simulation<F> {
    pub fn new(
        topology: Topology,
        churn: ChurnModel,
        peers: Vec<PeerState<F>>,
        fan_out: usize,
        seed: u64,
    ) -> Result<Self> {
        if topology.peer_count() != peers.len() || churn.peer_count() != peers.len() {
            return Err(Error::Precondition("topology, churn and peers must agree on size"));
        }
        if fan_out == 0 {
            return Err(Error::invalid("fan_out", "must be at least 1"));
        }
        Ok(Self {
            topology,
            churn,
            initial: peers.clone(),
            peers,
            fan_out,
            rng: ChaCha8Rng::seed_from_u64(seed),
            round: 0,
        })
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn peers(&self) -> &[PeerState<F>] {
        &self.peers
    }

    /// Round-0 states.
    pub fn initial_states(&self) -> &[PeerState<F>] {
        &self.initial
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn churn(&self) -> &ChurnModel {
        &self.churn
    }

    pub fn is_online(&self, peer: usize) -> bool {
        self.churn.is_online(peer)
    }

    /// Trace of the current state without advancing.
    pub fn trace(&self) -> RoundTrace {
        RoundTrace {
            round: self.round,
            peers: snapshot(&self.churn, &self.peers),
            exchanges: Vec::new(),
        }
    }

    pub fn run_round(&mut self) -> Result<RoundTrace> {
        self.round += 1;
        run_round(
            &self.topology,
            &mut self.churn,
            &mut self.peers,
            self.fan_out,
            self.round,
            &mut self.rng,
        )
    }

    pub fn run_round_scripted(&mut self, failures: &[(usize, FailurePoint)]) -> Result<RoundTrace> {
        self.round += 1;
        run_round_scripted(
            &self.topology,
            &self.churn,
            &mut self.peers,
            self.fan_out,
            self.round,
            failures,
            &mut self.rng,
        )
    }
}
