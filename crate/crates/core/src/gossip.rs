//! Peer state machine for gossip-based distributed averaging of sketches.
//!
//! Every peer holds `(sketch, Ñ, q̃)`: its sketch, an estimate of the average
//! number of items per peer, and an estimate of `1/p`. Peer 1 starts with
//! `q̃ = 1`, everyone else with `0`, so averaging drives every `q̃` to `1/p`
//! without a leader election. An exchange is an atomic push followed by a
//! pull carrying the already merged state, after which both peers agree.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sketch::{check_quantile, merge_avg, Sketch};

/// 1-based peer identifier.
pub type PeerId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct PeerState<F> {
    pub sketch: Sketch<F>,
    /// Estimate of the average per-peer item count.
    pub n_est: F,
    /// Estimate of `1 / p`.
    pub q_est: F,
    pub peer_id: PeerId,
}

/// How real-valued averaged quantities are turned back into integer counts
/// when answering a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountRounding {
    /// Round to the nearest integer. Residual averaging error, of either sign,
    /// vanishes once it drops below one half.
    #[default]
    Nearest,
    /// Always round up. Any positive residual, however small, adds one.
    Ceiling,
}

impl CountRounding {
    fn apply<F: Scalar>(self, v: F) -> F {
        match self {
            CountRounding::Nearest => v.round(),
            CountRounding::Ceiling => v.ceil(),
        }
    }
}

impl<F: Scalar> PeerState<F> {
    /// Summarizes the local stream and seeds the network-size estimate.
    pub fn init<I>(peer_id: PeerId, local_stream: I, alpha: F, max_buckets: usize) -> Result<Self>
    where
        I: IntoIterator<Item = F>,
    {
        if peer_id == 0 {
            return Err(Error::invalid("peer_id", "peer ids start at 1"));
        }
        let mut sketch = Sketch::new(alpha, max_buckets)?;
        let mut items = 0u64;
        for x in local_stream {
            sketch.insert(x)?;
            items += 1;
        }
        Ok(Self {
            sketch,
            n_est: F::of(items as f64),
            q_est: if peer_id == 1 { F::one() } else { F::zero() },
            peer_id,
        })
    }

    /// Averages `remote` into this state; the result keeps this peer's id.
    pub fn update(&self, remote: &PeerState<F>) -> Result<PeerState<F>> {
        update(remote, self)
    }

    pub fn push_message(&self) -> GossipMessage<F> {
        GossipMessage {
            kind: MessageKind::Push,
            sender: self.peer_id,
            state: self.clone(),
        }
    }

    /// Handles an incoming message. A push is merged into the local state and
    /// answered with a pull carrying the merged state; a pull replaces the
    /// local state.
    pub fn on_receive(&mut self, msg: GossipMessage<F>) -> Result<Option<GossipMessage<F>>> {
        match msg.kind {
            MessageKind::Push => {
                *self = update(&msg.state, self)?;
                Ok(Some(GossipMessage {
                    kind: MessageKind::Pull,
                    sender: self.peer_id,
                    state: self.clone(),
                }))
            }
            MessageKind::Pull => {
                let id = self.peer_id;
                *self = msg.state;
                self.peer_id = id;
                Ok(None)
            }
        }
    }

    /// `p̃`, the network-size estimate derived from `q̃`.
    pub fn estimated_peers(&self, rounding: CountRounding) -> Result<F> {
        if !(self.q_est > F::zero()) {
            return Err(Error::InvalidEstimate);
        }
        Ok(rounding.apply(self.q_est.recip()).max(F::one()))
    }

    /// Estimates the `q`-quantile of the union of every peer's stream.
    pub fn query(&self, q: F) -> Result<F> {
        Ok(self.query_many(&[q], CountRounding::default())?[0])
    }

    /// Answers several quantile queries in one pass over the buckets.
    /// `quantiles` may be in any order; results follow the input order.
    pub fn query_many(&self, quantiles: &[F], rounding: CountRounding) -> Result<Vec<F>> {
        for &q in quantiles {
            check_quantile(q)?;
        }
        if self.sketch.is_empty() {
            return Err(Error::EmptySketch);
        }
        let peers = self.estimated_peers(rounding)?;
        let total = rounding.apply(peers * self.n_est);

        let mut order: Vec<usize> = (0..quantiles.len()).collect();
        order.sort_by(|&a, &b| quantiles[a].partial_cmp(&quantiles[b]).expect("checked range"));

        let mut answers = vec![F::zero(); quantiles.len()];
        let mut pending = order.into_iter().peekable();
        let mut buckets = self.sketch.buckets().peekable();
        let mut running = F::zero();
        let mut current = None;
        while let Some(&slot) = pending.peek() {
            let target = (F::one() + quantiles[slot] * (total - F::one())).floor();
            match current {
                Some(index) if running >= target || buckets.peek().is_none() => {
                    answers[slot] = self.sketch.bucket_value(index);
                    pending.next();
                }
                _ => {
                    let (index, count) = buckets.next().expect("sketch is nonempty");
                    running = running + rounding.apply(count * peers);
                    current = Some(index);
                }
            }
        }
        Ok(answers)
    }
}

/// Update from the point of view of peer `l` receiving `state_j`: averages
/// sketches, item-count and network-size estimates.
pub fn update<F: Scalar>(state_j: &PeerState<F>, state_l: &PeerState<F>) -> Result<PeerState<F>> {
    let two = F::one() + F::one();
    Ok(PeerState {
        sketch: merge_avg(&state_l.sketch, &state_j.sketch)?,
        n_est: (state_l.n_est + state_j.n_est) / two,
        q_est: (state_l.q_est + state_j.q_est) / two,
        peer_id: state_l.peer_id,
    })
}

/// Initializes peer `l` from its local stream.
pub fn init_peer<F: Scalar, I: IntoIterator<Item = F>>(
    l: PeerId,
    local_stream: I,
    alpha: F,
    m: usize,
) -> Result<PeerState<F>> {
    PeerState::init(l, local_stream, alpha, m)
}

/// Queries `state` for the `q`-quantile of the global dataset.
pub fn distributed_query<F: Scalar>(state: &PeerState<F>, q: F) -> Result<F> {
    state.query(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    Push,
    Pull,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GossipMessage<F> {
    pub kind: MessageKind,
    pub sender: PeerId,
    pub state: PeerState<F>,
}

/// A peer failure injected into the middle of an exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeFault {
    /// The responder goes down after receiving the push, before replying.
    ResponderFailsBeforePull,
    /// The initiator goes down after pushing, before the pull arrives.
    InitiatorFailsBeforePull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeOutcome {
    Completed,
    /// The initiator detected the responder's failure and kept its state.
    CancelledByInitiator,
    /// The responder detected the initiator's failure and restored its
    /// pre-exchange state.
    RestoredByResponder,
}

/// One atomic push-pull exchange. On success both peers hold
/// `update(initiator, responder)`; on an injected fault both keep their
/// pre-exchange states.
pub fn exchange<F: Scalar>(
    initiator: &mut PeerState<F>,
    responder: &mut PeerState<F>,
    fault: Option<ExchangeFault>,
) -> Result<ExchangeOutcome> {
    let saved = responder.clone();
    let pull = responder
        .on_receive(initiator.push_message())?
        .expect("a push is always answered");
    match fault {
        None => {
            initiator.on_receive(pull)?;
            Ok(ExchangeOutcome::Completed)
        }
        Some(ExchangeFault::ResponderFailsBeforePull) => {
            // The pull is never sent; the failed responder keeps the state it
            // had before the exchange.
            *responder = saved;
            Ok(ExchangeOutcome::CancelledByInitiator)
        }
        Some(ExchangeFault::InitiatorFailsBeforePull) => {
            *responder = saved;
            Ok(ExchangeOutcome::RestoredByResponder)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn peer(id: PeerId, values: &[f64]) -> PeerState<f64> {
        PeerState::init(id, values.iter().copied(), 0.01, 64).unwrap()
    }

    #[test]
    fn init_seeds_estimates() {
        let first = peer(1, &[]);
        assert!(first.sketch.is_empty());
        assert_eq!((first.n_est, first.q_est), (0.0, 1.0));

        let stream: Vec<f64> = (1..=100_000).map(|i| 1.0 + (i % 997) as f64).collect();
        let second = PeerState::init(2, stream.iter().copied(), 0.001, 1024).unwrap();
        assert_eq!((second.n_est, second.q_est), (100_000.0, 0.0));

        let mut sequential = Sketch::new(0.001, 1024).unwrap();
        for &x in &stream {
            sequential.insert(x).unwrap();
        }
        assert_eq!(second.sketch, sequential);

        assert!(PeerState::<f64>::init(0, [], 0.01, 8).is_err());
    }

    #[test]
    fn update_averages_and_is_symmetric() {
        let a = peer(1, &[1.0, 2.0, 3.0]);
        let b = peer(2, &[3.0, 40.0]);
        let ab = update(&a, &b).unwrap();
        let ba = update(&b, &a).unwrap();
        assert_eq!(ab.q_est, 0.5);
        assert_eq!(ab.n_est, 2.5);
        assert_eq!(ab.sketch, ba.sketch);
        assert_eq!((ab.n_est, ab.q_est), (ba.n_est, ba.q_est));

        let mut c = peer(3, &[5.0]);
        c.n_est = 100_000.0;
        let mut d = peer(4, &[5.0]);
        d.n_est = 100_000.0;
        assert_eq!(update(&c, &d).unwrap().n_est, 100_000.0);
    }

    #[test]
    fn exchange_leaves_both_peers_identical() {
        let mut a = peer(1, &[1.0, 2.0, 3.0]);
        let mut b = peer(2, &[30.0, 40.0]);
        let sum = a.q_est + b.q_est;
        assert_eq!(exchange(&mut a, &mut b, None).unwrap(), ExchangeOutcome::Completed);
        assert_eq!(a.sketch, b.sketch);
        assert_eq!((a.n_est, a.q_est), (b.n_est, b.q_est));
        assert_eq!(a.q_est + b.q_est, sum);
        assert_eq!((a.peer_id, b.peer_id), (1, 2));

        let before = (a.clone(), b.clone());
        exchange(&mut a, &mut b, None).unwrap();
        assert_eq!((a, b), before);
    }

    #[test]
    fn faults_leave_states_untouched() {
        for fault in [
            ExchangeFault::ResponderFailsBeforePull,
            ExchangeFault::InitiatorFailsBeforePull,
        ] {
            let mut a = peer(1, &[1.0, 2.0]);
            let mut b = peer(2, &[50.0]);
            let before = (a.clone(), b.clone());
            let outcome = exchange(&mut a, &mut b, Some(fault)).unwrap();
            assert_ne!(outcome, ExchangeOutcome::Completed);
            assert_eq!((a, b), before);
        }
    }

    #[test]
    fn message_flow_matches_exchange() {
        let mut a = peer(1, &[1.0, 2.0]);
        let mut b = peer(2, &[50.0]);
        let push = a.push_message();
        assert_eq!((push.kind, push.sender), (MessageKind::Push, 1));
        let pull = b.on_receive(push).unwrap().unwrap();
        assert_eq!((pull.kind, pull.sender), (MessageKind::Pull, 2));
        assert!(a.on_receive(pull).unwrap().is_none());
        assert_eq!(a.sketch, b.sketch);
    }

    #[test]
    fn single_peer_query_matches_local_quantile() {
        let values: Vec<f64> = (1..=2_000).map(|i| (i as f64).sqrt() * 3.0).collect();
        let p = PeerState::init(1, values.iter().copied(), 0.001, 1024).unwrap();
        for q in [0.0, 0.01, 0.1, 0.25, 0.5, 0.77, 0.9, 0.99, 1.0] {
            let local = p.sketch.local_quantile(q, values.len() as f64).unwrap();
            for rounding in [CountRounding::Nearest, CountRounding::Ceiling] {
                assert_eq!(p.query_many(&[q], rounding).unwrap()[0], local, "q = {q}");
            }
        }
    }

    #[test]
    fn query_many_matches_individual_queries() {
        let values: Vec<f64> = (1..=500).map(|i| i as f64 * 1.37).collect();
        let p = PeerState::init(1, values, 0.01, 128).unwrap();
        let qs = [0.9, 0.1, 0.5, 0.0, 1.0, 0.5];
        let many = p.query_many(&qs, CountRounding::Nearest).unwrap();
        for (q, v) in qs.iter().zip(many) {
            assert_eq!(p.query(*q).unwrap(), v);
        }
    }

    #[test]
    fn query_errors() {
        let silent = peer(2, &[1.0]);
        assert!(matches!(silent.query(0.5), Err(Error::InvalidEstimate)));
        let empty = peer(1, &[]);
        assert!(matches!(empty.query(0.5), Err(Error::EmptySketch)));
        assert!(peer(1, &[1.0]).query(-0.1).is_err());
    }

    #[test]
    fn ceiling_overshoots_network_size() {
        let mut p = peer(1, &[1.0]);
        p.q_est = 0.25 * (1.0 - 1e-12);
        assert_eq!(p.estimated_peers(CountRounding::Ceiling).unwrap(), 5.0);
        assert_eq!(p.estimated_peers(CountRounding::Nearest).unwrap(), 4.0);
    }
}
