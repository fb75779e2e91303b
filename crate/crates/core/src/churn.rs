//! Per-peer online/offline processes.
//!
//! Durations are real-valued and measured in rounds. Each round every live
//! peer's remaining duration drops by one and its status flips once it
//! reaches zero.

use rand::Rng;
use rand_distr::{Distribution, Exp, Pareto};

use crate::error::{Error, Result};

/// Per-round death probability used by the fail-and-stop experiments.
pub const DEFAULT_FAIL_PROBABILITY: f64 = 0.01;

/// Shifted Pareto (Lomax shifted by `location`):
/// `F(x) = 1 - (1 + (x - location) / scale)^(-shape)` for `x >= location`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedPareto {
    pub shape: f64,
    pub scale: f64,
    pub location: f64,
}

impl ShiftedPareto {
    pub const fn new(shape: f64, scale: f64, location: f64) -> Self {
        Self {
            shape,
            scale,
            location,
        }
    }

    /// Same shape and location, scale chosen so the mean equals `mean`.
    pub fn with_mean(shape: f64, location: f64, mean: f64) -> Self {
        Self::new(shape, (mean - location).max(0.0) * (shape - 1.0), location)
    }

    pub fn mean(&self) -> f64 {
        self.location + self.scale / (self.shape - 1.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.scale <= 0.0 {
            return self.location;
        }
        let pareto = Pareto::new(self.scale, self.shape).expect("positive scale and shape");
        pareto.sample(rng) - self.scale + self.location
    }
}

/// Distribution of per-peer mean lifetimes `l_i`.
pub const LIFETIME_MEANS: ShiftedPareto = ShiftedPareto::new(3.0, 1.0, 1.01);
/// Distribution of per-peer mean offline durations `d_i`.
pub const OFFLINE_MEANS: ShiftedPareto = ShiftedPareto::new(3.0, 2.0, 1.01);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChurnKind {
    None,
    FailStop { p_fail: f64 },
    YaoPareto,
    YaoExp,
}

impl ChurnKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChurnKind::None => "none",
            ChurnKind::FailStop { .. } => "failstop",
            ChurnKind::YaoPareto => "yao-pareto",
            ChurnKind::YaoExp => "yao-exp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeerStatus {
    Online,
    Offline,
    Dead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub peer: usize,
    pub from: PeerStatus,
    pub to: PeerStatus,
}

#[derive(Debug, Clone)]
pub struct ChurnModel {
    kind: ChurnKind,
    status: Vec<PeerStatus>,
    remaining: Vec<f64>,
    lifetime_mean: Vec<f64>,
    offline_mean: Vec<f64>,
    duration_cap: Option<f64>,
}

impl ChurnModel {
    /// All peers start online. Yao variants draw `l_i` and `d_i` once here,
    /// together with each peer's first online duration.
    pub fn new<R: Rng + ?Sized>(kind: ChurnKind, peers: usize, rng: &mut R) -> Result<Self> {
        if let ChurnKind::FailStop { p_fail } = kind {
            if !(0.0..=1.0).contains(&p_fail) {
                return Err(Error::invalid("p_fail", format!("must lie in [0, 1], got {p_fail}")));
            }
        }
        let mut model = Self {
            kind,
            status: vec![PeerStatus::Online; peers],
            remaining: vec![f64::INFINITY; peers],
            lifetime_mean: Vec::new(),
            offline_mean: Vec::new(),
            duration_cap: None,
        };
        if matches!(kind, ChurnKind::YaoPareto | ChurnKind::YaoExp) {
            model.lifetime_mean = (0..peers).map(|_| LIFETIME_MEANS.sample(rng)).collect();
            model.offline_mean = (0..peers).map(|_| OFFLINE_MEANS.sample(rng)).collect();
            for peer in 0..peers {
                model.remaining[peer] = model.draw_duration(peer, PeerStatus::Online, rng);
            }
        }
        Ok(model)
    }

    pub fn none(peers: usize) -> Self {
        Self {
            kind: ChurnKind::None,
            status: vec![PeerStatus::Online; peers],
            remaining: vec![f64::INFINITY; peers],
            lifetime_mean: Vec::new(),
            offline_mean: Vec::new(),
            duration_cap: None,
        }
    }

    /// Caps every future status duration at `cap` rounds.
    pub fn with_duration_cap(mut self, cap: f64) -> Self {
        self.duration_cap = Some(cap);
        for r in &mut self.remaining {
            if r.is_finite() {
                *r = r.min(cap);
            }
        }
        self
    }

    pub fn kind(&self) -> ChurnKind {
        self.kind
    }

    pub fn peer_count(&self) -> usize {
        self.status.len()
    }

    pub fn status(&self, peer: usize) -> PeerStatus {
        self.status[peer]
    }

    pub fn is_online(&self, peer: usize) -> bool {
        self.status[peer] == PeerStatus::Online
    }

    pub fn online_count(&self) -> usize {
        self.status.iter().filter(|&&s| s == PeerStatus::Online).count()
    }

    pub fn lifetime_means(&self) -> &[f64] {
        &self.lifetime_mean
    }

    pub fn offline_means(&self) -> &[f64] {
        &self.offline_mean
    }

    fn draw_duration<R: Rng + ?Sized>(&self, peer: usize, next: PeerStatus, rng: &mut R) -> f64 {
        let lifetime = self.lifetime_mean[peer];
        let d = match (self.kind, next) {
            (_, PeerStatus::Online) => {
                ShiftedPareto::with_mean(LIFETIME_MEANS.shape, LIFETIME_MEANS.location, lifetime)
                    .sample(rng)
            }
            (ChurnKind::YaoExp, _) => Exp::new(1.0 / lifetime).expect("positive rate").sample(rng),
            _ => ShiftedPareto::with_mean(
                OFFLINE_MEANS.shape,
                OFFLINE_MEANS.location,
                self.offline_mean[peer],
            )
            .sample(rng),
        };
        match self.duration_cap {
            Some(cap) => d.min(cap),
            None => d,
        }
    }

    /// Advances the process by one round and reports every status change.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<Transition> {
        let mut transitions = Vec::new();
        match self.kind {
            ChurnKind::None => {}
            ChurnKind::FailStop { p_fail } => {
                for (peer, status) in self.status.iter_mut().enumerate() {
                    if *status == PeerStatus::Online && rng.random::<f64>() < p_fail {
                        *status = PeerStatus::Dead;
                        transitions.push(Transition {
                            peer,
                            from: PeerStatus::Online,
                            to: PeerStatus::Dead,
                        });
                    }
                }
            }
            ChurnKind::YaoPareto | ChurnKind::YaoExp => {
                for peer in 0..self.status.len() {
                    self.remaining[peer] -= 1.0;
                    if self.remaining[peer] > 0.0 {
                        continue;
                    }
                    let from = self.status[peer];
                    let to = match from {
                        PeerStatus::Online => PeerStatus::Offline,
                        _ => PeerStatus::Online,
                    };
                    self.status[peer] = to;
                    self.remaining[peer] = self.draw_duration(peer, to, rng);
                    transitions.push(Transition { peer, from, to });
                }
            }
        }
        transitions
    }
}

/// One churn step for round `round`.
pub fn churn_step<R: Rng + ?Sized>(
    model: &mut ChurnModel,
    _round: usize,
    rng: &mut R,
) -> Vec<Transition> {
    model.step(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shifted_pareto_mean() {
        // μ + β / (α - 1) = 1.01 + 1 / 2
        assert!((LIFETIME_MEANS.mean() - 1.51).abs() < 1e-15);
        assert!((OFFLINE_MEANS.mean() - 2.01).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 2_000_000;
        let sum: f64 = (0..n).map(|_| LIFETIME_MEANS.sample(&mut rng)).sum();
        // infinite third moment: allow a loose Monte Carlo band
        assert!((sum / n as f64 - 1.51).abs() < 0.02, "{}", sum / n as f64);

        let d = ShiftedPareto::with_mean(3.0, 1.01, 4.0);
        assert!((d.mean() - 4.0).abs() < 1e-12);
        assert!((0..1000).all(|_| d.sample(&mut rng) >= 1.01));
    }

    #[test]
    fn none_never_transitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut m = ChurnModel::new(ChurnKind::None, 50, &mut rng).unwrap();
        for r in 0..100 {
            assert!(churn_step(&mut m, r, &mut rng).is_empty());
        }
        assert_eq!(m.online_count(), 50);
    }

    #[test]
    fn failstop_survivors_match_expectation() {
        let p = 10_000;
        let runs = 20;
        let mut survivors = 0.0;
        for seed in 0..runs {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m =
                ChurnModel::new(ChurnKind::FailStop { p_fail: 0.01 }, p, &mut rng).unwrap();
            let mut online = m.online_count();
            for _ in 0..25 {
                for t in m.step(&mut rng) {
                    assert_eq!((t.from, t.to), (PeerStatus::Online, PeerStatus::Dead));
                }
                assert!(m.online_count() <= online);
                online = m.online_count();
            }
            survivors += online as f64;
        }
        // 10000 · 0.99^25 = 7778.21...
        let mean = survivors / runs as f64;
        assert!((mean - 7778.21).abs() / 7778.21 < 0.02, "{mean}");
    }

    #[test]
    fn yao_models_never_kill_and_always_return() {
        for kind in [ChurnKind::YaoPareto, ChurnKind::YaoExp] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let mut m = ChurnModel::new(kind, 300, &mut rng).unwrap().with_duration_cap(6.0);
            let mut last_online = vec![0usize; 300];
            for r in 1..=200 {
                for t in m.step(&mut rng) {
                    assert_ne!(t.to, PeerStatus::Dead);
                    assert_ne!(t.from, t.to);
                }
                for (peer, last) in last_online.iter_mut().enumerate() {
                    if m.is_online(peer) {
                        *last = r;
                    }
                    assert!(r - *last <= 7, "peer {peer} offline too long");
                }
            }
        }
    }

    #[test]
    fn yao_online_fraction_is_plausible() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut m = ChurnModel::new(ChurnKind::YaoPareto, 2000, &mut rng).unwrap();
        let mut online = 0usize;
        for _ in 0..200 {
            m.step(&mut rng);
            online += m.online_count();
        }
        let fraction = online as f64 / (200.0 * 2000.0);
        assert!(fraction > 0.2 && fraction < 0.7, "{fraction}");
    }

    #[test]
    fn rejects_bad_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(ChurnModel::new(ChurnKind::FailStop { p_fail: 1.5 }, 3, &mut rng).is_err());
    }
}
