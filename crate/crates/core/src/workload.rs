//! Synthetic per-peer datasets and the household power dataset loader.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Uniform};

use crate::error::{Error, Result};

/// Peers per adversarial group.
pub const ADVERSARIAL_GROUP_SIZE: usize = 100;

/// Largest group index whose interval `(10^(2g), 10^(2g+2))` stays finite.
pub const MAX_ADVERSARIAL_GROUP: usize = 152;

#[derive(Debug, Clone, PartialEq)]
pub enum WorkloadKind {
    Adversarial,
    Uniform,
    Exponential,
    Normal,
    PowerFile(PathBuf),
}

impl WorkloadKind {
    pub fn name(&self) -> &'static str {
        match self {
            WorkloadKind::Adversarial => "adversarial",
            WorkloadKind::Uniform => "uniform",
            WorkloadKind::Exponential => "exponential",
            WorkloadKind::Normal => "normal",
            WorkloadKind::PowerFile(_) => "power",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub kind: WorkloadKind,
    pub items_per_peer: usize,
    pub seed: u64,
}

/// Independent random stream for peer `peer_id` under `seed`.
pub fn peer_rng(seed: u64, peer_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(peer_id as u64);
    rng
}

/// Uniform draw from the open interval `(low, high)`.
fn open_uniform<R: Rng + ?Sized>(low: f64, high: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let dist = Uniform::new(low, high).expect("low < high");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = dist.sample(rng);
        if x > low {
            out.push(x);
        }
    }
    out
}

/// Peers `1..=100` draw from `(1, 10^2)`, peers `101..=200` from
/// `(10^2, 10^4)`, and so on, so different groups never share a bucket.
pub fn gen_adversarial<R: Rng + ?Sized>(
    peer_id: usize,
    group_size: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if peer_id == 0 || group_size == 0 {
        return Err(Error::invalid("peer_id", "peer ids and group size start at 1"));
    }
    let group = (peer_id - 1) / group_size;
    if group > MAX_ADVERSARIAL_GROUP {
        return Err(Error::Overflow {
            group,
            exponent: 2 * (group as i32 + 1),
        });
    }
    let (low, high) = adversarial_interval(group);
    Ok(open_uniform(low, high, n, rng))
}

/// `(10^(2g), 10^(2g+2))`.
pub fn adversarial_interval(group: usize) -> (f64, f64) {
    let g = group as i32;
    (10f64.powi(2 * g), 10f64.powi(2 * g + 2))
}

/// `Uniform(a, b)` with `a ~ U[1, 10^5]` and `b ~ U[10^6, 10^7]` per peer.
pub fn gen_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let low = rng.random_range(1.0..=1e5);
    let high = rng.random_range(1e6..=1e7);
    open_uniform(low, high, n, rng)
}

/// `Exp(λ)` with rate `λ ~ U[0.1, 3.5]` per peer; exact zeros are redrawn.
pub fn gen_exponential<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let rate = rng.random_range(0.1..=3.5);
    sample_exponential(rate, n, rng)
}

pub fn sample_exponential<R: Rng + ?Sized>(rate: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let dist = Exp::new(rate).expect("positive rate");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: f64 = dist.sample(rng);
        if x > 0.0 {
            out.push(x);
        }
    }
    out
}

/// `N(μ, σ)` with `μ ~ U[10^6, 10^7]`, `σ ~ U[10^5, 10^6]` per peer,
/// truncated to positive values by redrawing.
pub fn gen_normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mean = rng.random_range(1e6..=1e7);
    let sd = rng.random_range(1e5..=1e6);
    let dist = Normal::new(mean, sd).expect("positive deviation");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = dist.sample(rng);
        if x > 0.0 {
            out.push(x);
        }
    }
    out
}

/// Readings loaded from a household power consumption file.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerData {
    pub values: Vec<f64>,
    /// Data rows skipped for a `?` marker or a nonpositive reading.
    pub skipped: usize,
    /// Data rows seen, header excluded.
    pub rows: usize,
}

const POWER_COLUMN: &str = "Global_active_power";

/// Parses a semicolon separated file with a header row, keeping every
/// positive `Global_active_power` reading in file order.
pub fn load_power(path: impl AsRef<Path>) -> Result<PowerData> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io_at(path, e))?);
    let mut lines = reader.lines();
    let malformed = || Error::MalformedHeader {
        path: path.to_path_buf(),
        column: POWER_COLUMN,
    };
    let header = lines.next().ok_or_else(malformed)??;
    let column = header
        .trim_end_matches('\r')
        .split(';')
        .position(|name| name.trim() == POWER_COLUMN)
        .ok_or_else(malformed)?;

    let mut data = PowerData {
        values: Vec::new(),
        skipped: 0,
        rows: 0,
    };
    for line in lines {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        data.rows += 1;
        let reading = line
            .split(';')
            .nth(column)
            .map(str::trim)
            .and_then(|field| field.parse::<f64>().ok())
            .filter(|&v| v > 0.0 && v.is_finite());
        match reading {
            Some(v) if !line.contains('?') => data.values.push(v),
            _ => data.skipped += 1,
        }
    }
    Ok(data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionPolicy {
    #[default]
    Contiguous,
    RoundRobin,
}

/// Splits a stream into `p` sub-streams whose sizes differ by at most one.
pub fn partition<T: Clone>(stream: &[T], p: usize, policy: PartitionPolicy) -> Vec<Vec<T>> {
    assert!(p >= 1, "need at least one part");
    match policy {
        PartitionPolicy::Contiguous => {
            let base = stream.len() / p;
            let extra = stream.len() % p;
            let mut parts = Vec::with_capacity(p);
            let mut offset = 0;
            for i in 0..p {
                let len = base + usize::from(i < extra);
                parts.push(stream[offset..offset + len].to_vec());
                offset += len;
            }
            parts
        }
        PartitionPolicy::RoundRobin => {
            let mut parts = vec![Vec::with_capacity(stream.len() / p + 1); p];
            for (i, x) in stream.iter().enumerate() {
                parts[i % p].push(x.clone());
            }
            parts
        }
    }
}

impl WorkloadSpec {
    /// One stream per peer, peer `l` at index `l - 1`. Synthetic kinds draw
    /// from `peer_rng(seed, l)`; a power file is split contiguously.
    pub fn peer_streams(&self, p: usize) -> Result<Vec<Vec<f64>>> {
        if p == 0 {
            return Err(Error::invalid("peers", "need at least one peer"));
        }
        let n = self.items_per_peer;
        match &self.kind {
            WorkloadKind::PowerFile(path) => {
                let data = load_power(path)?;
                Ok(partition(&data.values, p, PartitionPolicy::Contiguous))
            }
            kind => (1..=p)
                .map(|l| {
                    let mut rng = peer_rng(self.seed, l);
                    match kind {
                        WorkloadKind::Adversarial => {
                            gen_adversarial(l, ADVERSARIAL_GROUP_SIZE, n, &mut rng)
                        }
                        WorkloadKind::Uniform => Ok(gen_uniform(n, &mut rng)),
                        WorkloadKind::Exponential => Ok(gen_exponential(n, &mut rng)),
                        WorkloadKind::Normal => Ok(gen_normal(n, &mut rng)),
                        WorkloadKind::PowerFile(_) => unreachable!(),
                    }
                })
                .collect(),
        }
    }
}
