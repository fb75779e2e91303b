//! Oracles and error measures used to score the distributed estimates.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sketch::{check_quantile, Sketch};

/// The inferior `q`-quantile: element of rank `⌊1 + q(n - 1)⌋` in sorted order.
pub fn exact_quantile<F: Scalar>(data: &[F], q: F) -> Result<F> {
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in data"));
    exact_quantile_sorted(&sorted, q)
}

/// [`exact_quantile`] over data that is already sorted ascending.
pub fn exact_quantile_sorted<F: Scalar>(sorted: &[F], q: F) -> Result<F> {
    check_quantile(q)?;
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = sorted.len() as f64;
    let rank = (1.0 + q.as_f64() * (n - 1.0)).floor() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// One sketch over the concatenation of every stream, and the total item count.
pub fn sequential_reference<'a, F, I>(streams: I, alpha: F, m: usize) -> Result<(Sketch<F>, usize)>
where
    F: Scalar,
    I: IntoIterator<Item = &'a [F]>,
{
    let mut sketch = Sketch::new(alpha, m)?;
    let mut n = 0;
    for stream in streams {
        for &x in stream {
            sketch.insert(x)?;
        }
        n += stream.len();
    }
    Ok((sketch, n))
}

pub fn relative_error(estimate: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 || reference.is_nan() {
        return Err(Error::invalid("reference", "relative error against zero"));
    }
    Ok((estimate - reference).abs() / reference.abs())
}

/// Mean relative error of `estimates` against `reference`.
pub fn are(estimates: &[f64], reference: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sum = 0.0;
    for &e in estimates {
        sum += relative_error(e, reference)?;
    }
    Ok(sum / estimates.len() as f64)
}

/// Expected per-round variance reduction of pairwise averaging, `1 / (2√e)`.
pub fn convergence_factor() -> f64 {
    0.5 * (-0.5f64).exp()
}

/// `√((p - 1) σ₀²) · √(Cʳ / δ)`: with probability `1 - δ` no peer deviates
/// from the true mean by more than this after `r` rounds.
pub fn gossip_bound(sigma0_sq: f64, p: usize, r: usize, delta: f64) -> Result<f64> {
    if p < 2 {
        return Err(Error::invalid("p", "need at least two peers"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", format!("must lie in (0, 1), got {delta}")));
    }
    if !(sigma0_sq >= 0.0) {
        return Err(Error::invalid("sigma0_sq", "must be nonnegative"));
    }
    let c = convergence_factor();
    Ok(((p - 1) as f64 * sigma0_sq).sqrt() * (c.powi(r as i32) / delta).sqrt())
}

/// `1/(p-1) Σ (w_l - w̄)²` around the true mean `w̄`.
pub fn empirical_variance(values: &[f64], true_mean: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::invalid("values", "need at least two peers"));
    }
    let ss: f64 = values.iter().map(|w| (w - true_mean).powi(2)).sum();
    Ok(ss / (values.len() - 1) as f64)
}

/// Box-and-whisker summary of a set of relative errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    pub are: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl ErrorSummary {
    pub fn from_errors(errors: &[f64]) -> Result<Self> {
        if errors.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut sorted = errors.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            are: errors.iter().sum::<f64>() / errors.len() as f64,
            min: sorted[0],
            q1: interpolated_quantile(&sorted, 0.25),
            median: interpolated_quantile(&sorted, 0.5),
            q3: interpolated_quantile(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

/// Linear interpolation between closest ranks over sorted data.
pub fn interpolated_quantile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Relative errors of every queried peer for one quantile at one round.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileErrors {
    pub quantile: f64,
    pub reference: f64,
    pub errors: Vec<f64>,
    pub summary: ErrorSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub round: usize,
    pub quantiles: Vec<QuantileErrors>,
}

impl ErrorReport {
    /// Largest ARE over all quantiles.
    pub fn worst_are(&self) -> f64 {
        self.quantiles.iter().map(|q| q.summary.are).fold(0.0, f64::max)
    }
}
