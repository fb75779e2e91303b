//! Relative-value-error quantile sketch with uniform bucket collapsing.
//!
//! Positive values are mapped to logarithmic buckets `(γ^(i-1), γ^i]` with
//! `γ = (1 + α) / (1 - α)`. When more than `max_buckets` buckets are in use,
//! every pair `(2j - 1, 2j)` is folded into bucket `j`, which squares `γ` and
//! keeps every quantile estimate `α'`-accurate with `α' = 2α / (1 + α²)`.
//!
//! Counters are real valued so the same type serves both local accumulation
//! and gossip averaging, where counters are repeatedly halved.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type BucketIndex = i64;

/// Ratios within this many units in the last place of an integer are snapped
/// to it before taking the ceiling, so `x = γ^i` lands in bucket `i`.
const NUDGE_ULPS: f64 = 4.0;

/// Maximum number of collapses `equalize_alpha` may apply.
pub const MAX_EQUALIZE_COLLAPSES: u32 = 64;

/// Relative tolerance under which two accuracy levels are considered equal.
const ACCURACY_TOLERANCE: f64 = 1e-12;

/// `γ = (1 + α) / (1 - α)`.
pub fn gamma_for_alpha<F: Scalar>(alpha: F) -> F {
    (F::one() + alpha) / (F::one() - alpha)
}

/// Accuracy after one uniform collapse: `2α / (1 + α²)`.
pub fn collapsed_alpha<F: Scalar>(alpha: F) -> F {
    (alpha + alpha) / (F::one() + alpha * alpha)
}

/// `⌈log_γ x⌉`, so that `γ^(i-1) < x <= γ^i`.
pub fn bucket_index<F: Scalar>(x: F, gamma: F) -> Result<BucketIndex> {
    check_value(x)?;
    if !(gamma > F::one()) || !gamma.is_finite() {
        return Err(Error::invalid("gamma", format!("must be finite and > 1, got {gamma}")));
    }
    index_from_logs(x.ln(), gamma.ln())
}

fn check_value<F: Scalar>(x: F) -> Result<()> {
    if x > F::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { value: x.as_f64() })
    }
}

fn index_from_logs<F: Scalar>(ln_x: F, ln_gamma: F) -> Result<BucketIndex> {
    let ratio = ln_x / ln_gamma;
    let nearest = ratio.round();
    let tolerance = F::epsilon() * F::of(NUDGE_ULPS) * ratio.abs();
    let snapped = if (ratio - nearest).abs() <= tolerance {
        nearest
    } else {
        ratio.ceil()
    };
    snapped
        .to_i64()
        .ok_or_else(|| Error::invalid("x", format!("bucket index {ratio} out of range")))
}

/// `⌈i / 2⌉` for signed indices.
fn collapsed_index(i: BucketIndex) -> BucketIndex {
    i.div_euclid(2) + i.rem_euclid(2)
}

/// Theoretical accuracy bound for values in `[x_min, x_max]` under `m` buckets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyBound<F> {
    pub alpha_hat: F,
    pub gamma_tilde: F,
}

/// `γ̃ = (x_max / x_min)^(1 / (m - 1))` and `α̂ = (γ̃² - 1) / (γ̃² + 1)`.
pub fn theoretical_bound<F: Scalar>(x_min: F, x_max: F, m: usize) -> Result<AccuracyBound<F>> {
    check_value(x_min)?;
    check_value(x_max)?;
    if x_min > x_max {
        return Err(Error::invalid("x_min", "must not exceed x_max"));
    }
    if m < 2 {
        return Err(Error::invalid("m", "need at least two buckets"));
    }
    let exponent = F::one() / F::of((m - 1) as f64);
    let gamma_tilde = (x_max / x_min).powf(exponent);
    let sq = gamma_tilde * gamma_tilde;
    Ok(AccuracyBound {
        alpha_hat: (sq - F::one()) / (sq + F::one()),
        gamma_tilde,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sketch<F> {
    buckets: BTreeMap<BucketIndex, F>,
    alpha: F,
    gamma: F,
    // Doubled (exactly) on every collapse, so indices computed after k
    // collapses agree with ⌈i / 2^k⌉ of indices computed before.
    ln_gamma: F,
    initial_alpha: F,
    collapse_count: u32,
    max_buckets: usize,
}

impl<F: Scalar> Sketch<F> {
    pub fn new(alpha: F, max_buckets: usize) -> Result<Self> {
        if !(alpha > F::zero() && alpha < F::one()) {
            return Err(Error::invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        if max_buckets < 2 {
            return Err(Error::invalid(
                "max_buckets",
                format!("need at least 2, got {max_buckets}"),
            ));
        }
        let gamma = gamma_for_alpha(alpha);
        Ok(Self {
            buckets: BTreeMap::new(),
            alpha,
            gamma,
            ln_gamma: gamma.ln(),
            initial_alpha: alpha,
            collapse_count: 0,
            max_buckets,
        })
    }

    /// Builds a sketch holding the given counters, without collapsing.
    /// Zero counters are dropped; negative or non-finite ones are rejected.
    pub fn from_counts<I>(alpha: F, max_buckets: usize, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BucketIndex, F)>,
    {
        let mut sketch = Self::new(alpha, max_buckets)?;
        for (index, count) in counts {
            if count < F::zero() || !count.is_finite() {
                return Err(Error::invalid("count", format!("bucket {index} has {count}")));
            }
            if count > F::zero() {
                *sketch.buckets.entry(index).or_insert_with(F::zero) =
                    sketch.count(index) + count;
            }
        }
        Ok(sketch)
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn gamma(&self) -> F {
        self.gamma
    }

    pub fn ln_gamma(&self) -> F {
        self.ln_gamma
    }

    pub fn initial_alpha(&self) -> F {
        self.initial_alpha
    }

    pub fn collapse_count(&self) -> u32 {
        self.collapse_count
    }

    pub fn max_buckets(&self) -> usize {
        self.max_buckets
    }

    /// Number of nonzero buckets.
    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn count(&self, index: BucketIndex) -> F {
        self.buckets.get(&index).copied().unwrap_or_else(F::zero)
    }

    /// Nonzero buckets in ascending index order.
    pub fn buckets(&self) -> impl DoubleEndedIterator<Item = (BucketIndex, F)> + '_ {
        self.buckets.iter().map(|(&i, &c)| (i, c))
    }

    /// Sum of all counters.
    pub fn total_count(&self) -> F {
        self.buckets.values().fold(F::zero(), |acc, &c| acc + c)
    }

    /// Bucket that `x` falls into under the current `γ`.
    pub fn index_of(&self, x: F) -> Result<BucketIndex> {
        check_value(x)?;
        index_from_logs(x.ln(), self.ln_gamma)
    }

    /// Representative value of bucket `i`: `2γ^i / (γ + 1)`.
    pub fn bucket_value(&self, index: BucketIndex) -> F {
        let power = (F::of(index as f64) * self.ln_gamma).exp();
        (power + power) / (self.gamma + F::one())
    }

    pub fn insert(&mut self, x: F) -> Result<()> {
        let index = self.index_of(x)?;
        let slot = self.buckets.entry(index).or_insert_with(F::zero);
        *slot = *slot + F::one();
        self.collapse_to_fit();
        Ok(())
    }

    pub fn remove(&mut self, x: F) -> Result<()> {
        let index = self.index_of(x)?;
        match self.buckets.get_mut(&index) {
            Some(count) if *count >= F::one() => {
                *count = *count - F::one();
                if *count == F::zero() {
                    self.buckets.remove(&index);
                }
                Ok(())
            }
            _ => Err(Error::Underflow { index }),
        }
    }

    /// Folds bucket `i` into `⌈i / 2⌉`, squaring `γ`.
    pub fn uniform_collapse(&mut self) {
        let old = std::mem::take(&mut self.buckets);
        for (index, count) in old {
            let slot = self.buckets.entry(collapsed_index(index)).or_insert_with(F::zero);
            *slot = *slot + count;
        }
        self.gamma = self.gamma * self.gamma;
        self.ln_gamma = self.ln_gamma + self.ln_gamma;
        self.alpha = collapsed_alpha(self.alpha);
        self.collapse_count += 1;
    }

    /// Baseline collapse: the lowest nonzero bucket is added into the second
    /// lowest and removed. Accuracy state is unchanged.
    pub fn ddsketch_collapse(&mut self) -> Result<()> {
        if self.buckets.len() < 2 {
            return Err(Error::Precondition("baseline collapse needs at least two buckets"));
        }
        let (_, lowest) = self.buckets.pop_first().expect("checked length");
        let (_, second) = self.buckets.iter_mut().next().expect("checked length");
        *second = *second + lowest;
        Ok(())
    }

    /// Inserts like the baseline DDSketch: on overflow the two lowest buckets
    /// are merged instead of collapsing uniformly.
    pub fn insert_baseline(&mut self, x: F) -> Result<()> {
        let index = self.index_of(x)?;
        let slot = self.buckets.entry(index).or_insert_with(F::zero);
        *slot = *slot + F::one();
        if self.buckets.len() > self.max_buckets {
            self.ddsketch_collapse()?;
        }
        Ok(())
    }

    fn collapse_to_fit(&mut self) {
        while self.buckets.len() > self.max_buckets {
            self.uniform_collapse();
        }
    }

    /// Estimate of the inferior `q`-quantile of `n` items summarized here:
    /// the representative value of the first bucket whose cumulative count
    /// reaches rank `⌊1 + q(n - 1)⌋`.
    pub fn local_quantile(&self, q: F, n: F) -> Result<F> {
        check_quantile(q)?;
        if self.is_empty() {
            return Err(Error::EmptySketch);
        }
        if !(n > F::zero()) {
            return Err(Error::invalid("n", format!("must be positive, got {n}")));
        }
        let target = (F::one() + q * (n - F::one())).floor();
        let mut running = F::zero();
        let mut last = 0;
        for (index, count) in self.buckets() {
            running = running + count;
            last = index;
            if running >= target {
                break;
            }
        }
        Ok(self.bucket_value(last))
    }

    pub fn to_record(&self) -> SketchRecord {
        SketchRecord {
            alpha: self.alpha.as_f64(),
            gamma: self.gamma.as_f64(),
            initial_alpha: self.initial_alpha.as_f64(),
            collapse_count: self.collapse_count,
            max_buckets: self.max_buckets,
            buckets: self.buckets().map(|(i, c)| (i, c.as_f64())).collect(),
        }
    }

    /// Rebuilds a sketch from a record, replaying its collapse history.
    pub fn from_record(record: &SketchRecord) -> Result<Self> {
        let mut sketch = Self::new(F::of(record.initial_alpha), record.max_buckets)?;
        for _ in 0..record.collapse_count {
            sketch.uniform_collapse();
        }
        for &(index, count) in &record.buckets {
            if !(count > 0.0) || !count.is_finite() {
                return Err(Error::invalid("count", format!("bucket {index} has {count}")));
            }
            sketch.buckets.insert(index, F::of(count));
        }
        Ok(sketch)
    }
}

pub(crate) fn check_quantile<F: Scalar>(q: F) -> Result<()> {
    if q >= F::zero() && q <= F::one() {
        Ok(())
    } else {
        Err(Error::invalid("q", format!("must lie in [0, 1], got {q}")))
    }
}

/// Flat form of a sketch for trace files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SketchRecord {
    pub alpha: f64,
    pub gamma: f64,
    pub initial_alpha: f64,
    pub collapse_count: u32,
    pub max_buckets: usize,
    pub buckets: Vec<(BucketIndex, f64)>,
}

fn same_level<F: Scalar>(a: F, b: F) -> bool {
    (a - b).abs() <= F::of(ACCURACY_TOLERANCE) * a.abs().max(b.abs())
}

/// Collapses the finer of the two sketches until both have the same `α`.
///
/// Fails with `IncompatibleSketches`, leaving both untouched, when no number
/// of collapses up to [`MAX_EQUALIZE_COLLAPSES`] makes the accuracies meet.
pub fn equalize_alpha<F: Scalar>(a: &mut Sketch<F>, b: &mut Sketch<F>) -> Result<()> {
    let (fine, coarse) = if a.ln_gamma <= b.ln_gamma { (a, b) } else { (b, a) };
    let mut level = fine.ln_gamma;
    let mut needed = 0;
    while !same_level(level, coarse.ln_gamma) {
        if level > coarse.ln_gamma || needed == MAX_EQUALIZE_COLLAPSES {
            return Err(Error::IncompatibleSketches);
        }
        level = level + level;
        needed += 1;
    }
    for _ in 0..needed {
        fine.uniform_collapse();
    }
    Ok(())
}

/// Bucket-wise average of two sketches, `(B¹_i + B²_i) / 2`, collapsed to fit
/// within the smaller of the two space bounds.
pub fn merge_avg<F: Scalar>(s1: &Sketch<F>, s2: &Sketch<F>) -> Result<Sketch<F>> {
    let mut left = s1.clone();
    let mut right = s2.clone();
    equalize_alpha(&mut left, &mut right)?;

    let two = F::one() + F::one();
    let mut merged = BTreeMap::new();
    let mut lhs = left.buckets.iter().peekable();
    let mut rhs = right.buckets.iter().peekable();
    loop {
        let (index, sum) = match (lhs.peek(), rhs.peek()) {
            (Some(&(&i, &a)), Some(&(&j, &b))) => match i.cmp(&j) {
                Ordering::Less => {
                    lhs.next();
                    (i, a)
                }
                Ordering::Greater => {
                    rhs.next();
                    (j, b)
                }
                Ordering::Equal => {
                    lhs.next();
                    rhs.next();
                    (i, a + b)
                }
            },
            (Some(&(&i, &a)), None) => {
                lhs.next();
                (i, a)
            }
            (None, Some(&(&j, &b))) => {
                rhs.next();
                (j, b)
            }
            (None, None) => break,
        };
        merged.insert(index, sum / two);
    }

    let mut result = Sketch {
        buckets: merged,
        max_buckets: left.max_buckets.min(right.max_buckets),
        ..left
    };
    result.collapse_to_fit();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(s: &Sketch<f64>) -> Vec<(i64, f64)> {
        s.buckets().collect()
    }

    #[test]
    fn construction_validates_parameters() {
        let s = Sketch::<f64>::new(0.5, 8).unwrap();
        assert_eq!(s.gamma(), 3.0);
        assert_eq!(s.collapse_count(), 0);
        assert!(s.is_empty());

        // Extended-precision value of 1.001 / 0.999.
        let s = Sketch::<f64>::new(0.001, 1024).unwrap();
        assert!((s.gamma() - 1.002_002_002_002_002).abs() < 1e-15);

        assert!(matches!(Sketch::<f64>::new(1.0, 8), Err(Error::InvalidParameter { .. })));
        assert!(matches!(Sketch::<f64>::new(0.0, 8), Err(Error::InvalidParameter { .. })));
        assert!(matches!(Sketch::<f64>::new(0.01, 1), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn bucket_index_examples() {
        let g = gamma_for_alpha(0.001_f64);
        assert_eq!(bucket_index(1.0, g).unwrap(), 0);
        assert_eq!(bucket_index(1.0, 3.0).unwrap(), 0);
        // ln 10 / ln γ = 1151.29216... (50-digit oracle)
        assert_eq!(bucket_index(10.0, g).unwrap(), 1152);
        assert_eq!(bucket_index(3.0, 3.0).unwrap(), 1);
        assert_eq!(bucket_index(3.0001, 3.0).unwrap(), 2);
        assert_eq!(bucket_index(9.0, 3.0).unwrap(), 2);
        assert_eq!(bucket_index(1.0 / 3.0, 3.0).unwrap(), -1);
        assert!(matches!(bucket_index(0.0, 3.0), Err(Error::Domain { .. })));
        assert!(matches!(bucket_index(-2.0, 3.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn exact_powers_land_on_their_own_bucket() {
        let g = gamma_for_alpha(0.01_f64);
        for i in -200..200 {
            let x = (i as f64 * g.ln()).exp();
            assert_eq!(bucket_index(x, g).unwrap(), i as i64, "x = γ^{i}");
        }
    }

    #[test]
    fn insert_and_conservation() {
        let mut s = Sketch::<f64>::new(0.01, 64).unwrap();
        s.insert(1.0).unwrap();
        assert_eq!(counts(&s), vec![(0, 1.0)]);
        for k in 1..=500 {
            s.insert(1.0 + k as f64 * 7.3).unwrap();
            assert_eq!(s.total_count(), (k + 1) as f64);
            assert!(s.len() <= 64);
        }
        assert!(s.collapse_count() > 0);
        assert!(matches!(s.insert(0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn remove_examples() {
        let mut s = Sketch::<f64>::new(0.01, 64).unwrap();
        s.insert(5.0).unwrap();
        s.remove(5.0).unwrap();
        assert!(s.is_empty());
        assert!(matches!(s.remove(5.0), Err(Error::Underflow { .. })));

        for x in [2.0, 2.0, 3.0] {
            s.insert(x).unwrap();
        }
        s.remove(2.0).unwrap();
        assert_eq!(s.count(s.index_of(2.0).unwrap()), 1.0);
        assert_eq!(s.count(s.index_of(3.0).unwrap()), 1.0);
    }

    #[test]
    fn uniform_collapse_example() {
        let mut s = Sketch::from_counts(0.001, 16, [(1, 3.0), (2, 5.0), (4, 2.0)]).unwrap();
        s.uniform_collapse();
        assert_eq!(counts(&s), vec![(1, 8.0), (2, 2.0)]);
        assert_eq!(s.collapse_count(), 1);
        // 2α / (1 + α²) at α = 0.001, 50-digit oracle.
        assert!((s.alpha() - 0.001_999_998_000_002).abs() < 1e-17);

        let mut neg = Sketch::from_counts(0.1, 16, [(-3, 1.0), (-2, 1.0), (-1, 1.0), (0, 1.0)])
            .unwrap();
        neg.uniform_collapse();
        assert_eq!(counts(&neg), vec![(-1, 2.0), (0, 2.0)]);
    }

    #[test]
    fn collapsing_empty_sketch_updates_accuracy() {
        let mut s = Sketch::<f64>::new(0.5, 8).unwrap();
        s.uniform_collapse();
        assert!(s.is_empty());
        assert_eq!(s.gamma(), 9.0);
        assert!((s.alpha() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn ddsketch_collapse_examples() {
        let mut s = Sketch::from_counts(0.01, 16, [(1, 3.0), (2, 5.0), (4, 2.0)]).unwrap();
        s.ddsketch_collapse().unwrap();
        assert_eq!(counts(&s), vec![(2, 8.0), (4, 2.0)]);
        assert_eq!(s.total_count(), 10.0);
        assert_eq!(s.collapse_count(), 0);

        let mut s = Sketch::from_counts(0.01, 16, [(7, 1.0), (9, 1.0)]).unwrap();
        s.ddsketch_collapse().unwrap();
        assert_eq!(counts(&s), vec![(9, 2.0)]);
        assert!(matches!(s.ddsketch_collapse(), Err(Error::Precondition(_))));
    }

    #[test]
    fn equalize_examples() {
        let mut a = Sketch::<f64>::new(0.001, 64).unwrap();
        let mut b = Sketch::<f64>::new(0.001, 64).unwrap();
        b.uniform_collapse();
        b.uniform_collapse();
        equalize_alpha(&mut a, &mut b).unwrap();
        assert_eq!((a.collapse_count(), b.collapse_count()), (2, 2));
        assert_eq!(a.alpha(), b.alpha());

        equalize_alpha(&mut a, &mut b).unwrap();
        assert_eq!((a.collapse_count(), b.collapse_count()), (2, 2));

        let mut c = Sketch::<f64>::new(0.001, 64).unwrap();
        let mut d = Sketch::<f64>::new(0.002, 64).unwrap();
        assert!(matches!(equalize_alpha(&mut c, &mut d), Err(Error::IncompatibleSketches)));
        assert_eq!(c.collapse_count(), 0);
    }

    #[test]
    fn merge_examples() {
        let a = Sketch::from_counts(0.01, 16, [(1, 4.0)]).unwrap();
        let b = Sketch::from_counts(0.01, 16, [(1, 2.0)]).unwrap();
        assert_eq!(counts(&merge_avg(&a, &b).unwrap()), vec![(1, 3.0)]);

        let a = Sketch::from_counts(0.01, 16, [(1, 2.0)]).unwrap();
        let b = Sketch::from_counts(0.01, 16, [(3, 4.0)]).unwrap();
        assert_eq!(counts(&merge_avg(&a, &b).unwrap()), vec![(1, 1.0), (3, 2.0)]);

        let mut c = Sketch::<f64>::new(0.01, 32).unwrap();
        for x in 1..200 {
            c.insert(x as f64).unwrap();
        }
        assert_eq!(merge_avg(&c, &c).unwrap(), c);
    }

    #[test]
    fn merge_respects_space_bound() {
        let a = Sketch::from_counts(0.01, 4, (0..4).map(|i| (i, 1.0))).unwrap();
        let b = Sketch::from_counts(0.01, 4, (4..8).map(|i| (i, 1.0))).unwrap();
        let m = merge_avg(&a, &b).unwrap();
        // 8 buckets -> 5 after one halving -> 3 after two
        assert_eq!(m.len(), 3);
        assert_eq!(m.collapse_count(), 2);
        assert_eq!(m.total_count(), 4.0);
    }

    #[test]
    fn theoretical_bound_examples() {
        let b = theoretical_bound(1.0_f64, 100.0, 1024).unwrap();
        // 50-digit oracle: γ̃ = 1.00451178020472..., α̂ = 0.00450160222754...
        assert!((b.gamma_tilde - 1.004_511_780_204_729).abs() < 1e-13);
        assert!((b.alpha_hat - 0.004_501_602_227_548).abs() < 1e-13);

        let b = theoretical_bound(7.0_f64, 7.0, 100).unwrap();
        assert_eq!(b.gamma_tilde, 1.0);
        assert_eq!(b.alpha_hat, 0.0);

        let b = theoretical_bound(2.0_f64, 50.0, 2).unwrap();
        assert_eq!(b.gamma_tilde, 25.0);

        assert!(theoretical_bound(0.0_f64, 1.0, 8).is_err());
        assert!(theoretical_bound(2.0_f64, 1.0, 8).is_err());
    }

    #[test]
    fn local_quantile_examples() {
        let s = Sketch::from_counts(0.01_f64, 16, [(5, 10.0)]).unwrap();
        let expected = 2.0 * s.gamma().powi(5) / (s.gamma() + 1.0);
        for q in [0.0, 0.3, 1.0] {
            assert!((s.local_quantile(q, 10.0).unwrap() - expected).abs() < 1e-12);
        }

        let s = Sketch::from_counts(0.01, 16, [(-2, 1.0), (3, 4.0), (8, 5.0)]).unwrap();
        assert_eq!(s.local_quantile(0.0, 10.0).unwrap(), s.bucket_value(-2));
        assert_eq!(s.local_quantile(0.5, 10.0).unwrap(), s.bucket_value(3));
        assert_eq!(s.local_quantile(1.0, 10.0).unwrap(), s.bucket_value(8));

        let empty = Sketch::<f64>::new(0.01, 16).unwrap();
        assert!(matches!(empty.local_quantile(0.5, 1.0), Err(Error::EmptySketch)));
        assert!(s.local_quantile(1.5, 10.0).is_err());
    }

    #[test]
    fn record_round_trip() {
        let mut s = Sketch::<f64>::new(0.001, 32).unwrap();
        for x in 1..500 {
            s.insert(x as f64 * 1.7).unwrap();
        }
        let json = serde_json::to_string(&s.to_record()).unwrap();
        let back: SketchRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(Sketch::<f64>::from_record(&back).unwrap(), s);
    }

    #[test]
    fn works_with_f32() {
        let mut s = Sketch::<f32>::new(0.01, 64).unwrap();
        for x in 1..1000 {
            s.insert(x as f32).unwrap();
        }
        assert_eq!(s.total_count(), 999.0);
        let median = s.local_quantile(0.5, 999.0).unwrap();
        assert!((median - 500.0).abs() / 500.0 <= s.alpha() * 1.0001);
    }
}
