//! Nonparametric bootstrap and distribution summaries.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

pub const DEFAULT_REPLICATES: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDistribution {
    pub replicate_values: Vec<f64>,
    pub statistic_name: String,
    pub failed_replicates: usize,
}

impl BootstrapDistribution {
    pub fn len(&self) -> usize {
        self.replicate_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicate_values.is_empty()
    }

    /// Sample standard deviation of the replicates, the bootstrap standard error.
    pub fn std_error(&self) -> f64 {
        sample_std(&self.replicate_values)
    }
}

/// Random stream for one bootstrap replicate, independent of how
/// replicates are scheduled.
pub fn replicate_rng(seed: u64, replicate: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

/// Fills `out` with `len` indices drawn uniformly with replacement.
pub fn resample_indices<R: Rng + ?Sized>(rng: &mut R, len: usize, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..len).map(|_| rng.gen_range(0..len)));
}

/// Applies `statistic` to `replicates` resamples of `values`. A statistic
/// returning `None` marks a failed replicate; failures are counted, never
/// replaced.
pub fn bootstrap<F>(
    values: &[f64],
    mut statistic: F,
    replicates: usize,
    seed: u64,
    name: &str,
) -> Result<BootstrapDistribution>
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    if values.is_empty() {
        return Err(Error::InvalidArgument("bootstrap needs at least one value".into()));
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one replicate".into()));
    }
    let mut idx = Vec::with_capacity(values.len());
    let mut sample = Vec::with_capacity(values.len());
    let mut out = Vec::with_capacity(replicates);
    let mut failed = 0;
    for r in 0..replicates {
        let mut rng = replicate_rng(seed, r);
        resample_indices(&mut rng, values.len(), &mut idx);
        sample.clear();
        sample.extend(idx.iter().map(|&i| values[i]));
        match statistic(&sample) {
            Some(v) if v.is_finite() => out.push(v),
            _ => failed += 1,
        }
    }
    if out.is_empty() {
        return Err(Error::AllReplicatesFailed(replicates));
    }
    Ok(BootstrapDistribution { replicate_values: out, statistic_name: name.into(), failed_replicates: failed })
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Standard deviation with the `N - 1` denominator; zero for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Nearest-rank percentile of already sorted data, `p` in `[0, 1]`.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = (p * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lower_percentile: f64,
    pub upper_percentile: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub intervals: Vec<Interval>,
}

/// Median, extrema and central intervals. Each entry of `levels` is a
/// coverage such as `0.90`, giving the `(5%, 95%)` percentile pair.
pub fn summarize(dist: &BootstrapDistribution, levels: &[f64]) -> Result<Summary> {
    if dist.replicate_values.is_empty() {
        return Err(Error::InvalidArgument("cannot summarize an empty distribution".into()));
    }
    let mut sorted = dist.replicate_values.clone();
    sorted.sort_by(f64::total_cmp);
    let intervals = levels
        .iter()
        .map(|&level| {
            let lo = (1.0 - level) / 2.0;
            let hi = 1.0 - lo;
            Interval {
                lower_percentile: lo,
                upper_percentile: hi,
                lower: nearest_rank(&sorted, lo),
                upper: nearest_rank(&sorted, hi),
            }
        })
        .collect();
    Ok(Summary {
        median: nearest_rank(&sorted, 0.5),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        intervals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov survival function `Q(λ) = 2 Σ (-1)^{j-1} e^{-2 j² λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, effective_n: f64) -> f64 {
    let en = effective_n.sqrt();
    kolmogorov_q((en + 0.12 + 0.11 / en) * d)
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> KsResult {
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs());
    }
    KsResult { statistic: d, p_value: ks_p_value(d, n) }
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    KsResult { statistic: d, p_value: ks_p_value(d, na * nb / (na + nb)) }
}
