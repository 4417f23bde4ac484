//! Exponential-decay fits of the frame potential and the circuit depth they
//! imply for an ε-approximate k-design.
//!
//! All logarithms are natural.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::estimator::{factorial, frame_potential, FramePotentialEstimate, TraceSampleStore};
use crate::stats::{nearest_rank, replicate_rng, resample_indices, BootstrapDistribution};

/// Points with `(𝓕 - k!)/k!` at or above this are outside the decay regime.
pub const FIT_REGION_MAX_REL_DEV: f64 = 5.0;
pub const MIN_FIT_POINTS: usize = 3;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_PARTITIONS: usize = 3;
/// Reported full-scale slope of layers against qubits for the parallel
/// ensemble at k = 2. Needs n up to 50, so it is documentation only.
pub const REFERENCE_PARALLEL_K2_SLOPE: f64 = 4.38;

/// Keeps points with `0 < rel_dev < 5`.
pub fn select_fit_region(curve: &[(u32, FramePotentialEstimate)], k: u32) -> Result<Vec<(u32, FramePotentialEstimate)>> {
    let haar = factorial(k);
    let kept: Vec<_> = curve
        .iter()
        .filter(|(_, e)| {
            let rel = (e.value - haar) / haar;
            rel > 0.0 && rel < FIT_REGION_MAX_REL_DEV
        })
        .copied()
        .collect();
    if kept.len() < MIN_FIT_POINTS {
        return Err(Error::FitRegion { found: kept.len(), needed: MIN_FIT_POINTS });
    }
    Ok(kept)
}

/// `deviation ≈ A² e^{-2l/C}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub amplitude: f64,
    pub decay_length: f64,
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
    /// False when the fitted curve does not decay.
    pub converged: bool,
}

impl ExponentialFit {
    pub fn deviation_at(&self, layers: f64) -> f64 {
        (self.intercept + self.slope * layers).exp()
    }
}

fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateRegression);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok((slope, intercept, r2))
}

/// Unweighted least squares of `ln deviation` on `l`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExponentialFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { found: points.len(), needed: MIN_FIT_POINTS });
    }
    if let Some(&(_, d)) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::NonPositiveDeviation(d));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(l, d)| (l, d.ln())).collect();
    let (slope, intercept, _) = least_squares(&logs)?;
    let converged = slope < 0.0;
    Ok(ExponentialFit {
        amplitude: (intercept / 2.0).exp(),
        decay_length: if converged { -2.0 / slope } else { f64::INFINITY },
        slope,
        intercept,
        points_used: points.len(),
        converged,
    })
}

/// `l = C (k n ln q + ln A + ln(1/ε))`.
pub fn layers_for_epsilon(fit: &ExponentialFit, n: u32, k: u32, q: u32, epsilon: f64) -> Result<f64> {
    if !fit.converged {
        return Err(Error::NotConverged);
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let nk = f64::from(k) * f64::from(n);
    Ok(fit.decay_length * (nk * f64::from(q).ln() + fit.amplitude.ln() + (1.0 / epsilon).ln()))
}

/// Upper bound `2 (1 + (2q/(q²+1))^{2(l-1)})^{⌊n/2⌋ - 1}` on the k = 2
/// frame potential of the parallel ensemble.
pub fn theory_bound_k2(n: u32, l: u32, q: u32) -> f64 {
    let q = f64::from(q);
    let groups = (n / 2) as i32;
    let ratio = 2.0 * q / (q * q + 1.0);
    2.0 * (1.0 + ratio.powi(2 * (l as i32 - 1))).powi(groups - 1)
}

/// `C = 1 / ln((q²+1)/(2q))`.
pub fn theory_decay_length(q: u32) -> f64 {
    let q = f64::from(q);
    1.0 / ((q * q + 1.0) / (2.0 * q)).ln()
}

/// `l = C (2n ln q + ln n + ln(1/ε))`.
pub fn theory_layers_k2(n: u32, q: u32, epsilon: f64) -> f64 {
    theory_decay_length(q) * (2.0 * f64::from(n) * f64::from(q).ln() + f64::from(n).ln() + (1.0 / epsilon).ln())
}

/// Slope of [`theory_layers_k2`] in `n`.
pub fn theory_slope_k2(q: u32) -> f64 {
    2.0 * theory_decay_length(q) * f64::from(q).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares of layers on qubit count, intercept unconstrained.
pub fn linear_scaling_fit(pairs: &[(f64, f64)]) -> Result<LinearFit> {
    if pairs.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { found: pairs.len(), needed: MIN_FIT_POINTS });
    }
    let (slope, intercept, r2) = least_squares(pairs)?;
    Ok(LinearFit { slope, intercept, r2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerStatus {
    Ok,
    Missing,
}

impl LayerStatus {
    pub fn name(self) -> &'static str {
        match self {
            LayerStatus::Ok => "ok",
            LayerStatus::Missing => "missing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerEstimate {
    /// Median over successful bootstrap replicates; NaN when none succeeded.
    pub layers: f64,
    pub epsilon: f64,
    pub k: u32,
    pub n: u32,
    pub status: LayerStatus,
}

/// Region selection, fit and layer solve for one curve.
pub fn layers_from_curve(curve: &[(u32, FramePotentialEstimate)], n: u32, k: u32, epsilon: f64) -> Result<f64> {
    let region = select_fit_region(curve, k)?;
    let haar = factorial(k);
    let points: Vec<(f64, f64)> = region.iter().map(|(l, e)| (f64::from(*l), e.value - haar)).collect();
    let fit = fit_exponential(&points)?;
    layers_for_epsilon(&fit, n, k, 2, epsilon)
}

/// Bootstraps the layers needed for an ε-approximate k-design.
///
/// Each replicate resamples every store's traces with replacement, recomputes
/// 𝓕 per depth, selects the fit region, fits and solves for the depth. A
/// single failed replicate marks the estimate missing.
pub fn bootstrap_layer_estimate(
    stores: &BTreeMap<u32, TraceSampleStore>,
    k: u32,
    epsilon: f64,
    replicates: usize,
    seed: u64,
) -> Result<(LayerEstimate, BootstrapDistribution)> {
    if stores.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { found: stores.len(), needed: MIN_FIT_POINTS });
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one replicate".into()));
    }
    let n = {
        let mut ns = stores.values().map(|s| s.spec().qubits);
        let first = ns.next().expect("non-empty");
        if ns.any(|x| x != first) {
            return Err(Error::InvalidArgument("stores mix qubit counts".into()));
        }
        first as u32
    };
    let moments: Vec<(u32, Vec<f64>)> = stores
        .iter()
        .map(|(&l, s)| if s.is_empty() { Err(Error::EmptyStore) } else { Ok((l, s.moments(k))) })
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(replicates);
    let mut failed = 0;
    let mut idx = Vec::new();
    let mut resampled = Vec::new();
    let mut curve = Vec::with_capacity(moments.len());
    for r in 0..replicates {
        let mut rng = replicate_rng(seed, r);
        curve.clear();
        for (l, m) in &moments {
            resample_indices(&mut rng, m.len(), &mut idx);
            resampled.clear();
            resampled.extend(idx.iter().map(|&i| m[i]));
            curve.push((*l, FramePotentialEstimate::from_moments(k, &resampled)?));
        }
        match layers_from_curve(&curve, n, k, epsilon) {
            Ok(layers) if layers.is_finite() => values.push(layers),
            _ => failed += 1,
        }
    }
    let layers = if values.is_empty() {
        f64::NAN
    } else {
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        nearest_rank(&sorted, 0.5)
    };
    let status = if failed > 0 { LayerStatus::Missing } else { LayerStatus::Ok };
    Ok((
        LayerEstimate { layers, epsilon, k, n, status },
        BootstrapDistribution { replicate_values: values, statistic_name: format!("layers_k{k}"), failed_replicates: failed },
    ))
}

/// Frame potential of `parts` contiguous index blocks; the last block takes
/// the remainder.
pub fn partition_diagnostic(store: &TraceSampleStore, parts: usize, k: u32) -> Result<Vec<FramePotentialEstimate>> {
    let n = store.len();
    if parts == 0 || n < parts {
        return Err(Error::TooFewSamples { samples: n, parts });
    }
    let block = n / parts;
    (0..parts)
        .map(|p| {
            let end = if p + 1 == parts { n } else { (p + 1) * block };
            frame_potential(&store.slice(p * block..end), k)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::EnsembleSpec;
    use crate::estimator::TraceSample;
    use crate::linalg::C64;
    use alloc::vec;
    use proptest::prelude::*;

    fn est(k: u32, value: f64) -> FramePotentialEstimate {
        let h = factorial(k);
        FramePotentialEstimate { k, value, std_error: 0.0, sample_count: 1, rel_dev: (value - h) / h }
    }

    #[test]
    fn region_rule() {
        let curve: Vec<_> = [10.0, 4.0, 1.0, 0.2].iter().enumerate().map(|(i, r)| (i as u32 + 1, est(2, 2.0 * (1.0 + r)))).collect();
        let kept = select_fit_region(&curve, 2).unwrap();
        assert_eq!(kept.iter().map(|p| p.0).collect::<Vec<_>>(), [2, 3, 4]);
        let with_negative = [(1, est(2, 9.0)), (2, est(2, 4.0)), (3, est(2, 3.0)), (4, est(2, 2.5)), (5, est(2, 1.98))];
        assert_eq!(select_fit_region(&with_negative, 2).unwrap().len(), 4);
        let far = [(1, est(1, 7.0)), (2, est(1, 6.5)), (3, est(1, 6.0))];
        assert_eq!(select_fit_region(&far, 1), Err(Error::FitRegion { found: 0, needed: 3 }));
    }

    #[test]
    fn exact_exponential_recovery() {
        let pts: Vec<_> = (1..=6).map(|l| (l as f64, (-(l as f64)).exp())).collect();
        let fit = fit_exponential(&pts).unwrap();
        assert!((fit.amplitude - 1.0).abs() < 1e-9);
        assert!((fit.decay_length - 2.0).abs() < 1e-9);
        assert!(fit.converged);
        let (a, c) = (3.0f64, 5.0f64);
        let pts: Vec<_> = (1..=6).map(|l| (l as f64, a * a * (-2.0 * l as f64 / c).exp())).collect();
        let fit = fit_exponential(&pts).unwrap();
        assert!((fit.amplitude - a).abs() / a < 1e-9);
        assert!((fit.decay_length - c).abs() / c < 1e-9);
    }

    #[test]
    fn fit_errors() {
        let rising: Vec<_> = (1..=4).map(|l| (l as f64, l as f64)).collect();
        assert!(!fit_exponential(&rising).unwrap().converged);
        assert_eq!(fit_exponential(&[(1.0, 1.0), (2.0, 0.0), (3.0, 0.5)]), Err(Error::NonPositiveDeviation(0.0)));
        assert!(fit_exponential(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        let fit = fit_exponential(&rising).unwrap();
        assert_eq!(layers_for_epsilon(&fit, 4, 2, 2, 0.1), Err(Error::NotConverged));
    }

    #[test]
    fn layer_formula() {
        let fit = ExponentialFit { amplitude: 1.0, decay_length: 2.0, slope: -1.0, intercept: 0.0, points_used: 3, converged: true };
        let l = layers_for_epsilon(&fit, 4, 2, 2, 0.1).unwrap();
        assert!((l - 15.6955).abs() < 1e-3, "{l}");
        let l = layers_for_epsilon(&fit, 5, 3, 2, 1.0).unwrap();
        assert!((l - 2.0 * 15.0 * 2f64.ln()).abs() < 1e-12);
        assert!(layers_for_epsilon(&fit, 4, 2, 2, 0.0).is_err());
    }

    #[test]
    fn theory_values() {
        assert_eq!(theory_bound_k2(2, 7, 2), 2.0);
        assert!((theory_bound_k2(4, 2, 2) - 3.28).abs() < 1e-12);
        assert!((theory_bound_k2(8, 400, 2) - 2.0).abs() < 1e-12);
        assert!((theory_decay_length(2) - 4.4814).abs() < 1e-4);
        assert!((theory_slope_k2(2) - 6.213).abs() < 0.01);
        assert!((theory_layers_k2(10, 2, 0.1) - 82.77).abs() < 0.05);
    }

    #[test]
    fn theory_bound_monotone() {
        for n in 4..20 {
            for l in 1..30 {
                assert!(theory_bound_k2(n, l + 1, 2) < theory_bound_k2(n, l, 2));
            }
        }
        for n in (2..20).step_by(2) {
            assert!(theory_bound_k2(n + 2, 3, 2) > theory_bound_k2(n, 3, 2));
        }
    }

    #[test]
    fn linear_fit() {
        let pts: Vec<_> = (2..8).map(|n| (n as f64, 2.0 * n as f64 + 1.0)).collect();
        let f = linear_scaling_fit(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
        assert_eq!(linear_scaling_fit(&[(3.0, 1.0), (3.0, 2.0), (3.0, 5.0)]), Err(Error::DegenerateRegression));

        let mut rng = replicate_rng(17, 0);
        let noisy: Vec<_> = (0..40)
            .map(|i| {
                let x = 2.0 + i as f64 * 0.5;
                let e: f64 = rand::Rng::sample(&mut rng, rand_distr::StandardNormal);
                (x, 4.0 * x - 3.0 + 0.1 * e)
            })
            .collect();
        assert!((linear_scaling_fit(&noisy).unwrap().slope - 4.0).abs() < 0.1);
    }

    fn constant_store(n: usize, l: usize, magnitude: f64, count: usize) -> TraceSampleStore {
        let mut s = TraceSampleStore::new(EnsembleSpec::parallel(n, l), 0);
        for i in 0..count {
            s.push(TraceSample { index: i as u64, seed: 0, trace: C64::new(magnitude, 0.0) }).unwrap();
        }
        s
    }

    #[test]
    fn bootstrap_layers_on_exact_fixture() {
        // |t|^4 = 2 + e^{-l} at every sample, so every replicate is identical
        let n = 4;
        let stores: BTreeMap<u32, TraceSampleStore> =
            (1..=5u32).map(|l| (l, constant_store(n, l as usize, (2.0 + (-(l as f64)).exp()).powf(0.25), 20))).collect();
        let (est, dist) = bootstrap_layer_estimate(&stores, 2, 0.1, 50, 3).unwrap();
        assert_eq!(est.status, LayerStatus::Ok);
        assert_eq!(dist.failed_replicates, 0);
        let expected = 2.0 * (2.0 * n as f64 * 2f64.ln() + 10f64.ln());
        assert!((est.layers - expected).abs() < 1e-9, "{} vs {expected}", est.layers);
        assert!(dist.replicate_values.iter().all(|v| (v - expected).abs() < 1e-9));
    }

    #[test]
    fn bootstrap_layers_missing_when_any_replicate_fails() {
        let n = 4;
        let mut stores: BTreeMap<u32, TraceSampleStore> =
            (1..=3u32).map(|l| (l, constant_store(n, l as usize, (2.0 + (-(l as f64)).exp()).powf(0.25), 20))).collect();
        // one deep store with mostly tiny traces and one huge outlier: some
        // resamples keep the outlier (rel_dev ≥ 5), others drop it
        let mut s = constant_store(n, 3, 0.9, 39);
        s.push(TraceSample { index: 39, seed: 0, trace: C64::new(3.3, 0.0) }).unwrap();
        stores.insert(3, s);
        let (est, dist) = bootstrap_layer_estimate(&stores, 2, 0.1, 40, 1).unwrap();
        assert_eq!(est.status, LayerStatus::Missing);
        assert!(dist.failed_replicates > 0);

        let far: BTreeMap<u32, TraceSampleStore> = (1..=3u32).map(|l| (l, constant_store(n, l as usize, 3.0, 5))).collect();
        let (est, dist) = bootstrap_layer_estimate(&far, 2, 0.1, 10, 1).unwrap();
        assert_eq!(est.status, LayerStatus::Missing);
        assert!(est.layers.is_nan());
        assert!(dist.is_empty());
        assert_eq!(dist.failed_replicates, 10);
    }

    #[test]
    fn partitions() {
        let s = constant_store(2, 1, 1.5, 9);
        let parts = partition_diagnostic(&s, DEFAULT_PARTITIONS, 2).unwrap();
        assert_eq!(parts.len(), 3);
        assert!(parts.iter().all(|p| p.sample_count == 3 && p.value == parts[0].value));
        let s = constant_store(2, 1, 1.5, 11);
        let parts = partition_diagnostic(&s, 3, 1).unwrap();
        assert_eq!(parts.iter().map(|p| p.sample_count).collect::<Vec<_>>(), vec![3, 3, 5]);
        assert!(partition_diagnostic(&constant_store(2, 1, 1.0, 2), 3, 1).is_err());
    }

    proptest! {
        #[test]
        fn fit_inverts_synthesis(a in 0.5f64..10.0, c in 0.5f64..10.0) {
            let pts: Vec<_> = (1..=8).map(|l| (l as f64, a * a * (-2.0 * l as f64 / c).exp())).collect();
            let fit = fit_exponential(&pts).unwrap();
            prop_assert!((fit.amplitude - a).abs() / a < 1e-9);
            prop_assert!((fit.decay_length - c).abs() / c < 1e-9);
        }

        #[test]
        fn layers_monotone(n in 2u32..40, k in 1u32..6, eps in 1e-4f64..0.9, a in 0.5f64..10.0, c in 0.5f64..10.0) {
            let fit = ExponentialFit { amplitude: a, decay_length: c, slope: -2.0 / c, intercept: 2.0 * a.ln(), points_used: 3, converged: true };
            let base = layers_for_epsilon(&fit, n, k, 2, eps).unwrap();
            prop_assert!(layers_for_epsilon(&fit, n + 1, k, 2, eps).unwrap() > base);
            prop_assert!(layers_for_epsilon(&fit, n, k + 1, 2, eps).unwrap() > base);
            prop_assert!(layers_for_epsilon(&fit, n, k, 2, eps / 2.0).unwrap() > base);
            let step1 = layers_for_epsilon(&fit, n + 1, k, 2, eps).unwrap() - base;
            let step2 = layers_for_epsilon(&fit, n + 2, k, 2, eps).unwrap() - layers_for_epsilon(&fit, n + 1, k, 2, eps).unwrap();
            prop_assert!((step1 - step2).abs() < 1e-9 * base.abs().max(1.0));
        }
    }
}
