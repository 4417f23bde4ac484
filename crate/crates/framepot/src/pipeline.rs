//! The steps behind each subcommand, usable without the CLI.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use framepot_core::analysis::{bootstrap_layer_estimate, linear_scaling_fit, theory_bound_k2, LayerStatus};
use framepot_core::estimator::{bootstrap_frame_potential, derive_seed, frame_potential, sample_traces};
use framepot_core::stats::summarize;
use framepot_core::{EnsembleSpec, Family, TerminationPolicy, TraceSampleStore};

use crate::error::Result;
use crate::parallel::ThreadedEvaluator;
use crate::tables::{ensemble_label, label_family, FramePotentialRow, LayerRow, PartitionRow, SlopeRow, TheoryRow};

/// Master seed of the store for `spec` under a run seed, so every `(n, l)`
/// in a sweep gets an independent stream.
pub fn store_master_seed(run_seed: u64, spec: &EnsembleSpec) -> u64 {
    derive_seed(run_seed, &[spec.qubits as u64, spec.layers as u64])
}

/// Samples one store with `workers` threads. `budget` bounds the wall
/// clock, checked after each batch.
pub fn sample_store(
    spec: &EnsembleSpec,
    policy: &TerminationPolicy,
    master_seed: u64,
    width_cap: usize,
    workers: usize,
    budget: Option<Duration>,
) -> Result<TraceSampleStore> {
    let mut eval = ThreadedEvaluator::new(workers, width_cap);
    let start = Instant::now();
    let store = sample_traces(spec, policy, master_seed, width_cap, &mut eval, || {
        budget.is_some_and(|b| start.elapsed() >= b)
    })?;
    Ok(store)
}

fn percentile_triplet(dist: &framepot_core::stats::BootstrapDistribution) -> (f64, f64, f64) {
    match summarize(dist, &[0.9]) {
        Ok(s) => (s.median, s.intervals[0].lower, s.intervals[0].upper),
        Err(_) => (f64::NAN, f64::NAN, f64::NAN),
    }
}

/// One frame potential row per `k`, all from the same traces.
pub fn estimate_rows(store: &TraceSampleStore, ks: &[u32], replicates: usize, seed: u64) -> Result<Vec<FramePotentialRow>> {
    let spec = store.spec();
    let boot = bootstrap_frame_potential(store, ks, replicates, derive_seed(seed, &[store.master_seed()]))?;
    ks.iter()
        .zip(&boot)
        .map(|(&k, dist)| {
            let est = frame_potential(store, k)?;
            let (boot_median, boot_p05, boot_p95) = percentile_triplet(dist);
            Ok(FramePotentialRow {
                ensemble: ensemble_label(spec),
                n: spec.qubits,
                l: spec.layers,
                k,
                value: est.value,
                std_error: est.std_error,
                rel_dev: est.rel_dev,
                boot_median,
                boot_p05,
                boot_p95,
            })
        })
        .collect()
}

/// Groups stores into depth curves keyed by `(ensemble label, n)`.
pub fn group_curves(stores: Vec<TraceSampleStore>) -> BTreeMap<(String, usize), BTreeMap<u32, TraceSampleStore>> {
    let mut groups: BTreeMap<(String, usize), BTreeMap<u32, TraceSampleStore>> = BTreeMap::new();
    for s in stores {
        let key = (ensemble_label(s.spec()), s.spec().qubits);
        groups.entry(key).or_default().insert(s.spec().layers as u32, s);
    }
    groups
}

/// Bootstrapped layer estimate for one curve. Curves too short to fit
/// come back as a missing row rather than an error.
pub fn layer_row(
    label: &str,
    n: usize,
    curve: &BTreeMap<u32, TraceSampleStore>,
    k: u32,
    epsilon: f64,
    replicates: usize,
    seed: u64,
) -> Result<LayerRow> {
    let missing = || LayerRow {
        ensemble: label.to_string(),
        n,
        k,
        epsilon,
        layers_median: f64::NAN,
        p05: f64::NAN,
        p95: f64::NAN,
        status: LayerStatus::Missing.name().to_string(),
    };
    match bootstrap_layer_estimate(curve, k, epsilon, replicates, derive_seed(seed, &[n as u64, u64::from(k)])) {
        Ok((est, dist)) => {
            let (_, p05, p95) = percentile_triplet(&dist);
            Ok(LayerRow { layers_median: est.layers, p05, p95, status: est.status.name().to_string(), ..missing() })
        }
        Err(framepot_core::Error::TooFewPoints { .. }) => Ok(missing()),
        Err(e) => Err(e.into()),
    }
}

/// Layers-versus-n lines per `(ensemble, k)`. The Local family is fitted on
/// layers per qubit. Rows without a finite median are skipped; groups with
/// fewer than three usable points produce no line.
pub fn slope_rows(layers: &[LayerRow]) -> Vec<SlopeRow> {
    let mut groups: BTreeMap<(String, u32), Vec<(f64, f64)>> = BTreeMap::new();
    for r in layers.iter().filter(|r| r.layers_median.is_finite()) {
        let y = if label_family(&r.ensemble) == Some(Family::Local) {
            r.layers_median / r.n as f64
        } else {
            r.layers_median
        };
        groups.entry((r.ensemble.clone(), r.k)).or_default().push((r.n as f64, y));
    }
    groups
        .into_iter()
        .filter_map(|((ensemble, k), pairs)| {
            let fit = linear_scaling_fit(&pairs).ok()?;
            Some(SlopeRow { ensemble, k, slope: fit.slope, intercept: fit.intercept, r2: fit.r2 })
        })
        .collect()
}

pub fn theory_rows(ns: &[usize], ls: &[usize]) -> Vec<TheoryRow> {
    let q = EnsembleSpec::LOCAL_DIM;
    ns.iter()
        .flat_map(|&n| {
            ls.iter().map(move |&l| {
                let bound = theory_bound_k2(n as u32, l as u32, q);
                TheoryRow { n, l, q, bound_k2: bound, rel_dev: bound / 2.0 - 1.0 }
            })
        })
        .collect()
}

pub fn partition_rows(store: &TraceSampleStore, parts: usize, ks: &[u32]) -> Result<Vec<PartitionRow>> {
    let spec = store.spec();
    let mut rows = Vec::new();
    for &k in ks {
        let curves = framepot_core::analysis::partition_diagnostic(store, parts, k)?;
        for (part, est) in curves.into_iter().enumerate() {
            rows.push(PartitionRow {
                ensemble: ensemble_label(spec),
                n: spec.qubits,
                l: spec.layers,
                k,
                part,
                samples: est.sample_count,
                value: est.value,
                std_error: est.std_error,
                rel_dev: est.rel_dev,
            });
        }
    }
    Ok(rows)
}
