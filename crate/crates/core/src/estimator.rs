//! Monte Carlo estimation of the frame potential from sampled traces.
//!
//! Each sample draws a pair `(U, V)` from the ensemble using a random
//! stream derived only from `(master_seed, sample_index)` and stores the
//! complex trace `Tr(U†V)`. Every moment `k` is then computed from the same
//! stored traces.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::circuit::{build_trace_circuit, Circuit, EnsembleSpec};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::stats::{replicate_rng, resample_indices, BootstrapDistribution};
use crate::tensornet::{build_network, BasisState, Contractor};

/// Relative slack on `|t| ≤ 2^n` for rounding in the contraction.
const TRACE_BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub index: u64,
    pub seed: u64,
    pub trace: C64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sample `index` under `master_seed`.
pub fn sample_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Mixes extra coordinates (such as `n` and `l`) into a seed.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// The circuit pair `(U, V)` for one sample seed.
pub fn draw_pair(spec: &EnsembleSpec, seed: u64) -> Result<(Circuit, Circuit)> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let u = spec.sample(&mut rng)?;
    let v = spec.sample(&mut rng)?;
    Ok((u, v))
}

/// `Tr(U†V) = 2^n ⟨0…0| trace circuit |0…0⟩` by tensor-network contraction.
pub fn trace_by_contraction(u: &Circuit, v: &Circuit, contractor: &mut Contractor) -> Result<C64> {
    let tc = build_trace_circuit(u, v)?;
    let zeros = BasisState::zeros(tc.qubit_count());
    let net = build_network(&tc, &zeros, &zeros)?;
    let amp = contractor.amplitude(&net)?;
    Ok(amp * 2f64.powi(u.qubit_count() as i32))
}

/// Width of the trace network for sample `index`, without contracting it.
pub fn probe_width(spec: &EnsembleSpec, master_seed: u64, index: u64, contractor: &mut Contractor) -> Result<usize> {
    let (u, v) = draw_pair(spec, sample_seed(master_seed, index))?;
    let tc = build_trace_circuit(&u, &v)?;
    let zeros = BasisState::zeros(tc.qubit_count());
    let net = build_network(&tc, &zeros, &zeros)?;
    Ok(contractor.plan(&net)?.width())
}

pub fn evaluate_sample(spec: &EnsembleSpec, master_seed: u64, index: u64, contractor: &mut Contractor) -> Result<TraceSample> {
    let seed = sample_seed(master_seed, index);
    let (u, v) = draw_pair(spec, seed)?;
    let trace = trace_by_contraction(&u, &v, contractor)?;
    Ok(TraceSample { index, seed, trace })
}

/// Append-only record of sampled traces for one ensemble spec.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSampleStore {
    spec: EnsembleSpec,
    master_seed: u64,
    samples: Vec<TraceSample>,
    suspect: bool,
}

impl TraceSampleStore {
    pub fn new(spec: EnsembleSpec, master_seed: u64) -> Self {
        Self { spec, master_seed, samples: Vec::new(), suspect: false }
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Set when sampling stopped on a cap while the estimate sat below `k!`.
    pub fn is_suspect(&self) -> bool {
        self.suspect
    }

    pub fn set_suspect(&mut self, suspect: bool) {
        self.suspect = suspect;
    }

    /// Appends a sample; indices must be contiguous from 0 and `|t| ≤ 2^n`.
    pub fn push(&mut self, sample: TraceSample) -> Result<()> {
        let expected = self.samples.len() as u64;
        if sample.index != expected {
            return Err(Error::InvalidSample(format!("index {} where {expected} was expected", sample.index)));
        }
        let bound = 2f64.powi(self.spec.qubits as i32);
        if !(sample.trace.norm() <= bound * (1.0 + TRACE_BOUND_SLACK)) {
            return Err(Error::InvalidSample(format!("|trace| = {} exceeds 2^n = {bound}", sample.trace.norm())));
        }
        self.samples.push(sample);
        Ok(())
    }

    /// `|t|^{2k}` for every sample, in index order.
    pub fn moments(&self, k: u32) -> Vec<f64> {
        self.samples.iter().map(|s| s.trace.norm_sqr().powi(k as i32)).collect()
    }

    /// A store holding the samples in `range` of this one, re-indexed from 0.
    pub fn slice(&self, range: Range<usize>) -> Self {
        let samples = self.samples[range]
            .iter()
            .enumerate()
            .map(|(i, s)| TraceSample { index: i as u64, ..*s })
            .collect();
        Self { spec: self.spec, master_seed: self.master_seed, samples, suspect: self.suspect }
    }
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePotentialEstimate {
    pub k: u32,
    pub value: f64,
    pub std_error: f64,
    pub sample_count: usize,
    /// `(value - k!) / k!`
    pub rel_dev: f64,
}

impl FramePotentialEstimate {
    /// Estimate from precomputed `|t|^{2k}` values, summed in order.
    pub fn from_moments(k: u32, moments: &[f64]) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::EmptyStore);
        }
        let n = moments.len();
        let value = moments.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let ss: f64 = moments.iter().map(|m| (m - value) * (m - value)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        let haar = factorial(k);
        Ok(Self { k, value, std_error, sample_count: n, rel_dev: (value - haar) / haar })
    }
}

/// Mean of `|t|^{2k}` over the store with its standard error.
pub fn frame_potential(store: &TraceSampleStore, k: u32) -> Result<FramePotentialEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    FramePotentialEstimate::from_moments(k, &store.moments(k))
}

/// Bootstrap distributions of the frame potential for several `k`, all
/// drawn from one shared set of resampled indices per replicate.
pub fn bootstrap_frame_potential(store: &TraceSampleStore, ks: &[u32], replicates: usize, seed: u64) -> Result<Vec<BootstrapDistribution>> {
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one replicate".into()));
    }
    let n = store.len();
    let norms: Vec<f64> = store.samples.iter().map(|s| s.trace.norm_sqr()).collect();
    let mut values = vec_of(ks.len(), replicates);
    let mut idx = Vec::with_capacity(n);
    let mut sums = alloc::vec![0.0; ks.len()];
    for r in 0..replicates {
        let mut rng = replicate_rng(seed, r);
        resample_indices(&mut rng, n, &mut idx);
        sums.fill(0.0);
        for &i in &idx {
            let x = norms[i];
            for (s, &k) in sums.iter_mut().zip(ks) {
                *s += x.powi(k as i32);
            }
        }
        for (v, s) in values.iter_mut().zip(&sums) {
            v.push(s / n as f64);
        }
    }
    Ok(ks
        .iter()
        .zip(values)
        .map(|(k, v)| BootstrapDistribution {
            replicate_values: v,
            statistic_name: format!("frame_potential_k{k}"),
            failed_replicates: 0,
        })
        .collect())
}

fn vec_of(count: usize, capacity: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| Vec::with_capacity(capacity)).collect()
}

/// Outcome of the diamond-norm bound `ε_max = d^k √(𝓕 - k!)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonMax {
    Bound(f64),
    /// The estimate lies below `k!`, so the deviation is statistically zero.
    StatisticallyZero,
}

pub fn epsilon_max(est: &FramePotentialEstimate, n: u32, q: u32) -> EpsilonMax {
    let excess = est.value - factorial(est.k);
    if excess < 0.0 {
        return EpsilonMax::StatisticallyZero;
    }
    let d_k = (f64::from(q)).powi((n * est.k) as i32);
    EpsilonMax::Bound(d_k * excess.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerminationPolicy {
    pub min_samples: usize,
    pub max_samples: usize,
    /// Standard errors above `k!` that count as resolved.
    pub confidence_multiplier: f64,
    pub wall_clock_budget: Option<f64>,
    /// Frame potentials of a shallower circuit, keyed by `k`.
    pub reference_estimates: BTreeMap<u32, f64>,
    pub monitored_k: u32,
}

impl TerminationPolicy {
    /// Exactly `samples` samples, no adaptive stopping.
    pub fn fixed(samples: usize) -> Self {
        Self {
            min_samples: samples,
            max_samples: samples,
            confidence_multiplier: 3.0,
            wall_clock_budget: None,
            reference_estimates: BTreeMap::new(),
            monitored_k: 2,
        }
    }

    pub fn adaptive(min_samples: usize, max_samples: usize, monitored_k: u32) -> Self {
        Self { min_samples, max_samples, monitored_k, ..Self::fixed(min_samples) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_samples == 0 || self.min_samples > self.max_samples {
            return Err(Error::InvalidPolicy(format!(
                "need 0 < min_samples ({}) <= max_samples ({})",
                self.min_samples, self.max_samples
            )));
        }
        if !(self.confidence_multiplier > 0.0) {
            return Err(Error::InvalidPolicy("confidence multiplier must be positive".into()));
        }
        if self.monitored_k == 0 {
            return Err(Error::InvalidPolicy("monitored k must be at least 1".into()));
        }
        Ok(())
    }

    /// Decision after a completed batch.
    pub fn decide(&self, store: &TraceSampleStore, budget_exhausted: bool) -> Result<Decision> {
        let n = store.len();
        if n >= self.max_samples {
            return Ok(Decision::Stop(StopReason::MaxSamples));
        }
        if budget_exhausted {
            return Ok(Decision::Stop(StopReason::Budget));
        }
        if n < self.min_samples {
            return Ok(Decision::Continue);
        }
        let est = frame_potential(store, self.monitored_k)?;
        let haar = factorial(self.monitored_k);
        let below_reference = self.reference_estimates.get(&self.monitored_k).is_some_and(|&r| est.value < r);
        if est.value < haar || below_reference {
            return Ok(Decision::Continue);
        }
        if est.value > haar + self.confidence_multiplier * est.std_error {
            return Ok(Decision::Stop(StopReason::Resolved));
        }
        Ok(Decision::Continue)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Resolved,
    MaxSamples,
    Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Continue,
    Stop(StopReason),
}

/// Evaluates a contiguous range of sample indices. Results must come back
/// in index order whatever the implementation's scheduling.
pub trait BatchEvaluator {
    fn evaluate(&mut self, spec: &EnsembleSpec, master_seed: u64, indices: Range<u64>) -> Result<Vec<TraceSample>>;

    /// Contraction width of sample `index`'s trace network.
    fn probe_width(&mut self, spec: &EnsembleSpec, master_seed: u64, index: u64) -> Result<usize>;
}

/// Single-threaded evaluator.
#[derive(Debug, Clone, Default)]
pub struct SequentialEvaluator {
    pub contractor: Contractor,
}

impl SequentialEvaluator {
    pub fn new(width_cap: usize) -> Self {
        Self { contractor: Contractor::new(width_cap) }
    }
}

impl BatchEvaluator for SequentialEvaluator {
    fn evaluate(&mut self, spec: &EnsembleSpec, master_seed: u64, indices: Range<u64>) -> Result<Vec<TraceSample>> {
        indices.map(|i| evaluate_sample(spec, master_seed, i, &mut self.contractor)).collect()
    }

    fn probe_width(&mut self, spec: &EnsembleSpec, master_seed: u64, index: u64) -> Result<usize> {
        probe_width(spec, master_seed, index, &mut self.contractor)
    }
}

/// Samples traces in batches of `policy.min_samples` until the policy stops.
///
/// `width_cap` is checked on the first sample's network before anything is
/// sampled. `budget_exhausted` is polled after each batch.
pub fn sample_traces<E: BatchEvaluator>(
    spec: &EnsembleSpec,
    policy: &TerminationPolicy,
    master_seed: u64,
    width_cap: usize,
    evaluator: &mut E,
    mut budget_exhausted: impl FnMut() -> bool,
) -> Result<TraceSampleStore> {
    spec.validate()?;
    policy.validate()?;
    let width = evaluator.probe_width(spec, master_seed, 0)?;
    if width > width_cap {
        return Err(Error::WidthCapExceeded { width, cap: width_cap });
    }
    let mut store = TraceSampleStore::new(*spec, master_seed);
    loop {
        let start = store.len();
        let batch = policy.min_samples.min(policy.max_samples - start);
        let range = start as u64..(start + batch) as u64;
        for s in evaluator.evaluate(spec, master_seed, range)? {
            store.push(s)?;
        }
        if let Decision::Stop(reason) = policy.decide(&store, budget_exhausted())? {
            if reason != StopReason::Resolved {
                let est = frame_potential(&store, policy.monitored_k)?;
                store.set_suspect(est.value < factorial(policy.monitored_k));
            }
            return Ok(store);
        }
    }
}
