//! Self-check suite behind `framepot validate`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use framepot_core::analysis::{theory_bound_k2, theory_decay_length, theory_slope_k2};
use framepot_core::circuit::build_trace_circuit;
use framepot_core::estimator::{bootstrap_frame_potential, factorial, frame_potential, trace_by_contraction};
use framepot_core::oracle::{dense_amplitude, dense_trace};
use framepot_core::tensornet::build_network;
use framepot_core::{BasisState, Circuit, Contractor, EnsembleSpec, Entangler, TerminationPolicy};

use crate::error::Result;
use crate::pipeline::sample_store;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

const SEED: u64 = 0x5eed;
const HAAR_SAMPLES: usize = 200_000;

fn random_spec(rng: &mut ChaCha8Rng, family: usize) -> EnsembleSpec {
    let n = rng.gen_range(2..=5);
    let l = rng.gen_range(1..=4);
    match family {
        0 => EnsembleSpec::parallel(n, l),
        1 => EnsembleSpec::local(n, l * n),
        2 => EnsembleSpec::hardware_efficient(n, l, Entangler::Cnot),
        _ => EnsembleSpec::hardware_efficient(n, l, Entangler::Cz),
    }
}

fn oracle_check() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut contractor = Contractor::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    for family in 0..4 {
        for _ in 0..20 {
            let spec = random_spec(&mut rng, family);
            let c = spec.sample(&mut rng)?;
            let n = spec.qubits;
            let input = BasisState::from_index(n, rng.gen_range(0..1 << n));
            let output = BasisState::from_index(n, rng.gen_range(0..1 << n));
            let tn = contractor.amplitude(&build_network(&c, &input, &output)?)?;
            worst = worst.max((tn - dense_amplitude(&c, &input, &output)?).norm());
            count += 1;
        }
    }
    Ok(Check::new("oracle amplitudes", worst < 1e-10, format!("{count} circuits, max |Δ| = {worst:.2e}")))
}

fn trace_check() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut contractor = Contractor::default();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let spec = EnsembleSpec::parallel(rng.gen_range(2..=4), rng.gen_range(1..=4));
        let u = spec.sample(&mut rng)?;
        let v = spec.sample(&mut rng)?;
        let exact = dense_trace(&u, &v)?;
        let got = trace_by_contraction(&u, &v, &mut contractor)?;
        worst = worst.max((got - exact).norm() / exact.norm().max(1.0));
    }
    let mut identity_err = 0.0f64;
    for n in 1..=10 {
        let id = Circuit::new(n)?;
        let tc = build_trace_circuit(&id, &id)?;
        let z = BasisState::zeros(2 * n);
        let amp = contractor.amplitude(&build_network(&tc, &z, &z)?)?;
        identity_err = identity_err.max((amp - framepot_core::C64::new(1.0, 0.0)).norm());
    }
    Ok(Check::new(
        "trace identity",
        worst < 1e-9 && identity_err < 1e-12,
        format!("max relative error {worst:.2e}, identity amplitude error {identity_err:.2e}"),
    ))
}

fn haar_check() -> Result<Vec<Check>> {
    let spec = EnsembleSpec::parallel(2, 1);
    let store = sample_store(&spec, &TerminationPolicy::fixed(HAAR_SAMPLES), SEED, 27, 1, None)?;
    let ks = [1, 2, 3];
    let boot = bootstrap_frame_potential(&store, &ks, 300, SEED)?;
    ks.iter()
        .zip(boot)
        .map(|(&k, dist)| {
            let est = frame_potential(&store, k)?;
            let se = dist.std_error();
            let z = (est.value - factorial(k)) / se;
            Ok(Check::new(
                &format!("haar k={k}"),
                z.abs() <= 3.0,
                format!("F = {:.4} vs {}, {:.2} bootstrap SE", est.value, factorial(k), z),
            ))
        })
        .collect()
}

fn closed_form_check() -> Check {
    let c = theory_decay_length(2);
    let slope = theory_slope_k2(2);
    let bound = theory_bound_k2(4, 2, 2);
    Check::new(
        "closed forms",
        (c - 4.4814).abs() < 1e-4 && (slope - 6.213).abs() < 0.01 && (bound - 3.28).abs() < 1e-12,
        format!("C = {c:.5}, slope = {slope:.4}, bound(4,2) = {bound}"),
    )
}

/// Runs every check; the caller decides what a failure means.
pub fn run_checks() -> Result<Vec<Check>> {
    let mut checks = vec![oracle_check()?, trace_check()?];
    checks.extend(haar_check()?);
    checks.push(closed_form_check());
    Ok(checks)
}
