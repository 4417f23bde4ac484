use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use framepot_core::analysis::theory_bound_k2;
use framepot_core::circuit::ANGLE_PERIOD;
use framepot_core::estimator::trace_by_contraction;
use framepot_core::linalg::unitarity_error4;
use framepot_core::oracle::dense_trace;
use framepot_core::{Contractor, EnsembleSpec, Entangler, GateKind, HaarMode, Wires};

fn spec_strategy(max_n: usize, max_l: usize) -> impl Strategy<Value = EnsembleSpec> {
    (0..5usize, 2..=max_n, 1..=max_l).prop_map(|(family, n, l)| match family {
        0 => EnsembleSpec::parallel(n, l),
        1 => EnsembleSpec::local(n, l * n),
        2 => EnsembleSpec::local(n, l * n).with_haar_mode(HaarMode::PhaseParam),
        3 => EnsembleSpec::hardware_efficient(n, l, Entangler::Cnot),
        _ => EnsembleSpec::hardware_efficient(n, l, Entangler::Cz),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instances_are_well_formed(spec in spec_strategy(10, 8), seed in any::<u64>()) {
        let c = spec.sample(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(c.is_nearest_neighbor());
        for g in c.gates() {
            match (g.kind(), g.wires()) {
                (GateKind::RotX(a) | GateKind::RotY(a) | GateKind::RotZ(a), _) => {
                    prop_assert!((0.0..ANGLE_PERIOD).contains(a));
                }
                (GateKind::TwoQubitUnitary(m), _) => prop_assert!(unitarity_error4(m) <= 1e-12),
                (_, Wires::Two(a, b)) => prop_assert!(a != b && a.max(b) < spec.qubits),
                _ => {}
            }
        }
    }

    #[test]
    fn contracted_trace_matches_dense(spec in spec_strategy(5, 4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = spec.sample(&mut rng).unwrap();
        let v = spec.sample(&mut rng).unwrap();
        let exact = dense_trace(&u, &v).unwrap();
        let got = trace_by_contraction(&u, &v, &mut Contractor::default()).unwrap();
        prop_assert!((got - exact).norm() <= 1e-9 * exact.norm().max(1.0));
        prop_assert!(got.norm() <= (1u64 << spec.qubits) as f64 * (1.0 + 1e-12));
        prop_assert!((dense_trace(&v, &u).unwrap() - exact.conj()).norm() <= 1e-10);
    }

    #[test]
    fn theory_bound_shape(n in 2u32..40, l in 1u32..40) {
        let b = theory_bound_k2(n, l, 2);
        prop_assert!(b >= 2.0);
        if n >= 4 {
            prop_assert!(theory_bound_k2(n, l + 1, 2) < b);
        }
        // the bound only depends on ⌊n/2⌋
        prop_assert!(theory_bound_k2(n + 2, l, 2) > b);
    }
}

#[test]
fn theory_bound_tends_to_two() {
    assert!((theory_bound_k2(12, 200, 2) - 2.0).abs() < 1e-12);
}
