use chang_core::chang_abelian::{
    classical_chang_abelian, potential_phi, refined_chang_abelian, verify_weight_family, RefinedIteration,
    DEFAULT_WEIGHT_BUDGET,
};
use chang_core::chang_fpn::WitnessPolicy;
use chang_core::fourier::{coefficient, SetStats};
use chang_core::group::GroupSpec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn random_set(spec: &GroupSpec, seed: u64, density: f64) -> SetStats {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<usize> = (0..spec.order()).filter(|_| rng.random::<f64>() < density).collect();
    if members.is_empty() {
        members.push(0);
    }
    SetStats::new(spec, &members).unwrap()
}

#[test]
fn one_round_matches_closed_form() {
    // A = {0, 1, 2} in Z_8: the top correlation is at eta = 1 (and 7), with
    // c = |1 + w + w^2| / 3 = (1 + sqrt 2) / 3 for w = exp(i pi / 4).
    let spec: GroupSpec = "8".parse().unwrap();
    let a = SetStats::new(&spec, &[0, 1, 2]).unwrap();
    let c = (1.0 + 2f64.sqrt()) / 3.0;
    let mut it = RefinedIteration::new(&a, 0.6).unwrap();
    let w = it.find_witness(WitnessPolicy::MaxViolation).expect("a witness");
    assert_eq!(w.xi, 1);
    assert!((coefficient(a.indicator(), 1).norm() / a.alpha() - c).abs() < 1e-14);
    it.step(w.xi).unwrap();
    let phi = it.phi();
    let closed = (1.0 + c) / 2.0 * (1.0 + c).ln() + (1.0 - c) / 2.0 * (1.0 - c).ln();
    assert!((phi - closed).abs() < 1e-10);
    assert!(phi >= c * c / 2.0);
    assert!((potential_phi(it.family().weights(), &a) - phi).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classical_invariants(seed in any::<u64>(), density in 0.1f64..0.5, eps in 0.4f64..0.9) {
        let spec: GroupSpec = "4x3x5".parse().unwrap();
        let a = random_set(&spec, seed, density);
        let cert = classical_chang_abelian(&a, eps, WitnessPolicy::MaxViolation).unwrap();
        prop_assert!(cert.passed());
        for s in &cert.trace {
            prop_assert!(s.potential_before - s.potential_after >= eps * eps / 2.0 - 1e-9);
            prop_assert!(s.off_support <= 1e-10);
            prop_assert!(s.orthogonality_residual <= 1e-10);
        }
    }

    #[test]
    fn refined_invariants(seed in any::<u64>(), density in 0.15f64..0.5) {
        let spec: GroupSpec = "6x5".parse().unwrap();
        let eps = 0.7;
        let a = random_set(&spec, seed, density);
        let (cert, fam) = refined_chang_abelian(&a, eps, WitnessPolicy::FirstInCanonicalOrder, DEFAULT_WEIGHT_BUDGET).unwrap();
        prop_assert!(cert.passed());
        let rep = verify_weight_family(&a, eps, &cert.delta, fam.weights()).unwrap();
        prop_assert!(rep.passed);
        prop_assert!(rep.classical_max <= rep.sweep.max + 1e-12);
        let ln_inv = (1.0 / a.alpha()).ln();
        for s in &cert.trace {
            prop_assert!(s.potential_after - s.potential_before > eps * eps / 2.0 - 1e-9);
            prop_assert!(s.potential_after <= ln_inv + 1e-9);
        }
    }
}
