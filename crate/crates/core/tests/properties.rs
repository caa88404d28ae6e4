use chang_core::chang_fpn::{refined_chang, WitnessPolicy};
use chang_core::fourier::{coset_average, dft, idft, DensityMap, MapKind, SetStats};
use chang_core::group::{is_dissociated, CosetMap, GroupSpec, SpanSet, SubspaceFp};
use chang_core::oracle::span_enumerate_naive;
use chang_core::tolerance::chang_bound;
use proptest::prelude::*;

fn small_group() -> impl Strategy<Value = GroupSpec> {
    prop::collection::vec(2u32..7, 1..4)
        .prop_filter("order", |f| f.iter().product::<u32>() <= 128)
        .prop_map(|f| GroupSpec::new(f).unwrap())
}

fn random_set(spec: &GroupSpec, seed: u64, density: f64) -> SetStats {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<usize> = (0..spec.order()).filter(|_| rng.random::<f64>() < density).collect();
    if members.is_empty() {
        members.push(rng.random_range(0..spec.order()));
    }
    SetStats::new(spec, &members).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pairing_is_bilinear_and_symmetric(spec in small_group(), a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
        let n = spec.order();
        let (a, b, c) = (a % n, b % n, c % n);
        let l = spec.exponent();
        prop_assert_eq!(spec.pairing_numerator(a, spec.add_index(b, c)),
            (spec.pairing_numerator(a, b) + spec.pairing_numerator(a, c)) % l);
        prop_assert_eq!(spec.pairing_numerator(a, b), spec.pairing_numerator(b, a));
        prop_assert_eq!(spec.pairing_numerator(0, b), 0);
    }

    #[test]
    fn index_roundtrip(spec in small_group(), x in 0usize..1000) {
        let x = x % spec.order();
        let e = spec.element_from_index(x);
        prop_assert_eq!(spec.canonical_index(&e).unwrap(), x);
        prop_assert_eq!(spec.add_index(x, spec.neg_index(x)), 0);
    }

    #[test]
    fn dft_inverts(spec in small_group(), seed in any::<u64>()) {
        let a = random_set(&spec, seed, 0.3);
        let back = idft(&dft(a.indicator()));
        for (u, v) in back.values().iter().zip(a.indicator().values()) {
            prop_assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn span_matches_enumeration(spec in small_group(), gens in prop::collection::vec(0usize..1000, 0..6)) {
        let mut span = SpanSet::new(&spec);
        let mut delta = Vec::new();
        for g in gens {
            let g = g % spec.order();
            if let Ok(next) = span.extend(g) {
                span = next;
                delta.push(g);
            }
        }
        prop_assert!(is_dissociated(&spec, &delta, 16).unwrap());
        let naive: Vec<usize> = span_enumerate_naive(&spec, &delta).unwrap().into_iter().collect();
        prop_assert_eq!(span.members(), naive);
    }

    #[test]
    fn coset_average_is_idempotent(seed in any::<u64>(), gens in prop::collection::vec(prop::collection::vec(0u32..3, 4), 0..3)) {
        let spec = GroupSpec::prime_vector(3, 4).unwrap();
        let w = SubspaceFp::from_generators(3, 4, &gens).unwrap();
        let map = CosetMap::new(&w);
        let a = random_set(&spec, seed, 0.4);
        let g = coset_average(a.indicator(), &map).unwrap();
        let gg = coset_average(&g, &map).unwrap();
        for (u, v) in g.values().iter().zip(gg.values()) {
            prop_assert!((u - v).norm() < 1e-12);
        }
        prop_assert!((g.mean() - a.indicator().mean()).norm() < 1e-12);
    }

    #[test]
    fn refined_chang_invariants(seed in any::<u64>(), density in 0.05f64..0.5, eps in 0.3f64..0.8) {
        let spec = GroupSpec::prime_vector(2, 7).unwrap();
        let a = random_set(&spec, seed, density);
        let cert = refined_chang(&a, eps, WitnessPolicy::MaxViolation).unwrap();
        prop_assert!(cert.v.dim() <= chang_bound(a.alpha(), eps));
        prop_assert!(cert.verification.passed && cert.verification.spectrum_contained);
        let drop = cert.potentials().min_drop();
        prop_assert!(drop.is_none_or(|d| d >= eps * eps / 2.0 - 1e-9));
        prop_assert!(cert.trace.iter().all(|s| s.psi_after >= -1e-12));
    }

    #[test]
    fn lambda4_is_invariant_under_translation(seed in any::<u64>(), t in 0usize..60) {
        let spec: GroupSpec = "12x5".parse().unwrap();
        let a = random_set(&spec, seed, 0.3);
        let f = a.indicator();
        let shifted: Vec<_> = (0..60).map(|x| f.values()[spec.sub_index(x, t)]).collect();
        let s = DensityMap::new(&spec, shifted, MapKind::Indicator).unwrap();
        let e1 = chang_core::counting::lambda4(f, f, f, f).unwrap();
        let e2 = chang_core::counting::lambda4(&s, &s, &s, &s).unwrap();
        prop_assert!((e1 - e2).norm() < 1e-12);
    }
}
