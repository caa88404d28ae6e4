use chang_core::fourier::{dft, parseval_gap, DensityMap, MapKind, SetStats};
use chang_core::group::GroupSpec;
use chang_core::oracle::{cosetwise_l1_naive, dft_naive, lambda4_direct, span_enumerate_naive};
use chang_core::{counting, fourier, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn groups() -> Vec<GroupSpec> {
    ["2^6", "3^4", "6", "12x5", "2^3", "5^2", "4x4", "2x9x5", "7", "2^8"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

fn random_map(spec: &GroupSpec, rng: &mut ChaCha8Rng) -> DensityMap {
    let values = (0..spec.order())
        .map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
        .collect();
    DensityMap::new(spec, values, MapKind::Generic).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn dft_agrees_with_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in groups() {
        for _ in 0..3 {
            let f = random_map(&spec, &mut rng);
            let fast = dft(&f);
            let slow = dft_naive(&f).unwrap();
            let scale = slow.values().iter().map(|c| c.norm()).fold(0.0, f64::max);
            for (a, b) in fast.values().iter().zip(slow.values()) {
                assert!((a - b).norm() <= 1e-10 * scale, "{spec}");
            }
            assert!(parseval_gap(&f) <= 1e-10);
        }
    }
}

#[test]
fn lambda4_agrees_with_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for spec in groups() {
        for _ in 0..10 {
            let f: Vec<DensityMap> = (0..4).map(|_| random_map(&spec, &mut rng)).collect();
            let fast = counting::lambda4(&f[0], &f[1], &f[2], &f[3]).unwrap();
            let slow = lambda4_direct([&f[0], &f[1], &f[2], &f[3]]).unwrap();
            assert!(rel(fast, slow) <= 1e-9, "{spec}: {fast} vs {slow}");
        }
    }
}

#[test]
fn additive_energy_counts_quadruples() {
    let spec: GroupSpec = "12x5".parse().unwrap();
    let members: Vec<usize> = (0..60).filter(|x| x % 7 < 2).collect();
    let a = SetStats::new(&spec, &members).unwrap();
    let mut count = 0usize;
    for &x in &members {
        for &y in &members {
            for &z in &members {
                let w = spec.sub_index(spec.add_index(x, y), z);
                if members.contains(&w) {
                    count += 1;
                }
            }
        }
    }
    let expected = count as f64 / 60f64.powi(3);
    assert!((counting::additive_energy(&a) - expected).abs() < 1e-12);
}

#[test]
fn cosetwise_l1_agrees_with_naive() {
    use chang_core::group::SubspaceFp;
    let spec = GroupSpec::prime_vector(3, 4).unwrap();
    let members: Vec<usize> = (0..81).filter(|x| (x * 13 + 5) % 17 < 4).collect();
    let a = SetStats::new(&spec, &members).unwrap();
    let v = SubspaceFp::from_generators(3, 4, &[vec![1, 2, 0, 1], vec![0, 1, 1, 0]]).unwrap();
    let fibers = fourier::Fibers::new(&v);
    for xi in 0..81 {
        let fast = fourier::cosetwise_l1(&a, &fibers, xi).unwrap();
        assert!((fast - cosetwise_l1_naive(&a, &v, xi)).abs() < 1e-12);
    }
}

#[test]
fn span_set_agrees_with_enumeration() {
    use chang_core::group::SpanSet;
    let spec: GroupSpec = "2x9x5".parse().unwrap();
    let mut span = SpanSet::new(&spec);
    let mut delta = Vec::new();
    for xi in [1usize, 7, 40, 55] {
        if let Ok(next) = span.extend(xi) {
            span = next;
            delta.push(xi);
        }
        let naive: Vec<usize> = span_enumerate_naive(&spec, &delta).unwrap().into_iter().collect();
        assert_eq!(span.members(), naive);
    }
}
