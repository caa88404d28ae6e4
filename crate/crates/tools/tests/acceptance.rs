//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p chang-tools --test acceptance` (add `--release`
//! for representative timings).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chang_core::chang_abelian::{refined_chang_abelian, verify_weight_family, RefinedIteration, DEFAULT_WEIGHT_BUDGET};
use chang_core::chang_fpn::{refined_chang, verify_certificate, WitnessPolicy};
use chang_core::counting::{lambda4, random_weight_quadruple, CountingContext, WeightKind, WeightQuadruple};
use chang_core::fourier::{coefficient, dft, parseval_gap, DensityMap, MapKind, SetStats};
use chang_core::group::{GroupSpec, SubspaceFp};
use chang_core::oracle::{dft_naive, lambda4_direct, minimal_refined_subspace};
use chang_core::tolerance::{chang_bound, GUARD};
use chang_core::Complex64;
use chang_tools::generators::SetGeneratorSpec;
use chang_tools::run::quadruple_seed;
use chang_tools::seeds;
use chang_tools::{run, RunConfig, Variant};
use rand::Rng;

const EPS_GRID: [f64; 3] = [0.3, 0.5, 0.7];
const SETS: usize = 50;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// `(alpha target, seed)` for the random sets of criteria 1, 2 and 8.
fn criterion1_sets() -> Vec<(f64, u64)> {
    let mut rng = seeds::stream(2024, 0);
    (0..SETS)
        .map(|i| (1.0 / 16.0 + rng.random::<f64>() * (1.0 / 4.0 - 1.0 / 16.0), 1000 + i as u64))
        .collect()
}

fn f2_10() -> GroupSpec {
    GroupSpec::prime_vector(2, 10).unwrap()
}

fn random_set(spec: &GroupSpec, density: f64, seed: u64) -> SetStats {
    SetGeneratorSpec::RandomDensity { density, seed }.generate(spec).unwrap()
}

fn criterion1() -> Outcome {
    let spec = f2_10();
    let start = Instant::now();
    let mut runs = 0;
    let mut steps = 0;
    let mut failures = Vec::new();
    let mut worst_drop = f64::INFINITY;
    for (density, seed) in criterion1_sets() {
        let a = random_set(&spec, density, seed);
        if !(1.0 / 16.0..=0.25).contains(&a.alpha()) {
            failures.push(format!("alpha {} out of range", a.alpha()));
        }
        for eps in EPS_GRID {
            let cert = refined_chang(&a, eps, WitnessPolicy::MaxViolation).unwrap();
            runs += 1;
            steps += cert.steps();
            if cert.v.dim() > chang_bound(a.alpha(), eps) {
                failures.push(format!("seed {seed} eps {eps}: dim {} > bound", cert.v.dim()));
            }
            if let Some(d) = cert.potentials().min_drop() {
                worst_drop = worst_drop.min(d - eps * eps / 2.0);
                if d < eps * eps / 2.0 - GUARD {
                    failures.push(format!("seed {seed} eps {eps}: drop {d}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(60);
    outcome(
        failures.is_empty() && fast,
        format!(
            "{runs} runs, {steps} steps, min(drop - eps^2/2) = {worst_drop:.3e}, {:.2}s{}",
            elapsed.as_secs_f64(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn criterion2() -> Outcome {
    let spec = f2_10();
    let mut failures = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let mut runs = 0;
    for (density, seed) in criterion1_sets() {
        let a = random_set(&spec, density, seed);
        for eps in EPS_GRID {
            let cert = refined_chang(&a, eps, WitnessPolicy::MaxViolation).unwrap();
            let rep = verify_certificate(&a, eps, &cert.v).unwrap();
            runs += 1;
            let expected = 1024 - (1usize << cert.v.dim());
            worst = worst.max(rep.max - eps * a.alpha());
            if rep.checked != expected || rep.max > eps * a.alpha() + GUARD || !rep.spectrum_contained {
                failures.push(format!("seed {seed} eps {eps}: {rep:?}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{runs} certificates swept, max(residual - eps*alpha) = {worst:.3e}{}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn random_subspace(p: u32, n: usize, k: usize, seed: u64) -> SubspaceFp {
    let mut rng = seeds::stream(seed, 0);
    let mut w = SubspaceFp::zero(p, n);
    while w.dim() < k {
        let v: Vec<u32> = (0..n).map(|_| rng.random_range(0..p)).collect();
        w = w.adjoin(&v);
    }
    w
}

fn criterion3() -> Outcome {
    let spec = GroupSpec::prime_vector(2, 8).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for k in [2, 4, 6] {
        let w = random_subspace(2, 8, k, 30 + k as u64);
        let a = SetStats::new(&spec, &w.element_indices()).unwrap();
        let cert = refined_chang(&a, 0.5, WitnessPolicy::MaxViolation).unwrap();
        let exact = cert.v == w.annihilator();
        ok &= exact;
        notes.push(format!("k={k}: V = A^perp {}", if exact { "yes" } else { "NO" }));
    }
    let small = GroupSpec::prime_vector(2, 6).unwrap();
    let w = random_subspace(2, 6, 4, 77);
    let a = SetStats::new(&small, &w.element_indices()).unwrap();
    let cert = refined_chang(&a, 0.5, WitnessPolicy::MaxViolation).unwrap();
    let minimal = minimal_refined_subspace(&a, 0.5).unwrap();
    let confirmed = cert.v == w.annihilator() && minimal.dim() == cert.v.dim();
    ok &= confirmed;
    notes.push(format!("F_2^6 k=4: minimal dim {} vs certificate dim {}", minimal.dim(), cert.v.dim()));
    outcome(ok, notes.join(", "))
}

fn criterion4() -> Outcome {
    let mut rng = seeds::stream(4, 0);
    let mut dft_err = 0.0f64;
    let mut l4_err = 0.0f64;
    let mut parseval = 0.0f64;
    for g in ["2^6", "3^4", "6", "12x5"] {
        let spec: GroupSpec = g.parse().unwrap();
        for _ in 0..10 {
            let maps: Vec<DensityMap> = (0..4)
                .map(|_| {
                    let v = (0..spec.order())
                        .map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
                        .collect();
                    DensityMap::new(&spec, v, MapKind::Generic).unwrap()
                })
                .collect();
            for m in &maps {
                let fast = dft(m);
                let slow = dft_naive(m).unwrap();
                let scale = slow.values().iter().map(|c| c.norm()).fold(0.0, f64::max);
                for (x, y) in fast.values().iter().zip(slow.values()) {
                    dft_err = dft_err.max((x - y).norm() / scale);
                }
                parseval = parseval.max(parseval_gap(m));
            }
            let f = lambda4(&maps[0], &maps[1], &maps[2], &maps[3]).unwrap();
            let d = lambda4_direct([&maps[0], &maps[1], &maps[2], &maps[3]]).unwrap();
            l4_err = l4_err.max((f - d).norm() / d.norm());
        }
    }
    outcome(
        dft_err <= 1e-10 && l4_err <= 1e-9 && parseval <= 1e-10,
        format!("dft rel {dft_err:.2e}, lambda4 rel {l4_err:.2e}, parseval gap {parseval:.2e}"),
    )
}

/// Half of a random codimension-2 subspace: density 1/8 with a nontrivial
/// certificate.
fn planted_set(spec: &GroupSpec) -> SetStats {
    let u = random_subspace(2, 9, 7, 55);
    let mut rng = seeds::stream(56, 0);
    let elems = u.element_indices();
    let picked: Vec<usize> = rand::seq::index::sample(&mut rng, elems.len(), 64)
        .into_iter()
        .map(|i| elems[i])
        .collect();
    SetStats::new(spec, &picked).unwrap()
}

fn criterion5() -> Outcome {
    let spec = GroupSpec::prime_vector(2, 9).unwrap();
    let eps = 0.5;
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    let instances = [("planted", planted_set(&spec)), ("random", random_set(&spec, 0.125, 9))];
    for (name, a) in instances {
        assert_eq!(a.size(), 64);
        let ctx = CountingContext::new(&a, eps, WitnessPolicy::MaxViolation).unwrap();
        let bound = eps * eps * a.alpha().powi(3) + GUARD;
        let mut checks = 0;
        let mut worst: f64 = 0.0;
        let mut chain = true;
        let mut record = |q: &WeightQuadruple| {
            let r = ctx.check(q).unwrap();
            checks += 1;
            worst = worst.max(r.discrepancy);
            chain &= r.chain_holds && r.passed;
        };
        record(&WeightQuadruple::ones(ctx.cosets()));
        for kind in WeightKind::ALL {
            for i in 0..100 {
                record(&random_weight_quadruple(ctx.cosets(), quadruple_seed(5, kind, i), kind));
            }
        }
        let adv = ctx.adversarial_quadruple(seeds::child(5, seeds::ADVERSARY_STREAM, 0), 5, 25).unwrap();
        record(&adv);
        let inst_ok = checks >= 301 && worst <= bound && chain;
        ok &= inst_ok;
        notes.push(format!(
            "{name}: codim W={}, {checks} checks, max|Delta|={worst:.3e} <= {bound:.3e}, chain {}",
            ctx.certificate().v.dim(),
            if chain { "ok" } else { "BROKEN" }
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    notes.push(format!("{:.2}s", elapsed.as_secs_f64()));
    outcome(ok, notes.join("; "))
}

fn criterion6() -> Outcome {
    let eps = 0.6;
    let mut ok = true;
    let mut notes = Vec::new();
    for g in ["12x5", "2x9x5"] {
        let spec: GroupSpec = g.parse().unwrap();
        let mut rounds = Vec::new();
        for seed in 0..10 {
            let a = random_set(&spec, 0.2, seed);
            let (cert, fam) = refined_chang_abelian(&a, eps, WitnessPolicy::MaxViolation, DEFAULT_WEIGHT_BUDGET).unwrap();
            let rep = verify_weight_family(&a, eps, &cert.delta, fam.weights()).unwrap();
            let cap = (1.0 / a.alpha()).ln() + GUARD;
            let phi_ok = cert
                .trace
                .iter()
                .all(|s| s.potential_after - s.potential_before > eps * eps / 2.0 - GUARD && s.potential_after <= cap);
            let inst = cert.delta.len() <= chang_bound(a.alpha(), eps)
                && rep.passed
                && rep.dissociated == Some(true)
                && rep.min_value >= 0.0
                && phi_ok
                && cert.sweep.max <= eps + GUARD;
            ok &= inst;
            rounds.push(cert.delta.len());
        }
        notes.push(format!("{g}: r per seed {rounds:?}"));
    }
    outcome(ok, notes.join("; "))
}

fn criterion7() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    // A = {0, 1, 2} in Z_8 has c = (1 + sqrt 2) / 3 at eta = 1;
    // A = {0, 1, 2, 3} in Z_16 has c = |sum_{k<4} w^k| / 4 with w = exp(i pi / 8).
    let cases: [(&str, Vec<usize>, f64); 2] = [
        ("8", vec![0, 1, 2], (1.0 + 2f64.sqrt()) / 3.0),
        (
            "16",
            vec![0, 1, 2, 3],
            (0..4)
                .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / 8.0))
                .sum::<Complex64>()
                .norm()
                / 4.0,
        ),
    ];
    for (g, members, c) in cases {
        let spec: GroupSpec = g.parse().unwrap();
        let a = SetStats::new(&spec, &members).unwrap();
        let mut it = RefinedIteration::new(&a, 0.6).unwrap();
        let w = it.find_witness(WitnessPolicy::MaxViolation).unwrap();
        let measured = coefficient(a.indicator(), w.xi).norm() / a.alpha();
        it.step(w.xi).unwrap();
        let phi = it.phi();
        let closed = (1.0 + c) / 2.0 * (1.0 + c).ln() + (1.0 - c) / 2.0 * (1.0 - c).ln();
        let case_ok = (measured - c).abs() < 1e-12 && (phi - closed).abs() < 1e-10 && phi >= c * c / 2.0;
        ok &= case_ok;
        notes.push(format!("Z_{g}: c={c:.6}, |Phi_1 - closed form|={:.1e}", (phi - closed).abs()));
    }
    outcome(ok, notes.join("; "))
}

fn criterion8() -> Outcome {
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (density, seed) in criterion1_sets() {
        for eps in EPS_GRID {
            let cert_for = |threads: usize| {
                let mut cfg = RunConfig::new(Variant::FpnRefined);
                cfg.group = Some("2^10".into());
                cfg.generator = Some(SetGeneratorSpec::RandomDensity { density, seed });
                cfg.eps = Some(eps);
                cfg.threads = Some(threads);
                cfg.trace = true;
                run(&cfg).unwrap().artifact("certificate.json").unwrap().to_string()
            };
            let one = cert_for(1);
            let again = cert_for(1);
            let four = cert_for(4);
            compared += 1;
            if one != again || one != four {
                mismatches.push(format!("seed {seed} eps {eps}"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{compared} configurations, runs at 1/1/4 threads byte-identical: {}", if mismatches.is_empty() { "yes".into() } else { mismatches.join(", ") }),
    )
}

fn main() -> ExitCode {
    // libtest-style arguments (--nocapture, filters) are ignored
    let criteria: [Criterion; 8] = [
        ("dimension/iteration bound", criterion1),
        ("exhaustive verification", criterion2),
        ("subspace fixed point", criterion3),
        ("Fourier/oracle equivalence", criterion4),
        ("localized counting uniform estimate", criterion5),
        ("abelian refined certificate", criterion6),
        ("closed-form one-round check", criterion7),
        ("determinism", criterion8),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        all &= o.passed;
        println!("{} criterion {} ({name}): {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
