//! The `Lambda_4` form and the counting lemmas.
//!
//! `Lambda_4(f1, f2, f3, f4) = E_{x1 + x2 = x3 + x4} f1(x1) f2(x2)
//! conj(f3(x3) f4(x4))`, normalised by `|G|^3`. The localized check compares
//! `Lambda_4(q_i 1_A)` with `Lambda_4(q_i g)`, where `g` averages `1_A` over
//! the cosets of `W = V^perp` and the weights `q_i` are arbitrary functions of
//! the coset with `|q_i| <= 1`. Besides the headline inequality it recomputes
//! the intermediate quantities of the argument: the fibre correlations
//! `a_gamma(z)` for characters `gamma` of `W`, their Parseval identity on each
//! coset, and each link of the chain
//! `|Delta| <= sum_{gamma != 0} Lambda_4(a_gamma)
//!          <= sum_{gamma != 0} (E_z a_gamma)^2 E_z a_gamma^2
//!          <= eps^2 alpha^2 sum_{gamma != 0} E_z a_gamma^2 <= eps^2 alpha^3`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chang_fpn::{refined_chang, ChangCertificateFpn, WitnessPolicy};
use crate::fourier::{coset_average, dft_values, idft_values, DensityMap, FiberSpectrum, Fibers, MapKind, SetStats};
use crate::group::{CosetMap, GroupSpec};
use crate::tolerance::GUARD;
use crate::{Error, Result};

/// Constancy and sup-norm slack for weight quadruples.
pub const QUADRUPLE_TOL: f64 = 1e-12;
/// Agreement required between two lifts of the same character of `W`.
pub const LIFT_TOL: f64 = 1e-12;
/// Per-coset Parseval slack.
pub const PARSEVAL_TOL: f64 = 1e-10;

/// `sum_xi f1^(xi) f2^(xi) conj(f3^(xi) f4^(xi))`.
pub fn lambda4(f1: &DensityMap, f2: &DensityMap, f3: &DensityMap, f4: &DensityMap) -> Result<Complex64> {
    let spec = f1.spec();
    for g in [f2, f3, f4] {
        spec.check_same(g.spec())?;
    }
    Ok(lambda4_values(spec, [f1.values(), f2.values(), f3.values(), f4.values()]))
}

fn lambda4_values(spec: &GroupSpec, f: [&[Complex64]; 4]) -> Complex64 {
    let [a, b, c, d] = f.map(|v| dft_values(spec, v));
    (0..spec.order()).map(|xi| a[xi] * b[xi] * (c[xi] * d[xi]).conj()).sum()
}

/// `Lambda_4` of one real function on a quotient; `None` is the trivial group.
fn lambda4_real(spec: Option<&GroupSpec>, values: &[f64]) -> f64 {
    match spec {
        None => libm::pow(values[0], 4.0),
        Some(s) => {
            let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            lambda4_values(s, [&v, &v, &v, &v]).re
        }
    }
}

/// `|{(x, y, z, w) in A^4 : x + y = z + w}| / |G|^3 = sum_xi |1_A^(xi)|^4`.
pub fn additive_energy(a: &SetStats) -> f64 {
    let f = a.indicator();
    dft_values(a.spec(), f.values()).iter().map(|c| c.norm_sqr() * c.norm_sqr()).sum()
}

/// `sum_xi |q^(xi)|`.
pub fn l1_fourier_norm(q: &DensityMap) -> f64 {
    dft_values(q.spec(), q.values()).iter().map(|c| c.norm()).sum()
}

/// Four weights, each constant on the cosets of `W` with modulus at most one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightQuadruple {
    w: CosetMap,
    q: [DensityMap; 4],
}

impl WeightQuadruple {
    pub fn new(w: &CosetMap, q: [DensityMap; 4]) -> Result<Self> {
        for (i, qi) in q.iter().enumerate() {
            qi.spec().check_same(w.spec())?;
            let vals = qi.values();
            if let Some(x) = vals.iter().position(|v| v.norm() > 1.0 + QUADRUPLE_TOL) {
                return Err(Error::InvalidQuadruple(alloc::format!("|q_{}({x})| > 1", i + 1)));
            }
            for l in 0..w.coset_count() {
                let coset = w.coset(l);
                let first = vals[coset[0]];
                if coset.iter().any(|&x| (vals[x] - first).norm() > QUADRUPLE_TOL) {
                    return Err(Error::InvalidQuadruple(alloc::format!(
                        "q_{} is not constant on coset {l}",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { w: w.clone(), q })
    }

    /// Builds the weights from one value per coset label.
    pub fn from_coset_values(w: &CosetMap, values: [Vec<Complex64>; 4]) -> Result<Self> {
        let spec = w.spec();
        let mut maps = Vec::with_capacity(4);
        for v in values {
            if v.len() != w.coset_count() {
                return Err(Error::InvalidQuadruple(alloc::format!(
                    "{} values for {} cosets",
                    v.len(),
                    w.coset_count()
                )));
            }
            let dense = (0..spec.order()).map(|x| v[w.label(x)]).collect();
            maps.push(DensityMap::new(spec, dense, MapKind::Generic)?);
        }
        let q: [DensityMap; 4] = maps.try_into().expect("four maps");
        Self::new(w, q)
    }

    /// `q_i` identically one.
    pub fn ones(w: &CosetMap) -> Self {
        let one = DensityMap::constant(w.spec(), 1.0, MapKind::Generic);
        Self {
            w: w.clone(),
            q: [one.clone(), one.clone(), one.clone(), one],
        }
    }

    pub fn cosets(&self) -> &CosetMap {
        &self.w
    }

    pub fn weights(&self) -> &[DensityMap; 4] {
        &self.q
    }

    /// One value per coset label.
    pub fn coset_values(&self, i: usize) -> Vec<Complex64> {
        let vals = self.q[i].values();
        self.w.reps().iter().map(|&r| vals[r]).collect()
    }
}

/// Distributions for [`random_weight_quadruple`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightKind {
    /// `exp(2 pi i theta)`, `theta` uniform.
    UnimodularPhase,
    /// `+1` or `-1` with equal probability.
    RealPm1,
    /// Uniform on the closed unit disk.
    ComplexDisk,
}

impl WeightKind {
    pub const ALL: [WeightKind; 3] = [WeightKind::UnimodularPhase, WeightKind::RealPm1, WeightKind::ComplexDisk];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightKind::UnimodularPhase => "unimodular_phase",
            WeightKind::RealPm1 => "real_pm1",
            WeightKind::ComplexDisk => "complex_disk",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

fn unit_phase(turns: f64) -> Complex64 {
    let t = 2.0 * core::f64::consts::PI * turns;
    Complex64::new(libm::cos(t), libm::sin(t))
}

fn draw(rng: &mut ChaCha8Rng, kind: WeightKind) -> Complex64 {
    match kind {
        WeightKind::UnimodularPhase => unit_phase(rng.random::<f64>()),
        WeightKind::RealPm1 => Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0),
        WeightKind::ComplexDisk => {
            let r = libm::sqrt(rng.random::<f64>());
            unit_phase(rng.random::<f64>()) * r
        }
    }
}

/// One draw per coset per weight from a ChaCha8 stream seeded by `seed`.
pub fn random_weight_quadruple(w: &CosetMap, seed: u64, kind: WeightKind) -> WeightQuadruple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: [Vec<Complex64>; 4] =
        core::array::from_fn(|_| (0..w.coset_count()).map(|_| draw(&mut rng, kind)).collect());
    WeightQuadruple::from_coset_values(w, values).expect("valid by construction")
}

/// One row of the `a_gamma` table.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaRow {
    /// `gamma` as an index of `F_p^{dim W}` (coordinates against the echelon
    /// basis of `W`).
    pub gamma: usize,
    /// Least `xi` whose restriction to `W` is `gamma`.
    pub lift: usize,
    pub mean_a: f64,
    pub mean_a_sq: f64,
    /// `Lambda_4(a_gamma)` on `G / W`.
    pub lambda4_quotient: f64,
}

/// The right-hand sides of the chain, each summed over nontrivial `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainTerms {
    pub sum_lambda4: f64,
    pub sum_sup_parseval: f64,
    pub eps2_alpha2_sum: f64,
    pub eps2_alpha3: f64,
}

/// Quantities that do not depend on the weights.
#[derive(Clone, Debug)]
pub struct CountingContext {
    set: SetStats,
    eps: f64,
    certificate: ChangCertificateFpn,
    w: CosetMap,
    g: DensityMap,
    table: Vec<GammaRow>,
    chain: ChainTerms,
    max_nontrivial_mean_a: f64,
    parseval_residual: f64,
    mean_parseval_residual: f64,
    lift_residual: f64,
}

impl CountingContext {
    /// Runs the refined descent for `V` and tabulates `a_gamma` on the cosets
    /// of `W = V^perp`.
    pub fn new(a: &SetStats, eps: f64, policy: WitnessPolicy) -> Result<Self> {
        let certificate = refined_chang(a, eps, policy)?;
        Self::from_certificate(certificate)
    }

    pub fn from_certificate(certificate: ChangCertificateFpn) -> Result<Self> {
        let a = certificate.set.clone();
        let eps = certificate.eps;
        let spec = a.spec().clone();
        let fibers = Fibers::new(&certificate.v);
        let w = fibers.cosets().clone();
        let g = coset_average(a.indicator(), &w)?;
        let fs = FiberSpectrum::new(a.indicator(), &fibers)?;
        let quotient = w.quotient_spec();
        let cosets = w.coset_count();
        let width = fs.restricted_count();

        // canonical and second lift of every gamma
        let mut lifts: Vec<(Option<usize>, Option<usize>)> = alloc::vec![(None, None); width];
        for xi in 0..spec.order() {
            let slot = &mut lifts[fs.restricted_index(xi)];
            match slot {
                (None, _) => slot.0 = Some(xi),
                (Some(_), None) => slot.1 = Some(xi),
                _ => {}
            }
        }

        let size = w.coset_size() as f64;
        let mut lift_residual = 0.0f64;
        let mut table = Vec::with_capacity(width);
        for (gamma, &(first, second)) in lifts.iter().enumerate() {
            let lift = first.expect("restriction is onto");
            let a_vals: Vec<f64> = (0..cosets).map(|z| fs.magnitude(z, gamma)).collect();
            for other in [Some(lift), second].into_iter().flatten() {
                let direct = fibers.fiber_sums(a.indicator(), other)?;
                for (z, s) in direct.iter().enumerate() {
                    lift_residual = lift_residual.max(libm::fabs(s.norm() / size - a_vals[z]));
                }
            }
            let mean_a = a_vals.iter().sum::<f64>() / cosets as f64;
            let mean_a_sq = a_vals.iter().map(|v| v * v).sum::<f64>() / cosets as f64;
            table.push(GammaRow {
                gamma,
                lift,
                mean_a,
                mean_a_sq,
                lambda4_quotient: lambda4_real(quotient.as_ref(), &a_vals),
            });
        }

        let g_vals = g.real_values();
        let parseval_residual = (0..cosets)
            .map(|z| {
                let total: f64 = (0..width).map(|t| { let m = fs.magnitude(z, t); m * m }).sum();
                libm::fabs(total - g_vals[w.reps()[z]])
            })
            .fold(0.0, f64::max);
        let mean_parseval_residual = libm::fabs(table.iter().map(|r| r.mean_a_sq).sum::<f64>() - a.alpha());

        let alpha = a.alpha();
        let nontrivial = &table[1..];
        let chain = ChainTerms {
            sum_lambda4: nontrivial.iter().map(|r| r.lambda4_quotient).sum(),
            sum_sup_parseval: nontrivial.iter().map(|r| r.mean_a * r.mean_a * r.mean_a_sq).sum(),
            eps2_alpha2_sum: eps * eps * alpha * alpha * nontrivial.iter().map(|r| r.mean_a_sq).sum::<f64>(),
            eps2_alpha3: eps * eps * alpha * alpha * alpha,
        };
        let max_nontrivial_mean_a = nontrivial.iter().map(|r| r.mean_a).fold(0.0, f64::max);
        Ok(Self {
            set: a,
            eps,
            certificate,
            w,
            g,
            table,
            chain,
            max_nontrivial_mean_a,
            parseval_residual,
            mean_parseval_residual,
            lift_residual,
        })
    }

    pub fn set(&self) -> &SetStats {
        &self.set
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn certificate(&self) -> &ChangCertificateFpn {
        &self.certificate
    }

    /// Cosets of `W`.
    pub fn cosets(&self) -> &CosetMap {
        &self.w
    }

    pub fn coset_average(&self) -> &DensityMap {
        &self.g
    }

    pub fn table(&self) -> &[GammaRow] {
        &self.table
    }

    pub fn chain(&self) -> ChainTerms {
        self.chain
    }

    /// `Delta(q)` for a quadruple on these cosets.
    pub fn discrepancy(&self, q: &WeightQuadruple) -> Result<Complex64> {
        self.check_cosets(q)?;
        let (fa, fg) = self.weighted(q);
        let spec = self.set.spec();
        Ok(lambda4_values(spec, refs(&fa)) - lambda4_values(spec, refs(&fg)))
    }

    fn check_cosets(&self, q: &WeightQuadruple) -> Result<()> {
        if q.w.subspace() != self.w.subspace() {
            return Err(Error::InvalidQuadruple("weights live on different cosets".into()));
        }
        Ok(())
    }

    fn weighted(&self, q: &WeightQuadruple) -> ([Vec<Complex64>; 4], [Vec<Complex64>; 4]) {
        let ind = self.set.indicator().values();
        let g = self.g.values();
        let mul = |f: &[Complex64], w: &DensityMap| -> Vec<Complex64> { f.iter().zip(w.values()).map(|(a, b)| a * b).collect() };
        (
            core::array::from_fn(|i| mul(ind, &q.q[i])),
            core::array::from_fn(|i| mul(g, &q.q[i])),
        )
    }

    /// Evaluates the localized estimate and the whole chain for `q`.
    pub fn check(&self, q: &WeightQuadruple) -> Result<CountingReport> {
        self.check_cosets(q)?;
        let spec = self.set.spec();
        let (fa, fg) = self.weighted(q);
        let lambda_indicator = lambda4_values(spec, refs(&fa));
        let lambda_average = lambda4_values(spec, refs(&fg));
        let delta = lambda_indicator - lambda_average;
        let l1_norms: [f64; 4] = core::array::from_fn(|i| l1_fourier_norm(&q.q[i]));
        let mut min_pair = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                min_pair = min_pair.min(l1_norms[i] * l1_norms[j]);
            }
        }
        let alpha = self.set.alpha();
        let bound = self.chain.eps2_alpha3;
        let c = self.chain;
        let abs = delta.norm();
        let chain_holds = abs <= c.sum_lambda4 + GUARD
            && c.sum_lambda4 <= c.sum_sup_parseval + GUARD
            && c.sum_sup_parseval <= c.eps2_alpha2_sum + GUARD
            && c.eps2_alpha2_sum <= c.eps2_alpha3 + GUARD;
        let diagnostics_hold = self.max_nontrivial_mean_a <= self.eps * alpha + GUARD
            && self.parseval_residual <= PARSEVAL_TOL
            && self.mean_parseval_residual <= PARSEVAL_TOL
            && self.lift_residual <= LIFT_TOL;
        Ok(CountingReport {
            alpha,
            eps: self.eps,
            codim: self.certificate.v.dim(),
            lambda_indicator,
            lambda_average,
            delta,
            discrepancy: abs,
            bound,
            classical_bound: bound * min_pair,
            table: self.table.clone(),
            chain: c,
            max_nontrivial_mean_a: self.max_nontrivial_mean_a,
            parseval_residual: self.parseval_residual,
            mean_parseval_residual: self.mean_parseval_residual,
            lift_residual: self.lift_residual,
            l1_norms,
            chain_holds,
            passed: abs <= bound + GUARD && chain_holds && diagnostics_hold,
        })
    }

    /// Coefficients `c(z)` with `Delta = sum_z q_i(z) c(z)` (slots 0, 1) or
    /// `Delta = sum_z conj(q_i(z)) c(z)` (slots 2, 3), the other weights fixed.
    fn linear_coefficients(&self, fa: &[Vec<Complex64>; 4], fg: &[Vec<Complex64>; 4], slot: usize) -> Vec<Complex64> {
        let spec = self.set.spec();
        let n = spec.order() as f64;
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); self.w.coset_count()];
        let base = [self.set.indicator().values(), self.g.values()];
        for (side, f) in [fa, fg].into_iter().enumerate() {
            let hats: Vec<Vec<Complex64>> = f.iter().map(|v| dft_values(spec, v)).collect();
            let b: Vec<Complex64> = (0..spec.order())
                .map(|xi| {
                    let h = |i: usize| hats[i][xi];
                    match slot {
                        0 => h(1) * (h(2) * h(3)).conj(),
                        1 => h(0) * (h(2) * h(3)).conj(),
                        2 => h(0) * h(1) * h(3).conj(),
                        _ => h(0) * h(1) * h(2).conj(),
                    }
                })
                .collect();
            let k = idft_values(spec, &b);
            let sign = if side == 0 { 1.0 } else { -1.0 };
            for x in 0..spec.order() {
                let kx = if slot < 2 { k[spec.neg_index(x)] } else { k[x] };
                out[self.w.label(x)] += base[side][x] * kx * (sign / n);
            }
        }
        out
    }

    /// Block-coordinate ascent on `|Delta|` over unimodular coset weights:
    /// each weight in turn is replaced by the phase-aligned maximiser with the
    /// other three held fixed. Restarts from seeded random phases and returns
    /// the best quadruple found.
    pub fn adversarial_quadruple(&self, seed: u64, restarts: usize, rounds: usize) -> Result<WeightQuadruple> {
        let mut best: Option<(f64, WeightQuadruple)> = None;
        for r in 0..restarts.max(1) {
            let mut q = random_weight_quadruple(&self.w, seed.wrapping_add(r as u64), WeightKind::UnimodularPhase);
            let mut value = self.discrepancy(&q)?.norm();
            for _ in 0..rounds {
                let before = value;
                for slot in 0..4 {
                    let (fa, fg) = self.weighted(&q);
                    let c = self.linear_coefficients(&fa, &fg, slot);
                    let mut vals: [Vec<Complex64>; 4] = core::array::from_fn(|i| q.coset_values(i));
                    vals[slot] = c
                        .iter()
                        .map(|z| {
                            let m = z.norm();
                            if m <= 1e-300 {
                                Complex64::new(1.0, 0.0)
                            } else if slot < 2 {
                                z.conj() / m
                            } else {
                                z / m
                            }
                        })
                        .collect();
                    let next = WeightQuadruple::from_coset_values(&self.w, vals)?;
                    let v = self.discrepancy(&next)?.norm();
                    if v >= value {
                        q = next;
                        value = v;
                    }
                }
                if value <= before * (1.0 + 1e-12) {
                    break;
                }
            }
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, q));
            }
        }
        Ok(best.expect("at least one restart").1)
    }
}

fn refs(f: &[Vec<Complex64>; 4]) -> [&[Complex64]; 4] {
    core::array::from_fn(|i| f[i].as_slice())
}

/// Everything computed for one weight quadruple.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingReport {
    pub alpha: f64,
    pub eps: f64,
    /// `codim W = dim V`.
    pub codim: usize,
    /// `Lambda_4(q_1 1_A, ..., q_4 1_A)`.
    pub lambda_indicator: Complex64,
    /// `Lambda_4(q_1 g, ..., q_4 g)`.
    pub lambda_average: Complex64,
    pub delta: Complex64,
    /// `|Delta|`.
    pub discrepancy: f64,
    /// `eps^2 alpha^3`.
    pub bound: f64,
    /// `eps^2 alpha^3 min_{i<j} ||q_i^||_1 ||q_j^||_1`, the per-quadruple
    /// bound one gets without localization.
    pub classical_bound: f64,
    pub table: Vec<GammaRow>,
    pub chain: ChainTerms,
    pub max_nontrivial_mean_a: f64,
    /// `max_z |sum_gamma a_gamma(z)^2 - g(z)|`.
    pub parseval_residual: f64,
    /// `|sum_gamma E_z a_gamma(z)^2 - alpha|`.
    pub mean_parseval_residual: f64,
    /// Largest disagreement between two lifts of the same `gamma`.
    pub lift_residual: f64,
    pub l1_norms: [f64; 4],
    pub chain_holds: bool,
    pub passed: bool,
}

/// The unweighted case `q_i = 1`: `|Lambda_4(1_A) - Lambda_4(g)| <= eps^2 alpha^3`.
pub fn classical_counting_check(a: &SetStats, eps: f64) -> Result<CountingReport> {
    let ctx = CountingContext::new(a, eps, WitnessPolicy::default())?;
    ctx.check(&WeightQuadruple::ones(ctx.cosets()))
}

/// The weighted estimate for one quadruple, whose cosets must be those of
/// `W = V^perp` for the certificate `refined_chang(A, eps)` produces.
pub fn localized_counting_check(a: &SetStats, eps: f64, q: &WeightQuadruple) -> Result<CountingReport> {
    CountingContext::new(a, eps, WitnessPolicy::default())?.check(q)
}
