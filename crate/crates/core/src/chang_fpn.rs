//! Entropy descent over `F_p^n`.
//!
//! Starting from `V_0 = {0}` and the uniform measure `nu_0`, each round picks a
//! character `xi` outside `V_i` whose fibrewise correlation with `mu = mu_A`
//! exceeds `eps`, aligns the phase of every fibre of `V_i^perp`, and
//! multiplies `nu_i` by `1 + eps d`. The potential `D(mu || nu_i)` starts at
//! `ln(1/alpha)` and drops by at least `eps^2 / 2` per round, which bounds the
//! number of rounds, and therefore `dim V`, by `2 eps^-2 ln(1/alpha)`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fourier::{spectrum, DensityMap, FiberSpectrum, Fibers, MapKind, SetStats};
use crate::group::SubspaceFp;
use crate::tolerance::{chang_bound, is_witness, iteration_cap, GUARD, IDENTITY_TOL, MASS_DRIFT_ABORT, TIE_TOL};
use crate::{Error, Result};

/// Fibre means at or below this magnitude are treated as zero when aligning
/// phases.
pub const PHASE_ZERO_TOL: f64 = 1e-12;

/// How a witness is chosen among all failing characters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WitnessPolicy {
    /// Smallest canonical index among failing characters.
    FirstInCanonicalOrder,
    /// Largest score; ties (within `TIE_TOL`) go to the smaller index.
    #[default]
    MaxViolation,
}

impl WitnessPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessPolicy::FirstInCanonicalOrder => "first",
            WitnessPolicy::MaxViolation => "max",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "first" | "first_in_canonical_order" => Some(Self::FirstInCanonicalOrder),
            "max" | "max_violation" => Some(Self::MaxViolation),
            _ => None,
        }
    }
}

/// A failing character and its score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness {
    pub xi: usize,
    pub score: f64,
}

/// Picks a witness from `(index, score)` pairs given in increasing index order.
pub(crate) fn select_witness(
    scores: impl Iterator<Item = (usize, f64)>,
    eps: f64,
    policy: WitnessPolicy,
) -> Option<Witness> {
    let mut best: Option<Witness> = None;
    for (xi, score) in scores {
        if !is_witness(score, eps) {
            continue;
        }
        match policy {
            WitnessPolicy::FirstInCanonicalOrder => return Some(Witness { xi, score }),
            WitnessPolicy::MaxViolation => {
                if best.is_none_or(|b| score > b.score + TIE_TOL) {
                    best = Some(Witness { xi, score });
                }
            }
        }
    }
    best
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("eps = {eps} not in (0,1)")))
    }
}

fn require_measure(m: &DensityMap, name: &str) -> Result<()> {
    if !m.is_real() || m.values().iter().any(|v| v.re < 0.0) {
        return Err(Error::NotProbability(alloc::format!("{name} has negative or complex mass")));
    }
    let total: f64 = m.values().iter().map(|v| v.re).sum();
    if libm::fabs(total - 1.0) > IDENTITY_TOL {
        return Err(Error::NotProbability(alloc::format!("{name} has total mass {total}")));
    }
    Ok(())
}

/// `D(nu1 || nu2) = sum nu1 ln(nu1 / nu2)` in nats, with `0 ln 0 = 0`.
/// Returns `f64::INFINITY` when `nu1` charges a point `nu2` does not.
pub fn kl_divergence(nu1: &DensityMap, nu2: &DensityMap) -> Result<f64> {
    nu1.spec().check_same(nu2.spec())?;
    require_measure(nu1, "first measure")?;
    require_measure(nu2, "second measure")?;
    Ok(kl_raw(&nu1.real_values(), &nu2.real_values()))
}

pub(crate) fn kl_raw(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a == 0.0 {
            continue;
        }
        if b <= 0.0 {
            return f64::INFINITY;
        }
        acc += a * libm::log(a / b);
    }
    // rounding can push D(mu||mu) a hair below zero
    if acc < 0.0 && acc > -1e-15 {
        0.0
    } else {
        acc
    }
}

/// A witness for `sum_y mu(F_y) |E_{x ~ mu|F_y} conj(chi_xi(x))| > eps` among
/// `xi` outside `V`, or `None` when every such character passes.
pub fn find_witness(mu: &DensityMap, v: &SubspaceFp, eps: f64, policy: WitnessPolicy) -> Result<Option<Witness>> {
    check_eps(eps)?;
    let spec = mu.spec();
    spec.require_prime_vector()?;
    spec.check_same(&v.ambient())?;
    let fibers = Fibers::new(v);
    let fs = FiberSpectrum::new(mu, &fibers)?;
    let inside = v.membership_mask();
    let scores = (0..spec.order())
        .filter(|&xi| !inside[xi])
        .map(|xi| (xi, fs.sum_abs(fs.restricted_index(xi))));
    Ok(select_witness(scores, eps, policy))
}

/// The phase-aligned test function of one round.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    /// `phi(y)` per fibre of `V^perp` (indexed by coset label).
    pub phase: Vec<Complex64>,
    /// `d(x) = Re(phi(y) conj(chi_xi(x)))`.
    pub d: Vec<f64>,
}

/// Builds `phi` and `d` for the witness `xi` relative to the fibres of `V`.
pub fn build_test_function(mu: &DensityMap, fibers: &Fibers, xi: usize) -> Result<TestFunction> {
    let spec = mu.spec();
    let sums = fibers.fiber_sums(mu, xi)?;
    let phase: Vec<Complex64> = sums
        .iter()
        .map(|s| {
            let r = s.norm();
            if r <= PHASE_ZERO_TOL {
                Complex64::new(1.0, 0.0)
            } else {
                s.conj() / r
            }
        })
        .collect();
    let roots = spec.root_table();
    let l = spec.exponent() as usize;
    let map = fibers.cosets();
    let d = (0..spec.order())
        .map(|x| {
            let chi_bar = roots[(l - spec.pairing_numerator(xi, x) as usize) % l];
            (phase[map.label(x)] * chi_bar).re.clamp(-1.0, 1.0)
        })
        .collect();
    Ok(TestFunction { phase, d })
}

/// `nu'(x) = (1 + eps d(x)) nu(x)`.
pub fn reweight(nu: &DensityMap, d: &[f64], eps: f64) -> Result<DensityMap> {
    check_eps(eps)?;
    require_measure(nu, "nu")?;
    if d.len() != nu.values().len() || d.iter().any(|v| v.abs() > 1.0) {
        return Err(Error::InvalidParameter("test function must be [-1,1]-valued on G".into()));
    }
    let next: Vec<f64> = nu
        .values()
        .iter()
        .zip(d)
        .map(|(v, &dv)| (1.0 + eps * dv) * v.re)
        .collect();
    let total: f64 = next.iter().sum();
    if libm::fabs(total - 1.0) > MASS_DRIFT_ABORT {
        return Err(Error::NormalizationDrift { drift: total - 1.0 });
    }
    DensityMap::from_real(nu.spec(), &next, MapKind::ProbabilityMeasure).or_else(|_| {
        // mass within the abort threshold but outside the strict tolerance
        Ok(DensityMap::from_real(nu.spec(), &next, MapKind::Generic)?.with_kind(MapKind::ProbabilityMeasure))
    })
}

/// One executed round.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationStep {
    pub index: usize,
    pub xi: usize,
    pub score: f64,
    pub test: TestFunction,
    /// `E_{x ~ nu_i} d(x)`, zero up to rounding.
    pub nu_mean_d: f64,
    /// `E_{x ~ mu} d(x)`, equal to `score` up to rounding.
    pub mu_mean_d: f64,
    pub psi_before: f64,
    pub psi_after: f64,
}

/// The potentials `Psi_0 >= Psi_1 >= ... >= Psi_T >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialTrace {
    pub values: Vec<f64>,
    pub eps: f64,
    pub alpha: f64,
}

impl PotentialTrace {
    /// Smallest per-step drop, or `None` for an empty trace.
    pub fn min_drop(&self) -> Option<f64> {
        self.values.windows(2).map(|w| w[0] - w[1]).reduce(f64::min)
    }
}

/// Exhaustive check of the fibrewise bound for every `xi` outside `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// Number of characters outside `V`.
    pub checked: usize,
    pub max: f64,
    pub mean: f64,
    pub argmax: Option<usize>,
    /// `eps * alpha + GUARD`.
    pub threshold: f64,
    pub passed: bool,
    /// `Spec_eps(A) <= V`.
    pub spectrum_contained: bool,
}

/// Per-character scores for verification; share one instance across threads.
#[derive(Clone, Debug)]
pub struct CertificateVerifier {
    fs: FiberSpectrum,
    inside: Vec<bool>,
    in_spectrum: Vec<usize>,
    threshold: f64,
}

impl CertificateVerifier {
    pub fn new(a: &SetStats, eps: f64, v: &SubspaceFp) -> Result<Self> {
        check_eps(eps)?;
        a.spec().require_prime_vector()?;
        a.spec().check_same(&v.ambient())?;
        let fs = FiberSpectrum::new(a.indicator(), &Fibers::new(v))?;
        Ok(Self {
            fs,
            inside: v.membership_mask(),
            in_spectrum: spectrum(a, eps)?,
            threshold: eps * a.alpha() + GUARD,
        })
    }

    pub fn order(&self) -> usize {
        self.inside.len()
    }

    /// The cosetwise l1 correlation at `xi`, or `None` for `xi` in `V`.
    pub fn score(&self, xi: usize) -> Option<f64> {
        (!self.inside[xi]).then(|| self.fs.mean_abs(self.fs.restricted_index(xi)))
    }

    /// Reduces scores given for every index `0..order()` in order.
    pub fn summarize(&self, scores: &[Option<f64>]) -> VerificationReport {
        let mut checked = 0usize;
        let mut total = 0.0;
        let mut max = 0.0f64;
        let mut argmax = None;
        for (xi, s) in scores.iter().enumerate() {
            let Some(s) = *s else { continue };
            checked += 1;
            total += s;
            if argmax.is_none() || s > max {
                max = s;
                argmax = Some(xi);
            }
        }
        VerificationReport {
            checked,
            max,
            mean: if checked == 0 { 0.0 } else { total / checked as f64 },
            argmax,
            threshold: self.threshold,
            passed: max <= self.threshold,
            spectrum_contained: self.in_spectrum.iter().all(|&xi| self.inside[xi]),
        }
    }

    pub fn run(&self) -> VerificationReport {
        let scores: Vec<Option<f64>> = (0..self.order()).map(|xi| self.score(xi)).collect();
        self.summarize(&scores)
    }
}

/// Sweeps all `p^n - p^dim V` characters outside `V`.
pub fn verify_certificate(a: &SetStats, eps: f64, v: &SubspaceFp) -> Result<VerificationReport> {
    Ok(CertificateVerifier::new(a, eps, v)?.run())
}

/// A certified subspace with the trace that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ChangCertificateFpn {
    pub set: SetStats,
    pub eps: f64,
    pub policy: WitnessPolicy,
    pub v: SubspaceFp,
    pub trace: Vec<IterationStep>,
    pub nu_final: DensityMap,
    pub verification: VerificationReport,
    /// `floor(2 eps^-2 ln(1/alpha))`.
    pub bound_dim: usize,
}

impl ChangCertificateFpn {
    pub fn potentials(&self) -> PotentialTrace {
        let mut values: Vec<f64> = self.trace.iter().map(|s| s.psi_before).collect();
        values.push(self.trace.last().map_or_else(|| libm::log(1.0 / self.set.alpha()), |s| s.psi_after));
        PotentialTrace {
            values,
            eps: self.eps,
            alpha: self.set.alpha(),
        }
    }

    pub fn steps(&self) -> usize {
        self.trace.len()
    }
}

/// The iteration state; [`refined_chang`] drives it to termination.
#[derive(Clone, Debug)]
pub struct ChangIteration {
    set: SetStats,
    eps: f64,
    mu: DensityMap,
    v: SubspaceFp,
    nu: DensityMap,
    psi: f64,
    trace: Vec<IterationStep>,
}

impl ChangIteration {
    pub fn new(a: &SetStats, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let (p, n) = a.spec().require_prime_vector()?;
        let mu = a.uniform_measure();
        let nu = DensityMap::uniform_measure(a.spec());
        let psi = kl_divergence(&mu, &nu)?;
        Ok(Self {
            set: a.clone(),
            eps,
            mu,
            v: SubspaceFp::zero(p, n),
            nu,
            psi,
            trace: Vec::new(),
        })
    }

    pub fn subspace(&self) -> &SubspaceFp {
        &self.v
    }

    pub fn nu(&self) -> &DensityMap {
        &self.nu
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn trace(&self) -> &[IterationStep] {
        &self.trace
    }

    pub fn find_witness(&self, policy: WitnessPolicy) -> Result<Option<Witness>> {
        find_witness(&self.mu, &self.v, self.eps, policy)
    }

    /// Executes one round with witness `xi` (which must lie outside `V`).
    pub fn step(&mut self, xi: usize) -> Result<&IterationStep> {
        if self.v.contains_index(xi) {
            return Err(Error::InvalidParameter(alloc::format!("witness {xi} lies in V")));
        }
        let fibers = Fibers::new(&self.v);
        let score = crate::fourier::mu_cosetwise_l1(&self.mu, &fibers, xi)?;
        let test = build_test_function(&self.mu, &fibers, xi)?;
        let nu_vals = self.nu.real_values();
        let mu_vals = self.mu.real_values();
        let nu_mean_d: f64 = nu_vals.iter().zip(&test.d).map(|(a, b)| a * b).sum();
        let mu_mean_d: f64 = mu_vals.iter().zip(&test.d).map(|(a, b)| a * b).sum();
        let next = reweight(&self.nu, &test.d, self.eps)?;
        let psi_after = kl_raw(&mu_vals, &next.real_values());
        let xi_coords = self.set.spec().element_from_index(xi);
        self.v = self.v.adjoin(&xi_coords.0);
        self.nu = next;
        let step = IterationStep {
            index: self.trace.len(),
            xi,
            score,
            test,
            nu_mean_d,
            mu_mean_d,
            psi_before: self.psi,
            psi_after,
        };
        self.psi = psi_after;
        self.trace.push(step);
        Ok(self.trace.last().expect("just pushed"))
    }
}

/// Runs the descent to termination and verifies the resulting subspace.
pub fn refined_chang(a: &SetStats, eps: f64, policy: WitnessPolicy) -> Result<ChangCertificateFpn> {
    let mut it = ChangIteration::new(a, eps)?;
    let cap = iteration_cap(a.alpha(), eps);
    while let Some(w) = it.find_witness(policy)? {
        if it.trace.len() >= cap {
            return Err(Error::IterationOverrun { cap });
        }
        it.step(w.xi)?;
    }
    let verification = verify_certificate(a, eps, &it.v)?;
    Ok(ChangCertificateFpn {
        set: a.clone(),
        eps,
        policy,
        v: it.v,
        trace: it.trace,
        nu_final: it.nu,
        verification,
        bound_dim: chang_bound(a.alpha(), eps),
    })
}

/// Outcome of [`generalized_refinement_r1`].
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementReport {
    /// `E[h ln h]`.
    pub entropy: f64,
    /// `floor(2 eps^-2 E[h ln h])`.
    pub bound_dim: usize,
    pub steps: usize,
    /// Witnesses in order.
    pub witnesses: Vec<usize>,
    /// Potentials `D(h mu_G || nu_i)`.
    pub potentials: Vec<f64>,
    /// Over every `V' = span(V, xi)`, `xi` outside `V`: the largest
    /// `E_x |h_V'(x) - h_V(x)|`.
    pub max_l1_gap: f64,
    /// The largest gain `E_x h(x) d(x)` available to a `[-1,1]`-valued test
    /// function that is constant on the fibres of `V'^perp` and has mean zero
    /// on every fibre of `V^perp`.
    pub max_gain: f64,
    /// `max_gain <= eps + GUARD`, and for `p = 2` also
    /// `max_l1_gap <= eps + GUARD` (the two coincide there).
    pub passed: bool,
}

/// Per-direction data for a single `V' = span(V, xi)`: the gap
/// `E|h_V' - h_V|`, the best mean-zero gain, and the optimal test function.
struct DirectionalGap {
    gap: f64,
    gain: f64,
    d: Vec<f64>,
}

fn directional_gap(h: &[f64], fibers: &Fibers, xi: &[u32], p: u32, want_d: bool) -> DirectionalGap {
    let map = fibers.cosets();
    let spec = map.spec();
    let order = spec.order() as f64;
    let pu = p as usize;
    let per_class = (map.coset_size() / pu) as f64;
    let mut gap = 0.0;
    let mut gain = 0.0;
    let mut d = if want_d { alloc::vec![0.0; spec.order()] } else { Vec::new() };
    let mut class_of = alloc::vec![0usize; map.coset_size()];
    let mut sums = alloc::vec![0.0f64; pu];
    let mut order_idx: Vec<usize> = (0..pu).collect();
    let mut assign = alloc::vec![0.0f64; pu];
    for y in 0..map.coset_count() {
        sums.iter_mut().for_each(|s| *s = 0.0);
        let coset = map.coset(y);
        for (k, &x) in coset.iter().enumerate() {
            let e = spec.element_from_index(x);
            let c = crate::group::subspace_dot(xi, &e.0, p) as usize;
            class_of[k] = c;
            sums[c] += h[x];
        }
        let fibre_mean = sums.iter().sum::<f64>() / coset.len() as f64;
        let u: Vec<f64> = sums.iter().map(|s| s / per_class - fibre_mean).collect();
        gap += u.iter().map(|v| v.abs()).sum::<f64>() * per_class / order;
        // optimum of sum_j u_j d_j over |d_j| <= 1, sum_j d_j = 0:
        // +1 on the top floor(p/2) classes, -1 on the bottom floor(p/2)
        order_idx.sort_by(|&a, &b| u[b].partial_cmp(&u[a]).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b)));
        assign.iter_mut().for_each(|a| *a = 0.0);
        for (rank, &j) in order_idx.iter().enumerate() {
            if rank < pu / 2 {
                assign[j] = 1.0;
            } else if rank >= pu - pu / 2 {
                assign[j] = -1.0;
            }
        }
        gain += u.iter().zip(&assign).map(|(a, b)| a * b).sum::<f64>() * per_class / order;
        if want_d {
            for (k, &x) in coset.iter().enumerate() {
                d[x] = assign[class_of[k]];
            }
        }
    }
    DirectionalGap { gap, gain, d }
}

/// The rank-one case of the general refinement scheme, for a density `h`
/// (`h >= 0`, `E h = 1`): finds `V` such that no single-direction refinement
/// `V' = span(V, xi)` admits a mean-zero test function gaining more than
/// `eps` against `h`. On `F_2^n` this is exactly `E|h_V' - h_V| <= eps`, and
/// for `h = alpha^-1 1_A` the witnesses and `V` agree with [`refined_chang`].
pub fn generalized_refinement_r1(h: &DensityMap, eps: f64, policy: WitnessPolicy) -> Result<(SubspaceFp, RefinementReport)> {
    check_eps(eps)?;
    let spec = h.spec();
    let (p, n) = spec.require_prime_vector()?;
    if !h.is_real() || h.values().iter().any(|v| v.re < 0.0 || !v.re.is_finite()) {
        return Err(Error::InvalidParameter("h must be finite and nonnegative".into()));
    }
    let hv = h.real_values();
    let mean = hv.iter().sum::<f64>() / hv.len() as f64;
    if libm::fabs(mean - 1.0) > IDENTITY_TOL {
        return Err(Error::InvalidParameter(alloc::format!("E h = {mean}, expected 1")));
    }
    let order = spec.order() as f64;
    let entropy = hv.iter().filter(|&&v| v > 0.0).map(|&v| v * libm::log(v)).sum::<f64>() / order;
    if !entropy.is_finite() {
        return Err(Error::InvalidParameter("E[h ln h] is not finite".into()));
    }
    let mu: Vec<f64> = hv.iter().map(|v| v / order).collect();
    let mut nu = alloc::vec![1.0 / order; spec.order()];
    let mut v = SubspaceFp::zero(p, n);
    let mut potentials = alloc::vec![kl_raw(&mu, &nu)];
    let mut witnesses = Vec::new();
    let b = 2.0 / (eps * eps) * entropy;
    let cap = if b <= 0.0 { 1 } else { libm::ceil(b) as usize + 1 };
    let coords: Vec<Vec<u32>> = (0..spec.order()).map(|i| spec.element_from_index(i).0).collect();
    loop {
        let fibers = Fibers::new(&v);
        let inside = v.membership_mask();
        let scores = (0..spec.order())
            .filter(|&xi| !inside[xi])
            .map(|xi| (xi, directional_gap(&hv, &fibers, &coords[xi], p, false).gain));
        let Some(w) = select_witness(scores, eps, policy) else {
            let mut max_gap = 0.0f64;
            let mut max_gain = 0.0f64;
            for xi in (0..spec.order()).filter(|&xi| !inside[xi]) {
                let dg = directional_gap(&hv, &fibers, &coords[xi], p, false);
                max_gap = max_gap.max(dg.gap);
                max_gain = max_gain.max(dg.gain);
            }
            let passed = max_gain <= eps + GUARD && (p != 2 || max_gap <= eps + GUARD);
            let report = RefinementReport {
                entropy,
                bound_dim: if b <= 0.0 { 0 } else { libm::floor(b + 1e-12) as usize },
                steps: witnesses.len(),
                witnesses,
                potentials,
                max_l1_gap: max_gap,
                max_gain,
                passed,
            };
            return Ok((v, report));
        };
        if witnesses.len() >= cap {
            return Err(Error::IterationOverrun { cap });
        }
        let dg = directional_gap(&hv, &fibers, &coords[w.xi], p, true);
        for (slot, dv) in nu.iter_mut().zip(&dg.d) {
            *slot *= 1.0 + eps * dv;
        }
        let total: f64 = nu.iter().sum();
        if libm::fabs(total - 1.0) > MASS_DRIFT_ABORT {
            return Err(Error::NormalizationDrift { drift: total - 1.0 });
        }
        potentials.push(kl_raw(&mu, &nu));
        witnesses.push(w.xi);
        v = v.adjoin(&coords[w.xi]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use alloc::vec;

    fn subspace_set(p: u32, n: usize, gens: &[Vec<u32>]) -> (SubspaceFp, SetStats) {
        let w = SubspaceFp::from_generators(p, n, gens).unwrap();
        let a = SetStats::new(&w.ambient(), &w.element_indices()).unwrap();
        (w, a)
    }

    #[test]
    fn kl_examples() {
        let spec = GroupSpec::prime_vector(2, 4).unwrap();
        let u = DensityMap::uniform_measure(&spec);
        assert_eq!(kl_divergence(&u, &u).unwrap(), 0.0);
        let a = SetStats::new(&spec, &[1, 4]).unwrap();
        assert!((kl_divergence(&a.uniform_measure(), &u).unwrap() - libm::log(8.0)).abs() < 1e-12);
        let pt = DensityMap::point_mass(&spec, 3);
        assert!((kl_divergence(&pt, &u).unwrap() - libm::log(16.0)).abs() < 1e-12);
        assert_eq!(kl_divergence(&u, &pt).unwrap(), f64::INFINITY);
        let bad = DensityMap::constant(&spec, 1.0, MapKind::Generic);
        assert!(kl_divergence(&bad, &u).is_err());
    }

    #[test]
    fn no_witness_for_uniform() {
        let spec = GroupSpec::prime_vector(3, 3).unwrap();
        let u = DensityMap::uniform_measure(&spec);
        let w = find_witness(&u, &SubspaceFp::zero(3, 3), 0.1, WitnessPolicy::MaxViolation).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn subspace_witness_scores_one() {
        let (w, a) = subspace_set(2, 4, &[vec![1, 0, 0, 1], vec![0, 1, 1, 0]]);
        let perp = w.annihilator().membership_mask();
        let mu = a.uniform_measure();
        for policy in [WitnessPolicy::FirstInCanonicalOrder, WitnessPolicy::MaxViolation] {
            let wit = find_witness(&mu, &SubspaceFp::zero(2, 4), 0.5, policy).unwrap().unwrap();
            assert!(perp[wit.xi] && wit.xi != 0);
            assert!((wit.score - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn test_function_properties() {
        let (w, a) = subspace_set(2, 4, &[vec![1, 0, 0, 1], vec![0, 1, 1, 0]]);
        let mu = a.uniform_measure();
        let fibers = Fibers::new(&SubspaceFp::zero(2, 4));
        let xi = w.annihilator().element_indices()[1];
        let t = build_test_function(&mu, &fibers, xi).unwrap();
        let e_mu: f64 = mu.real_values().iter().zip(&t.d).map(|(a, b)| a * b).sum();
        assert!((e_mu - 1.0).abs() < 1e-12);

        // zero correlation everywhere: phi = 1, E_mu d = 0
        let spec = w.ambient();
        let u = DensityMap::uniform_measure(&spec);
        let t = build_test_function(&u, &fibers, 3).unwrap();
        assert!(t.phase.iter().all(|&z| z == Complex64::new(1.0, 0.0)));
        let e: f64 = u.real_values().iter().zip(&t.d).map(|(a, b)| a * b).sum();
        assert!(e.abs() < 1e-12);
    }

    #[test]
    fn test_function_is_refined_coset_constant_and_mean_zero() {
        let spec = GroupSpec::prime_vector(3, 3).unwrap();
        let a = SetStats::new(&spec, &[0, 1, 4, 9, 13, 17, 22, 25]).unwrap();
        let mu = a.uniform_measure();
        let v = SubspaceFp::from_generators(3, 3, &[vec![1, 1, 0]]).unwrap();
        let fibers = Fibers::new(&v);
        let inside = v.membership_mask();
        for xi in (0..27).filter(|&x| !inside[x]) {
            let t = build_test_function(&mu, &fibers, xi).unwrap();
            let e_mu: f64 = mu.real_values().iter().zip(&t.d).map(|(a, b)| a * b).sum();
            let score = crate::fourier::mu_cosetwise_l1(&mu, &fibers, xi).unwrap();
            assert!((e_mu - score).abs() < 1e-10);
            // mean zero on each coset of V^perp
            for y in 0..fibers.count() {
                let s: f64 = fibers.cosets().coset(y).iter().map(|&x| t.d[x]).sum();
                assert!(s.abs() < 1e-10);
            }
            // constant on cosets of span(V, xi)^perp
            let refined = crate::group::CosetMap::new(&v.adjoin(&spec.element_from_index(xi).0).annihilator());
            for l in 0..refined.coset_count() {
                let c = refined.coset(l);
                assert!(c.iter().all(|&x| (t.d[x] - t.d[c[0]]).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn reweight_examples() {
        let spec = GroupSpec::prime_vector(2, 1).unwrap();
        let u = DensityMap::uniform_measure(&spec);
        let next = reweight(&u, &[1.0, -1.0], 0.5).unwrap();
        assert_eq!(next.real_values(), vec![0.75, 0.25]);
        assert_eq!(reweight(&u, &[0.0, 0.0], 0.5).unwrap(), u);
        assert!(matches!(reweight(&u, &[1.0, 1.0], 0.5), Err(Error::NormalizationDrift { .. })));
    }

    #[test]
    fn full_set_needs_no_steps() {
        let spec = GroupSpec::prime_vector(2, 5).unwrap();
        let all: Vec<usize> = (0..32).collect();
        let cert = refined_chang(&SetStats::new(&spec, &all).unwrap(), 0.3, WitnessPolicy::MaxViolation).unwrap();
        assert_eq!(cert.v.dim(), 0);
        assert_eq!(cert.steps(), 0);
        assert_eq!(cert.bound_dim, 0);
        assert!(cert.verification.passed);
        assert_eq!(cert.verification.max, 0.0);
    }

    #[test]
    fn subspace_recovers_annihilator() {
        let (w, a) = subspace_set(2, 5, &[vec![1, 0, 1, 0, 0], vec![0, 1, 1, 1, 0]]);
        for policy in [WitnessPolicy::FirstInCanonicalOrder, WitnessPolicy::MaxViolation] {
            let cert = refined_chang(&a, 0.5, policy).unwrap();
            assert_eq!(cert.v, w.annihilator());
            assert_eq!(cert.steps(), 3);
            assert!(cert.verification.passed);
            assert!(cert.verification.max < 1e-12);
        }
        // V = {0} fails with argmax in W^perp and value alpha
        let rep = verify_certificate(&a, 0.5, &SubspaceFp::zero(2, 5)).unwrap();
        assert!(!rep.passed);
        assert!(w.annihilator().contains_index(rep.argmax.unwrap()));
        assert!((rep.max - a.alpha()).abs() < 1e-12);
    }

    #[test]
    fn overrun_is_impossible_with_valid_witnesses() {
        let spec = GroupSpec::prime_vector(3, 3).unwrap();
        let a = SetStats::new(&spec, &[0, 5, 7, 11, 19, 20]).unwrap();
        let cert = refined_chang(&a, 0.4, WitnessPolicy::MaxViolation).unwrap();
        assert!(cert.steps() <= iteration_cap(a.alpha(), 0.4));
        assert!(cert.verification.passed);
    }

    #[test]
    fn r1_constant_density() {
        let spec = GroupSpec::prime_vector(2, 4).unwrap();
        let h = DensityMap::constant(&spec, 1.0, MapKind::Density);
        let (v, rep) = generalized_refinement_r1(&h, 0.5, WitnessPolicy::MaxViolation).unwrap();
        assert_eq!(v.dim(), 0);
        assert_eq!(rep.entropy, 0.0);
        assert!(rep.passed);
        assert_eq!(rep.max_l1_gap, 0.0);
    }

    #[test]
    fn r1_rejects_bad_density() {
        let spec = GroupSpec::prime_vector(2, 3).unwrap();
        let h = DensityMap::constant(&spec, 2.0, MapKind::Density);
        assert!(generalized_refinement_r1(&h, 0.5, WitnessPolicy::MaxViolation).is_err());
        let nan = DensityMap::from_real(&spec, &[f64::NAN; 8], MapKind::Generic).unwrap();
        assert!(generalized_refinement_r1(&nan, 0.5, WitnessPolicy::MaxViolation).is_err());
    }

    #[test]
    fn r1_subspace_density() {
        let (w, a) = subspace_set(2, 4, &[vec![1, 1, 0, 0]]);
        let hv: Vec<f64> = a.indicator().real_values().iter().map(|v| v / a.alpha()).collect();
        let h = DensityMap::from_real(&w.ambient(), &hv, MapKind::Density).unwrap();
        let (v, rep) = generalized_refinement_r1(&h, 0.5, WitnessPolicy::MaxViolation).unwrap();
        assert_eq!(v, w.annihilator());
        assert!(rep.passed);
        assert!((rep.entropy - libm::log(1.0 / a.alpha())).abs() < 1e-12);
    }
}
