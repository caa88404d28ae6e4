//! Chang's lemma for arbitrary finite abelian groups.
//!
//! Subspaces give way to dissociated sets `Delta` and their `{-1,0,1}`-spans.
//! The classical iteration reweights a measure as in [`crate::chang_fpn`];
//! the refined one keeps a family of `2^r` nonnegative weights `g_sigma`
//! (mean one, Fourier support in `<Delta>`, pointwise average one) and splits
//! every weight in two at each round. Its progress measure
//! `Phi_i = D(p_i || u_i)` with `p_i(sigma) = 2^-i E_{mu_A} g_sigma` rises by
//! more than `eps^2 / 2` per round and never exceeds `ln(1/alpha)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::chang_fpn::{kl_raw, select_witness, WitnessPolicy, PHASE_ZERO_TOL};
use crate::fourier::{dft_values, SetStats};
use crate::group::{is_dissociated, GroupSpec, SpanSet, DEFAULT_DISSOCIATION_CAP};
use crate::tolerance::{chang_bound, iteration_cap, GUARD};
use crate::{Error, Result};

/// Default cap on `2^r * |G|` dense weight entries.
pub const DEFAULT_WEIGHT_BUDGET: u128 = 1 << 26;

/// A sign pattern `sigma in {+1,-1}^r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignIndex(pub Vec<bool>);

impl SignIndex {
    /// Position in the weight list: the first sign is the most significant
    /// bit, with `+` as 0.
    pub fn position(&self) -> usize {
        self.0.iter().fold(0, |acc, &plus| acc * 2 + usize::from(!plus))
    }

    pub fn from_position(r: usize, pos: usize) -> Self {
        Self((0..r).rev().map(|bit| (pos >> bit) & 1 == 0).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SignIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&plus| if plus { '+' } else { '-' }).collect();
        f.write_str(&s)
    }
}

impl FromStr for SignIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(true),
                '-' => Ok(false),
                _ => Err(Error::InvalidParameter(alloc::format!("bad sign string {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignIndex)
    }
}

/// The weights `g_sigma` and their span.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFamily {
    span: SpanSet,
    /// `weights[sigma.position()]`, each of length `|G|`.
    weights: Vec<Vec<f64>>,
}

impl WeightFamily {
    pub fn trivial(spec: &GroupSpec) -> Self {
        Self {
            span: SpanSet::new(spec),
            weights: alloc::vec![alloc::vec![1.0; spec.order()]],
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        self.span.spec()
    }

    pub fn delta(&self) -> &[usize] {
        self.span.generators()
    }

    pub fn span(&self) -> &SpanSet {
        &self.span
    }

    pub fn rounds(&self) -> usize {
        self.delta().len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn weight(&self, sigma: &SignIndex) -> &[f64] {
        &self.weights[sigma.position()]
    }

    /// `m_sigma = E_{x ~ mu_A} g_sigma(x)`.
    pub fn masses(&self, a: &SetStats) -> Vec<f64> {
        masses(&self.weights, a)
    }
}

fn masses(weights: &[Vec<f64>], a: &SetStats) -> Vec<f64> {
    let inv = 1.0 / a.size() as f64;
    weights
        .iter()
        .map(|g| a.members().iter().map(|&x| g[x]).sum::<f64>() * inv)
        .collect()
}

/// `Phi = D(p || u)` with `p(sigma) = 2^-r m_sigma` and `u` uniform on
/// `{+1,-1}^r`.
pub fn potential_phi(weights: &[Vec<f64>], a: &SetStats) -> f64 {
    let count = weights.len() as f64;
    let p: Vec<f64> = masses(weights, a).into_iter().map(|m| m / count).collect();
    let u = alloc::vec![1.0 / count; weights.len()];
    kl_raw(&p, &u)
}

/// Which theorem a certificate speaks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Classical,
    Refined,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Classical => "classical",
            Variant::Refined => "refined",
        }
    }
}

/// One round of either iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelianStep {
    pub index: usize,
    pub witness: usize,
    pub score: f64,
    /// `Psi` (classical, decreasing) or `Phi` (refined, increasing).
    pub potential_before: f64,
    pub potential_after: f64,
    /// Refined only: `theta_sigma` per parent weight.
    pub phases: Vec<Complex64>,
    /// Refined only: `c_sigma` per parent weight.
    pub correlations: Vec<f64>,
    /// Refined only: `m_sigma` per parent weight.
    pub masses: Vec<f64>,
    /// Largest `|E_x g_sigma d_sigma|` (refined) or `|E_{nu_i} d|`
    /// (classical); zero up to rounding.
    pub orthogonality_residual: f64,
    /// Largest Fourier coefficient of the new density or weights outside the
    /// enlarged span.
    pub off_support: f64,
}

/// Terminal sweep over characters outside the span.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub checked: usize,
    pub max: f64,
    pub mean: f64,
    pub argmax: Option<usize>,
    /// `eps + GUARD`.
    pub threshold: f64,
    pub passed: bool,
}

fn sweep(scores: &[f64], span: &SpanSet, eps: f64) -> SweepReport {
    let mut checked = 0;
    let mut total = 0.0;
    let mut max = 0.0f64;
    let mut argmax = None;
    for (eta, &s) in scores.iter().enumerate() {
        if span.contains(eta) {
            continue;
        }
        checked += 1;
        total += s;
        if argmax.is_none() || s > max {
            max = s;
            argmax = Some(eta);
        }
    }
    SweepReport {
        checked,
        max,
        mean: if checked == 0 { 0.0 } else { total / checked as f64 },
        argmax,
        threshold: eps + GUARD,
        passed: max <= eps + GUARD,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbelianCertificate {
    pub variant: Variant,
    pub set: SetStats,
    pub eps: f64,
    pub policy: WitnessPolicy,
    /// `Lambda` (classical) or `Delta` (refined), in insertion order.
    pub delta: Vec<usize>,
    pub span_size: usize,
    pub trace: Vec<AbelianStep>,
    pub sweep: SweepReport,
    /// Exhaustive `3^r` check; `None` when `r` exceeds the enumeration cap.
    pub dissociated: Option<bool>,
    /// `floor(2 eps^-2 ln(1/alpha))`.
    pub bound: usize,
}

impl AbelianCertificate {
    pub fn passed(&self) -> bool {
        self.sweep.passed && self.dissociated != Some(false) && self.delta.len() <= self.bound
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("eps = {eps} not in (0,1)")))
    }
}

fn character_conj(spec: &GroupSpec, eta: usize) -> Vec<Complex64> {
    let roots = spec.root_table();
    let l = spec.exponent() as usize;
    (0..spec.order())
        .map(|x| roots[(l - spec.pairing_numerator(eta, x) as usize) % l])
        .collect()
}

/// `max |f^(xi)|` over `xi` outside the span.
fn off_support(spec: &GroupSpec, f: &[f64], span: &SpanSet) -> f64 {
    let vals: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft_values(spec, &vals)
        .iter()
        .enumerate()
        .filter(|(xi, _)| !span.contains(*xi))
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max)
}

fn dissociation(spec: &GroupSpec, delta: &[usize]) -> Option<bool> {
    is_dissociated(spec, delta, DEFAULT_DISSOCIATION_CAP).ok()
}

/// `|E_{x ~ mu_A} conj(chi_xi(x))|` for every `xi`.
fn classical_scores(a: &SetStats) -> Vec<f64> {
    let mu = a.uniform_measure();
    let order = a.spec().order() as f64;
    dft_values(a.spec(), mu.values()).iter().map(|c| c.norm() * order).collect()
}

/// The classical iteration state.
#[derive(Clone, Debug)]
pub struct ClassicalIteration {
    set: SetStats,
    eps: f64,
    mu: Vec<f64>,
    scores: Vec<f64>,
    coeffs: Vec<Complex64>,
    span: SpanSet,
    /// Density of `nu_i` with respect to the uniform measure.
    density: Vec<f64>,
    psi: f64,
    trace: Vec<AbelianStep>,
}

impl ClassicalIteration {
    pub fn new(a: &SetStats, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let spec = a.spec();
        let mu = a.uniform_measure().real_values();
        let order = spec.order() as f64;
        let coeffs: Vec<Complex64> = dft_values(spec, a.uniform_measure().values())
            .into_iter()
            .map(|c| c * order)
            .collect();
        let scores = coeffs.iter().map(|c| c.norm()).collect();
        let density = alloc::vec![1.0; spec.order()];
        let nu: Vec<f64> = density.iter().map(|f| f / order).collect();
        Ok(Self {
            set: a.clone(),
            eps,
            psi: kl_raw(&mu, &nu),
            mu,
            scores,
            coeffs,
            span: SpanSet::new(spec),
            density,
            trace: Vec::new(),
        })
    }

    pub fn span(&self) -> &SpanSet {
        &self.span
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn find_witness(&self, policy: WitnessPolicy) -> Option<crate::chang_fpn::Witness> {
        let scores = (0..self.scores.len())
            .filter(|&xi| !self.span.contains(xi))
            .map(|xi| (xi, self.scores[xi]));
        select_witness(scores, self.eps, policy)
    }

    pub fn step(&mut self, xi: usize) -> Result<&AbelianStep> {
        let spec = self.set.spec().clone();
        let next_span = self.span.extend(xi)?;
        let c = self.coeffs[xi];
        let theta = if c.norm() <= PHASE_ZERO_TOL {
            Complex64::new(1.0, 0.0)
        } else {
            c.conj() / c.norm()
        };
        let chi_bar = character_conj(&spec, xi);
        let d: Vec<f64> = chi_bar.iter().map(|z| (theta * z).re.clamp(-1.0, 1.0)).collect();
        let order = spec.order() as f64;
        let nu_mean_d: f64 = self.density.iter().zip(&d).map(|(f, dv)| f * dv).sum::<f64>() / order;
        for (f, dv) in self.density.iter_mut().zip(&d) {
            *f *= 1.0 + self.eps * dv;
        }
        let nu: Vec<f64> = self.density.iter().map(|f| f / order).collect();
        let total: f64 = nu.iter().sum();
        if libm::fabs(total - 1.0) > crate::tolerance::MASS_DRIFT_ABORT {
            return Err(Error::NormalizationDrift { drift: total - 1.0 });
        }
        let psi_after = kl_raw(&self.mu, &nu);
        let step = AbelianStep {
            index: self.trace.len(),
            witness: xi,
            score: self.scores[xi],
            potential_before: self.psi,
            potential_after: psi_after,
            phases: alloc::vec![theta],
            correlations: Vec::new(),
            masses: Vec::new(),
            orthogonality_residual: libm::fabs(nu_mean_d),
            off_support: off_support(&spec, &self.density, &next_span),
        };
        self.span = next_span;
        self.psi = psi_after;
        self.trace.push(step);
        Ok(self.trace.last().expect("just pushed"))
    }
}

/// Grows a dissociated `Lambda` until `|E_{x ~ mu_A} conj(chi_xi(x))| <= eps`
/// for every `xi` outside `<Lambda>`.
pub fn classical_chang_abelian(a: &SetStats, eps: f64, policy: WitnessPolicy) -> Result<AbelianCertificate> {
    let mut it = ClassicalIteration::new(a, eps)?;
    let cap = iteration_cap(a.alpha(), eps);
    while let Some(w) = it.find_witness(policy) {
        if it.trace.len() >= cap {
            return Err(Error::IterationOverrun { cap });
        }
        it.step(w.xi)?;
    }
    let scores = classical_scores(a);
    let delta = it.span.generators().to_vec();
    Ok(AbelianCertificate {
        variant: Variant::Classical,
        set: a.clone(),
        eps,
        policy,
        dissociated: dissociation(a.spec(), &delta),
        delta,
        span_size: it.span.len(),
        sweep: sweep(&scores, &it.span, eps),
        trace: it.trace,
        bound: chang_bound(a.alpha(), eps),
    })
}

/// Re-checks a classical certificate from scratch: the sweep over characters
/// outside `<Lambda>` and the exhaustive dissociativity test.
pub fn verify_classical_abelian(a: &SetStats, eps: f64, lambda: &[usize]) -> Result<(SweepReport, Option<bool>)> {
    check_eps(eps)?;
    if lambda.iter().any(|&l| l >= a.spec().order()) {
        return Err(Error::InvalidParameter("character index out of range".into()));
    }
    let members = span_members(a.spec(), lambda);
    Ok((sweep(&classical_scores(a), &members, eps), dissociation(a.spec(), lambda)))
}

/// `E_sigma |E_{x ~ mu_A} g_sigma(x) conj(chi_eta(x))|` for every `eta`,
/// together with the per-sigma correlations.
fn refined_correlations(weights: &[Vec<f64>], a: &SetStats) -> Vec<Vec<Complex64>> {
    let spec = a.spec();
    let order = spec.order() as f64;
    let mu = a.uniform_measure().real_values();
    weights
        .iter()
        .map(|g| {
            let prod: Vec<Complex64> = g.iter().zip(&mu).map(|(w, m)| Complex64::new(w * m, 0.0)).collect();
            dft_values(spec, &prod).into_iter().map(|c| c * order).collect()
        })
        .collect()
}

fn refined_scores(corr: &[Vec<Complex64>], order: usize) -> Vec<f64> {
    let count = corr.len() as f64;
    (0..order)
        .map(|eta| corr.iter().map(|c| c[eta].norm()).sum::<f64>() / count)
        .collect()
}

/// The refined iteration state.
#[derive(Clone, Debug)]
pub struct RefinedIteration {
    set: SetStats,
    eps: f64,
    family: WeightFamily,
    corr: Vec<Vec<Complex64>>,
    scores: Vec<f64>,
    phi: f64,
    trace: Vec<AbelianStep>,
}

impl RefinedIteration {
    pub fn new(a: &SetStats, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let family = WeightFamily::trivial(a.spec());
        let corr = refined_correlations(family.weights(), a);
        let scores = refined_scores(&corr, a.spec().order());
        Ok(Self {
            set: a.clone(),
            eps,
            phi: potential_phi(family.weights(), a),
            family,
            corr,
            scores,
            trace: Vec::new(),
        })
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn trace(&self) -> &[AbelianStep] {
        &self.trace
    }

    /// Current `E_sigma |E_{mu_A} g_sigma conj(chi_eta)|` by character.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn find_witness(&self, policy: WitnessPolicy) -> Option<crate::chang_fpn::Witness> {
        let span = self.family.span();
        let scores = (0..self.scores.len())
            .filter(|&eta| !span.contains(eta))
            .map(|eta| (eta, self.scores[eta]));
        select_witness(scores, self.eps, policy)
    }

    /// Splits every weight along `eta` (which must lie outside the span).
    pub fn step(&mut self, eta: usize) -> Result<&AbelianStep> {
        let spec = self.set.spec().clone();
        let next_span = self.family.span.extend(eta)?;
        let chi_bar = character_conj(&spec, eta);
        let order = spec.order() as f64;
        let masses = self.family.masses(&self.set);
        let mut phases = Vec::with_capacity(self.family.weights.len());
        let mut correlations = Vec::with_capacity(self.family.weights.len());
        let mut next = Vec::with_capacity(2 * self.family.weights.len());
        let mut ortho = 0.0f64;
        for (g, corr) in self.family.weights.iter().zip(&self.corr) {
            let c = corr[eta];
            let r = c.norm();
            let theta = if r <= PHASE_ZERO_TOL { Complex64::new(1.0, 0.0) } else { c.conj() / r };
            let d: Vec<f64> = chi_bar.iter().map(|z| (theta * z).re.clamp(-1.0, 1.0)).collect();
            let gd: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / order;
            ortho = ortho.max(libm::fabs(gd));
            next.push(g.iter().zip(&d).map(|(w, dv)| w * (1.0 + dv)).collect::<Vec<f64>>());
            next.push(g.iter().zip(&d).map(|(w, dv)| w * (1.0 - dv)).collect::<Vec<f64>>());
            phases.push(theta);
            correlations.push(r);
        }
        let off = next
            .iter()
            .map(|g| off_support(&spec, g, &next_span))
            .fold(0.0, f64::max);
        let score = self.scores[eta];
        self.family = WeightFamily {
            span: next_span,
            weights: next,
        };
        let phi_after = potential_phi(self.family.weights(), &self.set);
        self.corr = refined_correlations(self.family.weights(), &self.set);
        self.scores = refined_scores(&self.corr, spec.order());
        let step = AbelianStep {
            index: self.trace.len(),
            witness: eta,
            score,
            potential_before: self.phi,
            potential_after: phi_after,
            phases,
            correlations,
            masses,
            orthogonality_residual: ortho,
            off_support: off,
        };
        self.phi = phi_after;
        self.trace.push(step);
        Ok(self.trace.last().expect("just pushed"))
    }
}

/// Refuses runs whose worst case `2^bound * |G|` exceeds `budget`.
pub fn check_weight_budget(a: &SetStats, eps: f64, budget: u128) -> Result<()> {
    let bound = chang_bound(a.alpha(), eps);
    let needed = if bound >= 100 {
        u128::MAX
    } else {
        (1u128 << bound).saturating_mul(a.spec().order() as u128)
    };
    if needed > budget {
        Err(Error::ResourceGate { needed, budget })
    } else {
        Ok(())
    }
}

/// Builds the weight family and certificate. `budget` bounds the number of
/// dense weight entries (see [`DEFAULT_WEIGHT_BUDGET`]).
pub fn refined_chang_abelian(
    a: &SetStats,
    eps: f64,
    policy: WitnessPolicy,
    budget: u128,
) -> Result<(AbelianCertificate, WeightFamily)> {
    check_eps(eps)?;
    check_weight_budget(a, eps, budget)?;
    let mut it = RefinedIteration::new(a, eps)?;
    let cap = iteration_cap(a.alpha(), eps);
    while let Some(w) = it.find_witness(policy) {
        if it.trace.len() >= cap {
            return Err(Error::IterationOverrun { cap });
        }
        it.step(w.xi)?;
    }
    let delta = it.family.delta().to_vec();
    let cert = AbelianCertificate {
        variant: Variant::Refined,
        set: a.clone(),
        eps,
        policy,
        dissociated: dissociation(a.spec(), &delta),
        delta,
        span_size: it.family.span().len(),
        sweep: sweep(&it.scores, it.family.span(), eps),
        trace: it.trace,
        bound: chang_bound(a.alpha(), eps),
    };
    Ok((cert, it.family))
}

/// Worst-case slack of every condition on a weight family.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFamilyReport {
    pub r: usize,
    /// `min_{sigma, x} g_sigma(x)`.
    pub min_value: f64,
    /// `max_sigma |E_x g_sigma - 1|`.
    pub max_mean_deviation: f64,
    /// `max_x |E_sigma g_sigma(x) - 1|`.
    pub max_pointwise_deviation: f64,
    /// `max_{sigma, xi outside <Delta>} |g_sigma^(xi)|`.
    pub max_off_support: f64,
    pub dissociated: Option<bool>,
    pub sweep: SweepReport,
    /// `E_sigma |E_{mu_A} g_sigma conj(chi_eta)|` upper-bounds the plain
    /// correlation, so this should also hold.
    pub classical_max: f64,
    pub passed: bool,
}

/// Tolerances applied by [`verify_weight_family`].
pub const NONNEGATIVITY_TOL: f64 = 1e-12;
pub const FAMILY_TOL: f64 = 1e-10;

/// Re-establishes every property of a weight family from scratch.
pub fn verify_weight_family(a: &SetStats, eps: f64, delta: &[usize], weights: &[Vec<f64>]) -> Result<WeightFamilyReport> {
    check_eps(eps)?;
    let spec = a.spec();
    let r = delta.len();
    if r >= usize::BITS as usize || weights.len() != 1usize << r {
        return Err(Error::InvalidParameter(alloc::format!(
            "{} weights for {r} generators",
            weights.len()
        )));
    }
    if delta.iter().any(|&d| d >= spec.order()) {
        return Err(Error::InvalidParameter("character index out of range".into()));
    }
    if weights.iter().any(|g| g.len() != spec.order()) {
        return Err(Error::InvalidParameter("weight length mismatch".into()));
    }
    let dissociated = dissociation(spec, delta);
    // a non-dissociated list still has a well-defined {-1,0,1}-span
    let members = span_members(spec, delta);
    let order = spec.order() as f64;
    let count = weights.len() as f64;
    let min_value = weights.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let max_mean_deviation = weights
        .iter()
        .map(|g| libm::fabs(g.iter().sum::<f64>() / order - 1.0))
        .fold(0.0, f64::max);
    let max_pointwise_deviation = (0..spec.order())
        .map(|x| libm::fabs(weights.iter().map(|g| g[x]).sum::<f64>() / count - 1.0))
        .fold(0.0, f64::max);
    let max_off_support = weights
        .iter()
        .map(|g| off_support(spec, g, &members))
        .fold(0.0, f64::max);
    let corr = refined_correlations(weights, a);
    let scores = refined_scores(&corr, spec.order());
    let sw = sweep(&scores, &members, eps);
    let classical = classical_scores(a);
    let classical_max = (0..spec.order())
        .filter(|&eta| !members.contains(eta))
        .map(|eta| classical[eta])
        .fold(0.0, f64::max);
    let passed = min_value >= -NONNEGATIVITY_TOL
        && max_mean_deviation < FAMILY_TOL
        && max_pointwise_deviation < FAMILY_TOL
        && max_off_support < FAMILY_TOL
        && dissociated != Some(false)
        && sw.passed;
    Ok(WeightFamilyReport {
        r,
        min_value,
        max_mean_deviation,
        max_pointwise_deviation,
        max_off_support,
        dissociated,
        sweep: sw,
        classical_max,
        passed,
    })
}

/// `<Delta>` without the dissociativity requirement of [`SpanSet::extend`].
fn span_members(spec: &GroupSpec, delta: &[usize]) -> SpanSet {
    let mut span = SpanSet::new(spec);
    for &d in delta {
        span = match span.extend(d) {
            Ok(s) => s,
            // already a member: the span is unchanged
            Err(_) => span,
        };
    }
    span
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn sign_index_encoding() {
        let s: SignIndex = "+-+".parse().unwrap();
        assert_eq!(s.to_string(), "+-+");
        assert_eq!(s.position(), 0b010);
        assert_eq!(SignIndex::from_position(3, 2), s);
        assert_eq!(SignIndex::from_position(0, 0).to_string(), "");
        assert!("+x".parse::<SignIndex>().is_err());
    }

    #[test]
    fn full_set_is_trivial() {
        let spec = GroupSpec::new(vec![6, 2]).unwrap();
        let all: Vec<usize> = (0..12).collect();
        let a = SetStats::new(&spec, &all).unwrap();
        let cert = classical_chang_abelian(&a, 0.5, WitnessPolicy::MaxViolation).unwrap();
        assert!(cert.delta.is_empty() && cert.trace.is_empty() && cert.passed());
        let (cert, fam) = refined_chang_abelian(&a, 0.5, WitnessPolicy::MaxViolation, DEFAULT_WEIGHT_BUDGET).unwrap();
        assert_eq!(cert.delta.len(), 0);
        assert_eq!(fam.weights(), &[vec![1.0; 12]]);
        assert_eq!(potential_phi(fam.weights(), &a), 0.0);
    }

    #[test]
    fn point_in_z5() {
        let spec = GroupSpec::new(vec![5]).unwrap();
        let a = SetStats::new(&spec, &[0]).unwrap();
        let cert = classical_chang_abelian(&a, 0.9, WitnessPolicy::FirstInCanonicalOrder).unwrap();
        assert!(cert.delta.len() <= 2);
        assert_eq!(cert.bound, 3);
        assert_eq!(cert.span_size, 5);
        assert!(cert.passed());
        assert_eq!(cert.dissociated, Some(true));
    }

    #[test]
    fn subgroup_of_z6() {
        let spec = GroupSpec::new(vec![6]).unwrap();
        let a = SetStats::new(&spec, &[0, 3]).unwrap();
        let cert = classical_chang_abelian(&a, 0.5, WitnessPolicy::MaxViolation).unwrap();
        assert!(cert.delta.iter().all(|&l| l == 2 || l == 4));
        let span = span_members(&spec, &cert.delta);
        assert!(span.contains(2) && span.contains(4));
        assert!(cert.passed());
    }

    #[test]
    fn tampered_family_fails() {
        let spec = GroupSpec::new(vec![12, 5]).unwrap();
        let members: Vec<usize> = (0..60).filter(|x| x % 7 == 1 || x % 11 == 0).collect();
        let a = SetStats::new(&spec, &members).unwrap();
        let (cert, fam) = refined_chang_abelian(&a, 0.6, WitnessPolicy::MaxViolation, DEFAULT_WEIGHT_BUDGET).unwrap();
        let rep = verify_weight_family(&a, 0.6, &cert.delta, fam.weights()).unwrap();
        assert!(rep.passed, "{rep:?}");
        let mut bad = fam.weights().to_vec();
        bad[0].iter_mut().for_each(|v| *v *= 1.01);
        let rep = verify_weight_family(&a, 0.6, &cert.delta, &bad).unwrap();
        assert!(!rep.passed);
        assert!(rep.max_mean_deviation > 1e-3 && rep.max_pointwise_deviation > 1e-4);
    }

    #[test]
    fn budget_gate() {
        let spec = GroupSpec::new(vec![60]).unwrap();
        let a = SetStats::new(&spec, &[0]).unwrap();
        // bound = floor(2/0.01 * ln 60) = 818
        assert!(matches!(
            refined_chang_abelian(&a, 0.1, WitnessPolicy::MaxViolation, DEFAULT_WEIGHT_BUDGET),
            Err(Error::ResourceGate { .. })
        ));
    }
}
