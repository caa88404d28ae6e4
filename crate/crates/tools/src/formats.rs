//! JSON and CSV shapes of everything the tools read or write.
//!
//! Complex numbers are `[re, im]` pairs. Sets are stored as sorted canonical
//! indices, subspaces as echelon rows, sign strings as `+`/`-` sequences.

use std::collections::BTreeMap;

use chang_core::chang_abelian::{AbelianCertificate, AbelianStep, SignIndex, SweepReport, WeightFamily};
use chang_core::chang_fpn::{ChangCertificateFpn, IterationStep, VerificationReport};
use chang_core::counting::{ChainTerms, CountingReport, GammaRow};
use chang_core::fourier::{DensityMap, MapKind, SetStats};
use chang_core::group::{GroupSpec, SubspaceFp};
use chang_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ToolError;

pub const FPN_FORMAT: &str = "chang/fpn-certificate/v1";
pub const ABELIAN_FORMAT: &str = "chang/abelian-certificate/v1";
pub const COUNTING_FORMAT: &str = "chang/counting-report/v1";
pub const R1_FORMAT: &str = "chang/r1-report/v1";

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn parse_group(s: &str) -> Result<GroupSpec, ToolError> {
    s.parse().map_err(|e| ToolError::config(format!("group {s:?}: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, ToolError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetDto {
    pub group: String,
    pub members: Vec<usize>,
    pub alpha: f64,
}

impl SetDto {
    pub fn from_set(a: &SetStats) -> Self {
        Self {
            group: a.spec().to_string(),
            members: a.members().to_vec(),
            alpha: a.alpha(),
        }
    }

    pub fn to_set(&self) -> Result<SetStats, ToolError> {
        Ok(SetStats::new(&parse_group(&self.group)?, &self.members)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValuesDto {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMapDto {
    pub group: String,
    pub kind: String,
    pub values: ValuesDto,
}

impl DensityMapDto {
    pub fn from_map(m: &DensityMap) -> Self {
        let values = if m.is_real() {
            ValuesDto::Real(m.real_values())
        } else {
            ValuesDto::Complex(m.values().iter().map(|&z| pair(z)).collect())
        };
        Self {
            group: m.spec().to_string(),
            kind: m.kind().as_str().to_string(),
            values,
        }
    }

    pub fn to_map(&self) -> Result<DensityMap, ToolError> {
        let spec = parse_group(&self.group)?;
        let kind = MapKind::parse(&self.kind).ok_or_else(|| ToolError::config(format!("map kind {:?}", self.kind)))?;
        let values = match &self.values {
            ValuesDto::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            ValuesDto::Complex(v) => v.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        };
        Ok(DensityMap::new(&spec, values, kind)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceDto {
    pub p: u32,
    pub n: usize,
    pub dim: usize,
    pub basis: Vec<Vec<u32>>,
}

impl SubspaceDto {
    pub fn from_subspace(v: &SubspaceFp) -> Self {
        Self {
            p: v.p(),
            n: v.n(),
            dim: v.dim(),
            basis: v.basis().to_vec(),
        }
    }

    pub fn to_subspace(&self) -> Result<SubspaceFp, ToolError> {
        let v = SubspaceFp::from_generators(self.p, self.n, &self.basis)?;
        if v.dim() != self.dim {
            return Err(ToolError::config(format!("basis has rank {}, file says {}", v.dim(), self.dim)));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationDto {
    pub checked: usize,
    pub max: f64,
    pub mean: f64,
    pub argmax: Option<usize>,
    pub threshold: f64,
    pub passed: bool,
    pub spectrum_contained: bool,
}

impl From<&VerificationReport> for VerificationDto {
    fn from(r: &VerificationReport) -> Self {
        Self {
            checked: r.checked,
            max: r.max,
            mean: r.mean,
            argmax: r.argmax,
            threshold: r.threshold,
            passed: r.passed,
            spectrum_contained: r.spectrum_contained,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FpnStepDto {
    pub index: usize,
    pub xi: usize,
    pub xi_coords: Vec<u32>,
    pub score: f64,
    pub psi_before: f64,
    pub psi_after: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<f64>>,
}

impl FpnStepDto {
    fn from_step(spec: &GroupSpec, s: &IterationStep, trace: bool) -> Self {
        Self {
            index: s.index,
            xi: s.xi,
            xi_coords: spec.element_from_index(s.xi).0,
            score: s.score,
            psi_before: s.psi_before,
            psi_after: s.psi_after,
            phase: trace.then(|| s.test.phase.iter().map(|&z| pair(z)).collect()),
            d: trace.then(|| s.test.d.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FpnCertificateDto {
    pub format: String,
    pub set: SetDto,
    pub eps: f64,
    pub policy: String,
    pub v: SubspaceDto,
    pub bound_dim: usize,
    pub steps: Vec<FpnStepDto>,
    pub verification: VerificationDto,
}

impl FpnCertificateDto {
    pub fn from_certificate(c: &ChangCertificateFpn, trace: bool) -> Self {
        let spec = c.set.spec();
        Self {
            format: FPN_FORMAT.into(),
            set: SetDto::from_set(&c.set),
            eps: c.eps,
            policy: c.policy.as_str().into(),
            v: SubspaceDto::from_subspace(&c.v),
            bound_dim: c.bound_dim,
            steps: c.trace.iter().map(|s| FpnStepDto::from_step(spec, s, trace)).collect(),
            verification: (&c.verification).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepDto {
    pub checked: usize,
    pub max: f64,
    pub mean: f64,
    pub argmax: Option<usize>,
    pub threshold: f64,
    pub passed: bool,
}

impl From<&SweepReport> for SweepDto {
    fn from(r: &SweepReport) -> Self {
        Self {
            checked: r.checked,
            max: r.max,
            mean: r.mean,
            argmax: r.argmax,
            threshold: r.threshold,
            passed: r.passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelianStepDto {
    pub index: usize,
    pub witness: usize,
    pub witness_coords: Vec<u32>,
    pub score: f64,
    pub potential_before: f64,
    pub potential_after: f64,
    pub orthogonality_residual: f64,
    pub off_support: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub masses: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correlations: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<[f64; 2]>>,
}

impl AbelianStepDto {
    fn from_step(spec: &GroupSpec, s: &AbelianStep, trace: bool) -> Self {
        Self {
            index: s.index,
            witness: s.witness,
            witness_coords: spec.element_from_index(s.witness).0,
            score: s.score,
            potential_before: s.potential_before,
            potential_after: s.potential_after,
            orthogonality_residual: s.orthogonality_residual,
            off_support: s.off_support,
            masses: s.masses.clone(),
            correlations: s.correlations.clone(),
            phases: trace.then(|| s.phases.iter().map(|&z| pair(z)).collect()),
        }
    }
}

/// Weights keyed by sign string; `BTreeMap` order puts `+` before `-`, which
/// is the canonical sign order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFamilyDto {
    pub group: String,
    pub delta: Vec<usize>,
    pub span_size: usize,
    pub weights: BTreeMap<String, Vec<f64>>,
    pub masses: BTreeMap<String, f64>,
    pub potentials: Vec<f64>,
}

impl WeightFamilyDto {
    pub fn from_family(fam: &WeightFamily, a: &SetStats, potentials: Vec<f64>) -> Self {
        let r = fam.rounds();
        let masses = fam.masses(a);
        let key = |i: usize| SignIndex::from_position(r, i).to_string();
        Self {
            group: fam.spec().to_string(),
            delta: fam.delta().to_vec(),
            span_size: fam.span().len(),
            weights: fam.weights().iter().enumerate().map(|(i, w)| (key(i), w.clone())).collect(),
            masses: masses.into_iter().enumerate().map(|(i, m)| (key(i), m)).collect(),
            potentials,
        }
    }

    /// Weights in position order.
    pub fn ordered_weights(&self) -> Result<Vec<Vec<f64>>, ToolError> {
        let r = self.delta.len();
        if r >= 31 || self.weights.len() != 1 << r {
            return Err(ToolError::config(format!("{} weights for {r} generators", self.weights.len())));
        }
        let mut out = vec![Vec::new(); 1 << r];
        for (k, w) in &self.weights {
            let s: SignIndex = k.parse()?;
            if s.len() != r {
                return Err(ToolError::config(format!("sign string {k:?} has the wrong length")));
            }
            out[s.position()] = w.clone();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelianCertificateDto {
    pub format: String,
    pub variant: String,
    pub set: SetDto,
    pub eps: f64,
    pub policy: String,
    pub delta: Vec<usize>,
    pub delta_coords: Vec<Vec<u32>>,
    pub span_size: usize,
    pub bound: usize,
    pub dissociated: Option<bool>,
    pub steps: Vec<AbelianStepDto>,
    pub sweep: SweepDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_family: Option<WeightFamilyDto>,
}

impl AbelianCertificateDto {
    pub fn from_certificate(c: &AbelianCertificate, family: Option<&WeightFamily>, trace: bool) -> Self {
        let spec = c.set.spec();
        let potentials = potentials(c);
        Self {
            format: ABELIAN_FORMAT.into(),
            variant: c.variant.as_str().into(),
            set: SetDto::from_set(&c.set),
            eps: c.eps,
            policy: c.policy.as_str().into(),
            delta: c.delta.clone(),
            delta_coords: c.delta.iter().map(|&d| spec.element_from_index(d).0).collect(),
            span_size: c.span_size,
            bound: c.bound,
            dissociated: c.dissociated,
            steps: c.trace.iter().map(|s| AbelianStepDto::from_step(spec, s, trace)).collect(),
            sweep: (&c.sweep).into(),
            weight_family: family.map(|f| WeightFamilyDto::from_family(f, &c.set, potentials)),
        }
    }
}

/// `Psi_0, ..., Psi_T` or `Phi_0, ..., Phi_r`.
pub fn potentials(c: &AbelianCertificate) -> Vec<f64> {
    let mut v: Vec<f64> = c.trace.iter().map(|s| s.potential_before).collect();
    match c.trace.last() {
        Some(s) => v.push(s.potential_after),
        None => v.push(match c.variant {
            chang_core::chang_abelian::Variant::Classical => (1.0 / c.set.alpha()).ln(),
            chang_core::chang_abelian::Variant::Refined => 0.0,
        }),
    }
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaRowDto {
    pub gamma: usize,
    pub lift: usize,
    pub mean_a: f64,
    pub mean_a_sq: f64,
    pub lambda4_quotient: f64,
}

impl From<&GammaRow> for GammaRowDto {
    fn from(r: &GammaRow) -> Self {
        Self {
            gamma: r.gamma,
            lift: r.lift,
            mean_a: r.mean_a,
            mean_a_sq: r.mean_a_sq,
            lambda4_quotient: r.lambda4_quotient,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainDto {
    pub sum_lambda4: f64,
    pub sum_sup_parseval: f64,
    pub eps2_alpha2_sum: f64,
    pub eps2_alpha3: f64,
}

impl From<ChainTerms> for ChainDto {
    fn from(c: ChainTerms) -> Self {
        Self {
            sum_lambda4: c.sum_lambda4,
            sum_sup_parseval: c.sum_sup_parseval,
            eps2_alpha2_sum: c.eps2_alpha2_sum,
            eps2_alpha3: c.eps2_alpha3,
        }
    }
}

/// One weighted comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingCheckDto {
    pub label: String,
    pub seed: Option<u64>,
    pub lambda_indicator: [f64; 2],
    pub lambda_average: [f64; 2],
    pub delta: [f64; 2],
    pub discrepancy: f64,
    pub classical_bound: f64,
    pub l1_norms: [f64; 4],
    pub chain_holds: bool,
    pub passed: bool,
}

impl CountingCheckDto {
    pub fn new(label: impl Into<String>, seed: Option<u64>, r: &CountingReport) -> Self {
        Self {
            label: label.into(),
            seed,
            lambda_indicator: pair(r.lambda_indicator),
            lambda_average: pair(r.lambda_average),
            delta: pair(r.delta),
            discrepancy: r.discrepancy,
            classical_bound: r.classical_bound,
            l1_norms: r.l1_norms,
            chain_holds: r.chain_holds,
            passed: r.passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingReportDto {
    pub format: String,
    pub set: SetDto,
    pub eps: f64,
    pub v: SubspaceDto,
    pub codim: usize,
    pub bound: f64,
    pub max_discrepancy: f64,
    pub max_nontrivial_mean_a: f64,
    pub parseval_residual: f64,
    pub mean_parseval_residual: f64,
    pub lift_residual: f64,
    pub chain: ChainDto,
    pub table: Vec<GammaRowDto>,
    pub checks: Vec<CountingCheckDto>,
    pub passed: bool,
}

pub const COUNTING_CSV_VERSION: &str = "# chang counting csv v1";
pub const COUNTING_CSV_HEADER: [&str; 12] = [
    "label",
    "seed",
    "alpha",
    "eps",
    "codim",
    "discrepancy",
    "bound",
    "max_nontrivial_Ez_a",
    "l1_q1",
    "l1_q2",
    "l1_q3",
    "l1_q4",
];

/// CSV with a versioned header comment, one row per check.
pub fn counting_csv(report: &CountingReportDto) -> Result<String, ToolError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COUNTING_CSV_HEADER)?;
    for c in &report.checks {
        let mut row = vec![
            c.label.clone(),
            c.seed.map(|s| s.to_string()).unwrap_or_default(),
            report.set.alpha.to_string(),
            report.eps.to_string(),
            report.codim.to_string(),
            c.discrepancy.to_string(),
            report.bound.to_string(),
            report.max_nontrivial_mean_a.to_string(),
        ];
        row.extend(c.l1_norms.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8");
    Ok(format!("{COUNTING_CSV_VERSION}\n{body}"))
}

/// Peeks at the `format` field of a JSON document.
pub fn format_of(json: &str) -> Result<String, ToolError> {
    #[derive(Deserialize)]
    struct Head {
        format: String,
    }
    Ok(serde_json::from_str::<Head>(json)?.format)
}
