//! Executes a [`RunConfig`] or re-verifies a stored certificate. Results are
//! returned as in-memory artifacts; callers decide whether to write them.

use std::path::Path;

use chang_core::chang_abelian::{
    classical_chang_abelian, refined_chang_abelian, verify_classical_abelian, verify_weight_family, AbelianCertificate,
    WeightFamilyReport,
};
use chang_core::chang_fpn::{generalized_refinement_r1, refined_chang};
use chang_core::counting::{random_weight_quadruple, CountingContext, WeightKind, WeightQuadruple};
use chang_core::fourier::{DensityMap, MapKind, SetStats};
use chang_core::tolerance::{chang_bound, GUARD};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, Variant};
use crate::error::{ToolError, EXIT_OK, EXIT_VERIFY};
use crate::formats::{
    counting_csv, format_of, potentials, to_json, AbelianCertificateDto, CountingCheckDto, CountingReportDto, FpnCertificateDto,
    SetDto, SubspaceDto, SweepDto, ABELIAN_FORMAT, COUNTING_FORMAT, FPN_FORMAT, R1_FORMAT,
};
use crate::parallel::{verify_fpn, with_threads};
use crate::seeds;
use crate::sweep::{sweep_csv, tightness_sweep};

/// Largest off-support Fourier mass tolerated in a classical trace.
const SUPPORT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub passed: bool,
    pub summary: String,
    pub artifacts: Vec<Artifact>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_VERIFY
        }
    }

    pub fn artifact(&self, name: &str) -> Option<&str> {
        self.artifacts.iter().find(|a| a.name == name).map(|a| a.contents.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for a in &self.artifacts {
            std::fs::write(dir.join(&a.name), &a.contents)?;
        }
        Ok(())
    }
}

fn artifact(name: &str, contents: String) -> Artifact {
    Artifact {
        name: name.into(),
        contents,
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, ToolError> {
    with_threads(cfg.threads, || match cfg.variant {
        Variant::FpnRefined => fpn_refined(cfg),
        Variant::FpnR1Remark => fpn_r1(cfg),
        Variant::AbelianClassical => abelian_classical(cfg),
        Variant::AbelianRefined => abelian_refined(cfg),
        Variant::CountingClassical | Variant::CountingLocalized => counting(cfg),
        Variant::TightnessSweep => sweep(cfg),
    })?
}

fn fpn_refined(cfg: &RunConfig) -> Result<RunOutcome, ToolError> {
    let (a, eps, policy) = (cfg.set()?, cfg.eps()?, cfg.policy()?);
    let mut cert = refined_chang(&a, eps, policy)?;
    cert.verification = verify_fpn(&a, eps, &cert.v)?;
    let drops_ok = cert.potentials().min_drop().is_none_or(|d| d >= eps * eps / 2.0 - GUARD);
    let ver = &cert.verification;
    let passed = ver.passed && ver.spectrum_contained && cert.v.dim() <= cert.bound_dim && drops_ok;
    let summary = format!(
        "fpn_refined {}: alpha={:.6} eps={eps} dim V={} bound={} steps={} max residual={:.6e} threshold={:.6e}",
        a.spec(),
        a.alpha(),
        cert.v.dim(),
        cert.bound_dim,
        cert.steps(),
        ver.max,
        ver.threshold
    );
    let dto = FpnCertificateDto::from_certificate(&cert, cfg.trace);
    Ok(RunOutcome {
        passed,
        summary,
        artifacts: vec![artifact("certificate.json", to_json(&dto)?)],
    })
}

#[derive(Serialize)]
struct R1ReportDto {
    format: &'static str,
    set: SetDto,
    eps: f64,
    policy: &'static str,
    v: SubspaceDto,
    entropy: f64,
    bound_dim: usize,
    steps: usize,
    witnesses: Vec<usize>,
    potentials: Vec<f64>,
    max_l1_gap: f64,
    max_gain: f64,
    passed: bool,
}

fn fpn_r1(cfg: &RunConfig) -> Result<RunOutcome, ToolError> {
    let (a, eps, policy) = (cfg.set()?, cfg.eps()?, cfg.policy()?);
    let h = density_of(&a)?;
    let (v, rep) = generalized_refinement_r1(&h, eps, policy)?;
    let passed = rep.passed && v.dim() <= rep.bound_dim;
    let summary = format!(
        "fpn_r1_remark {}: dim V={} bound={} max gain={:.6e} max l1 gap={:.6e}",
        a.spec(),
        v.dim(),
        rep.bound_dim,
        rep.max_gain,
        rep.max_l1_gap
    );
    let dto = R1ReportDto {
        format: R1_FORMAT,
        set: SetDto::from_set(&a),
        eps,
        policy: policy.as_str(),
        v: SubspaceDto::from_subspace(&v),
        entropy: rep.entropy,
        bound_dim: rep.bound_dim,
        steps: rep.steps,
        witnesses: rep.witnesses,
        potentials: rep.potentials,
        max_l1_gap: rep.max_l1_gap,
        max_gain: rep.max_gain,
        passed: rep.passed,
    };
    Ok(RunOutcome {
        passed,
        summary,
        artifacts: vec![artifact("r1_report.json", to_json(&dto)?)],
    })
}

/// `h = alpha^-1 1_A`.
fn density_of(a: &SetStats) -> Result<DensityMap, ToolError> {
    let inv = 1.0 / a.alpha();
    let vals: Vec<f64> = a.indicator().real_values().iter().map(|v| v * inv).collect();
    Ok(DensityMap::from_real(a.spec(), &vals, MapKind::Density)?)
}

fn classical_trace_ok(c: &AbelianCertificate) -> bool {
    let eps = c.eps;
    c.trace
        .iter()
        .all(|s| s.potential_before - s.potential_after >= eps * eps / 2.0 - GUARD && s.off_support <= SUPPORT_TOL)
}

fn refined_trace_ok(c: &AbelianCertificate) -> bool {
    let eps = c.eps;
    let cap = (1.0 / c.set.alpha()).ln() + GUARD;
    c.trace
        .iter()
        .all(|s| s.potential_after - s.potential_before > eps * eps / 2.0 - GUARD && s.potential_after <= cap)
}

fn abelian_classical(cfg: &RunConfig) -> Result<RunOutcome, ToolError> {
    let (a, eps, policy) = (cfg.set()?, cfg.eps()?, cfg.policy()?);
    let cert = classical_chang_abelian(&a, eps, policy)?;
    let passed = cert.passed() && classical_trace_ok(&cert);
    let summary = format!(
        "abelian_classical {}: alpha={:.6} |Lambda|={} bound={} span={} max residual={:.6e}",
        a.spec(),
        a.alpha(),
        cert.delta.len(),
        cert.bound,
        cert.span_size,
        cert.sweep.max
    );
    let dto = AbelianCertificateDto::from_certificate(&cert, None, cfg.trace);
    Ok(RunOutcome {
        passed,
        summary,
        artifacts: vec![artifact("certificate.json", to_json(&dto)?)],
    })
}

#[derive(Serialize)]
pub struct WeightFamilyReportDto {
    pub r: usize,
    pub min_value: f64,
    pub max_mean_deviation: f64,
    pub max_pointwise_deviation: f64,
    pub max_off_support: f64,
    pub dissociated: Option<bool>,
    pub sweep: SweepDto,
    pub classical_max: f64,
    pub passed: bool,
}

impl From<&WeightFamilyReport> for WeightFamilyReportDto {
    fn from(r: &WeightFamilyReport) -> Self {
        Self {
            r: r.r,
            min_value: r.min_value,
            max_mean_deviation: r.max_mean_deviation,
            max_pointwise_deviation: r.max_pointwise_deviation,
            max_off_support: r.max_off_support,
            dissociated: r.dissociated,
            sweep: (&r.sweep).into(),
            classical_max: r.classical_max,
            passed: r.passed,
        }
    }
}

fn abelian_refined(cfg: &RunConfig) -> Result<RunOutcome, ToolError> {
    let (a, eps, policy) = (cfg.set()?, cfg.eps()?, cfg.policy()?);
    let (cert, fam) = refined_chang_abelian(&a, eps, policy, cfg.weight_budget())?;
    let rep = verify_weight_family(&a, eps, &cert.delta, fam.weights())?;
    let passed = cert.passed() && rep.passed && refined_trace_ok(&cert);
    let summary = format!(
        "abelian_refined {}: alpha={:.6} r={} bound={} Phi={:.6} max residual={:.6e}",
        a.spec(),
        a.alpha(),
        cert.delta.len(),
        cert.bound,
        potentials(&cert).last().copied().unwrap_or(0.0),
        rep.sweep.max
    );
    let dto = AbelianCertificateDto::from_certificate(&cert, Some(&fam), cfg.trace);
    Ok(RunOutcome {
        passed,
        summary,
        artifacts: vec![
            artifact("certificate.json", to_json(&dto)?),
            artifact("verification.json", to_json(&WeightFamilyReportDto::from(&rep))?),
        ],
    })
}

/// Seed of the `index`-th random quadruple of `kind`.
pub fn quadruple_seed(root: u64, kind: WeightKind, index: usize) -> u64 {
    let k = WeightKind::ALL.iter().position(|&x| x == kind).expect("listed") as u64;
    seeds::child(root, seeds::WEIGHT_STREAM, (k << 32) | index as u64)
}

fn counting(cfg: &RunConfig) -> Result<RunOutcome, ToolError> {
    let (a, eps, policy) = (cfg.set()?, cfg.eps()?, cfg.policy()?);
    let ctx = CountingContext::new(&a, eps, policy)?;
    let mut checks = vec![CountingCheckDto::new("ones", None, &ctx.check(&WeightQuadruple::ones(ctx.cosets()))?)];
    if cfg.variant == Variant::CountingLocalized {
        let jobs: Vec<(WeightKind, u64)> = WeightKind::ALL
            .iter()
            .flat_map(|&k| (0..cfg.quadruples).map(move |i| (k, quadruple_seed(cfg.seed, k, i))))
            .collect();
        let random = jobs
            .par_iter()
            .map(|&(kind, seed)| {
                let q = random_weight_quadruple(ctx.cosets(), seed, kind);
                Ok(CountingCheckDto::new(kind.as_str(), Some(seed), &ctx.check(&q)?))
            })
            .collect::<Result<Vec<_>, ToolError>>()?;
        checks.extend(random);
        let adv_seed = seeds::child(cfg.seed, seeds::ADVERSARY_STREAM, 0);
        let q = ctx.adversarial_quadruple(adv_seed, cfg.adversary_restarts, cfg.adversary_rounds)?;
        checks.push(CountingCheckDto::new("adversary", Some(adv_seed), &ctx.check(&q)?));
    }
    let base = ctx.check(&WeightQuadruple::ones(ctx.cosets()))?;
    let max_discrepancy = checks.iter().map(|c| c.discrepancy).fold(0.0, f64::max);
    let passed = checks.iter().all(|c| c.passed);
    let report = CountingReportDto {
        format: COUNTING_FORMAT.into(),
        set: SetDto::from_set(&a),
        eps,
        v: SubspaceDto::from_subspace(&ctx.certificate().v),
        codim: base.codim,
        bound: base.bound,
        max_discrepancy,
        max_nontrivial_mean_a: base.max_nontrivial_mean_a,
        parseval_residual: base.parseval_residual,
        mean_parseval_residual: base.mean_parseval_residual,
        lift_residual: base.lift_residual,
        chain: base.chain.into(),
        table: base.table.iter().map(Into::into).collect(),
        checks,
        passed,
    };
    let summary = format!(
        "{} {}: alpha={:.6} codim W={} checks={} max |Delta|={:.6e} bound={:.6e}",
        if cfg.variant == Variant::CountingLocalized { "counting_localized" } else { "counting_classical" },
        a.spec(),
        a.alpha(),
        report.codim,
        report.checks.len(),
        max_discrepancy,
        report.bound
    );
    Ok(RunOutcome {
        passed,
        summary,
        artifacts: vec![
            artifact("counting.json", to_json(&report)?),
            artifact("counting.csv", counting_csv(&report)?),
        ],
    })
}

fn sweep(cfg: &RunConfig) -> Result<RunOutcome, ToolError> {
    let spec = cfg.sweep.as_ref().ok_or_else(|| ToolError::config("tightness_sweep needs a `sweep` section"))?;
    let rows = tightness_sweep(spec, cfg.policy()?)?;
    let passed = rows.iter().all(|r| r.passed && r.ratio <= 1.0);
    let worst = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(RunOutcome {
        passed,
        summary: format!("tightness_sweep: {} rows, largest ratio {worst:.4}", rows.len()),
        artifacts: vec![artifact("sweep.csv", sweep_csv(&rows)?)],
    })
}

/// Loads a certificate written by [`run`] and re-establishes every claim.
pub fn verify_file(path: &Path, threads: Option<usize>) -> Result<RunOutcome, ToolError> {
    let text = std::fs::read_to_string(path)?;
    with_threads(threads, || verify_json(&text))?
}

pub fn verify_json(text: &str) -> Result<RunOutcome, ToolError> {
    let format = format_of(text)?;
    match format.as_str() {
        FPN_FORMAT => {
            let dto: FpnCertificateDto = serde_json::from_str(text)?;
            let a = dto.set.to_set()?;
            let v = dto.v.to_subspace()?;
            let rep = verify_fpn(&a, dto.eps, &v)?;
            let bound = chang_bound(a.alpha(), dto.eps);
            let passed = rep.passed && rep.spectrum_contained && v.dim() <= bound;
            let out = json!({
                "format": format,
                "dim_v": v.dim(),
                "bound_dim": bound,
                "checked": rep.checked,
                "max": rep.max,
                "threshold": rep.threshold,
                "spectrum_contained": rep.spectrum_contained,
                "matches_stored": rep.max == dto.verification.max,
                "passed": passed,
            });
            Ok(verified(passed, format!("{}: dim V={} max={:.6e}", FPN_FORMAT, v.dim(), rep.max), out)?)
        }
        ABELIAN_FORMAT => {
            let dto: AbelianCertificateDto = serde_json::from_str(text)?;
            let a = dto.set.to_set()?;
            let bound = chang_bound(a.alpha(), dto.eps);
            let within = dto.delta.len() <= bound;
            match dto.variant.as_str() {
                "classical" => {
                    let (sw, dis) = verify_classical_abelian(&a, dto.eps, &dto.delta)?;
                    let passed = sw.passed && dis != Some(false) && within;
                    let out = json!({
                        "format": format,
                        "variant": "classical",
                        "r": dto.delta.len(),
                        "bound": bound,
                        "dissociated": dis,
                        "sweep": SweepDto::from(&sw),
                        "passed": passed,
                    });
                    verified(passed, format!("{ABELIAN_FORMAT} classical: r={} max={:.6e}", dto.delta.len(), sw.max), out)
                }
                "refined" => {
                    let fam = dto
                        .weight_family
                        .as_ref()
                        .ok_or_else(|| ToolError::config("refined certificate without weight_family"))?;
                    if fam.delta != dto.delta {
                        return Err(ToolError::config("weight_family.delta differs from delta"));
                    }
                    let weights = fam.ordered_weights()?;
                    let rep = verify_weight_family(&a, dto.eps, &dto.delta, &weights)?;
                    let passed = rep.passed && within;
                    let out = json!({
                        "format": format,
                        "variant": "refined",
                        "bound": bound,
                        "report": WeightFamilyReportDto::from(&rep),
                        "passed": passed,
                    });
                    verified(passed, format!("{ABELIAN_FORMAT} refined: r={} max={:.6e}", rep.r, rep.sweep.max), out)
                }
                other => Err(ToolError::config(format!("unknown variant {other:?}"))),
            }
        }
        other => Err(ToolError::config(format!("cannot verify documents of format {other:?}"))),
    }
}

fn verified(passed: bool, summary: String, out: serde_json::Value) -> Result<RunOutcome, ToolError> {
    Ok(RunOutcome {
        passed,
        summary,
        artifacts: vec![artifact("verification.json", to_json(&out)?)],
    })
}

