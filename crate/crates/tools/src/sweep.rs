//! Achieved `dim V` against the bound `2 eps^-2 ln(1/alpha)` over a grid.

use chang_core::chang_fpn::{refined_chang, WitnessPolicy};
use chang_core::group::GroupSpec;
use chang_core::tolerance::chang_bound;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ToolError;
use crate::generators::SetGeneratorSpec;

/// Desk-scale cap on the ambient size of a sweep row.
pub const SWEEP_MAX_ORDER: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepFamily {
    /// Radius `n / radius_divisor` (rounded down), `p = 2` only.
    HammingBall { radius_divisor: usize },
    RandomDensity { density: f64, seed: u64 },
    /// The span of the first `dim` unit vectors.
    Subspace { dim: usize },
    /// `A = G`.
    Full,
}

impl SweepFamily {
    fn generator(&self, p: u32, n: usize) -> Result<SetGeneratorSpec, ToolError> {
        Ok(match self {
            SweepFamily::HammingBall { radius_divisor } => {
                if *radius_divisor == 0 {
                    return Err(ToolError::config("radius_divisor must be positive"));
                }
                SetGeneratorSpec::HammingBall { radius: n / radius_divisor }
            }
            SweepFamily::RandomDensity { density, seed } => SetGeneratorSpec::RandomDensity {
                density: *density,
                seed: *seed,
            },
            SweepFamily::Subspace { dim } => {
                if *dim > n {
                    return Err(ToolError::config(format!("subspace dim {dim} > n = {n}")));
                }
                SetGeneratorSpec::Subspace {
                    basis: (0..*dim)
                        .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
                        .collect(),
                }
            }
            SweepFamily::Full => SetGeneratorSpec::Explicit {
                elements: (0..(p as usize).pow(n as u32)).collect(),
            },
        })
    }

    pub fn label(&self) -> String {
        match self {
            SweepFamily::HammingBall { radius_divisor } => format!("hamming_ball/n{radius_divisor}"),
            SweepFamily::RandomDensity { density, seed } => format!("random_density/{density}/{seed}"),
            SweepFamily::Subspace { dim } => format!("subspace/{dim}"),
            SweepFamily::Full => "full".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "two")]
    pub p: u32,
    pub n: Vec<usize>,
    pub eps: Vec<f64>,
    pub families: Vec<SweepFamily>,
}

fn two() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub group: String,
    pub n: usize,
    pub family: String,
    pub eps: f64,
    pub alpha: f64,
    pub dim_v: usize,
    /// `floor(2 eps^-2 ln(1/alpha))`.
    pub bound: usize,
    /// `2 eps^-2 ln(1/alpha)` before rounding.
    pub bound_real: f64,
    /// `dim_v / bound_real`, or 0 when both vanish.
    pub ratio: f64,
    pub steps: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub fn tightness_sweep(spec: &SweepSpec, policy: WitnessPolicy) -> Result<Vec<SweepRow>, ToolError> {
    let mut jobs = Vec::new();
    for &n in &spec.n {
        let group = GroupSpec::prime_vector(spec.p, n)?;
        if group.order() > SWEEP_MAX_ORDER {
            return Err(chang_core::Error::CapExceeded {
                what: "sweep group order",
                size: group.order(),
                cap: SWEEP_MAX_ORDER,
            }
            .into());
        }
        for fam in &spec.families {
            for &eps in &spec.eps {
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(ToolError::config(format!("eps = {eps} not in (0,1)")));
                }
                jobs.push((group.clone(), n, fam.clone(), eps));
            }
        }
    }
    let mut rows = jobs
        .into_par_iter()
        .map(|(group, n, fam, eps)| {
            let a = fam.generator(spec.p, n)?.generate(&group)?;
            let cert = refined_chang(&a, eps, policy)?;
            let bound_real = 2.0 / (eps * eps) * (1.0 / a.alpha()).ln();
            let dim_v = cert.v.dim();
            Ok(SweepRow {
                group: group.to_string(),
                n,
                family: fam.label(),
                eps,
                alpha: a.alpha(),
                dim_v,
                bound: chang_bound(a.alpha(), eps),
                bound_real,
                ratio: if dim_v == 0 { 0.0 } else { dim_v as f64 / bound_real },
                steps: cert.steps(),
                max_residual: cert.verification.max,
                threshold: cert.verification.threshold,
                passed: cert.verification.passed && dim_v <= chang_bound(a.alpha(), eps),
            })
        })
        .collect::<Result<Vec<_>, ToolError>>()?;
    rows.sort_by(|a, b| {
        (a.n, &a.family)
            .cmp(&(b.n, &b.family))
            .then(a.eps.total_cmp(&b.eps))
    });
    Ok(rows)
}

pub const SWEEP_CSV_VERSION: &str = "# chang sweep csv v1";

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String, ToolError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8");
    Ok(format!("{SWEEP_CSV_VERSION}\n{body}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_rows_hit_the_closed_form() {
        let spec = SweepSpec {
            p: 2,
            n: vec![6],
            eps: vec![0.5],
            families: vec![SweepFamily::Subspace { dim: 2 }, SweepFamily::Full],
        };
        let rows = tightness_sweep(&spec, WitnessPolicy::MaxViolation).unwrap();
        assert_eq!(rows.len(), 2);
        let full = &rows[0];
        assert_eq!((full.family.as_str(), full.dim_v, full.bound), ("full", 0, 0));
        let sub = &rows[1];
        assert_eq!(sub.dim_v, 4);
        let expected = 0.25 / (2.0 * std::f64::consts::LN_2);
        assert!((sub.ratio - expected).abs() < 1e-12);
        let csv = sweep_csv(&rows).unwrap();
        assert!(csv.starts_with(SWEEP_CSV_VERSION));
        assert_eq!(csv.lines().count(), 4);
    }
}
