use std::path::{Path, PathBuf};

use chang_core::chang_abelian::DEFAULT_WEIGHT_BUDGET;
use chang_core::chang_fpn::WitnessPolicy;
use chang_core::fourier::SetStats;
use chang_core::group::GroupSpec;
use serde::{Deserialize, Serialize};

use crate::error::ToolError;
use crate::formats::parse_group;
use crate::generators::SetGeneratorSpec;
use crate::sweep::SweepSpec;

/// Overrides `weight_budget`.
pub const ENV_WEIGHT_BUDGET: &str = "CHANG_WEIGHT_BUDGET";
/// Overrides `threads`.
pub const ENV_THREADS: &str = "CHANG_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    FpnRefined,
    FpnR1Remark,
    AbelianClassical,
    AbelianRefined,
    CountingClassical,
    CountingLocalized,
    TightnessSweep,
}

impl Variant {
    fn needs_prime_vector(self) -> bool {
        matches!(
            self,
            Variant::FpnRefined | Variant::FpnR1Remark | Variant::CountingClassical | Variant::CountingLocalized
        )
    }
}

fn default_policy() -> String {
    "max".into()
}
fn default_quadruples() -> usize {
    100
}
fn default_restarts() -> usize {
    5
}
fn default_rounds() -> usize {
    25
}

/// One experiment: a single JSON file, optionally patched by CLI flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub variant: Variant,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub generator: Option<SetGeneratorSpec>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default = "default_policy")]
    pub policy: String,
    /// Root of every random draw not fixed by the generator.
    #[serde(default)]
    pub seed: u64,
    /// Random weight quadruples per kind (localized counting).
    #[serde(default = "default_quadruples")]
    pub quadruples: usize,
    #[serde(default = "default_restarts")]
    pub adversary_restarts: usize,
    #[serde(default = "default_rounds")]
    pub adversary_rounds: usize,
    /// Largest `2^r * |G|` the refined abelian run may allocate.
    #[serde(default)]
    pub weight_budget: Option<u64>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub trace: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl RunConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            group: None,
            generator: None,
            eps: None,
            policy: default_policy(),
            seed: 0,
            quadruples: default_quadruples(),
            adversary_restarts: default_restarts(),
            adversary_rounds: default_rounds(),
            weight_budget: None,
            threads: None,
            trace: false,
            out: None,
            sweep: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, ToolError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| ToolError::config(format!("{}: {e}", path.display())))
    }

    /// Applies resource-gate overrides from the environment.
    pub fn apply_env(&mut self) -> Result<(), ToolError> {
        if let Ok(v) = std::env::var(ENV_WEIGHT_BUDGET) {
            self.weight_budget = Some(v.parse().map_err(|_| ToolError::config(format!("{ENV_WEIGHT_BUDGET}={v:?}")))?);
        }
        if let Ok(v) = std::env::var(ENV_THREADS) {
            self.threads = Some(v.parse().map_err(|_| ToolError::config(format!("{ENV_THREADS}={v:?}")))?);
        }
        Ok(())
    }

    pub fn policy(&self) -> Result<WitnessPolicy, ToolError> {
        WitnessPolicy::parse(&self.policy).ok_or_else(|| ToolError::config(format!("policy {:?} (use first or max)", self.policy)))
    }

    pub fn eps(&self) -> Result<f64, ToolError> {
        match self.eps {
            Some(e) if e > 0.0 && e < 1.0 => Ok(e),
            Some(e) => Err(ToolError::config(format!("eps = {e} not in (0,1)"))),
            None => Err(ToolError::config("eps is required")),
        }
    }

    pub fn group(&self) -> Result<GroupSpec, ToolError> {
        let s = self.group.as_deref().ok_or_else(|| ToolError::config("group is required"))?;
        let spec = parse_group(s)?;
        if self.variant.needs_prime_vector() && spec.prime_vector_params().is_none() {
            return Err(ToolError::config(format!("{:?} needs a group of the form p^n, got {spec}", self.variant)));
        }
        Ok(spec)
    }

    pub fn set(&self) -> Result<SetStats, ToolError> {
        let spec = self.group()?;
        self.generator
            .as_ref()
            .ok_or_else(|| ToolError::config("generator is required"))?
            .generate(&spec)
    }

    pub fn weight_budget(&self) -> u128 {
        self.weight_budget.map_or(DEFAULT_WEIGHT_BUDGET, u128::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"variant":"fpn_refined","group":"2^10","eps":0.5,
                "generator":{"kind":"random_density","density":0.125,"seed":7}}"#,
        )
        .unwrap();
        assert_eq!(cfg.policy().unwrap(), WitnessPolicy::MaxViolation);
        assert_eq!(cfg.set().unwrap().size(), 128);
        assert_eq!(cfg.quadruples, 100);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"variant":"fpn_refined","colour":1}"#).is_err());
        let mut cfg = RunConfig::new(Variant::FpnRefined);
        cfg.group = Some("12x5".into());
        assert!(cfg.group().is_err());
        cfg.variant = Variant::AbelianRefined;
        assert!(cfg.group().is_ok());
        cfg.eps = Some(1.5);
        assert!(cfg.eps().is_err());
        cfg.policy = "random".into();
        assert!(cfg.policy().is_err());
    }
}
