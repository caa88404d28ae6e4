use chang_core::fourier::SetStats;
use chang_core::group::{GroupSpec, SubspaceFp};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::ToolError;
use crate::seeds;

/// How to build the set `A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetGeneratorSpec {
    /// Canonical indices.
    Explicit { elements: Vec<usize> },
    /// `round(density * |G|)` elements (at least one), sampled without
    /// replacement.
    RandomDensity { density: f64, seed: u64 },
    /// The span of the given rows in `F_p^n`.
    Subspace { basis: Vec<Vec<u32>> },
    /// `shift + span(basis)`.
    Coset { basis: Vec<Vec<u32>>, shift: Vec<u32> },
    /// `{x in F_2^n : weight(x) <= radius}`.
    HammingBall { radius: usize },
}

impl SetGeneratorSpec {
    pub fn generate(&self, spec: &GroupSpec) -> Result<SetStats, ToolError> {
        let members = match self {
            SetGeneratorSpec::Explicit { elements } => {
                if let Some(&bad) = elements.iter().find(|&&e| e >= spec.order()) {
                    return Err(ToolError::config(format!("element {bad} outside a group of order {}", spec.order())));
                }
                elements.clone()
            }
            SetGeneratorSpec::RandomDensity { density, seed } => {
                if !(*density > 0.0 && *density <= 1.0) {
                    return Err(ToolError::config(format!("density {density} not in (0,1]")));
                }
                let n = spec.order();
                let k = ((density * n as f64).round() as usize).clamp(1, n);
                let mut rng = seeds::stream(*seed, seeds::SET_STREAM);
                let mut m = sample(&mut rng, n, k).into_vec();
                m.sort_unstable();
                m
            }
            SetGeneratorSpec::Subspace { basis } => subspace(spec, basis)?.element_indices(),
            SetGeneratorSpec::Coset { basis, shift } => {
                let w = subspace(spec, basis)?;
                let coords: Vec<i64> = shift.iter().map(|&c| i64::from(c)).collect();
                let s = spec.canonical_index(&spec.element_from_coords(&coords)?)?;
                let mut m: Vec<usize> = w.element_indices().into_iter().map(|x| spec.add_index(x, s)).collect();
                m.sort_unstable();
                m
            }
            SetGeneratorSpec::HammingBall { radius } => {
                let Some((2, _)) = spec.prime_vector_params() else {
                    return Err(ToolError::config("hamming_ball needs a group of the form 2^n"));
                };
                (0..spec.order()).filter(|x| x.count_ones() as usize <= *radius).collect()
            }
        };
        if members.is_empty() {
            return Err(ToolError::config("generated set is empty"));
        }
        Ok(SetStats::new(spec, &members)?)
    }

    /// Short label for tables.
    pub fn label(&self) -> String {
        match self {
            SetGeneratorSpec::Explicit { elements } => format!("explicit[{}]", elements.len()),
            SetGeneratorSpec::RandomDensity { density, seed } => format!("random_density[{density},{seed}]"),
            SetGeneratorSpec::Subspace { basis } => format!("subspace[{}]", basis.len()),
            SetGeneratorSpec::Coset { basis, .. } => format!("coset[{}]", basis.len()),
            SetGeneratorSpec::HammingBall { radius } => format!("hamming_ball[{radius}]"),
        }
    }
}

fn subspace(spec: &GroupSpec, basis: &[Vec<u32>]) -> Result<SubspaceFp, ToolError> {
    let (p, n) = spec
        .prime_vector_params()
        .ok_or_else(|| ToolError::config("subspace generators need a group of the form p^n"))?;
    Ok(SubspaceFp::from_generators(p, n, basis)?)
}
