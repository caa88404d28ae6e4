//! Dense Fourier analysis on a finite abelian group.
//!
//! Normalisation: `f^(xi) = E_x f(x) conj(chi_xi(x))`, so `f^(0)` is the mean
//! of `f`, the inverse is `f(x) = sum_xi f^(xi) chi_xi(x)`, and Parseval reads
//! `sum_xi |f^(xi)|^2 = E_x |f(x)|^2`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::group::{unit_roots, CosetMap, GroupSpec, SubspaceFp};
use crate::tolerance::{exceeds, IDENTITY_TOL};
use crate::{Error, Result};

/// What a [`DensityMap`] is meant to hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapKind {
    Indicator,
    ProbabilityMeasure,
    Density,
    Weight,
    Generic,
}

impl MapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MapKind::Indicator => "indicator",
            MapKind::ProbabilityMeasure => "probability_measure",
            MapKind::Density => "density",
            MapKind::Weight => "weight",
            MapKind::Generic => "generic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "indicator" => MapKind::Indicator,
            "probability_measure" => MapKind::ProbabilityMeasure,
            "density" => MapKind::Density,
            "weight" => MapKind::Weight,
            "generic" => MapKind::Generic,
            _ => return None,
        })
    }
}

/// A function `G -> C`, dense by canonical index.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMap {
    spec: GroupSpec,
    values: Vec<Complex64>,
    kind: MapKind,
}

impl DensityMap {
    /// Checks length and the invariants of `kind`.
    pub fn new(spec: &GroupSpec, values: Vec<Complex64>, kind: MapKind) -> Result<Self> {
        if values.len() != spec.order() {
            return Err(Error::InvalidParameter(alloc::format!(
                "{} values for a group of order {}",
                values.len(),
                spec.order()
            )));
        }
        let map = Self {
            spec: spec.clone(),
            values,
            kind,
        };
        map.validate()?;
        Ok(map)
    }

    pub fn from_real(spec: &GroupSpec, values: &[f64], kind: MapKind) -> Result<Self> {
        Self::new(spec, values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), kind)
    }

    pub fn indicator(spec: &GroupSpec, members: &[usize]) -> Result<Self> {
        let mut values = alloc::vec![Complex64::new(0.0, 0.0); spec.order()];
        for &m in members {
            if m >= spec.order() {
                return Err(Error::InvalidParameter(alloc::format!("index {m} out of range")));
            }
            values[m] = Complex64::new(1.0, 0.0);
        }
        Self::new(spec, values, MapKind::Indicator)
    }

    pub fn constant(spec: &GroupSpec, c: f64, kind: MapKind) -> Self {
        Self {
            spec: spec.clone(),
            values: alloc::vec![Complex64::new(c, 0.0); spec.order()],
            kind,
        }
    }

    pub fn uniform_measure(spec: &GroupSpec) -> Self {
        Self::constant(spec, 1.0 / spec.order() as f64, MapKind::ProbabilityMeasure)
    }

    pub fn point_mass(spec: &GroupSpec, at: usize) -> Self {
        let mut m = Self::constant(spec, 0.0, MapKind::ProbabilityMeasure);
        m.values[at] = Complex64::new(1.0, 0.0);
        m
    }

    /// The character `chi_eta` as a function on `G`.
    pub fn character(spec: &GroupSpec, eta: usize) -> Self {
        let roots = spec.root_table();
        Self {
            spec: spec.clone(),
            values: (0..spec.order())
                .map(|x| roots[spec.pairing_numerator(eta, x) as usize])
                .collect(),
            kind: MapKind::Generic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            MapKind::Indicator => {
                if self.values.iter().any(|v| v.im != 0.0 || (v.re != 0.0 && v.re != 1.0)) {
                    return Err(Error::InvalidParameter("indicator with values outside {0,1}".into()));
                }
            }
            MapKind::ProbabilityMeasure => {
                if self.values.iter().any(|v| v.im != 0.0 || v.re < 0.0) {
                    return Err(Error::NotProbability("negative or complex mass".into()));
                }
                let total: f64 = self.values.iter().map(|v| v.re).sum();
                if libm::fabs(total - 1.0) > IDENTITY_TOL {
                    return Err(Error::NotProbability(alloc::format!("total mass {total}")));
                }
            }
            MapKind::Density | MapKind::Weight => {
                if self.values.iter().any(|v| v.im != 0.0 || v.re < -1e-12) {
                    return Err(Error::InvalidParameter("negative or complex weight".into()));
                }
            }
            MapKind::Generic => {}
        }
        Ok(())
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// Relabels the map without re-checking invariants.
    pub fn with_kind(mut self, kind: MapKind) -> Self {
        self.kind = kind;
        self
    }

    /// Pointwise product.
    pub fn product(&self, other: &DensityMap) -> Result<DensityMap> {
        self.spec.check_same(&other.spec)?;
        Ok(Self {
            spec: self.spec.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
            kind: MapKind::Generic,
        })
    }
}

/// Fourier coefficients indexed by character.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoefficients {
    spec: GroupSpec,
    values: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn new(spec: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.order() {
            return Err(Error::InvalidParameter("coefficient count mismatch".into()));
        }
        Ok(Self {
            spec: spec.clone(),
            values,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, xi: usize) -> Complex64 {
        self.values[xi]
    }
}

/// A nonempty set `A` together with its density.
#[derive(Clone, Debug, PartialEq)]
pub struct SetStats {
    indicator: DensityMap,
    members: Vec<usize>,
    alpha: f64,
}

impl SetStats {
    pub fn new(spec: &GroupSpec, members: &[usize]) -> Result<Self> {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::InvalidParameter("empty set".into()));
        }
        let indicator = DensityMap::indicator(spec, &members)?;
        let alpha = members.len() as f64 / spec.order() as f64;
        Ok(Self {
            indicator,
            members,
            alpha,
        })
    }

    pub fn from_mask(spec: &GroupSpec, mask: &[bool]) -> Result<Self> {
        let members: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        Self::new(spec, &members)
    }

    pub fn spec(&self) -> &GroupSpec {
        self.indicator.spec()
    }

    pub fn indicator(&self) -> &DensityMap {
        &self.indicator
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `mu_A`, the uniform probability measure on `A`.
    pub fn uniform_measure(&self) -> DensityMap {
        let w = 1.0 / self.members.len() as f64;
        let mut m = DensityMap::constant(self.spec(), 0.0, MapKind::ProbabilityMeasure);
        for &x in &self.members {
            m.values[x] = Complex64::new(w, 0.0);
        }
        m
    }
}

fn transform_in_place(spec: &GroupSpec, data: &mut [Complex64], inverse: bool) {
    let order = spec.order();
    let mut stride = order;
    let mut line = Vec::new();
    let mut out = Vec::new();
    for &m in spec.factors() {
        let m = m as usize;
        stride /= m;
        let block = stride * m;
        let mut roots = unit_roots(m);
        if !inverse {
            for r in roots.iter_mut() {
                *r = r.conj();
            }
        }
        line.resize(m, Complex64::new(0.0, 0.0));
        out.resize(m, Complex64::new(0.0, 0.0));
        for base in (0..order).step_by(block) {
            for s in 0..stride {
                let start = base + s;
                if m == 2 {
                    let a = data[start];
                    let b = data[start + stride];
                    data[start] = a + b;
                    data[start + stride] = a - b;
                    continue;
                }
                for t in 0..m {
                    line[t] = data[start + t * stride];
                }
                for (k, slot) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (t, v) in line.iter().enumerate() {
                        acc += v * roots[(k * t) % m];
                    }
                    *slot = acc;
                }
                for t in 0..m {
                    data[start + t * stride] = out[t];
                }
            }
        }
    }
}

/// Forward transform, one cyclic axis at a time (cost `|G| * sum_j m_j`).
pub fn dft(f: &DensityMap) -> FourierCoefficients {
    FourierCoefficients {
        spec: f.spec.clone(),
        values: dft_values(&f.spec, &f.values),
    }
}

/// [`dft`] on a raw value slice.
pub fn dft_values(spec: &GroupSpec, values: &[Complex64]) -> Vec<Complex64> {
    let mut data = values.to_vec();
    transform_in_place(spec, &mut data, false);
    let scale = 1.0 / spec.order() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
    data
}

/// Inverse of [`dft`].
pub fn idft(coeffs: &FourierCoefficients) -> DensityMap {
    DensityMap {
        spec: coeffs.spec.clone(),
        values: idft_values(&coeffs.spec, &coeffs.values),
        kind: MapKind::Generic,
    }
}

pub fn idft_values(spec: &GroupSpec, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut data = coeffs.to_vec();
    transform_in_place(spec, &mut data, true);
    data
}

/// Unnormalised integer Walsh-Hadamard transform on `F_2^n`:
/// `out[xi] = sum_x f(x) (-1)^<xi, x>`.
pub fn walsh_hadamard_exact(values: &[i64]) -> Vec<i64> {
    assert!(values.len().is_power_of_two(), "length must be a power of two");
    let mut data = values.to_vec();
    let mut h = 1;
    while h < data.len() {
        for base in (0..data.len()).step_by(2 * h) {
            for i in base..base + h {
                let (a, b) = (data[i], data[i + h]);
                data[i] = a + b;
                data[i + h] = a - b;
            }
        }
        h *= 2;
    }
    data
}

/// `|sum_xi |f^(xi)|^2 - E_x |f(x)|^2|`.
pub fn parseval_gap(f: &DensityMap) -> f64 {
    let coeff_energy: f64 = dft(f).values.iter().map(|c| c.norm_sqr()).sum();
    let mean_sq = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / f.values.len() as f64;
    libm::fabs(coeff_energy - mean_sq)
}

/// A single coefficient `E_x f(x) conj(chi_xi(x))`, summed directly.
pub fn coefficient(f: &DensityMap, xi: usize) -> Complex64 {
    let spec = &f.spec;
    let roots = spec.root_table();
    let l = spec.exponent() as usize;
    let sum: Complex64 = f
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
        .map(|(x, v)| v * roots[(l - spec.pairing_numerator(xi, x) as usize) % l])
        .sum();
    sum / spec.order() as f64
}

/// `Spec_eps(A) = {xi : |1_A^(xi)| > eps * alpha}`, sorted by index.
///
/// On `F_2^n` the coefficients come from the exact integer transform.
pub fn spectrum(a: &SetStats, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("eps = {eps} not in (0,1)")));
    }
    let spec = a.spec();
    let threshold = eps * a.alpha();
    let magnitudes: Vec<f64> = if matches!(spec.prime_vector_params(), Some((2, _))) {
        let ints: Vec<i64> = a.indicator().values().iter().map(|v| v.re as i64).collect();
        walsh_hadamard_exact(&ints)
            .into_iter()
            .map(|w| libm::fabs(w as f64) / spec.order() as f64)
            .collect()
    } else {
        dft(a.indicator()).values.iter().map(|c| c.norm()).collect()
    };
    Ok((0..spec.order())
        .filter(|&xi| exceeds(magnitudes[xi], threshold))
        .collect())
}

/// `g(x) = E_{y in x + W} f(y)`.
pub fn coset_average(f: &DensityMap, w: &CosetMap) -> Result<DensityMap> {
    f.spec.check_same(w.spec())?;
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); f.spec.order()];
    let size = w.coset_size() as f64;
    for l in 0..w.coset_count() {
        let coset = w.coset(l);
        let avg = coset.iter().map(|&x| f.values[x]).sum::<Complex64>() / size;
        for &x in coset {
            out[x] = avg;
        }
    }
    let kind = match f.kind {
        MapKind::Indicator => MapKind::Density,
        k => k,
    };
    Ok(DensityMap {
        spec: f.spec.clone(),
        values: out,
        kind,
    })
}

/// The fibres `y + V^perp` of a subspace `V <= F_p^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fibers {
    v: SubspaceFp,
    map: CosetMap,
}

impl Fibers {
    pub fn new(v: &SubspaceFp) -> Self {
        Self {
            v: v.clone(),
            map: CosetMap::new(&v.annihilator()),
        }
    }

    pub fn subspace(&self) -> &SubspaceFp {
        &self.v
    }

    /// Cosets of `V^perp`.
    pub fn cosets(&self) -> &CosetMap {
        &self.map
    }

    pub fn count(&self) -> usize {
        self.map.coset_count()
    }

    /// Per fibre `y`, `sum_{x in F_y} f(x) conj(chi_xi(x))`.
    pub fn fiber_sums(&self, f: &DensityMap, xi: usize) -> Result<Vec<Complex64>> {
        let spec = self.map.spec();
        f.spec.check_same(spec)?;
        let roots = spec.root_table();
        let l = spec.exponent() as usize;
        Ok((0..self.count())
            .map(|y| {
                self.map
                    .coset(y)
                    .iter()
                    .map(|&x| f.values[x] * roots[(l - spec.pairing_numerator(xi, x) as usize) % l])
                    .sum()
            })
            .collect())
    }
}

/// `E_{y} |E_{x in y + V^perp} 1_A(x) conj(chi_xi(x))|`, the cosetwise l1
/// correlation of `A` with `xi` relative to `V`.
pub fn cosetwise_l1(a: &SetStats, fibers: &Fibers, xi: usize) -> Result<f64> {
    let size = fibers.cosets().coset_size() as f64;
    let sums = fibers.fiber_sums(a.indicator(), xi)?;
    Ok(sums.iter().map(|s| s.norm() / size).sum::<f64>() / sums.len() as f64)
}

/// `sum_y mu(F_y) |E_{x ~ mu | F_y} conj(chi_xi(x))|`; empty fibres count 0.
pub fn mu_cosetwise_l1(mu: &DensityMap, fibers: &Fibers, xi: usize) -> Result<f64> {
    Ok(fibers.fiber_sums(mu, xi)?.iter().map(|s| s.norm()).sum())
}

/// All fibre correlations of `f` at once.
///
/// For each fibre `y` the restriction `w -> f(rep_y + w)` is transformed on
/// `V^perp ~ F_p^{dim V^perp}`; `|E_{x in F_y} f conj(chi_xi)|` then depends on
/// `xi` only through `chi_xi` restricted to `V^perp`, i.e. through `xi mod V`.
#[derive(Clone, Debug)]
pub struct FiberSpectrum {
    fibers: Fibers,
    /// `[fibre][restricted character]`, each with `E`-normalisation.
    table: Vec<Complex64>,
    width: usize,
}

impl FiberSpectrum {
    pub fn new(f: &DensityMap, fibers: &Fibers) -> Result<Self> {
        let map = fibers.cosets();
        f.spec.check_same(map.spec())?;
        let width = map.coset_size();
        let mut table = Vec::with_capacity(f.spec.order());
        let offset_spec = map.offset_spec();
        for y in 0..map.coset_count() {
            let restricted: Vec<Complex64> = map.coset(y).iter().map(|&x| f.values[x]).collect();
            match &offset_spec {
                Some(s) => table.extend(dft_values(s, &restricted)),
                None => table.extend(restricted),
            }
        }
        Ok(Self {
            fibers: fibers.clone(),
            table,
            width,
        })
    }

    pub fn fibers(&self) -> &Fibers {
        &self.fibers
    }

    /// Index of `chi_xi` restricted to `V^perp`.
    pub fn restricted_index(&self, xi: usize) -> usize {
        let x = self.fibers.map.spec().element_from_index(xi);
        self.fibers.map.restricted_character(&x.0)
    }

    /// `|E_{x in F_y} f(x) conj(chi_xi(x))|` for fibre `y`, given the
    /// restricted index `t`.
    pub fn magnitude(&self, y: usize, t: usize) -> f64 {
        self.table[y * self.width + t].norm()
    }

    /// `E_y |E_{x in F_y} f conj(chi)|` at restricted index `t`.
    pub fn mean_abs(&self, t: usize) -> f64 {
        let count = self.fibers.count();
        (0..count).map(|y| self.magnitude(y, t)).sum::<f64>() / count as f64
    }

    /// `sum_y |sum_{x in F_y} f conj(chi)|` at restricted index `t`.
    pub fn sum_abs(&self, t: usize) -> f64 {
        let count = self.fibers.count();
        (0..count).map(|y| self.magnitude(y, t)).sum::<f64>() * self.width as f64
    }

    pub fn restricted_count(&self) -> usize {
        self.width
    }
}
