//! Finite abelian groups as products of cyclic factors.
//!
//! Elements are residue vectors; the canonical index is the mixed-radix
//! encoding with the first factor most significant. Characters are elements
//! of the same group, acting through
//! `chi_xi(x) = exp(2 pi i sum_j xi_j x_j / m_j)`.

mod coset;
mod span;
mod subspace;

pub use coset::CosetMap;
pub use span::{is_dissociated, SpanSet, DEFAULT_DISSOCIATION_CAP};
pub use subspace::SubspaceFp;
pub(crate) use subspace::dot_mod as subspace_dot;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::{Error, Result};

/// A finite abelian group `Z_{m_1} x ... x Z_{m_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<u32>,
    order: usize,
    lcm: u64,
}

/// An element (or character) of a [`GroupSpec`], stored as reduced residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<u32>);

/// An exact phase `num / den` in `[0, 1)`, with `gcd(num, den) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase {
    pub num: u64,
    pub den: u64,
}

impl Phase {
    fn reduced(num: u64, den: u64) -> Self {
        let g = gcd(num, den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `exp(2 pi i t)`.
    pub fn to_unit(self) -> Complex64 {
        let angle = core::f64::consts::TAU * self.as_f64();
        Complex64::new(libm::cos(angle), libm::sin(angle))
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest group order accepted; everything is dense by index.
pub const MAX_ORDER: usize = 1 << 24;

impl GroupSpec {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("no cyclic factors".into()));
        }
        let mut order: usize = 1;
        let mut lcm: u64 = 1;
        for &m in &factors {
            if m < 2 {
                return Err(Error::InvalidGroup(format!("modulus {m} is below 2")));
            }
            order = order
                .checked_mul(m as usize)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| Error::InvalidGroup(format!("order exceeds {MAX_ORDER}")))?;
            lcm = lcm / gcd(lcm, m as u64) * m as u64;
        }
        Ok(Self {
            factors,
            order,
            lcm,
        })
    }

    /// `F_p^n`; fails unless `p` is prime.
    pub fn prime_vector(p: u32, n: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidGroup(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidGroup("dimension 0".into()));
        }
        Self::new(alloc::vec![p; n])
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Least common multiple of the moduli; every phase has a denominator
    /// dividing it.
    pub fn exponent(&self) -> u64 {
        self.lcm
    }

    /// `Some((p, n))` iff every factor equals the same prime `p`.
    pub fn prime_vector_params(&self) -> Option<(u32, usize)> {
        let p = self.factors[0];
        (is_prime(p) && self.factors.iter().all(|&m| m == p)).then_some((p, self.factors.len()))
    }

    pub fn is_prime_vector(&self, p: u32, n: usize) -> bool {
        self.prime_vector_params() == Some((p, n))
    }

    pub(crate) fn require_prime_vector(&self) -> Result<(u32, usize)> {
        self.prime_vector_params()
            .ok_or_else(|| Error::NotPrimeVector(format!("{self}")))
    }

    pub fn check_same(&self, other: &GroupSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("{self} vs {other}")))
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(alloc::vec![0; self.rank()])
    }

    /// Reduces arbitrary integer coordinates into an element.
    pub fn element_from_coords(&self, coords: &[i64]) -> Result<GroupElement> {
        self.check_len(coords.len())?;
        Ok(GroupElement(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &m)| c.rem_euclid(m as i64) as u32)
                .collect(),
        ))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.rank() {
            Ok(())
        } else {
            Err(Error::CoordinateCount {
                expected: self.rank(),
                found: len,
            })
        }
    }

    /// Mixed-radix encoding, first factor most significant.
    pub fn canonical_index(&self, x: &GroupElement) -> Result<usize> {
        self.check_len(x.0.len())?;
        let mut idx = 0usize;
        for (&c, &m) in x.0.iter().zip(&self.factors) {
            if c >= m {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {c} not reduced mod {m}"
                )));
            }
            idx = idx * m as usize + c as usize;
        }
        Ok(idx)
    }

    pub fn element_from_index(&self, mut idx: usize) -> GroupElement {
        debug_assert!(idx < self.order);
        let mut coords = alloc::vec![0u32; self.rank()];
        for (slot, &m) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = (idx % m as usize) as u32;
            idx /= m as usize;
        }
        GroupElement(coords)
    }

    /// Coordinates of every element, row-major by canonical index.
    pub fn coordinate_table(&self) -> Vec<u32> {
        let k = self.rank();
        let mut table = alloc::vec![0u32; self.order * k];
        for idx in 0..self.order {
            let mut rest = idx;
            for j in (0..k).rev() {
                let m = self.factors[j] as usize;
                table[idx * k + j] = (rest % m) as u32;
                rest /= m;
            }
        }
        table
    }

    pub fn add_index(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y, m| (x + y) % m)
    }

    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y, m| (x + m - y) % m)
    }

    pub fn neg_index(&self, a: usize) -> usize {
        self.sub_index(0, a)
    }

    fn combine(&self, mut a: usize, mut b: usize, op: impl Fn(usize, usize, usize) -> usize) -> usize {
        let mut out = 0usize;
        let mut place = 1usize;
        for &m in self.factors.iter().rev() {
            let m = m as usize;
            out += op(a % m, b % m, m) * place;
            place *= m;
            a /= m;
            b /= m;
        }
        out
    }

    /// Numerator `k` of the pairing phase `k / exponent()`, for canonical
    /// indices.
    pub fn pairing_numerator(&self, mut xi: usize, mut x: usize) -> u64 {
        let mut acc = 0u64;
        for &m in self.factors.iter().rev() {
            let m64 = m as u64;
            let prod = (xi as u64 % m64) * (x as u64 % m64) % m64;
            acc = (acc + prod * (self.lcm / m64)) % self.lcm;
            xi /= m as usize;
            x /= m as usize;
        }
        acc
    }

    /// The exact phase `t` with `chi_xi(x) = exp(2 pi i t)`.
    pub fn pairing_phase(&self, xi: &GroupElement, x: &GroupElement) -> Result<Phase> {
        let a = self.canonical_index(xi)?;
        let b = self.canonical_index(x)?;
        Ok(Phase::reduced(self.pairing_numerator(a, b), self.lcm))
    }

    /// `exp(2 pi i k / exponent())` for `k` in `0..exponent()`.
    pub fn root_table(&self) -> Vec<Complex64> {
        unit_roots(self.lcm as usize)
    }
}

pub(crate) fn unit_roots(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| {
            let angle = core::f64::consts::TAU * k as f64 / m as f64;
            Complex64::new(libm::cos(angle), libm::sin(angle))
        })
        .collect()
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let first = self.factors[0];
        if self.factors.len() > 1 && self.factors.iter().all(|&m| m == first) {
            return write!(f, "{}^{}", first, self.factors.len());
        }
        let parts: Vec<String> = self.factors.iter().map(|m| format!("{m}")).collect();
        f.write_str(&parts.join("x"))
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Accepts `"p^n"` or `"m1xm2x...xmk"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidGroup(format!("cannot parse {s:?}"));
        if let Some((base, exp)) = s.split_once('^') {
            let m: u32 = base.trim().parse().map_err(|_| bad())?;
            let n: usize = exp.trim().parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            return Self::new(alloc::vec![m; n]);
        }
        let factors = s
            .split(['x', 'X', '*'])
            .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}
