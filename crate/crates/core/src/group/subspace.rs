use alloc::vec::Vec;

use super::{is_prime, GroupSpec};
use crate::{Error, Result};

/// A subspace of `F_p^n` held by its reduced row-echelon basis.
///
/// Rows are ordered by pivot column (leftmost first), each pivot entry is 1
/// and every other row is 0 in that column, so two subspaces are equal iff
/// their bases are.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubspaceFp {
    p: u32,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // Fermat; p is prime and a != 0
    let (mut base, mut exp, mut acc) = (a as u64 % p as u64, p as u64 - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

impl SubspaceFp {
    pub fn zero(p: u32, n: usize) -> Self {
        Self {
            p,
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(p: u32, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = alloc::vec![0; n];
                r[i] = 1;
                r
            })
            .collect();
        Self {
            p,
            n,
            rows,
            pivots: (0..n).collect(),
        }
    }

    /// The span of `generators`, which may be dependent or contain zeros.
    pub fn from_generators(p: u32, n: usize, generators: &[Vec<u32>]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(alloc::format!("{p} is not prime")));
        }
        let mut rows = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != n {
                return Err(Error::CoordinateCount {
                    expected: n,
                    found: g.len(),
                });
            }
            rows.push(g.iter().map(|&c| c % p).collect());
        }
        Ok(Self::echelon(p, n, rows))
    }

    /// Ambient space of this subspace as a group.
    pub fn ambient(&self) -> GroupSpec {
        GroupSpec::prime_vector(self.p, self.n).expect("validated at construction")
    }

    fn echelon(p: u32, n: usize, mut rows: Vec<Vec<u32>>) -> Self {
        let pm = p as u64;
        let mut pivots = Vec::new();
        let mut next = 0usize;
        for col in 0..n {
            let Some(found) = (next..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(next, found);
            let inv = inv_mod(rows[next][col], p) as u64;
            for c in rows[next].iter_mut() {
                *c = (*c as u64 * inv % pm) as u32;
            }
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == next || row[col] == 0 {
                    continue;
                }
                let factor = row[col] as u64;
                for (c, &v) in row.iter_mut().zip(&pivot_row) {
                    *c = ((*c as u64 + pm * pm - factor * v as u64) % pm) as u32;
                }
            }
            pivots.push(col);
            next += 1;
        }
        rows.truncate(next);
        Self { p, n, rows, pivots }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `p^dim`.
    pub fn size(&self) -> usize {
        (self.p as usize).pow(self.dim() as u32)
    }

    /// Normal form of `v` modulo this subspace: zero in every pivot column.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let pm = self.p as u64;
        let mut out: Vec<u32> = v.iter().map(|&c| c % self.p).collect();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let f = out[piv] as u64;
            if f == 0 {
                continue;
            }
            for (c, &r) in out.iter_mut().zip(row) {
                *c = ((*c as u64 + pm * pm - f * r as u64) % pm) as u32;
            }
        }
        out
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&c| c == 0)
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.contains(&self.ambient().element_from_index(idx).0)
    }

    /// `span(self, v)`; returns `self` unchanged when `v` is already inside.
    pub fn adjoin(&self, v: &[u32]) -> Self {
        debug_assert_eq!(v.len(), self.n);
        if self.contains(v) {
            return self.clone();
        }
        let mut rows = self.rows.clone();
        rows.push(v.iter().map(|&c| c % self.p).collect());
        Self::echelon(self.p, self.n, rows)
    }

    /// `{x : <x, v> = 0 for all v in self}`.
    pub fn annihilator(&self) -> Self {
        let pm = self.p as u64;
        let mut is_pivot = alloc::vec![false; self.n];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        let mut gens = Vec::with_capacity(self.n - self.dim());
        for free in (0..self.n).filter(|&c| !is_pivot[c]) {
            let mut x = alloc::vec![0u32; self.n];
            x[free] = 1;
            for (row, &piv) in self.rows.iter().zip(&self.pivots) {
                x[piv] = ((pm - row[free] as u64) % pm) as u32;
            }
            gens.push(x);
        }
        Self::echelon(self.p, self.n, gens)
    }

    /// All `p^dim` elements, ordered by their coefficient vectors.
    pub fn elements(&self) -> Vec<Vec<u32>> {
        let pm = self.p as u64;
        let d = self.dim();
        let mut out = Vec::with_capacity(self.size());
        let mut coeff = alloc::vec![0u32; d];
        loop {
            let mut v = alloc::vec![0u32; self.n];
            for (row, &c) in self.rows.iter().zip(&coeff) {
                if c == 0 {
                    continue;
                }
                for (slot, &r) in v.iter_mut().zip(row) {
                    *slot = ((*slot as u64 + c as u64 * r as u64) % pm) as u32;
                }
            }
            out.push(v);
            // odometer
            let mut j = d;
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                coeff[j] += 1;
                if coeff[j] < self.p {
                    break;
                }
                coeff[j] = 0;
            }
        }
    }

    /// Canonical indices of all elements, sorted.
    pub fn element_indices(&self) -> Vec<usize> {
        let spec = self.ambient();
        let mut idx: Vec<usize> = self
            .elements()
            .into_iter()
            .map(|v| spec.canonical_index(&super::GroupElement(v)).expect("reduced"))
            .collect();
        idx.sort_unstable();
        idx
    }

    /// Membership mask over canonical indices.
    pub fn membership_mask(&self) -> Vec<bool> {
        let mut mask = alloc::vec![false; self.ambient().order()];
        for i in self.element_indices() {
            mask[i] = true;
        }
        mask
    }
}

/// `<a, b>` in `F_p`.
pub(crate) fn dot_mod(a: &[u32], b: &[u32], p: u32) -> u32 {
    let s: u64 = a.iter().zip(b).map(|(&x, &y)| x as u64 * y as u64).sum();
    (s % p as u64) as u32
}
