//! Brute-force references. Nothing here touches [`crate::fourier`]; the only
//! shared code is the group arithmetic in [`crate::group`].

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fourier::{DensityMap, FourierCoefficients, SetStats};
use crate::group::{GroupElement, GroupSpec, SubspaceFp};
use crate::tolerance::GUARD;
use crate::{Error, Result};

pub const DFT_NAIVE_CAP: usize = 1 << 16;
pub const LAMBDA4_DIRECT_CAP: usize = 512;
pub const MINIMAL_SUBSPACE_CAP: usize = 256;
pub const SPAN_NAIVE_CAP: usize = 12;

fn cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { what, size, cap })
    } else {
        Ok(())
    }
}

/// `f^(xi) = |G|^-1 sum_x f(x) conj(chi_xi(x))` as a literal double sum, with
/// each phase kept as an exact rational until the last step.
pub fn dft_naive(f: &DensityMap) -> Result<FourierCoefficients> {
    let spec = f.spec();
    cap("group order", spec.order(), DFT_NAIVE_CAP)?;
    let elems: Vec<GroupElement> = (0..spec.order()).map(|i| spec.element_from_index(i)).collect();
    let values = f.values();
    let out = elems
        .iter()
        .map(|xi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, v) in elems.iter().zip(values) {
                let phase = spec.pairing_phase(xi, x).expect("same group");
                acc += v * phase.to_unit().conj();
            }
            acc / spec.order() as f64
        })
        .collect();
    FourierCoefficients::new(spec, out)
}

/// `|G|^-3 sum_{x1 + x2 = x3 + x4} f1(x1) f2(x2) conj(f3(x3) f4(x4))`.
pub fn lambda4_direct(f: [&DensityMap; 4]) -> Result<Complex64> {
    let spec = f[0].spec();
    for g in &f[1..] {
        spec.check_same(g.spec())?;
    }
    cap("group order", spec.order(), LAMBDA4_DIRECT_CAP)?;
    let n = spec.order();
    let [a, b, c, d] = f.map(|m| m.values());
    let mut acc = Complex64::new(0.0, 0.0);
    for x1 in 0..n {
        for x2 in 0..n {
            let s = spec.add_index(x1, x2);
            let ab = a[x1] * b[x2];
            for x3 in 0..n {
                let x4 = spec.sub_index(s, x3);
                acc += ab * (c[x3] * d[x4]).conj();
            }
        }
    }
    let n = n as f64;
    Ok(acc / (n * n * n))
}

/// All `{-1,0,1}` combinations of `delta`, enumerated coefficient vector by
/// coefficient vector.
pub fn span_enumerate_naive(spec: &GroupSpec, delta: &[usize]) -> Result<BTreeSet<usize>> {
    cap("span generators", delta.len(), SPAN_NAIVE_CAP)?;
    let gens: Vec<GroupElement> = delta.iter().map(|&d| spec.element_from_index(d)).collect();
    let mut out = BTreeSet::new();
    let total = 3usize.pow(delta.len() as u32);
    for code in 0..total {
        let mut sum = alloc::vec![0i64; spec.rank()];
        let mut rest = code;
        for g in &gens {
            let c = (rest % 3) as i64 - 1;
            rest /= 3;
            for (s, &v) in sum.iter_mut().zip(&g.0) {
                *s += c * v as i64;
            }
        }
        let e = spec.element_from_coords(&sum)?;
        out.insert(spec.canonical_index(&e)?);
    }
    Ok(out)
}

/// Every subspace of `F_p^n` of dimension `dim`, by enumerating reduced
/// echelon matrices (pivot sets and free entries).
pub fn enumerate_subspaces(p: u32, n: usize, dim: usize) -> Vec<SubspaceFp> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(dim);
    choose_pivots(p, n, dim, 0, &mut pivots, &mut out);
    out
}

fn choose_pivots(p: u32, n: usize, dim: usize, start: usize, pivots: &mut Vec<usize>, out: &mut Vec<SubspaceFp>) {
    if pivots.len() == dim {
        // free slots: (row i, column c) with c > pivot_i and c not a pivot
        let mut slots = Vec::new();
        for (i, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    slots.push((i, c));
                }
            }
        }
        let count = (p as usize).pow(slots.len() as u32);
        for code in 0..count {
            let mut rows = alloc::vec![alloc::vec![0u32; n]; dim];
            for (i, &pc) in pivots.iter().enumerate() {
                rows[i][pc] = 1;
            }
            let mut rest = code;
            for &(i, c) in &slots {
                rows[i][c] = (rest % p as usize) as u32;
                rest /= p as usize;
            }
            out.push(SubspaceFp::from_generators(p, n, &rows).expect("valid rows"));
        }
        return;
    }
    for c in start..n {
        pivots.push(c);
        choose_pivots(p, n, dim, c + 1, pivots, out);
        pivots.pop();
    }
}

/// `E_y |E_{x in y + V^perp} 1_A(x) conj(chi_xi(x))|`, grouping `x` into
/// fibres by the values `<x, v_j>` over a basis of `V`.
pub fn cosetwise_l1_naive(a: &SetStats, v: &SubspaceFp, xi: usize) -> f64 {
    let spec = a.spec();
    let p = v.p() as usize;
    let fibres = p.pow(v.dim() as u32);
    let xi_e = spec.element_from_index(xi);
    let mut sums = alloc::vec![Complex64::new(0.0, 0.0); fibres];
    for &x in a.members() {
        let xe = spec.element_from_index(x);
        let label = v.basis().iter().fold(0usize, |acc, b| {
            let dot: u64 = b.iter().zip(&xe.0).map(|(&s, &t)| s as u64 * t as u64).sum();
            acc * p + (dot % p as u64) as usize
        });
        sums[label] += spec.pairing_phase(&xi_e, &xe).expect("same group").to_unit().conj();
    }
    sums.iter().map(|s| s.norm()).sum::<f64>() / spec.order() as f64
}

/// Whether `V` satisfies the fibrewise bound for every `xi` outside it.
pub fn passes_naive(a: &SetStats, v: &SubspaceFp, eps: f64) -> bool {
    let inside = v.membership_mask();
    let bound = eps * a.alpha() + GUARD;
    (0..a.spec().order())
        .filter(|&xi| !inside[xi])
        .all(|xi| cosetwise_l1_naive(a, v, xi) <= bound)
}

/// A subspace of least dimension satisfying the fibrewise bound, by
/// exhaustive search in order of dimension.
pub fn minimal_refined_subspace(a: &SetStats, eps: f64) -> Result<SubspaceFp> {
    let spec = a.spec();
    let (p, n) = spec.require_prime_vector()?;
    cap("group order", spec.order(), MINIMAL_SUBSPACE_CAP)?;
    if p > 3 {
        return Err(Error::InvalidParameter(alloc::format!("p = {p}; only p in {{2, 3}} is searched")));
    }
    for dim in 0..=n {
        if let Some(v) = enumerate_subspaces(p, n, dim).into_iter().find(|v| passes_naive(a, v, eps)) {
            return Ok(v);
        }
    }
    unreachable!("V = F_p^n always passes vacuously")
}
