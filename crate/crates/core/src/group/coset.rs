use alloc::vec::Vec;

use super::{GroupElement, GroupSpec, SubspaceFp};

/// The partition of `F_p^n` into cosets of a subspace `W`.
///
/// A coset's label is the canonical index, in `F_p^{n - dim W}`, of the
/// free-column coordinates of the normal form `x mod W`. The labelling is a
/// group isomorphism `F_p^n / W -> F_p^{n - dim W}`, so functions of the label
/// can be transformed with [`CosetMap::quotient_spec`].
///
/// Inside a coset, an element is addressed by its offset `c` from the normal
/// form representative, written in the echelon basis of `W`; for an echelon
/// basis the coefficients are just the pivot coordinates of `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetMap {
    subspace: SubspaceFp,
    spec: GroupSpec,
    label: Vec<usize>,
    offset: Vec<usize>,
    reps: Vec<usize>,
    members: Vec<usize>,
}

impl CosetMap {
    pub fn new(w: &SubspaceFp) -> Self {
        let spec = w.ambient();
        let p = w.p() as usize;
        let n = w.n();
        let mut is_pivot = alloc::vec![false; n];
        for &c in w.pivots() {
            is_pivot[c] = true;
        }
        let coset_size = w.size();
        let count = spec.order() / coset_size;
        let mut label = alloc::vec![0usize; spec.order()];
        let mut offset = alloc::vec![0usize; spec.order()];
        let mut reps = alloc::vec![usize::MAX; count];
        let mut members = alloc::vec![0usize; spec.order()];
        for idx in 0..spec.order() {
            let x = spec.element_from_index(idx);
            let nf = w.reduce(&x.0);
            let mut l = 0usize;
            for c in (0..n).filter(|&c| !is_pivot[c]) {
                l = l * p + nf[c] as usize;
            }
            let mut o = 0usize;
            for &c in w.pivots() {
                o = o * p + x.0[c] as usize;
            }
            label[idx] = l;
            offset[idx] = o;
            members[l * coset_size + o] = idx;
            if reps[l] == usize::MAX {
                reps[l] = spec.canonical_index(&GroupElement(nf)).expect("reduced");
            }
        }
        Self {
            subspace: w.clone(),
            spec,
            label,
            offset,
            reps,
            members,
        }
    }

    pub fn subspace(&self) -> &SubspaceFp {
        &self.subspace
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn labels(&self) -> &[usize] {
        &self.label
    }

    pub fn label(&self, idx: usize) -> usize {
        self.label[idx]
    }

    /// Position of `idx` inside its coset, in `0..coset_size()`.
    pub fn offset(&self, idx: usize) -> usize {
        self.offset[idx]
    }

    pub fn coset_count(&self) -> usize {
        self.reps.len()
    }

    pub fn coset_size(&self) -> usize {
        self.subspace.size()
    }

    /// Normal-form representative of each coset.
    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    /// Elements of coset `l`, ordered by offset.
    pub fn coset(&self, l: usize) -> &[usize] {
        let s = self.coset_size();
        &self.members[l * s..(l + 1) * s]
    }

    /// `F_p^{codim W}`, the group the labels live in; `None` when `W` is the
    /// whole space.
    pub fn quotient_spec(&self) -> Option<GroupSpec> {
        let codim = self.subspace.n() - self.subspace.dim();
        (codim > 0).then(|| GroupSpec::prime_vector(self.subspace.p(), codim).expect("prime"))
    }

    /// `F_p^{dim W}`, the group the offsets live in; `None` for `W = {0}`.
    pub fn offset_spec(&self) -> Option<GroupSpec> {
        let d = self.subspace.dim();
        (d > 0).then(|| GroupSpec::prime_vector(self.subspace.p(), d).expect("prime"))
    }

    /// Offset coordinates of the character `xi` restricted to `W`: the vector
    /// `(<xi, b_j>)_j` over the echelon basis `b_j`, encoded as an index of
    /// [`CosetMap::offset_spec`].
    pub fn restricted_character(&self, xi: &[u32]) -> usize {
        let p = self.subspace.p();
        self.subspace
            .basis()
            .iter()
            .fold(0usize, |acc, b| acc * p as usize + super::subspace::dot_mod(xi, b, p) as usize)
    }
}
