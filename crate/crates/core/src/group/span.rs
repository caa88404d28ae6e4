use alloc::vec::Vec;

use super::GroupSpec;
use crate::{Error, Result};

/// Default cap on `|Delta|` for exhaustive `3^|Delta|` enumeration.
pub const DEFAULT_DISSOCIATION_CAP: usize = 16;

/// The `{-1,0,1}`-span of a list of characters, maintained incrementally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanSet {
    spec: GroupSpec,
    generators: Vec<usize>,
    mask: Vec<bool>,
    len: usize,
}

impl SpanSet {
    /// `<{}> = {0}`.
    pub fn new(spec: &GroupSpec) -> Self {
        let mut mask = alloc::vec![false; spec.order()];
        mask[0] = true;
        Self {
            spec: spec.clone(),
            generators: Vec::new(),
            mask,
            len: 1,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn contains(&self, xi: usize) -> bool {
        self.mask[xi]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sorted member indices.
    pub fn members(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    /// `<Delta + xi> = <Delta> + {0, xi, -xi}`. Refuses `xi` already in the
    /// span, since the enlarged generator list would not be dissociated.
    pub fn extend(&self, xi: usize) -> Result<Self> {
        if self.mask[xi] {
            return Err(Error::NotDissociated(xi));
        }
        let mut next = self.clone();
        let neg = self.spec.neg_index(xi);
        for m in self.members() {
            for y in [self.spec.add_index(m, xi), self.spec.add_index(m, neg)] {
                if !next.mask[y] {
                    next.mask[y] = true;
                    next.len += 1;
                }
            }
        }
        next.generators.push(xi);
        Ok(next)
    }
}

/// True iff no nontrivial `{-1,0,1}` combination of `delta` vanishes.
///
/// Enumerates all `3^|delta|` sign patterns; `cap` bounds `|delta|`.
pub fn is_dissociated(spec: &GroupSpec, delta: &[usize], cap: usize) -> Result<bool> {
    if delta.len() > cap {
        return Err(Error::CapExceeded {
            what: "dissociation check size",
            size: delta.len(),
            cap,
        });
    }
    let negs: Vec<usize> = delta.iter().map(|&d| spec.neg_index(d)).collect();
    let mut coeff = alloc::vec![0u8; delta.len()];
    loop {
        // odometer over {0, +1, -1}; the all-zero pattern is skipped
        let mut j = delta.len();
        loop {
            if j == 0 {
                return Ok(true);
            }
            j -= 1;
            coeff[j] = (coeff[j] + 1) % 3;
            if coeff[j] != 0 {
                break;
            }
        }
        let sum = coeff.iter().enumerate().fold(0usize, |acc, (i, &c)| match c {
            1 => spec.add_index(acc, delta[i]),
            2 => spec.add_index(acc, negs[i]),
            _ => acc,
        });
        if sum == 0 {
            return Ok(false);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn extend_examples() {
        let z5 = GroupSpec::new(vec![5]).unwrap();
        let s = SpanSet::new(&z5).extend(1).unwrap();
        assert_eq!(s.members(), vec![0, 1, 4]);

        let z7 = GroupSpec::new(vec![7]).unwrap();
        let s = SpanSet::new(&z7).extend(1).unwrap().extend(3).unwrap();
        assert_eq!(s.members(), (0..7).collect::<Vec<_>>());

        let f2 = GroupSpec::prime_vector(2, 2).unwrap();
        // e1 = (1,0) -> 2, e2 = (0,1) -> 1
        let s = SpanSet::new(&f2).extend(2).unwrap().extend(1).unwrap();
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn extend_rejects_members() {
        let z5 = GroupSpec::new(vec![5]).unwrap();
        let s = SpanSet::new(&z5).extend(1).unwrap();
        assert_eq!(s.extend(4), Err(Error::NotDissociated(4)));
        assert_eq!(SpanSet::new(&z5).extend(0), Err(Error::NotDissociated(0)));
    }

    #[test]
    fn dissociated_examples() {
        let z5 = GroupSpec::new(vec![5]).unwrap();
        assert!(is_dissociated(&z5, &[1, 2], 16).unwrap());
        let z7 = GroupSpec::new(vec![7]).unwrap();
        assert!(!is_dissociated(&z7, &[1, 2, 3], 16).unwrap());
        assert!(is_dissociated(&z7, &[], 16).unwrap());
        assert!(is_dissociated(&z7, &[1; 17], 16).is_err());
        // a repeated generator gives x - x = 0
        assert!(!is_dissociated(&z7, &[2, 2], 16).unwrap());
    }
}
