//! Constructive certificates for Chang's lemma and its fibrewise strengthening.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is dense: a function on
//! a finite abelian group `G = Z_{m_1} x ... x Z_{m_k}` is a vector of length
//! `|G|` indexed by the mixed-radix encoding of its elements, and characters
//! are identified with group elements through the pairing
//! `chi_xi(x) = exp(2 pi i sum_j xi_j x_j / m_j)`.
//!
//! Modules, bottom up:
//!
//! * [`group`]: group arithmetic, `F_p` linear algebra, cosets, `{-1,0,1}`-spans.
//! * [`fourier`]: transforms, spectra, coset averages and the cosetwise l1
//!   functional.
//! * [`chang_fpn`]: the entropy-descent construction of a subspace `V <= F_p^n`
//!   whose outside characters cancel on average over the fibres of `V^perp`.
//! * [`chang_abelian`]: the dissociated-set analogue for arbitrary finite
//!   abelian groups, including the sign-indexed weight family.
//! * [`counting`]: the `Lambda_4` form and the (localized) counting checks.
//! * [`oracle`]: slow, literal reference implementations used by the tests.

#![no_std]

extern crate alloc;

pub mod chang_abelian;
pub mod chang_fpn;
pub mod counting;
pub mod error;
pub mod fourier;
pub mod group;
pub mod oracle;
pub mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64;
