//! Numeric tolerances shared by every construction and verifier.

/// Slack by which a strict inequality `value > threshold` must be exceeded
/// before it is treated as holding, and by which certified `<=` bounds may be
/// overshot.
pub const GUARD: f64 = 1e-9;

/// Relative tolerance used by transform round-trips and identity checks.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Largest drift of total mass accepted after a reweighting step.
pub const MASS_DRIFT_ABORT: f64 = 1e-8;

/// Ties between scores closer than this are broken by canonical index.
pub const TIE_TOL: f64 = 1e-12;

/// Guarded strict comparison used for spectra:
/// `value > threshold + GUARD * (1 + threshold)`.
#[inline]
pub fn exceeds(value: f64, threshold: f64) -> bool {
    value > threshold + GUARD * (1.0 + libm::fabs(threshold))
}

/// Witness rule shared by the iterations: `score > eps + GUARD`.
#[inline]
pub fn is_witness(score: f64, eps: f64) -> bool {
    score > eps + GUARD
}

/// `floor(2 eps^-2 ln(1/alpha))`, the dimension bound of the entropy argument.
pub fn chang_bound(alpha: f64, eps: f64) -> usize {
    let b = 2.0 / (eps * eps) * libm::log(1.0 / alpha);
    // ln(1) can come out as a tiny negative number
    if b <= 0.0 {
        0
    } else {
        libm::floor(b + 1e-12) as usize
    }
}

/// Hard cap on iteration count: `ceil(2 eps^-2 ln(1/alpha)) + 1`.
pub fn iteration_cap(alpha: f64, eps: f64) -> usize {
    let b = 2.0 / (eps * eps) * libm::log(1.0 / alpha);
    if b <= 0.0 {
        1
    } else {
        libm::ceil(b) as usize + 1
    }
}
