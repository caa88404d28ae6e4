//! Data-parallel helpers. Work items are scored in parallel, collected in
//! index order and reduced sequentially, so results do not depend on the
//! thread count.

use chang_core::chang_fpn::{CertificateVerifier, VerificationReport};
use chang_core::fourier::SetStats;
use chang_core::group::SubspaceFp;
use rayon::prelude::*;

use crate::error::ToolError;

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, ToolError> {
    match threads {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?.install(f)),
    }
}

/// [`chang_core::chang_fpn::verify_certificate`] with the per-character scan
/// spread over the current pool.
pub fn verify_fpn(a: &SetStats, eps: f64, v: &SubspaceFp) -> Result<VerificationReport, ToolError> {
    let verifier = CertificateVerifier::new(a, eps, v)?;
    let scores: Vec<Option<f64>> = (0..verifier.order()).into_par_iter().map(|xi| verifier.score(xi)).collect();
    Ok(verifier.summarize(&scores))
}
