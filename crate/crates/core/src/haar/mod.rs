//! Haar averages: the late-time purity with eigenstates replaced by
//! Haar-random vectors.
//!
//! The exact average is reduced to 13 weights ([`weights`]) derived from
//! Weingarten calculus ([`weingarten`], [`network`]); [`sampling`] is the
//! Monte Carlo oracle for it, and [`asymptotic`] holds the large-`d` closed
//! forms written in terms of ETH variances.

pub mod asymptotic;
mod gauss;
pub mod network;
pub mod perm;
pub mod sampling;
pub mod stats;
pub mod weights;
pub mod weingarten;

use faer::MatRef;

pub use asymptotic::{asymptotic_s2, Regime};
pub use network::{haar_moment, haar_moment_in, DeltaNetwork, Moment};
pub use perm::{Permutation, PermutationTable};
pub use sampling::{
    haar_isometry, haar_state_entanglement, monte_carlo_haar_purity, monte_carlo_haar_purity_batch,
    monte_carlo_page_weights, MonteCarloEstimate, PageMonteCarlo,
};
pub use stats::{OperatorStatistics, N_STATS};
pub use weights::{derive_weights, derive_weights_exact, derive_weights_in, N_TERMS};
pub use weingarten::weingarten;

use crate::liouville::{OperatorInEnergyBasis, WindowNorm};
use crate::spectral::EnergyWindow;
use crate::spin_chain::Cut;
use crate::{Error, Result, C64};

/// Haar-averaged late-time purity and its six summands, in the same order
/// and sign convention as [`crate::PurityBreakdown`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HaarPurity {
    pub total: f64,
    pub terms: [f64; 6],
}

impl HaarPurity {
    pub fn f(&self) -> f64 {
        self.terms[0]
    }

    pub fn g(&self) -> f64 {
        self.terms[4]
    }

    pub fn s2(&self) -> f64 {
        -self.total.ln()
    }
}

/// Exact Haar average for a window operator already in final normalization.
pub fn haar_purity_of(o_w: MatRef<'_, C64>, cut: Cut) -> Result<HaarPurity> {
    let n = o_w.nrows();
    if o_w.ncols() != n || n > cut.d() {
        return Err(Error::InvalidWindow { d_w: n, d: cut.d() });
    }
    let table = derive_weights(cut.d_a, cut.d_b)?;
    let stats = OperatorStatistics::from_matrix(o_w);
    let mut terms = [0.0; 6];
    for (k, t) in terms.iter_mut().enumerate() {
        *t = table.assemble_term(k, &stats);
    }
    Ok(HaarPurity { total: table.assemble(&stats), terms })
}

/// `(1/n_w²) Σ_n w_n T_n` with the statistics taken over `window` (the whole
/// spectrum by default).
pub fn haar_purity_exact(
    o: &OperatorInEnergyBasis,
    cut: Cut,
    window: Option<&EnergyWindow>,
    norm: WindowNorm,
) -> Result<HaarPurity> {
    if cut.d() != o.dim() {
        return Err(Error::DimensionMismatch { expected: o.dim(), got: cut.d() });
    }
    let range = window.map_or(0..o.dim(), EnergyWindow::indices);
    let o_w = o.restrict(range, norm)?;
    haar_purity_of(o_w.as_ref(), cut)
}
