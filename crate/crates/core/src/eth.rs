//! Eigenstate-thermalization diagnostics of `O_ab` and a generator of
//! synthetic operators that follow the ETH ansatz.

use std::ops::Range;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::liouville::OperatorInEnergyBasis;
use crate::spectral::EnergyWindow;
use crate::{Error, Result, C64};

/// Means and variances of the diagonal and off-diagonal matrix elements.
///
/// The off-diagonal variance is the second moment of `|O_cd|` minus the
/// squared modulus of the off-diagonal mean.
#[derive(Clone, Debug, PartialEq)]
pub struct EthStatistics {
    pub diag_mean: f64,
    pub diag_var: f64,
    pub offdiag_mean: C64,
    pub offdiag_var: f64,
    /// Energy-ordered indices the statistics ran over.
    pub window: Range<usize>,
    pub n_diag: usize,
    pub n_offdiag: usize,
}

impl EthStatistics {
    /// `σ²_diag + (d_w − 1)σ²_off`; equals one for a traceless involution
    /// whose off-diagonal mean vanishes.
    pub fn norm_combination(&self) -> f64 {
        self.diag_var + (self.n_diag as f64 - 1.0) * self.offdiag_var
    }
}

pub fn compute_stats(o: &OperatorInEnergyBasis, window: Option<&EnergyWindow>) -> Result<EthStatistics> {
    let d = o.dim();
    let range = window.map_or(0..d, EnergyWindow::indices);
    let n = range.len();
    if n < 2 || range.end > d {
        return Err(Error::InvalidWindow { d_w: n, d });
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut off_sum = C64::new(0.0, 0.0);
    let mut off_sq = 0.0;
    for a in range.clone() {
        let x = o.get(a, a).re;
        s1 += x;
        s2 += x * x;
        for b in range.clone() {
            if a != b {
                let v = o.get(a, b);
                off_sum += v;
                off_sq += v.norm_sqr();
            }
        }
    }
    let n_off = n * (n - 1);
    let diag_mean = s1 / n as f64;
    let offdiag_mean = off_sum / n_off as f64;
    Ok(EthStatistics {
        diag_mean,
        diag_var: s2 / n as f64 - diag_mean * diag_mean,
        offdiag_mean,
        offdiag_var: off_sq / n_off as f64 - offdiag_mean.norm_sqr(),
        window: range,
        n_diag: n,
        n_offdiag: n_off,
    })
}

/// Smooth functions entering `O_ab = O(Ē)δ_ab + e^{−S(Ē)/2} f(Ē, ω) Δ_ab`.
pub struct EthProfiles<'a> {
    /// `f(Ē, ω)`.
    pub f: &'a (dyn Fn(f64, f64) -> f64 + Sync),
    /// Thermodynamic entropy `S(Ē)`.
    pub entropy: &'a (dyn Fn(f64) -> f64 + Sync),
    /// Microcanonical value `O(Ē)`.
    pub microcanonical: &'a (dyn Fn(f64) -> f64 + Sync),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SynthOptions {
    /// Remove the trace and rescale to `Tr O²/d = 1`.
    pub traceless_unit_norm: bool,
}

/// Samples an ETH-ansatz operator on the spectrum `eigs`. Row `a` draws from
/// its own ChaCha stream, so the result does not depend on thread count.
pub fn synth_eth_operator(eigs: &[f64], profiles: &EthProfiles<'_>, seed: u64, opts: SynthOptions) -> Result<OperatorInEnergyBasis> {
    let d = eigs.len();
    if d == 0 {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    let rows: Vec<Vec<C64>> = (0..d)
        .into_par_iter()
        .map(|a| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(a as u64);
            (a..d)
                .map(|b| {
                    let e_bar = 0.5 * (eigs[a] + eigs[b]);
                    let amp = (-0.5 * (profiles.entropy)(e_bar)).exp() * (profiles.f)(e_bar, eigs[a] - eigs[b]);
                    if a == b {
                        let g: f64 = rng.sample(StandardNormal);
                        C64::new((profiles.microcanonical)(e_bar) + amp * g, 0.0)
                    } else {
                        let (x, y): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                        C64::new(x, y) * (amp * std::f64::consts::FRAC_1_SQRT_2)
                    }
                })
                .collect()
        })
        .collect();
    let mut m = Mat::<C64>::zeros(d, d);
    for (a, row) in rows.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let b = a + k;
            m[(a, b)] = v;
            m[(b, a)] = v.conj();
        }
    }
    if opts.traceless_unit_norm {
        let shift = (0..d).map(|a| m[(a, a)].re).sum::<f64>() / d as f64;
        for a in 0..d {
            m[(a, a)].re -= shift;
        }
        let norm_sq = m.as_ref().squared_norm_l2() / d as f64;
        if norm_sq <= 0.0 {
            return Err(Error::ZeroNorm(" after removing the trace"));
        }
        m *= faer::Scale(C64::new(norm_sq.sqrt().recip(), 0.0));
    }
    OperatorInEnergyBasis::from_complex(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(d: usize) -> Vec<f64> {
        (0..d).map(|i| i as f64 / d as f64 - 0.5).collect()
    }

    #[test]
    fn identity_has_no_fluctuations() {
        let o = OperatorInEnergyBasis::from_complex(Mat::from_fn(8, 8, |a, b| C64::new(if a == b { 1.0 } else { 0.0 }, 0.0))).unwrap();
        let s = compute_stats(&o, None).unwrap();
        assert_eq!((s.diag_mean, s.diag_var, s.offdiag_var), (1.0, 0.0, 0.0));
        assert_eq!(s.n_offdiag, 56);
    }

    #[test]
    fn too_small_window() {
        let o = OperatorInEnergyBasis::from_complex(Mat::zeros(1, 1)).unwrap();
        assert!(compute_stats(&o, None).is_err());
    }

    #[test]
    fn zero_profile_gives_diagonal_operator() {
        let zero = |_: f64, _: f64| 0.0;
        let s = |_: f64| 3.0;
        let mc = |e: f64| e;
        let p = EthProfiles { f: &zero, entropy: &s, microcanonical: &mc };
        let eigs = flat(12);
        let o = synth_eth_operator(&eigs, &p, 1, SynthOptions::default()).unwrap();
        for a in 0..12 {
            for b in 0..12 {
                let expect = if a == b { eigs[a] } else { 0.0 };
                assert_eq!(o.get(a, b), C64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn reproducible_and_hermitian() {
        let one = |_: f64, _: f64| 1.0;
        let s = |_: f64| 2.0;
        let mc = |_: f64| 0.1;
        let p = EthProfiles { f: &one, entropy: &s, microcanonical: &mc };
        let eigs = flat(20);
        let opts = SynthOptions { traceless_unit_norm: true };
        let a = synth_eth_operator(&eigs, &p, 7, opts).unwrap();
        let b = synth_eth_operator(&eigs, &p, 7, opts).unwrap();
        let c = synth_eth_operator(&eigs, &p, 8, opts).unwrap();
        assert_eq!(a.to_complex(), b.to_complex());
        assert_ne!(a.to_complex(), c.to_complex());
        assert_eq!(a.hermiticity_residual(), 0.0);
        assert!(a.trace().norm() < 1e-12);
        assert!((a.normalized_norm_sq() - 1.0).abs() < 1e-12);
    }
}
