//! Infinite-time average of the operator purity.
//!
//! Under non-resonant spectra the long-time average keeps six eigenstate sums
//! (see [`tables`] for how they are contracted); [`omega`] evaluates the same
//! average from the frequency decomposition of the operator, and [`page`]
//! holds the state-space analogue.

pub mod omega;
pub mod page;
mod tables;

use std::ops::Range;

use faer::{Mat, MatRef};

use crate::liouville::{OperatorInEnergyBasis, WindowNorm};
use crate::spectral::{check_nonresonance, EnergyWindow, SpectralData, DEFAULT_RESONANCE_TOL};
use crate::spin_chain::Cut;
use crate::{Error, Result, C64};

pub use omega::{mutual_info_identity, omega_purity, MutualInfoIdentity, OmegaSplit};
pub use tables::{term_g_only, FrameTables, Route, SixTerms};

/// The six summands of the late-time purity and their total.
///
/// `terms[0]` is the all-diagonal piece `F` and `terms[4]` the ℬ-overlap
/// piece `G`; `terms[5]` enters with a minus sign already applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityBreakdown {
    pub terms: [f64; 6],
    pub total: f64,
    /// Largest imaginary part dropped while forming the (real) terms.
    pub imag_residual: f64,
    pub omega_split: Option<OmegaSplit>,
}

impl PurityBreakdown {
    pub fn from_terms(t: SixTerms) -> Self {
        Self { terms: t.terms, total: t.terms.iter().sum(), imag_residual: t.imag_residual, omega_split: None }
    }

    pub fn f(&self) -> f64 {
        self.terms[0]
    }

    pub fn g(&self) -> f64 {
        self.terms[4]
    }

    /// `S_2 = −ln(total)`.
    pub fn s2(&self) -> f64 {
        -self.total.ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatetimeOptions {
    pub norm: WindowNorm,
    /// Refuse spectra with near-degenerate levels or gaps closer than
    /// `tol × max(1, width)`; `None` skips the check.
    pub resonance_tol: Option<f64>,
    pub route: Route,
}

impl Default for LatetimeOptions {
    fn default() -> Self {
        Self { norm: WindowNorm::Renormalize, resonance_tol: Some(DEFAULT_RESONANCE_TOL), route: Route::Auto }
    }
}

fn window_range(spec: &SpectralData, window: Option<&EnergyWindow>) -> Result<Range<usize>> {
    let range = window.map_or(0..spec.dim(), EnergyWindow::indices);
    if range.len() < 2 || range.end > spec.dim() {
        return Err(Error::InvalidWindow { d_w: range.len(), d: spec.dim() });
    }
    Ok(range)
}

fn check_spectrum(eigs: &[f64], tol: f64) -> Result<()> {
    for k in 1..=2 {
        let hits = check_nonresonance(eigs, k, tol)?;
        if !hits.is_empty() {
            return Err(Error::Resonant { k, count: hits.len() });
        }
    }
    Ok(())
}

/// Six-term purity for arbitrary orthonormal `frames` (`d × n_w`) and a
/// window operator `o_w` written in those frames.
pub fn six_term_purity(frames: MatRef<'_, C64>, o_w: MatRef<'_, C64>, cut: Cut) -> Result<PurityBreakdown> {
    let tables = FrameTables::new(frames, cut, Route::Auto)?;
    Ok(PurityBreakdown::from_terms(tables.evaluate(o_w)?))
}

/// Late-time purity from exact eigenstates, restricted to `window` if given.
pub fn latetime_purity_ed(
    spec: &SpectralData,
    o: &OperatorInEnergyBasis,
    cut: Cut,
    window: Option<&EnergyWindow>,
) -> Result<PurityBreakdown> {
    latetime_purity_ed_with(spec, o, cut, window, LatetimeOptions::default())
}

pub fn latetime_purity_ed_with(
    spec: &SpectralData,
    o: &OperatorInEnergyBasis,
    cut: Cut,
    window: Option<&EnergyWindow>,
    opts: LatetimeOptions,
) -> Result<PurityBreakdown> {
    if o.dim() != spec.dim() || cut.d() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: o.dim() });
    }
    let range = window_range(spec, window)?;
    if let Some(tol) = opts.resonance_tol {
        check_spectrum(&spec.eigenvalues()[range.clone()], tol)?;
    }
    let o_w = o.restrict(range.clone(), opts.norm)?;
    let frames = spec.frames(range);
    let tables = FrameTables::new(frames.as_ref(), cut, opts.route)?;
    Ok(PurityBreakdown::from_terms(tables.evaluate(o_w.as_ref())?))
}

/// The all-diagonal term `F`.
pub fn term_f(spec: &SpectralData, o: &OperatorInEnergyBasis, cut: Cut, window: Option<&EnergyWindow>) -> Result<f64> {
    Ok(latetime_purity_ed(spec, o, cut, window)?.f())
}

/// The ℬ-overlap term `G`, computed without the other five terms.
pub fn term_g(spec: &SpectralData, o: &OperatorInEnergyBasis, cut: Cut, window: Option<&EnergyWindow>) -> Result<f64> {
    term_g_with(spec, o, cut, window, LatetimeOptions::default())
}

pub fn term_g_with(
    spec: &SpectralData,
    o: &OperatorInEnergyBasis,
    cut: Cut,
    window: Option<&EnergyWindow>,
    opts: LatetimeOptions,
) -> Result<f64> {
    let range = window_range(spec, window)?;
    if let Some(tol) = opts.resonance_tol {
        check_spectrum(&spec.eigenvalues()[range.clone()], tol)?;
    }
    let o_w = o.restrict(range.clone(), opts.norm)?;
    term_g_only(spec.frames(range).as_ref(), o_w.as_ref(), cut)
}

/// Reduced states of every frame on both sides, as Gram tables
/// `(Tr ρ^𝒜_m ρ^𝒜_p, Tr ρ^ℬ_m ρ^ℬ_p)`.
pub(crate) fn reduced_overlap_tables(frames: MatRef<'_, C64>, cut: Cut) -> (Mat<f64>, Mat<f64>) {
    let (da, db) = (cut.d_a, cut.d_b);
    let n = frames.ncols();
    let side = |small: usize, other: usize, site: &dyn Fn(usize, usize) -> usize| {
        let x = Mat::from_fn(small * small, n, |p, e| {
            let (j, k) = (p / small, p % small);
            let mut acc = C64::new(0.0, 0.0);
            for al in 0..other {
                acc += frames[(site(j, al), e)] * frames[(site(k, al), e)].conj();
            }
            acc
        });
        let g = x.adjoint() * &x;
        Mat::from_fn(n, n, |a, c| g[(a, c)].re)
    };
    let ra = side(da, db, &|j, al| j * db + al);
    let rb = side(db, da, &|al, j| j * db + al);
    (ra, rb)
}

/// Late-time purity of a state `ψ` evolving under `H`:
/// `Σ_{m,p} p_m p_p Tr(ρ^𝒜_m ρ^𝒜_p) + Σ_{m≠p} p_m p_p Tr(ρ^ℬ_m ρ^ℬ_p)` with
/// `p_m = |⟨E_m|ψ⟩|²`.
pub fn state_latetime_purity(spec: &SpectralData, psi: &[C64], cut: Cut) -> Result<f64> {
    let d = spec.dim();
    if psi.len() != d || cut.d() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.len() });
    }
    let norm: f64 = psi.iter().map(C64::norm_sqr).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let frames = spec.frames(0..d);
    let p: Vec<f64> = (0..d)
        .map(|m| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d {
                acc += frames[(i, m)].conj() * psi[i];
            }
            acc.norm_sqr()
        })
        .collect();
    // only states with weight contribute
    let support: Vec<usize> = (0..d).filter(|&m| p[m] > 0.0).collect();
    let sub = Mat::from_fn(d, support.len(), |i, k| frames[(i, support[k])]);
    let (ra, rb) = reduced_overlap_tables(sub.as_ref(), cut);
    let mut total = 0.0;
    for (x, &m) in support.iter().enumerate() {
        for (y, &q) in support.iter().enumerate() {
            total += p[m] * p[q] * ra[(x, y)];
            if x != y {
                total += p[m] * p[q] * rb[(x, y)];
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::operator_purity;
    use crate::spectral::{eigendecompose, to_energy_basis};
    use crate::spin_chain::{build_mfim, build_site_pauli, center_site, HilbertGeometry, MfimParams, PauliAxis};

    fn mfim(l: usize) -> SpectralData {
        eigendecompose(&build_mfim(l, MfimParams::CHAOTIC).unwrap()).unwrap()
    }

    #[test]
    fn routes_agree() {
        let l = 5;
        let spec = mfim(l);
        let o = to_energy_basis(&build_site_pauli(l, center_site(l), PauliAxis::X).unwrap(), &spec).unwrap();
        for n_a in 1..l {
            let cut = HilbertGeometry::new(l, n_a).unwrap().cut();
            let mut opts = LatetimeOptions { route: Route::Labels, ..Default::default() };
            let a = latetime_purity_ed_with(&spec, &o, cut, None, opts).unwrap();
            opts.route = Route::Overlaps;
            let b = latetime_purity_ed_with(&spec, &o, cut, None, opts).unwrap();
            for k in 0..6 {
                assert!((a.terms[k] - b.terms[k]).abs() < 1e-12, "n_A={n_a} term {k}: {a:?} {b:?}");
            }
            assert!(a.total > 0.0 && a.total <= 1.0);
        }
    }

    #[test]
    fn diagonal_operator_has_no_g() {
        let l = 4;
        let spec = mfim(l);
        let mut m = Mat::<C64>::zeros(16, 16);
        for a in 0..16 {
            m[(a, a)] = C64::new(if a % 3 == 0 { 1.0 } else { -0.5 }, 0.0);
        }
        let o = OperatorInEnergyBasis::from_complex(m).unwrap();
        let cut = HilbertGeometry::new(l, 2).unwrap().cut();
        let b = latetime_purity_ed(&spec, &o, cut, None).unwrap();
        assert_eq!(b.g(), 0.0);
        // a conserved operator never evolves: the average is its own purity
        let frames = spec.frames(0..16);
        let o_w = o.restrict(0..16, WindowNorm::Renormalize).unwrap();
        let site = &frames * &o_w * frames.adjoint();
        let direct = operator_purity(site.as_ref(), cut, 1.0 / 16.0);
        assert!((b.total - direct).abs() < 1e-12);
    }

    #[test]
    fn off_diagonal_operator_has_no_f() {
        let l = 4;
        let spec = mfim(l);
        let m = Mat::from_fn(16, 16, |a, b| if a == b { C64::new(0.0, 0.0) } else { C64::new(((a * b) % 5) as f64 - 2.0, 0.0) });
        let o = OperatorInEnergyBasis::from_complex(m).unwrap();
        let cut = HilbertGeometry::new(l, 1).unwrap().cut();
        let b = latetime_purity_ed(&spec, &o, cut, None).unwrap();
        assert_eq!(b.f(), 0.0);
        assert!(b.terms[5] <= 0.0);
    }

    #[test]
    fn g_only_path_matches() {
        let l = 6;
        let spec = mfim(l);
        let o = to_energy_basis(&build_site_pauli(l, 3, PauliAxis::X).unwrap(), &spec).unwrap();
        let w = crate::spectral::select_window(&spec, 12).unwrap();
        for n_a in 1..l {
            let cut = HilbertGeometry::new(l, n_a).unwrap().cut();
            let full = latetime_purity_ed(&spec, &o, cut, Some(&w)).unwrap();
            let g = term_g(&spec, &o, cut, Some(&w)).unwrap();
            assert!((full.g() - g).abs() < 1e-14, "{} {}", full.g(), g);
        }
    }

    #[test]
    fn eigenstate_has_its_own_purity() {
        let l = 4;
        let spec = mfim(l);
        let cut = HilbertGeometry::new(l, 2).unwrap().cut();
        let psi: Vec<C64> = (0..16).map(|i| spec.component(i, 5)).collect();
        let p = state_latetime_purity(&spec, &psi, cut).unwrap();
        let (ra, _) = reduced_overlap_tables(spec.frames(5..6).as_ref(), cut);
        assert!((p - ra[(0, 0)]).abs() < 1e-12);
        assert!(state_latetime_purity(&spec, &vec![C64::new(1.0, 0.0); 16], cut).is_err());
    }

    #[test]
    fn window_too_small() {
        let spec = mfim(4);
        let o = to_energy_basis(&build_site_pauli(4, 2, PauliAxis::Z).unwrap(), &spec).unwrap();
        let cut = HilbertGeometry::new(4, 2).unwrap().cut();
        let w = EnergyWindow::from_range(3..4, 16, 0.0).unwrap();
        assert!(matches!(latetime_purity_ed(&spec, &o, cut, Some(&w)), Err(Error::InvalidWindow { .. })));
    }
}
