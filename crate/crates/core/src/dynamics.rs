//! Time-domain LOE: the reduced state of a vectorized operator on `A ⊗ A'`,
//! Rényi entropies, time series and brute-force long-time averages.

use faer::{Mat, MatRef, Side};
use rayon::prelude::*;

use crate::liouville::{OperatorInEnergyBasis, WindowNorm};
use crate::spectral::{EnergyWindow, SpectralData};
use crate::spin_chain::Cut;
use crate::{Error, Real, Result, C64};

/// Regroups `X_{(jα),(j'α')}` into the `d_A² × d_B²` matrix `R_{(jj'),(αα')}`.
///
/// `R R†/d` is then the reduced state of `|X⟩⟩` on `A ⊗ A'`.
pub fn reshuffle(x: MatRef<'_, C64>, cut: Cut) -> Mat<C64> {
    let (da, db) = (cut.d_a, cut.d_b);
    Mat::from_fn(da * da, db * db, |r, c| {
        let (j, jp) = (r / da, r % da);
        let (al, alp) = (c / db, c % db);
        x[(j * db + al, jp * db + alp)]
    })
}

/// Purity `Tr ρ²` of `ρ = scale · R R†` without forming the larger Gram matrix.
pub fn operator_purity(x: MatRef<'_, C64>, cut: Cut, scale: f64) -> f64 {
    let r = reshuffle(x, cut);
    let g = if r.nrows() <= r.ncols() { &r * r.adjoint() } else { r.adjoint() * &r };
    g.as_ref().squared_norm_l2() * scale * scale
}

/// Reduced state `ρ_𝒜` of a vectorized operator.
#[derive(Clone, Debug)]
pub struct ReducedOperatorState {
    rho: Mat<C64>,
    cut: Cut,
}

impl ReducedOperatorState {
    pub fn matrix(&self) -> &Mat<C64> {
        &self.rho
    }

    pub fn cut(&self) -> Cut {
        self.cut
    }

    pub fn trace(&self) -> f64 {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re).sum()
    }

    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so Tr ρ² = ‖ρ‖_F²
        self.rho.as_ref().squared_norm_l2()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let e = self
            .rho
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        Ok(e)
    }
}

fn check_operator(x: MatRef<'_, C64>, cut: Cut) -> Result<()> {
    if x.nrows() != cut.d() || x.ncols() != cut.d() {
        return Err(Error::DimensionMismatch { expected: cut.d(), got: x.nrows() });
    }
    Ok(())
}

/// `ρ_𝒜 = (1/d) R R†` for a site-basis operator with `Tr(O†O)/d = 1`.
pub fn reduced_density(o_site: MatRef<'_, C64>, cut: Cut) -> Result<ReducedOperatorState> {
    reduced_density_scaled(o_site, cut, 1.0 / cut.d() as f64)
}

/// `ρ_𝒜 = scale · R R†`; windowed operators use `scale = 1/d_w`.
pub fn reduced_density_scaled(o_site: MatRef<'_, C64>, cut: Cut, scale: f64) -> Result<ReducedOperatorState> {
    check_operator(o_site, cut)?;
    let r = reshuffle(o_site, cut);
    let mut rho = &r * r.adjoint();
    rho *= faer::Scale(C64::new(scale, 0.0));
    Ok(ReducedOperatorState { rho, cut })
}

/// The complementary state `ρ_ℬ = (1/d) R† R`.
pub fn reduced_density_complement(o_site: MatRef<'_, C64>, cut: Cut) -> Result<ReducedOperatorState> {
    check_operator(o_site, cut)?;
    let r = reshuffle(o_site, cut);
    let mut rho = r.adjoint() * &r;
    rho *= faer::Scale(C64::new(1.0 / cut.d() as f64, 0.0));
    Ok(ReducedOperatorState { rho, cut: cut.swapped() })
}

/// Rényi entropy of order `α ≥ 1` (`α = 1` is von Neumann).
pub fn renyi(rho: &ReducedOperatorState, alpha: f64) -> Result<f64> {
    if alpha < 1.0 {
        return Err(Error::RenyiOrder(alpha));
    }
    if alpha == 2.0 {
        return Ok(-rho.purity().ln());
    }
    renyi_from_spectrum(&rho.eigenvalues()?, alpha)
}

/// Rényi entropy of `A` for a normalized pure state `ψ` of the chain.
pub fn state_renyi(psi: &[C64], cut: Cut, alpha: f64) -> Result<f64> {
    if psi.len() != cut.d() {
        return Err(Error::DimensionMismatch { expected: cut.d(), got: psi.len() });
    }
    let m = Mat::from_fn(cut.d_a, cut.d_b, |j, al| psi[cut.index(j, al)]);
    let rho = ReducedOperatorState { rho: &m * m.adjoint(), cut };
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(tr.sqrt()));
    }
    renyi(&rho, alpha)
}

/// Rényi entropy of a probability vector; tiny negative eigenvalues from
/// roundoff are clipped to zero.
pub fn renyi_from_spectrum<T: Real>(lambdas: &[T], alpha: T) -> Result<T> {
    if alpha < T::one() {
        return Err(Error::RenyiOrder(alpha.to_f64().unwrap_or(f64::NAN)));
    }
    let clip = |l: T| if l > T::zero() { l } else { T::zero() };
    if alpha == T::one() {
        let s = lambdas.iter().fold(T::zero(), |acc, &l| {
            let l = clip(l);
            if l > T::zero() {
                acc - l * l.ln()
            } else {
                acc
            }
        });
        return Ok(s);
    }
    let sum = lambdas.iter().fold(T::zero(), |acc, &l| acc + clip(l).powf(alpha));
    Ok(sum.ln() / (T::one() - alpha))
}

/// Purity and 2-Rényi entropy at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimePoint {
    pub t: f64,
    pub purity: f64,
    pub s2: f64,
}

/// Everything needed to evaluate `Tr ρ_𝒜(t)²` at arbitrary times.
#[derive(Clone, Debug)]
pub struct Propagator {
    frames: Mat<C64>,
    energies: Vec<f64>,
    op: Mat<C64>,
    cut: Cut,
    scale: f64,
}

impl Propagator {
    /// Full-space propagator, or the window-restricted one with `O` projected
    /// on the window and normalized per `norm`.
    pub fn new(
        spec: &SpectralData,
        o: &OperatorInEnergyBasis,
        cut: Cut,
        window: Option<&EnergyWindow>,
        norm: WindowNorm,
    ) -> Result<Self> {
        let d = spec.dim();
        if o.dim() != d || cut.d() != d {
            return Err(Error::DimensionMismatch { expected: d, got: o.dim().min(cut.d()) });
        }
        let range = window.map(|w| w.indices()).unwrap_or(0..d);
        let op = match window {
            Some(_) => o.restrict(range.clone(), norm)?,
            None => o.to_complex(),
        };
        Ok(Self {
            frames: spec.frames(range.clone()),
            energies: spec.eigenvalues()[range.clone()].to_vec(),
            scale: 1.0 / range.len() as f64,
            op,
            cut,
        })
    }

    /// `O(t)` in the site basis.
    pub fn site_operator(&self, t: f64) -> Mat<C64> {
        let n = self.energies.len();
        let ph: Vec<C64> = self.energies.iter().map(|&e| C64::from_polar(1.0, e * t)).collect();
        let ot = Mat::from_fn(n, n, |a, b| ph[a] * ph[b].conj() * self.op[(a, b)]);
        let left = &self.frames * &ot;
        left * self.frames.adjoint()
    }

    pub fn purity_at(&self, t: f64) -> f64 {
        operator_purity(self.site_operator(t).as_ref(), self.cut, self.scale)
    }
}

/// `(t, purity, S2)` at each requested time.
pub fn loe_timeseries(
    spec: &SpectralData,
    o: &OperatorInEnergyBasis,
    cut: Cut,
    times: &[f64],
) -> Result<Vec<TimePoint>> {
    let p = Propagator::new(spec, o, cut, None, WindowNorm::Renormalize)?;
    Ok(times
        .par_iter()
        .map(|&t| {
            // the unit norm of O holds to a few ulps after the basis changes,
            // which can push an unentangled operator just above 1
            let raw = p.purity_at(t);
            debug_assert!(raw <= 1.0 + 1e-9, "purity {raw} at t = {t}");
            let purity = raw.min(1.0);
            let s2 = if purity == 1.0 { 0.0 } else { -purity.ln() };
            TimePoint { t, purity, s2 }
        })
        .collect())
}

/// Grid average with its naive standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeAverage {
    pub mean: f64,
    pub stderr: f64,
    pub t_max: f64,
    pub n_samples: usize,
}

/// Default grid: `t_max = 1000 · 2π / δ̄` with `δ̄` the mean level spacing,
/// sampled at 8192 points.
pub fn default_time_grid(spec: &SpectralData) -> (f64, usize) {
    let delta = spec.mean_level_spacing();
    let t_max = if delta > 0.0 { 1000.0 * std::f64::consts::TAU / delta } else { 1.0 };
    (t_max, 8192)
}

/// Left Riemann average of `Tr ρ_𝒜(t)²` on `t_k = k t_max / n`, `k = 0..n`.
pub fn time_average_purity_numeric(
    spec: &SpectralData,
    o: &OperatorInEnergyBasis,
    cut: Cut,
    t_max: f64,
    n_samples: usize,
    window: Option<&EnergyWindow>,
) -> Result<TimeAverage> {
    if n_samples == 0 || !(t_max >= 0.0) {
        return Err(Error::InvalidArgument(format!("grid t_max = {t_max}, n = {n_samples}")));
    }
    let p = Propagator::new(spec, o, cut, window, WindowNorm::Renormalize)?;
    let dt = t_max / n_samples as f64;
    let values: Vec<f64> = (0..n_samples).into_par_iter().map(|k| p.purity_at(k as f64 * dt)).collect();
    let n = n_samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(TimeAverage { mean, stderr: (var / n).sqrt(), t_max, n_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigendecompose, to_energy_basis};
    use crate::spin_chain::{build_mfim, build_site_pauli, MfimParams, PauliAxis};

    fn pauli(l: usize, site: usize, axis: PauliAxis) -> Mat<C64> {
        build_site_pauli(l, site, axis).unwrap().to_complex()
    }

    #[test]
    fn product_operators_are_pure() {
        let cut = Cut::new(2, 4).unwrap();
        let o = pauli(3, 0, PauliAxis::X);
        let rho = reduced_density(o.as_ref(), cut).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!(renyi(&rho, 1.0).unwrap().abs() < 1e-10);
        assert!(renyi(&rho, 3.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn xx_on_two_sites_is_still_a_product() {
        let x0 = pauli(2, 0, PauliAxis::X);
        let x1 = pauli(2, 1, PauliAxis::X);
        let xx = &x0 * &x1;
        let rho = reduced_density(xx.as_ref(), Cut::new(2, 2).unwrap()).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn entropy_of_maximally_mixed() {
        for m in [2usize, 5, 16] {
            let lam = vec![1.0 / m as f64; m];
            for alpha in [1.0, 2.0, 3.5] {
                let s = renyi_from_spectrum(&lam, alpha).unwrap();
                assert!((s - (m as f64).ln()).abs() < 1e-12);
            }
        }
        assert!(renyi_from_spectrum(&[1.0f32, 0.0], 1.0).unwrap().abs() < 1e-7);
        assert!(matches!(renyi_from_spectrum(&[1.0], 0.5), Err(Error::RenyiOrder(_))));
    }

    #[test]
    fn sigma_x_inside_a_starts_unentangled() {
        let l = 4;
        let h = build_mfim(l, MfimParams::CHAOTIC).unwrap();
        let s = eigendecompose(&h).unwrap();
        let o = to_energy_basis(&build_site_pauli(l, 0, PauliAxis::X).unwrap(), &s).unwrap();
        let cut = Cut::new(4, 4).unwrap();
        let ts = loe_timeseries(&s, &o, cut, &[0.0, 0.5, 3.0, 40.0]).unwrap();
        assert!(ts[0].s2.abs() < 1e-12);
        assert!(ts.iter().all(|p| p.purity > 0.0 && p.purity <= 1.0 + 1e-12));
        assert!(ts[3].s2 > 0.1);
    }

    #[test]
    fn bell_pair_entropy() {
        let cut = Cut::new(2, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)];
        for alpha in [1.0, 2.0, 3.0] {
            assert!((state_renyi(&psi, cut, alpha).unwrap() - 2f64.ln()).abs() < 1e-12);
        }
        let product = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert!(state_renyi(&product, cut, 2.0).unwrap().abs() < 1e-12);
        assert!(state_renyi(&product[..3], cut, 2.0).is_err());
    }

    #[test]
    fn single_sample_average_is_instantaneous() {
        let l = 4;
        let h = build_mfim(l, MfimParams::CHAOTIC).unwrap();
        let s = eigendecompose(&h).unwrap();
        let o = to_energy_basis(&build_site_pauli(l, 2, PauliAxis::X).unwrap(), &s).unwrap();
        let cut = Cut::new(2, 8).unwrap();
        let avg = time_average_purity_numeric(&s, &o, cut, 10.0, 1, None).unwrap();
        let p0 = loe_timeseries(&s, &o, cut, &[0.0]).unwrap()[0].purity;
        assert!((avg.mean - p0).abs() < 1e-14);
    }
}
