//! Operators in the energy eigenbasis, Bohr frequencies and the frequency
//! ("ω") basis that diagonalizes the Liouvillian `[H, ·]`.
//!
//! Vectorization maps `|a⟩⟨b| ↦ |a⟩ ⊗ |b*⟩ / sqrt(d)`, so the inner product
//! of operators is `Tr(A†B)/d` and a Pauli string has unit norm.

use std::ops::Range;

use faer::Mat;

use crate::{Dense, Error, Result, C64};

/// How an operator restricted to an energy window is normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WindowNorm {
    /// Rescale so that `(1/d_w) Σ_{a,b ∈ w} |O_ab|² = 1`.
    #[default]
    Renormalize,
    /// Keep the projected matrix elements as they are.
    Raw,
}

/// Structural checks of an operator in the energy basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperatorFlags {
    pub hermitian: bool,
    pub traceless: bool,
    pub unit_norm: bool,
}

/// Matrix elements `O_ab = ⟨E_a|O|E_b⟩`.
#[derive(Clone, Debug)]
pub struct OperatorInEnergyBasis {
    data: Dense,
}

impl OperatorInEnergyBasis {
    pub fn from_dense(data: Dense) -> Self {
        Self { data }
    }

    /// Wraps a complex matrix after checking that it is square and Hermitian.
    pub fn from_complex(m: Mat<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        let op = Self { data: Dense::Complex(m) };
        let residual = op.hermiticity_residual();
        let bound = 1e-12 * op.data.frobenius_sq().sqrt().max(1.0);
        if residual > bound {
            return Err(Error::NotHermitian { residual, bound });
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &Dense {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.data.get(a, b)
    }

    pub fn to_complex(&self) -> Mat<C64> {
        self.data.to_complex()
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// `(1/d) Σ_ab |O_ab|²`.
    pub fn normalized_norm_sq(&self) -> f64 {
        self.data.frobenius_sq() / self.dim() as f64
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.data.hermiticity_residual()
    }

    pub fn flags(&self) -> OperatorFlags {
        OperatorFlags {
            hermitian: self.hermiticity_residual() <= 1e-12 * self.data.frobenius_sq().sqrt().max(1.0),
            traceless: self.trace().norm() <= 1e-10,
            unit_norm: (self.normalized_norm_sq() - 1.0).abs() <= 1e-10,
        }
    }

    /// The block of `range × range`, normalized per `norm`.
    pub fn restrict(&self, range: Range<usize>, norm: WindowNorm) -> Result<Mat<C64>> {
        if range.end > self.dim() || range.is_empty() {
            return Err(Error::InvalidWindow { d_w: range.len(), d: self.dim() });
        }
        let n = range.len();
        let mut m = self.data.block(range.clone(), range);
        let norm_sq = m.as_ref().squared_norm_l2() / n as f64;
        if norm_sq <= f64::MIN_POSITIVE {
            return Err(Error::ZeroNorm(" after window projection"));
        }
        if norm == WindowNorm::Renormalize {
            let s = 1.0 / norm_sq.sqrt();
            for j in 0..n {
                for i in 0..n {
                    m[(i, j)] *= s;
                }
            }
        }
        Ok(m)
    }
}

/// `ω_ab = E_a − E_b`.
pub fn bohr_frequencies(eigs: &[f64]) -> Mat<f64> {
    let d = eigs.len();
    Mat::from_fn(d, d, |a, b| eigs[a] - eigs[b])
}

/// `O_ab(t) = e^{i(E_a − E_b)t} O_ab`, the Heisenberg evolution `e^{iHt} O e^{-iHt}`.
pub fn evolve_in_energy_basis(o: &OperatorInEnergyBasis, eigs: &[f64], t: f64) -> OperatorInEnergyBasis {
    let d = o.dim();
    let phases: Vec<C64> = eigs.iter().map(|&e| C64::from_polar(1.0, e * t)).collect();
    let m = Mat::from_fn(d, d, |a, b| phases[a] * phases[b].conj() * o.get(a, b));
    OperatorInEnergyBasis { data: Dense::Complex(m) }
}

/// One Bohr frequency together with the operator components that carry it.
#[derive(Clone, Debug)]
pub struct OmegaGroup {
    pub omega: f64,
    /// `(a, b, O_ab)` for every pair in `I_m`.
    pub entries: Vec<(usize, usize, C64)>,
    /// `N_m`, with `N_m² = (1/d) Σ_{(a,b) ∈ I_m} |O_ab|²`.
    pub norm: f64,
}

impl OmegaGroup {
    pub fn is_diagonal(&self) -> bool {
        self.entries.iter().all(|&(a, b, _)| a == b)
    }
}

/// Decomposition `|O⟩⟩ = Σ_m N_m |ω_m⟩⟩` into frequency components.
#[derive(Clone, Debug)]
pub struct OmegaBasis {
    dim: usize,
    groups: Vec<OmegaGroup>,
}

impl OmegaBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn groups(&self) -> &[OmegaGroup] {
        &self.groups
    }

    /// Krylov dimension `K`.
    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn norm_sq_total(&self) -> f64 {
        self.groups.iter().map(|g| g.norm * g.norm).sum()
    }

    /// Index of the zero-frequency group, if any.
    pub fn zero_group(&self) -> Option<usize> {
        self.groups.iter().position(|g| g.entries.iter().any(|&(a, b, _)| a == b))
    }

    /// The operator `X_m = Σ_{(a,b) ∈ I_m} O_ab |E_a⟩⟨E_b|` in the energy basis.
    pub fn group_matrix(&self, m: usize) -> Mat<C64> {
        let mut x = Mat::<C64>::zeros(self.dim, self.dim);
        for &(a, b, v) in &self.groups[m].entries {
            x[(a, b)] = v;
        }
        x
    }

    /// `Σ_m N_m |ω_m⟩⟩` back in matrix form.
    pub fn reconstruct(&self) -> Mat<C64> {
        let mut x = Mat::<C64>::zeros(self.dim, self.dim);
        for g in &self.groups {
            for &(a, b, v) in &g.entries {
                x[(a, b)] += v;
            }
        }
        x
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OmegaOptions {
    /// Frequencies closer than `group_tol × spectral width` are merged.
    pub group_tol: f64,
    /// Components with `|O_ab| ≤ drop_tol × max|O|` are discarded.
    pub drop_tol: f64,
    /// Fail if a group mixes diagonal and off-diagonal pairs.
    pub assert_nonresonant: bool,
}

impl Default for OmegaOptions {
    fn default() -> Self {
        Self { group_tol: crate::spectral::DEFAULT_RESONANCE_TOL, drop_tol: 1e-14, assert_nonresonant: true }
    }
}

pub fn build_omega_basis(o: &OperatorInEnergyBasis, eigs: &[f64], opts: OmegaOptions) -> Result<OmegaBasis> {
    let d = o.dim();
    if eigs.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: eigs.len() });
    }
    let mut max_abs: f64 = 0.0;
    for b in 0..d {
        for a in 0..d {
            max_abs = max_abs.max(o.get(a, b).norm());
        }
    }
    if max_abs == 0.0 {
        return Err(Error::ZeroNorm(""));
    }
    let drop = opts.drop_tol * max_abs;
    let mut pairs = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let v = o.get(a, b);
            if v.norm() > drop {
                let w = if a == b { 0.0 } else { eigs[a] - eigs[b] };
                pairs.push((w, a, b, v));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let width = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = opts.group_tol * width.max(1.0);
    let mut groups: Vec<OmegaGroup> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (w, a, b, v) in pairs {
        if groups.is_empty() || w - last > tol {
            groups.push(OmegaGroup { omega: w, entries: Vec::new(), norm: 0.0 });
        }
        last = w;
        groups.last_mut().unwrap().entries.push((a, b, v));
    }
    for g in &mut groups {
        let n = g.entries.len() as f64;
        g.omega = g.entries.iter().map(|&(a, b, _)| if a == b { 0.0 } else { eigs[a] - eigs[b] }).sum::<f64>() / n;
        g.norm = (g.entries.iter().map(|e| e.2.norm_sqr()).sum::<f64>() / d as f64).sqrt();
        let diag = g.entries.iter().any(|&(a, b, _)| a == b);
        let off = g.entries.iter().any(|&(a, b, _)| a != b);
        if opts.assert_nonresonant && diag && off {
            return Err(Error::ResonanceConflict { omega: g.omega });
        }
    }
    Ok(OmegaBasis { dim: d, groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigendecompose, to_energy_basis};
    use crate::spin_chain::{build_mfim, build_site_pauli, MfimParams, PauliAxis};

    fn mfim_pair(l: usize) -> (Vec<f64>, OperatorInEnergyBasis) {
        let h = build_mfim(l, MfimParams::CHAOTIC).unwrap();
        let s = eigendecompose(&h).unwrap();
        let o = build_site_pauli(l, l / 2, PauliAxis::X).unwrap();
        (s.eigenvalues().to_vec(), to_energy_basis(&o, &s).unwrap())
    }

    #[test]
    fn bohr_matrix_is_antisymmetric() {
        let w = bohr_frequencies(&[-1.0, -1.0, 1.0, 1.0]);
        for a in 0..4 {
            assert_eq!(w[(a, a)], 0.0);
            for b in 0..4 {
                assert_eq!(w[(a, b)], -w[(b, a)]);
                assert!([0.0, 2.0, -2.0].contains(&w[(a, b)]));
            }
        }
    }

    #[test]
    fn commuting_operator_has_one_group() {
        let o = build_site_pauli(3, 1, PauliAxis::Z).unwrap();
        let oe = OperatorInEnergyBasis::from_dense(o.data().clone());
        let eigs: Vec<f64> = (0..8).map(|i| o.get(i, i).re).collect();
        let basis = build_omega_basis(&oe, &eigs, OmegaOptions::default()).unwrap();
        assert_eq!(basis.k(), 1);
        assert_eq!(basis.groups()[0].omega, 0.0);
        assert!((basis.groups()[0].norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mfim_groups() {
        let (eigs, oe) = mfim_pair(6);
        let basis = build_omega_basis(&oe, &eigs, OmegaOptions::default()).unwrap();
        assert!(basis.k() <= 64 * 64 - 64 + 1);
        assert!((basis.norm_sq_total() - 1.0).abs() < 1e-10);
        let z = basis.zero_group().unwrap();
        let g = &basis.groups()[z];
        assert!(g.is_diagonal());
        assert_eq!(g.entries.len(), 64);
        // only the zero frequency is degenerate
        for (m, g) in basis.groups().iter().enumerate() {
            if m != z {
                assert_eq!(g.entries.len(), 1);
            }
        }
        let r = basis.reconstruct();
        let mut res = 0.0;
        for a in 0..64 {
            for b in 0..64 {
                res += (r[(a, b)] - oe.get(a, b)).norm_sqr();
            }
        }
        assert!(res.sqrt() <= 1e-10);
    }

    #[test]
    fn resonant_grouping_is_refused() {
        let oe = OperatorInEnergyBasis::from_complex(Mat::from_fn(3, 3, |_, _| C64::new(1.0, 0.0))).unwrap();
        let eigs = [0.0, 0.0, 1.0];
        assert!(matches!(
            build_omega_basis(&oe, &eigs, OmegaOptions::default()),
            Err(Error::ResonanceConflict { .. })
        ));
        let relaxed = OmegaOptions { assert_nonresonant: false, ..Default::default() };
        assert!(build_omega_basis(&oe, &eigs, relaxed).is_ok());
    }

    #[test]
    fn evolution_by_two_level_hand_solution() {
        // H = σz, O = σx: O(t) = e^{iHt} σx e^{-iHt} = σx cos 2t − σy sin 2t
        let oe = OperatorInEnergyBasis::from_complex(Mat::from_fn(2, 2, |a, b| {
            C64::new(if a != b { 1.0 } else { 0.0 }, 0.0)
        }))
        .unwrap();
        // eigenvalues ascending: E_0 = −1 (spin down), E_1 = +1 (spin up)
        let eigs = [-1.0, 1.0];
        for &t in &[0.0, 0.3, 1.7] {
            let ot = evolve_in_energy_basis(&oe, &eigs, t);
            // in the basis (down, up): σx → [[0,1],[1,0]], σy → [[0,i],[-i,0]]
            let expect01 = C64::new((2.0 * t).cos(), 0.0) - C64::new(0.0, 1.0) * (2.0 * t).sin();
            assert!((ot.get(0, 1) - expect01).norm() < 1e-14);
            assert!((ot.get(0, 1) - C64::from_polar(1.0, -2.0 * t)).norm() < 1e-14);
            assert!((ot.normalized_norm_sq() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn evolution_is_a_group() {
        let (eigs, oe) = mfim_pair(4);
        let a = evolve_in_energy_basis(&evolve_in_energy_basis(&oe, &eigs, 0.7), &eigs, 1.9);
        let b = evolve_in_energy_basis(&oe, &eigs, 2.6);
        for i in 0..16 {
            for j in 0..16 {
                assert!((a.get(i, j) - b.get(i, j)).norm() < 1e-12);
            }
        }
        let same = evolve_in_energy_basis(&oe, &eigs, 0.0);
        assert!((same.get(2, 5) - oe.get(2, 5)).norm() == 0.0);
    }

    #[test]
    fn window_restriction_renormalizes() {
        let (_, oe) = mfim_pair(6);
        let m = oe.restrict(20..40, WindowNorm::Renormalize).unwrap();
        assert!((m.as_ref().squared_norm_l2() / 20.0 - 1.0).abs() < 1e-12);
        let raw = oe.restrict(20..40, WindowNorm::Raw).unwrap();
        assert_eq!(raw[(3, 4)], oe.get(23, 24));
        let zero = OperatorInEnergyBasis::from_complex(Mat::zeros(4, 4)).unwrap();
        assert!(matches!(zero.restrict(0..2, WindowNorm::Renormalize), Err(Error::ZeroNorm(_))));
    }
}
