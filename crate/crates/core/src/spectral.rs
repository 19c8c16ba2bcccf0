//! Eigendecomposition, energy windows and k non-resonance scans.

use std::ops::Range;

use faer::{Mat, Side};

use crate::liouville::OperatorInEnergyBasis;
use crate::spin_chain::HermitianOperator;
use crate::{Dense, Error, Result, C64};

/// Ascending eigenvalues and the matching orthonormal eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    vectors: Dense,
}

impl SpectralData {
    /// Assembles spectral data from parts, sorting by eigenvalue.
    pub fn from_parts(eigenvalues: Vec<f64>, vectors: Dense) -> Result<Self> {
        let d = eigenvalues.len();
        if vectors.nrows() != d || vectors.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: vectors.ncols() });
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return Ok(Self { eigenvalues, vectors });
        }
        let vals = order.iter().map(|&o| eigenvalues[o]).collect();
        let vectors = match vectors {
            Dense::Real(v) => Dense::Real(Mat::from_fn(d, d, |i, j| v[(i, order[j])])),
            Dense::Complex(v) => Dense::Complex(Mat::from_fn(d, d, |i, j| v[(i, order[j])])),
        };
        Ok(Self { eigenvalues: vals, vectors })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &Dense {
        &self.vectors
    }

    /// Component `⟨i|E_a⟩`.
    pub fn component(&self, i: usize, a: usize) -> C64 {
        self.vectors.get(i, a)
    }

    /// Eigenvectors of `cols` as the columns of a complex `d × |cols|` matrix.
    pub fn frames(&self, cols: Range<usize>) -> Mat<C64> {
        self.vectors.block(0..self.dim(), cols)
    }

    pub fn width(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// Mean level spacing over the whole spectrum.
    pub fn mean_level_spacing(&self) -> f64 {
        let d = self.dim();
        if d < 2 {
            return 0.0;
        }
        self.width() / (d - 1) as f64
    }

    /// Median of the spectrum (mean of the two middle values for even `d`).
    pub fn median(&self) -> f64 {
        let d = self.dim();
        if d % 2 == 1 {
            self.eigenvalues[d / 2]
        } else {
            0.5 * (self.eigenvalues[d / 2 - 1] + self.eigenvalues[d / 2])
        }
    }

    /// `‖H V − V diag(E)‖_F`.
    pub fn reconstruction_residual(&self, h: &HermitianOperator) -> f64 {
        let v = self.vectors.to_complex();
        let hv = h.to_complex() * &v;
        let d = self.dim();
        let mut acc = 0.0;
        for a in 0..d {
            for i in 0..d {
                acc += (hv[(i, a)] - v[(i, a)] * self.eigenvalues[a]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖V†V − I‖_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = self.vectors.to_complex();
        let g = v.adjoint() * &v;
        let d = self.dim();
        let mut acc = 0.0;
        for a in 0..d {
            for b in 0..d {
                let target = if a == b { 1.0 } else { 0.0 };
                acc += (g[(a, b)] - C64::new(target, 0.0)).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// Full eigendecomposition. Real symmetric input stays real.
pub fn eigendecompose(h: &HermitianOperator) -> Result<SpectralData> {
    match h.data() {
        Dense::Real(m) => {
            let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
            let vals = evd.S().column_vector().iter().copied().collect();
            SpectralData::from_parts(vals, Dense::Real(evd.U().to_owned()))
        }
        Dense::Complex(m) => {
            let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
            let vals = evd.S().column_vector().iter().map(|z| z.re).collect();
            SpectralData::from_parts(vals, Dense::Complex(evd.U().to_owned()))
        }
    }
}

/// `O_ab = ⟨E_a|O|E_b⟩`.
pub fn to_energy_basis(o: &HermitianOperator, spec: &SpectralData) -> Result<OperatorInEnergyBasis> {
    if o.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: o.dim() });
    }
    let data = match (o.data(), spec.vectors()) {
        (Dense::Real(m), Dense::Real(v)) => {
            let mv = m * v;
            Dense::Real(v.transpose() * &mv)
        }
        _ => {
            let v = spec.vectors().to_complex();
            let mv = o.to_complex() * &v;
            Dense::Complex(v.adjoint() * &mv)
        }
    };
    Ok(OperatorInEnergyBasis::from_dense(data))
}

/// Contiguous block of eigenstates around the middle of the spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyWindow {
    start: usize,
    len: usize,
    center_energy: f64,
}

impl EnergyWindow {
    /// A window given directly by its index range.
    pub fn from_range(range: Range<usize>, d: usize, center_energy: f64) -> Result<Self> {
        if range.is_empty() || range.end > d {
            return Err(Error::InvalidWindow { d_w: range.len(), d });
        }
        Ok(Self { start: range.start, len: range.len(), center_energy })
    }

    pub fn indices(&self) -> Range<usize> {
        self.start..self.start + self.len
    }

    pub fn d_w(&self) -> usize {
        self.len
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn center_energy(&self) -> f64 {
        self.center_energy
    }
}

/// `d_w` states starting at `floor((d - d_w) / 2)`.
pub fn select_window(spec: &SpectralData, d_w: usize) -> Result<EnergyWindow> {
    let d = spec.dim();
    if d_w == 0 || d_w > d {
        return Err(Error::InvalidWindow { d_w, d });
    }
    let start = (d - d_w) / 2;
    Ok(EnergyWindow { start, len: d_w, center_energy: spec.median() })
}

/// Largest centered block whose energies all lie in `[E_0 - ΔE/2, E_0 + ΔE/2]`
/// with `E_0` the spectral median.
pub fn select_window_by_width(spec: &SpectralData, delta_e: f64) -> Result<EnergyWindow> {
    let d = spec.dim();
    let e0 = spec.median();
    let (lo, hi) = (e0 - 0.5 * delta_e, e0 + 0.5 * delta_e);
    let e = spec.eigenvalues();
    for d_w in (1..=d).rev() {
        let start = (d - d_w) / 2;
        if e[start] >= lo && e[start + d_w - 1] <= hi {
            return Ok(EnergyWindow { start, len: d_w, center_energy: e0 });
        }
    }
    Err(Error::InvalidWindow { d_w: 0, d })
}

/// Default level-sum tolerance, relative to `max(1, spectral width)`.
///
/// A few hundred times the eigensolver's accuracy: wide enough to merge
/// levels that are degenerate by symmetry, narrow enough that chance
/// near-coincidences among the `O(d²)` pair sums of a chaotic spectrum stay
/// apart up to `d = 256`. At 1e-9 the mixed-field chain already shows one
/// such pair at `L = 8` and hundreds at `L = 10`.
pub const DEFAULT_RESONANCE_TOL: f64 = 1e-12;

/// Two distinct `k`-subsets of levels whose energy sums coincide within tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Resonance {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub gap: f64,
}

/// Reports every pair of distinct `k`-subsets (no repeated levels) whose sums
/// differ by less than `tol * max(1, spectral width)`.
pub fn check_nonresonance(eigs: &[f64], k: usize, tol: f64) -> Result<Vec<Resonance>> {
    check_nonresonance_with(eigs, k, tol, false)
}

/// As [`check_nonresonance`]; `allow_large_k` lifts the `k <= 4` guard.
pub fn check_nonresonance_with(eigs: &[f64], k: usize, tol: f64, allow_large_k: bool) -> Result<Vec<Resonance>> {
    let mut out = Vec::new();
    scan_subset_sums(eigs, k, tol, allow_large_k, |table, i, j, gap| {
        out.push(Resonance { left: table.subset(i), right: table.subset(j), gap });
    })?;
    Ok(out)
}

/// Number of resonant subset pairs, without materializing them.
pub fn count_resonances(eigs: &[f64], k: usize, tol: f64) -> Result<usize> {
    let mut n = 0;
    scan_subset_sums(eigs, k, tol, false, |_, _, _, _| n += 1)?;
    Ok(n)
}

struct SubsetTable {
    k: usize,
    sums: Vec<f64>,
    members: Vec<u32>,
}

impl SubsetTable {
    fn subset(&self, i: usize) -> Vec<usize> {
        self.members[i * self.k..(i + 1) * self.k].iter().map(|&m| m as usize).collect()
    }
}

fn scan_subset_sums(
    eigs: &[f64],
    k: usize,
    tol: f64,
    allow_large_k: bool,
    mut report: impl FnMut(&SubsetTable, usize, usize, f64),
) -> Result<()> {
    if k == 0 || (k > 4 && !allow_large_k) {
        return Err(Error::ResonanceOrder(k));
    }
    let n = eigs.len();
    if k > n {
        return Ok(());
    }
    let (lo, hi) = eigs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &e| (l.min(e), h.max(e)));
    let threshold = tol * (hi - lo).max(1.0);

    let mut sums = Vec::new();
    let mut members = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        sums.push(idx.iter().map(|&i| eigs[i]).sum::<f64>());
        members.extend(idx.iter().map(|&i| i as u32));
        // advance to the next combination in lexicographic order
        let mut p = k;
        while p > 0 && idx[p - 1] == n - k + p - 1 {
            p -= 1;
        }
        if p == 0 {
            break;
        }
        idx[p - 1] += 1;
        for q in p..k {
            idx[q] = idx[q - 1] + 1;
        }
    }

    let mut order: Vec<u32> = (0..sums.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| sums[a as usize].total_cmp(&sums[b as usize]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&o| sums[o as usize]).collect();
    let table = SubsetTable { k, sums, members };
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            let gap = sorted[j] - sorted[i];
            if gap >= threshold {
                break;
            }
            let (a, b) = (order[i] as usize, order[j] as usize);
            report(&table, a.min(b), a.max(b), gap);
        }
    }
    debug_assert_eq!(table.sums.len(), sorted.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_chain::{build_mfim, build_site_pauli, MfimParams, PauliAxis};

    #[test]
    fn sigma_z_spectrum() {
        let h = build_site_pauli(2, 0, PauliAxis::Z).unwrap();
        let s = eigendecompose(&h).unwrap();
        assert_eq!(s.eigenvalues(), &[-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn reconstruction_at_l8() {
        let h = build_mfim(8, MfimParams::CHAOTIC).unwrap();
        let s = eigendecompose(&h).unwrap();
        let hn = h.data().frobenius_sq().sqrt();
        assert!(s.reconstruction_residual(&h) <= 1e-10 * hn);
        assert!(s.orthonormality_residual() <= 1e-10);
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn diagonal_h_leaves_operator_untouched() {
        let h = build_site_pauli(3, 1, PauliAxis::Z).unwrap();
        let mut diag = Mat::<f64>::zeros(8, 8);
        for i in 0..8 {
            diag[(i, i)] = i as f64;
        }
        let h2 = HermitianOperator::from_real(diag).unwrap();
        let s = eigendecompose(&h2).unwrap();
        let oe = to_energy_basis(&h, &s).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                assert!((oe.get(a, b) - h.get(a, b)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rotation_preserves_trace_and_norm() {
        let h = build_mfim(6, MfimParams::CHAOTIC).unwrap();
        let s = eigendecompose(&h).unwrap();
        let o = build_site_pauli(6, 3, PauliAxis::X).unwrap();
        let oe = to_energy_basis(&o, &s).unwrap();
        assert!(oe.trace().norm() < 1e-12);
        assert!((oe.normalized_norm_sq() - 1.0).abs() < 1e-12);
        let oy = build_site_pauli(6, 3, PauliAxis::Y).unwrap();
        let oye = to_energy_basis(&oy, &s).unwrap();
        assert!(oye.hermiticity_residual() < 1e-12);
        assert!((oye.normalized_norm_sq() - 1.0).abs() < 1e-12);
    }

    fn flat(d: usize) -> SpectralData {
        let e: Vec<f64> = (0..d).map(|i| i as f64).collect();
        SpectralData::from_parts(e, Dense::Real(Mat::identity(d, d))).unwrap()
    }

    #[test]
    fn windows() {
        let s = flat(4);
        assert_eq!(select_window(&s, 2).unwrap().indices(), 1..3);
        assert_eq!(select_window(&s, 4).unwrap().indices(), 0..4);
        assert!(select_window(&s, 0).is_err());
        assert!(select_window(&s, 5).is_err());
        let s = flat(1024);
        let w = select_window(&s, 10).unwrap();
        assert_eq!(w.indices(), 507..517);
        assert!(s.eigenvalues()[507] < s.median() && s.eigenvalues()[516] > s.median());
        // the window of a window is itself
        let w2 = EnergyWindow::from_range(w.indices(), 1024, w.center_energy()).unwrap();
        assert_eq!(w, w2);
    }

    #[test]
    fn window_by_width() {
        let s = flat(11);
        // median 5, interval [3, 7]
        assert_eq!(select_window_by_width(&s, 4.0).unwrap().indices(), 3..8);
        assert!(select_window_by_width(&s, 100.0).unwrap().d_w() == 11);
    }

    #[test]
    fn resonance_examples() {
        assert!(check_nonresonance(&[0.0, 1.0, 2.0], 2, 1e-10).unwrap().is_empty());
        let r = check_nonresonance(&[0.0, 1.0, 2.0, 3.0], 2, 1e-10).unwrap();
        assert_eq!(r.len(), 1);
        let mut pair = [r[0].left.clone(), r[0].right.clone()];
        pair.sort();
        assert_eq!(pair, [vec![0, 3], vec![1, 2]]);
        let r = check_nonresonance(&[1.0, 1.0, 2.0], 1, 1e-10).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].left.clone(), r[0].right.clone()), (vec![0], vec![1]));
        assert!(matches!(check_nonresonance(&[0.0; 8], 5, 1e-10), Err(Error::ResonanceOrder(5))));
        assert!(check_nonresonance_with(&[0.0, 1.0, 3.0, 7.0, 15.0, 31.0], 5, 1e-10, true).unwrap().is_empty());
    }
}
