//! The late-time purity from the frequency decomposition `|O⟩⟩ = Σ_m N_m|ω_m⟩⟩`.
//!
//! With `Y_m` the reshuffled component of frequency `ω_m` (scaled so that
//! `ρ_𝒜(t) = Y(t) Y(t)†`), `A_m = Y_m Y_m†` and `B_m = Y_m† Y_m`, the
//! time-independent part of `Tr[(Y Y†)²]` consists of
//!
//! * `m = n = p = q`: `Σ_m Tr A_m²`;
//! * `m = n ≠ p = q`: `Tr(Σ A)² − Σ Tr A_m²`;
//! * `m = q ≠ n = p`: `Tr(Σ B)² − Σ Tr B_m²`;
//! * `p = m̄, q = n̄`, where `m̄` carries `−ω_m`: the conjugate pairs
//!   `Σ_{n ∉ {m, m̄}} Tr(Y_m Y_n† Y_m̄ Y_n̄†)`.
//!
//! The first three families are what survives when the frequencies are
//! treated as non-resonant, and they reproduce the six-term eigenstate sum
//! exactly. The fourth family survives the time average anyway, because
//! `ω_m + ω_m̄ = 0` for every `m`; it is reported separately as a measure of
//! what the non-resonant form leaves out. It is not the only such family:
//! Bohr frequencies also satisfy `ω_ac = ω_ab + ω_bc`.

use std::collections::HashMap;

use faer::Mat;

use super::{latetime_purity_ed_with, LatetimeOptions};
use crate::dynamics::reshuffle;
use crate::liouville::{build_omega_basis, OmegaBasis, OmegaOptions, OperatorInEnergyBasis};
use crate::spectral::SpectralData;
use crate::spin_chain::Cut;
use crate::{Error, Result, C64};

/// Largest Hilbert-space dimension accepted by the ω-form evaluator.
pub const MAX_OMEGA_DIM: usize = 64;

/// Above this dimension the conjugate pairs (a `d⁴` tensor filled once per
/// frequency) are skipped.
pub const MAX_CONJUGATE_DIM: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaSplit {
    pub diagonal: f64,
    pub a_pairs: f64,
    pub b_pairs: f64,
    /// `None` when `d > MAX_CONJUGATE_DIM`.
    pub conjugate_pairs: Option<f64>,
}

impl OmegaSplit {
    /// The non-resonant late-time purity, `diagonal + a_pairs + b_pairs`.
    pub fn total(&self) -> f64 {
        self.diagonal + self.a_pairs + self.b_pairs
    }

    /// `total()` plus the conjugate pairs, when they were computed.
    pub fn with_conjugate_pairs(&self) -> Option<f64> {
        self.conjugate_pairs.map(|c| self.total() + c)
    }
}

struct Components {
    y: Vec<Mat<C64>>,
    conj_of: Vec<usize>,
}

fn components(basis: &OmegaBasis, spec: &SpectralData, cut: Cut) -> Result<Components> {
    let d = basis.dim();
    if spec.dim() != d || cut.d() != d {
        return Err(Error::DimensionMismatch { expected: d, got: spec.dim() });
    }
    if d > MAX_OMEGA_DIM {
        return Err(Error::InvalidArgument(format!("ω-basis evaluation limited to d ≤ {MAX_OMEGA_DIM}")));
    }
    let norm_sq = basis.norm_sq_total();
    if norm_sq <= 0.0 {
        return Err(Error::ZeroNorm(""));
    }
    // ρ = R R†/d for Tr(O†O)/d = 1; rescale to that normalization
    let scale = 1.0 / (d as f64 * norm_sq).sqrt();
    let frames = spec.frames(0..d);
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    let mut y = Vec::with_capacity(basis.k());
    for (m, g) in basis.groups().iter().enumerate() {
        let mut x = Mat::<C64>::zeros(d, d);
        for &(a, b, v) in &g.entries {
            owner.insert((a, b), m);
            for i in 0..d {
                let left = frames[(i, a)] * v;
                for j in 0..d {
                    x[(i, j)] += left * frames[(j, b)].conj();
                }
            }
        }
        let mut r = reshuffle(x.as_ref(), cut);
        r *= faer::Scale(C64::new(scale, 0.0));
        y.push(r);
    }
    let conj_of = basis
        .groups()
        .iter()
        .enumerate()
        .map(|(m, g)| {
            let &(a, b, _) = g.entries.first().ok_or(Error::InvalidArgument("empty frequency group".into()))?;
            match owner.get(&(b, a)) {
                Some(&n) => Ok(n),
                // O Hermitian always carries both (a,b) and (b,a); a missing
                // partner means the basis came from a different operator
                None if a == b => Ok(m),
                None => Err(Error::InvalidArgument("frequency group without its conjugate".into())),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Components { y, conj_of })
}

fn trace_prod(x: &Mat<C64>, y: &Mat<C64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

fn tr4(a: &Mat<C64>, b: &Mat<C64>, c: &Mat<C64>, e: &Mat<C64>) -> C64 {
    // Tr(a b† c e†)
    let left = a * b.adjoint();
    let right = c * e.adjoint();
    trace_prod(&left, &right)
}

/// `Σ_m Tr A_m²`, `Tr(Σ_m A_m)²` and `Tr(Σ_m B_m)²`. The sums are formed from
/// blocks of stacked components so that each is one matrix product.
struct Moments {
    per_m: f64,
    big_a: f64,
    big_b: f64,
}

fn moments(y: &[Mat<C64>], na: usize, nb: usize) -> Moments {
    let chunk = ((1usize << 20) / (na * nb)).max(1);
    let mut sum_a = Mat::<C64>::zeros(na, na);
    let mut sum_b = Mat::<C64>::zeros(nb, nb);
    let mut per_m = 0.0;
    for block in y.chunks(chunk) {
        let c = block.len();
        let wide = Mat::from_fn(na, c * nb, |i, jm| block[jm / nb][(i, jm % nb)]);
        let tall = Mat::from_fn(c * na, nb, |im, j| block[im / na][(im % na, j)]);
        sum_a += &wide * wide.adjoint();
        sum_b += tall.adjoint() * &tall;
        for ym in block {
            // Tr A_m² = Tr B_m²; use the smaller Gram matrix
            let g = if na <= nb { ym * ym.adjoint() } else { ym.adjoint() * ym };
            per_m += g.as_ref().squared_norm_l2();
        }
    }
    Moments { per_m, big_a: sum_a.as_ref().squared_norm_l2(), big_b: sum_b.as_ref().squared_norm_l2() }
}

/// Evaluates the four families.
pub fn omega_purity(basis: &OmegaBasis, spec: &SpectralData, cut: Cut) -> Result<OmegaSplit> {
    let Components { y, conj_of } = components(basis, spec, cut)?;
    let (na, nb) = (cut.d_a * cut.d_a, cut.d_b * cut.d_b);
    let m = moments(&y, na, nb);
    let conjugate_pairs = (basis.dim() <= MAX_CONJUGATE_DIM).then(|| conjugate_pair_sum(&y, &conj_of, na, nb));
    Ok(OmegaSplit { diagonal: m.per_m, a_pairs: m.big_a - m.per_m, b_pairs: m.big_b - m.per_m, conjugate_pairs })
}

fn conjugate_pair_sum(y: &[Mat<C64>], conj_of: &[usize], na: usize, nb: usize) -> f64 {
    // G[(i,j),(k,l)] = Σ_m Y_m[i,j] Y_m̄[k,l] is one product of stacked
    // vectorizations; the full (m,n) sum is Σ G[(i,j),(k,l)] conj G[(k,j),(i,l)].
    let k = y.len();
    let v = Mat::from_fn(na * nb, k, |ij, m| y[m][(ij / nb, ij % nb)]);
    let vb = Mat::from_fn(k, na * nb, |m, kl| y[conj_of[m]][(kl / nb, kl % nb)]);
    let g = &v * &vb;
    let mut all = C64::new(0.0, 0.0);
    for i in 0..na {
        for kk in 0..na {
            for j in 0..nb {
                for l in 0..nb {
                    all += g[(i * nb + j, kk * nb + l)] * g[(kk * nb + j, i * nb + l)].conj();
                }
            }
        }
    }
    let mut excluded = C64::new(0.0, 0.0);
    for m in 0..k {
        let mb = conj_of[m];
        excluded += tr4(&y[m], &y[m], &y[mb], &y[mb]);
        if mb != m {
            excluded += tr4(&y[m], &y[mb], &y[mb], &y[m]);
        }
    }
    (all - excluded).re
}

/// The mutual-information-like rewriting
/// `Tr ρ_{ω,𝒜}² + Tr ρ_{ω,ℬ}² − Σ_m Tr ρ_{m,ℬ}²` compared with the
/// eigenstate evaluator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MutualInfoIdentity {
    pub decomposition: f64,
    pub ed_total: f64,
    /// `|decomposition − ed_total|`.
    pub residual: f64,
}

pub fn mutual_info_identity(spec: &SpectralData, o: &OperatorInEnergyBasis, cut: Cut) -> Result<MutualInfoIdentity> {
    let basis = build_omega_basis(o, spec.eigenvalues(), OmegaOptions::default())?;
    let Components { y, .. } = components(&basis, spec, cut)?;
    let m = moments(&y, cut.d_a * cut.d_a, cut.d_b * cut.d_b);
    let decomposition = m.big_a + m.big_b - m.per_m;
    let opts = LatetimeOptions { resonance_tol: None, ..Default::default() };
    let ed_total = latetime_purity_ed_with(spec, o, cut, None, opts)?.total;
    Ok(MutualInfoIdentity { decomposition, ed_total, residual: (decomposition - ed_total).abs() })
}
