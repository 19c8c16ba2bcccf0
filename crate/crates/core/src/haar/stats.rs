//! The thirteen operator statistics that multiply the Haar weights.

use crate::{Field, C64};
use faer::MatRef;

pub const N_STATS: usize = 13;

/// `T_0 … T_12` for an operator with real diagonal `D_a = O_aa` and
/// off-diagonal weights `P_ab = |O_ab|²` (`P_aa = 0`).
///
/// | n | statistic |
/// |---|-----------|
/// | 0 | Σ D⁴ |
/// | 1 | Σ D³ · tr |
/// | 2 | (Σ D²)² |
/// | 3 | Σ D² · tr² |
/// | 4 | tr⁴ |
/// | 5 | Σ_{a≠c} D_a D_c P_ac |
/// | 6 | Σ_{a≠c} D_a² P_ac |
/// | 7 | Σ D² · Σ P |
/// | 8 | Σ P · tr² |
/// | 9 | Σ_{c≠f} D_c P_cf · tr |
/// | 10 | Σ P² |
/// | 11 | (Σ P)² |
/// | 12 | Σ_{a,b,c distinct} P_ab P_bc |
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorStatistics<T> {
    pub t: [T; N_STATS],
    /// Number of basis states the sums ran over.
    pub n: usize,
}

impl<T: Field> OperatorStatistics<T> {
    /// From the diagonal and a symmetric off-diagonal weight function.
    pub fn from_parts(diag: &[T], pair: impl Fn(usize, usize) -> T) -> Self {
        let n = diag.len();
        let sum = |it: &mut dyn Iterator<Item = T>| it.fold(T::zero(), |acc, x| acc + x);
        let tr = sum(&mut diag.iter().cloned());
        let d2 = sum(&mut diag.iter().map(|x| x.clone() * x.clone()));
        let d3 = sum(&mut diag.iter().map(|x| x.powu(3)));
        let d4 = sum(&mut diag.iter().map(|x| x.powu(4)));
        let (mut t5, mut t6, mut t9_inner, mut p_total, mut p_sq, mut r_sq) =
            (T::zero(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
        for a in 0..n {
            let mut r = T::zero();
            let mut dp = T::zero();
            for c in 0..n {
                if c == a {
                    continue;
                }
                let p = pair(a, c);
                p_sq = p_sq + p.clone() * p.clone();
                dp = dp + diag[c].clone() * p.clone();
                r = r + p;
            }
            t5 = t5 + diag[a].clone() * dp;
            t6 = t6 + diag[a].clone() * diag[a].clone() * r.clone();
            t9_inner = t9_inner + diag[a].clone() * r.clone();
            p_total = p_total + r.clone();
            r_sq = r_sq + r.clone() * r;
        }
        let tr2 = tr.clone() * tr.clone();
        let t = [
            d4,
            d3 * tr.clone(),
            d2.clone() * d2.clone(),
            d2.clone() * tr2.clone(),
            tr2.clone() * tr2.clone(),
            t5,
            t6,
            d2 * p_total.clone(),
            p_total.clone() * tr2,
            t9_inner * tr,
            p_sq.clone(),
            p_total.clone() * p_total,
            r_sq - p_sq,
        ];
        Self { t, n }
    }
}

impl OperatorStatistics<f64> {
    /// Statistics of a (window-restricted) Hermitian matrix. The diagonal is
    /// taken as real.
    pub fn from_matrix(o: MatRef<'_, C64>) -> Self {
        let n = o.nrows();
        let diag: Vec<f64> = (0..n).map(|a| o[(a, a)].re).collect();
        Self::from_parts(&diag, |a, c| o[(a, c)].norm_sqr())
    }
}
