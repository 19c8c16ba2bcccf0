//! State-space baseline: averaged partial-swap matrix elements and the Page
//! law they assemble into.

use crate::{Error, Field, Real, Result};

/// Haar averages of the partial swap `S_A` between energy eigenstates.
///
/// * `dia  = ⟨mm|S_A|mm⟩`
/// * `semi = ⟨mp|S_A|mp⟩`, `m ≠ p`
/// * `perm = ⟨mp|S_A|pm⟩`, `m ≠ p`
#[derive(Clone, Debug, PartialEq)]
pub struct PageWeights<T> {
    pub dia: T,
    pub semi: T,
    pub perm: T,
}

/// Closed forms for `d = d_A · d_B`.
pub fn page_weights<T: Field>(d_a: usize, d: usize) -> Result<PageWeights<T>> {
    if d_a == 0 || d_a > d || d % d_a != 0 {
        return Err(Error::InvalidGeometry(format!("d_A = {d_a} does not divide d = {d}")));
    }
    let one = T::one();
    let da = T::from_count(d_a as u64);
    let dd = T::from_count(d as u64);
    let d_over = dd.clone() / da.clone();
    let dia = (d_over.clone() + da.clone()) / (dd.clone() + one.clone());
    if d == 1 {
        // no pairs m ≠ p exist; the pair averages are only defined by continuity
        return Ok(PageWeights { dia, semi: one, perm: T::zero() });
    }
    let d2m1 = dd.clone() * dd.clone() - one;
    let semi = (dd.clone() * d_over.clone() - da.clone()) / d2m1.clone();
    let perm = (dd * da - d_over) / d2m1;
    Ok(PageWeights { dia, semi, perm })
}

/// Which of the three partial-swap families are kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PageCombination {
    pub dia: bool,
    pub semi: bool,
    pub perm: bool,
}

impl PageCombination {
    pub const FULL: Self = Self { dia: true, semi: true, perm: true };

    /// The seven non-empty combinations, `FULL` last.
    pub fn all() -> [Self; 7] {
        let c = |dia, semi, perm| Self { dia, semi, perm };
        [
            c(true, false, false),
            c(false, true, false),
            c(false, false, true),
            c(true, true, false),
            c(true, false, true),
            c(false, true, true),
            Self::FULL,
        ]
    }

    pub fn label(&self) -> String {
        if *self == Self::FULL {
            return "Full".into();
        }
        let mut parts = Vec::new();
        if self.dia {
            parts.push("DIA");
        }
        if self.semi {
            parts.push("SEMI");
        }
        if self.perm {
            parts.push("PERM");
        }
        parts.join("+")
    }
}

/// Late-time purity of a state spread uniformly over `n_w` eigenstates,
/// keeping only the selected families:
/// `(1/n_w²)[n_w·DIA + n_w(n_w − 1)(SEMI + PERM)]`.
pub fn combination_purity<T: Field>(w: &PageWeights<T>, n_w: usize, combo: PageCombination) -> T {
    let n = T::from_count(n_w as u64);
    let pairs = n.clone() * (n.clone() - T::one());
    let mut acc = T::zero();
    if combo.dia {
        acc = acc + n.clone() * w.dia.clone();
    }
    if combo.semi {
        acc = acc + pairs.clone() * w.semi.clone();
    }
    if combo.perm {
        acc = acc + pairs * w.perm.clone();
    }
    acc / (n.clone() * n)
}

/// `−ln` of the full combination, `n_A ln 2 − ln((d + d_A²)/(d + 1))`.
pub fn page_s2<T: Real>(n_a: u32, d: usize) -> Result<T> {
    let d_a = 1usize
        .checked_shl(n_a)
        .filter(|&x| x <= d)
        .ok_or_else(|| Error::InvalidGeometry(format!("2^{n_a} exceeds d = {d}")))?;
    let dd = T::from_count(d as u64);
    let da = T::from_count(d_a as u64);
    Ok(T::from_count(n_a as u64) * T::LN_2() - ((dd + da * da) / (dd + T::one())).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn closed_forms() {
        let w = page_weights::<f64>(1, 16).unwrap();
        assert_eq!((w.dia, w.semi, w.perm), (1.0, 1.0, 0.0));
        let w = page_weights::<f64>(2, 4).unwrap();
        assert!((w.dia - 0.8).abs() < 1e-15);
        assert!(page_weights::<f64>(8, 4).is_err());
        assert!(page_weights::<f64>(3, 8).is_err());
    }

    #[test]
    fn semi_plus_perm_is_dia_exactly() {
        for (d_a, d) in [(2usize, 4usize), (2, 16), (4, 16), (8, 1024), (32, 1024)] {
            let w = page_weights::<Rational>(d_a, d).unwrap();
            assert_eq!(w.semi.clone() + w.perm.clone(), w.dia.clone());
            for n_w in [2usize, 40, d] {
                assert_eq!(combination_purity(&w, n_w, PageCombination::FULL), w.dia);
            }
        }
    }

    #[test]
    fn page_s2_values() {
        assert_eq!(page_s2::<f64>(0, 1024).unwrap(), 0.0);
        let v: f64 = page_s2(2, 1024).unwrap();
        assert!((v - (2.0 * 2f64.ln() - (1040.0f64 / 1025.0).ln())).abs() < 1e-15);
        assert!((v - 1.3718).abs() < 1e-4);
        assert!(page_s2::<f64>(11, 1024).is_err());
        let w = page_weights::<f64>(4, 1024).unwrap();
        assert!((v + w.dia.ln()).abs() < 1e-12);
    }
}
