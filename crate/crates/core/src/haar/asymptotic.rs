//! Leading-order late-time LOE for ETH operators at large `d`.

use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `d_A = O(1)`: `2 ln d_A − ln{1 + (d−1)σ²_off(σ²_diag − 1)}`.
    SmallA,
    /// `d_A = d_B = √d`: `ln d − ln{1 + σ²_diag(1 + (d−1)σ²_off)}`.
    HalfCut,
}

pub fn asymptotic_s2<T: Real>(regime: Regime, var_diag: T, var_off: T, d: usize, d_a: usize) -> Result<T> {
    if d_a == 0 || d == 0 {
        return Err(Error::InvalidGeometry(format!("d_A = {d_a}, d = {d}")));
    }
    let one = T::one();
    let dm1 = T::from_count(d as u64 - 1);
    let (lead, arg) = match regime {
        Regime::SmallA => (
            T::from_count(2) * T::from_count(d_a as u64).ln(),
            one + dm1 * var_off * (var_diag - one),
        ),
        Regime::HalfCut => (T::from_count(d as u64).ln(), one + var_diag * (one + dm1 * var_off)),
    };
    if arg <= T::zero() || !arg.is_finite() {
        return Err(Error::Domain(arg.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(lead - arg.ln())
}
