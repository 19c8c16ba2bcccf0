//! Unitary Weingarten functions from the inverse Gram matrix.

use super::gauss;
use super::perm::{Permutation, PermutationTable};
use crate::{Error, Field, Result};

/// `Wg(σ, τ) = (G⁻¹)_{στ}` with `G_{στ} = d^{#cycles(σ τ⁻¹)}`.
///
/// With this convention
/// `E[U_{i_1 j_1}⋯U_{i_n j_n} Ū_{i'_1 j'_1}⋯Ū_{i'_n j'_n}]
///   = Σ_{σ,τ} Π_k δ(i_k, i'_{σ(k)}) δ(j_k, j'_{τ(k)}) Wg(σ, τ)`.
#[derive(Clone, Debug)]
pub struct WeingartenTable<T> {
    d: usize,
    perms: PermutationTable,
    gram: Vec<Vec<T>>,
    wg: Vec<Vec<T>>,
}

/// Builds the table for `S_n` at dimension `d`; requires `d >= n`.
pub fn weingarten<T: Field>(n: usize, d: usize) -> Result<WeingartenTable<T>> {
    if d < n {
        return Err(Error::SingularGram { n, d });
    }
    let perms = PermutationTable::new(n)?;
    let dd = T::from_count(d as u64);
    let gram: Vec<Vec<T>> = (0..perms.len())
        .map(|s| {
            (0..perms.len())
                .map(|t| dd.powu(perms.cycles(perms.compose(s, perms.inverse(t))) as u32))
                .collect()
        })
        .collect();
    let wg = gauss::invert(&gram).map_err(|_| Error::SingularGram { n, d })?;
    Ok(WeingartenTable { d, perms, gram, wg })
}

impl<T: Field> WeingartenTable<T> {
    pub fn n(&self) -> usize {
        self.perms.n()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn perms(&self) -> &PermutationTable {
        &self.perms
    }

    pub fn gram(&self) -> &[Vec<T>] {
        &self.gram
    }

    /// `Wg(σ, τ)` by permutation index.
    pub fn pair(&self, sigma: usize, tau: usize) -> &T {
        &self.wg[sigma][tau]
    }

    /// The class function `Wg(π) = Wg(π, id)`.
    pub fn value(&self, pi: &Permutation) -> Option<&T> {
        self.perms.index_of(pi).map(|i| &self.wg[i][self.perms.identity()])
    }

    /// `max |G · Wg − I|` entrywise.
    pub fn inverse_residual(&self) -> T {
        let n = self.perms.len();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + self.gram[i][k].clone() * self.wg[k][j].clone();
                }
                if i == j {
                    acc = acc - T::one();
                }
                let a = acc.abs();
                if a > worst {
                    worst = a;
                }
            }
        }
        worst
    }
}
