//! Small symmetric groups `S_n`, enough for degree-4 Haar moments.

use crate::{Error, Result};

/// A permutation of `0..n` stored by its images: `self.0[i] = π(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidArgument(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self(images))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n()];
        let mut lengths = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    pub fn cycles(&self) -> usize {
        self.cycle_type().len()
    }
}

/// All `n!` permutations in lexicographic order of their image vectors.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        if current.len() == n {
            out.push(Permutation(current.clone()));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                rec(n, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

/// `S_n` with cycle counts and a full composition table.
#[derive(Clone, Debug)]
pub struct PermutationTable {
    n: usize,
    perms: Vec<Permutation>,
    cycles: Vec<usize>,
    compose: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl PermutationTable {
    pub const MAX_N: usize = 6;

    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > Self::MAX_N {
            return Err(Error::InvalidArgument(format!("S_{n} is outside 1..={}", Self::MAX_N)));
        }
        let perms = all_permutations(n);
        let index = |p: &Permutation| perms.binary_search(p).expect("closed under composition");
        let cycles = perms.iter().map(Permutation::cycles).collect();
        let compose = perms.iter().map(|a| perms.iter().map(|b| index(&a.compose(b))).collect()).collect();
        let inverse = perms.iter().map(|p| index(&p.inverse())).collect();
        Ok(Self { n, perms, cycles, compose, inverse })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn perm(&self, i: usize) -> &Permutation {
        &self.perms[i]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.perms.binary_search(p).ok()
    }

    /// Index of the identity (first in lexicographic order).
    pub fn identity(&self) -> usize {
        0
    }

    pub fn cycles(&self, i: usize) -> usize {
        self.cycles[i]
    }

    /// Index of `perm(i) ∘ perm(j)`.
    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.compose[i][j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes_and_identity() {
        for (n, f) in [(1, 1), (2, 2), (3, 6), (4, 24)] {
            let t = PermutationTable::new(n).unwrap();
            assert_eq!(t.len(), f);
            assert_eq!(t.cycles(t.identity()), n);
            assert_eq!(t.perm(t.identity()), &Permutation::identity(n));
        }
        assert!(PermutationTable::new(0).is_err());
    }

    #[test]
    fn composition_is_associative_and_invertible() {
        for n in 1..=4 {
            let t = PermutationTable::new(n).unwrap();
            for a in 0..t.len() {
                assert_eq!(t.compose(a, t.inverse(a)), t.identity());
                for b in 0..t.len() {
                    for c in 0..t.len() {
                        assert_eq!(t.compose(t.compose(a, b), c), t.compose(a, t.compose(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn cycle_types_of_s4() {
        let t = PermutationTable::new(4).unwrap();
        let mut counts = std::collections::BTreeMap::new();
        for p in t.perms() {
            *counts.entry(p.cycle_type()).or_insert(0) += 1;
        }
        assert_eq!(counts[&vec![1, 1, 1, 1]], 1);
        assert_eq!(counts[&vec![2, 1, 1]], 6);
        assert_eq!(counts[&vec![2, 2]], 3);
        assert_eq!(counts[&vec![3, 1]], 8);
        assert_eq!(counts[&vec![4]], 6);
    }
}
