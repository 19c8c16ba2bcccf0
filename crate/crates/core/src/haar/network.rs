//! Delta networks: products of Haar-unitary entries with summed indices.

use super::perm::PermutationTable;
use super::weingarten::{weingarten, WeingartenTable};
use crate::{Error, Field, Result};

/// A summation index of the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexVar {
    pub dim: usize,
    /// Pinned to one value instead of summed.
    pub fixed: Option<usize>,
}

/// A row or column of `U` written as a mixed-radix tuple of index variables,
/// most significant first.
pub type Slot = Vec<usize>;

/// `Σ_{free vars} Π_k U[row_k, col_k] · Π_k conj(U[row'_k, col'_k])`.
#[derive(Clone, Debug, Default)]
pub struct DeltaNetwork {
    vars: Vec<IndexVar>,
    u: Vec<(Slot, Slot)>,
    u_bar: Vec<(Slot, Slot)>,
    equalities: Vec<(usize, usize)>,
}

/// Result of [`haar_moment`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moment<T> {
    pub value: T,
    /// False when the numbers of `U` and `Ū` factors differ; the value is then zero.
    pub balanced: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl DeltaNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// A summed index of dimension `dim`.
    pub fn var(&mut self, dim: usize) -> usize {
        self.vars.push(IndexVar { dim, fixed: None });
        self.vars.len() - 1
    }

    /// An index pinned to `value`.
    pub fn fixed(&mut self, dim: usize, value: usize) -> usize {
        self.vars.push(IndexVar { dim, fixed: Some(value) });
        self.vars.len() - 1
    }

    pub fn u(&mut self, row: Slot, col: Slot) -> &mut Self {
        self.u.push((row, col));
        self
    }

    pub fn u_bar(&mut self, row: Slot, col: Slot) -> &mut Self {
        self.u_bar.push((row, col));
        self
    }

    /// Forces two indices to coincide, `δ(a, b)`.
    pub fn equal(&mut self, a: usize, b: usize) -> &mut Self {
        self.equalities.push((a, b));
        self
    }

    pub fn vars(&self) -> &[IndexVar] {
        &self.vars
    }

    pub fn is_balanced(&self) -> bool {
        self.u.len() == self.u_bar.len()
    }

    pub fn degree(&self) -> usize {
        self.u.len().max(self.u_bar.len())
    }

    fn slot_dim(&self, slot: &Slot) -> usize {
        slot.iter().map(|&v| self.vars[v].dim).product()
    }

    fn validate(&self, d: usize) -> Result<()> {
        for &(a, b) in &self.equalities {
            if a >= self.vars.len() || b >= self.vars.len() || self.vars[a].dim != self.vars[b].dim {
                return Err(Error::InvalidNetwork(format!("bad equality ({a}, {b})")));
            }
        }
        for v in &self.vars {
            if v.dim == 0 || v.fixed.is_some_and(|x| x >= v.dim) {
                return Err(Error::InvalidNetwork(format!("bad index {v:?}")));
            }
        }
        for (row, col) in self.u.iter().chain(&self.u_bar) {
            if row.iter().chain(col).any(|&v| v >= self.vars.len()) {
                return Err(Error::InvalidNetwork("slot references an unknown index".into()));
            }
            if self.slot_dim(row) != d || self.slot_dim(col) != d {
                return Err(Error::InvalidNetwork(format!("slot dimension differs from d = {d}")));
            }
        }
        Ok(())
    }

    /// Contracts `δ(left_k, right_{π(k)})` slot by slot on top of `uf`.
    /// Slots with different radix layouts are compared digit by digit, which
    /// requires matching layouts; mismatches are reported as invalid.
    fn pair_slots(&self, uf: &mut UnionFind, left: &[&Slot], right: &[&Slot], perm: &[usize]) -> Result<()> {
        for (k, l) in left.iter().enumerate() {
            let r = right[perm[k]];
            if l.len() != r.len() || l.iter().zip(r.iter()).any(|(&a, &b)| self.vars[a].dim != self.vars[b].dim) {
                return Err(Error::InvalidNetwork("paired slots have different layouts".into()));
            }
            for (&a, &b) in l.iter().zip(r.iter()) {
                uf.union(a, b);
            }
        }
        Ok(())
    }

    /// Number of index assignments compatible with the merged classes.
    fn count(&self, uf: &mut UnionFind) -> u128 {
        let n = self.vars.len();
        let mut fixed: Vec<Option<usize>> = vec![None; n];
        let mut touched = vec![false; n];
        let mut total: u128 = 1;
        for v in 0..n {
            let r = uf.find(v);
            if let Some(x) = self.vars[v].fixed {
                match fixed[r] {
                    Some(y) if y != x => return 0,
                    _ => fixed[r] = Some(x),
                }
            }
            touched[r] = true;
        }
        for r in 0..n {
            if touched[r] && uf.find(r) == r && fixed[r].is_none() {
                total *= self.vars[r].dim as u128;
            }
        }
        total
    }

    fn base_union_find(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.vars.len());
        for &(a, b) in &self.equalities {
            uf.union(a, b);
        }
        uf
    }

    /// Evaluates the moment with a prebuilt Weingarten table.
    pub fn evaluate<T: Field>(&self, wg: &WeingartenTable<T>) -> Result<Moment<T>> {
        if !self.is_balanced() {
            return Ok(Moment { value: T::zero(), balanced: false });
        }
        self.validate(wg.d())?;
        let n = self.u.len();
        if n == 0 {
            let mut uf = self.base_union_find();
            return Ok(Moment { value: T::from_count(self.count(&mut uf) as u64), balanced: true });
        }
        if wg.n() != n {
            return Err(Error::InvalidNetwork(format!("degree {n} with a table for S_{}", wg.n())));
        }
        let rows: Vec<&Slot> = self.u.iter().map(|(r, _)| r).collect();
        let cols: Vec<&Slot> = self.u.iter().map(|(_, c)| c).collect();
        let rows_bar: Vec<&Slot> = self.u_bar.iter().map(|(r, _)| r).collect();
        let cols_bar: Vec<&Slot> = self.u_bar.iter().map(|(_, c)| c).collect();
        let perms: &PermutationTable = wg.perms();
        let mut value = T::zero();
        for s in 0..perms.len() {
            for t in 0..perms.len() {
                let mut uf = self.base_union_find();
                self.pair_slots(&mut uf, &rows, &rows_bar, perms.perm(s).images())?;
                self.pair_slots(&mut uf, &cols, &cols_bar, perms.perm(t).images())?;
                let c = self.count(&mut uf);
                if c != 0 {
                    value = value + T::from_count(c as u64) * wg.pair(s, t).clone();
                }
            }
        }
        Ok(Moment { value, balanced: true })
    }
}

/// `E_U[network]` for Haar-random `U ∈ U(d)` in `f64`.
pub fn haar_moment(net: &DeltaNetwork, d: usize) -> Result<Moment<f64>> {
    haar_moment_in::<f64>(net, d)
}

/// Same as [`haar_moment`] over any field.
pub fn haar_moment_in<T: Field>(net: &DeltaNetwork, d: usize) -> Result<Moment<T>> {
    if !net.is_balanced() {
        return Ok(Moment { value: T::zero(), balanced: false });
    }
    let n = net.degree();
    if n > 4 {
        return Err(Error::InvalidNetwork(format!("degree {n} exceeds 4")));
    }
    if n == 0 {
        // no unitary entries; only the index sums remain
        let wg = weingarten::<T>(1, d.max(1))?;
        return net.evaluate(&wg);
    }
    let wg = weingarten::<T>(n, d)?;
    net.evaluate(&wg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn entry_moment(d: usize, pattern: &[((usize, usize), bool)]) -> Moment<Rational> {
        let mut net = DeltaNetwork::new();
        for &((i, j), conj) in pattern {
            let r = net.fixed(d, i);
            let c = net.fixed(d, j);
            if conj {
                net.u_bar(vec![r], vec![c]);
            } else {
                net.u(vec![r], vec![c]);
            }
        }
        haar_moment_in::<Rational>(&net, d).unwrap()
    }

    #[test]
    fn elementary_moments() {
        for d in [2usize, 3, 5, 8] {
            let dr = Rational::from_count(d as u64);
            let one = Rational::from_count(1);
            assert_eq!(entry_moment(d, &[((0, 0), false), ((0, 0), true)]).value, one.clone() / dr.clone());
            let m4 = entry_moment(d, &[((0, 0), false), ((0, 0), false), ((0, 0), true), ((0, 0), true)]);
            assert_eq!(m4.value, Rational::from_count(2) / (dr.clone() * (dr.clone() + one)));
            assert_eq!(entry_moment(d, &[((0, 0), false), ((0, 1), true)]).value, Rational::from_count(0));
            let unbalanced = entry_moment(d, &[((0, 0), false), ((0, 0), false), ((0, 0), true)]);
            assert!(!unbalanced.balanced);
        }
    }

    #[test]
    fn row_sum_rule() {
        // Σ_j |U_{0j}|² = 1
        let d = 6;
        let mut net = DeltaNetwork::new();
        let i = net.fixed(d, 0);
        let j = net.var(d);
        net.u(vec![i], vec![j]).u_bar(vec![i], vec![j]);
        let m = haar_moment(&net, d).unwrap();
        assert!((m.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_moments() {
        // E|Tr U|² = 1 and E|Tr U|⁴ = 2 for d ≥ 2
        let d = 5;
        let mut net = DeltaNetwork::new();
        let a = net.var(d);
        let b = net.var(d);
        net.u(vec![a], vec![a]).u_bar(vec![b], vec![b]);
        assert_eq!(haar_moment_in::<Rational>(&net, d).unwrap().value, Rational::from_count(1));
        let mut net = DeltaNetwork::new();
        let v: Vec<usize> = (0..4).map(|_| net.var(d)).collect();
        net.u(vec![v[0]], vec![v[0]]).u(vec![v[1]], vec![v[1]]);
        net.u_bar(vec![v[2]], vec![v[2]]).u_bar(vec![v[3]], vec![v[3]]);
        assert_eq!(haar_moment_in::<Rational>(&net, d).unwrap().value, Rational::from_count(2));
    }

    #[test]
    fn rejects_bad_slots() {
        let mut net = DeltaNetwork::new();
        let a = net.var(3);
        net.u(vec![a], vec![a]).u_bar(vec![a], vec![a]);
        assert!(haar_moment(&net, 4).is_err());
        assert!(haar_moment(&net, 2).is_err());
    }
}
