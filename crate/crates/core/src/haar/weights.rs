//! Haar average of the six-term late-time purity, reduced to thirteen
//! weights multiplying [`OperatorStatistics`].
//!
//! Each term is a sum over eigenstate labels of an operator monomial times an
//! eight-eigenvector contraction. Replacing the eigenvectors by columns of a
//! Haar unitary and applying Weingarten calculus pairs up labels; every
//! pairing turns a term into a constrained label sum, which is then expanded
//! into sums over pairwise-distinct labels ("patterns"). The thirteen
//! statistics span the same thirteen patterns, so the weights follow from one
//! linear solve.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::ToPrimitive;

use super::gauss;
use super::network::UnionFind;
use super::stats::{OperatorStatistics, N_STATS};
use super::weingarten::weingarten;
use crate::{Error, Field, Rational, Result};

pub const N_TERMS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Factor {
    /// `O_xx`
    Diag(u8),
    /// `|O_xy|²`, stored with `x < y`
    Pair(u8, u8),
}

impl Factor {
    fn pair(x: u8, y: u8) -> Self {
        Factor::Pair(x.min(y), x.max(y))
    }

    fn relabel(self, map: &[u8]) -> Self {
        match self {
            Factor::Diag(x) => Factor::Diag(map[x as usize]),
            Factor::Pair(x, y) => Factor::pair(map[x as usize], map[y as usize]),
        }
    }
}

/// A sum over `labels` indices, restricted by `distinct` pairs, of a product
/// of factors.
#[derive(Clone, Debug)]
struct LabelSum {
    labels: usize,
    distinct: Vec<(u8, u8)>,
    factors: Vec<Factor>,
}

/// Canonical form of a sum over pairwise-distinct labels.
type Pattern = (u8, Vec<Factor>);

fn permutations_of(k: usize) -> Vec<Vec<u8>> {
    super::perm::all_permutations(k)
        .into_iter()
        .map(|p| p.images().iter().map(|&i| i as u8).collect())
        .collect()
}

fn canonical(labels: usize, factors: &[Factor]) -> Pattern {
    permutations_of(labels)
        .into_iter()
        .map(|map| {
            let mut f: Vec<Factor> = factors.iter().map(|x| x.relabel(&map)).collect();
            f.sort_unstable();
            f
        })
        .min()
        .map(|f| (labels as u8, f))
        .expect("at least one relabeling")
}

/// All set partitions of `0..k` as restricted-growth strings.
fn set_partitions(k: usize) -> Vec<Vec<u8>> {
    fn rec(i: usize, k: usize, max: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            rec(i + 1, k, if b == max { max + 1 } else { max }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

impl LabelSum {
    /// Writes the sum as an integer combination of distinct-label patterns.
    fn expand(&self) -> BTreeMap<Pattern, i64> {
        let mut out = BTreeMap::new();
        for blocks in set_partitions(self.labels) {
            if self.distinct.iter().any(|&(x, y)| blocks[x as usize] == blocks[y as usize]) {
                continue;
            }
            let factors: Vec<Factor> = self.factors.iter().map(|f| f.relabel(&blocks)).collect();
            if factors.iter().any(|f| matches!(f, Factor::Pair(x, y) if x == y)) {
                continue;
            }
            let m = *blocks.iter().max().unwrap_or(&0) as usize + 1;
            *out.entry(canonical(m, &factors)).or_insert(0) += 1;
        }
        out
    }
}

/// One of the six summands: labels, distinctness constraints, the operator
/// monomial, the `(r_k, s_k)` label of each of the four slots, and an integer
/// multiplicity.
struct TermSpec {
    labels: usize,
    distinct: &'static [(u8, u8)],
    factors: &'static [Factor],
    slots: [(u8, u8); 4],
    multiplicity: i64,
}

use Factor::{Diag as Dg, Pair as Pr};

const TERMS: [TermSpec; N_TERMS] = [
    TermSpec {
        labels: 4,
        distinct: &[],
        factors: &[Dg(0), Dg(1), Dg(2), Dg(3)],
        slots: [(0, 0), (1, 1), (2, 2), (3, 3)],
        multiplicity: 1,
    },
    TermSpec {
        labels: 4,
        distinct: &[(2, 3)],
        factors: &[Dg(0), Dg(1), Pr(2, 3)],
        slots: [(0, 0), (1, 1), (2, 3), (2, 3)],
        multiplicity: 2,
    },
    TermSpec {
        labels: 4,
        distinct: &[(0, 1), (2, 3)],
        factors: &[Pr(0, 1), Pr(2, 3)],
        slots: [(0, 1), (0, 1), (2, 3), (2, 3)],
        multiplicity: 1,
    },
    TermSpec {
        labels: 4,
        distinct: &[(2, 3)],
        factors: &[Dg(0), Pr(2, 3), Dg(1)],
        slots: [(0, 0), (2, 3), (2, 3), (1, 1)],
        multiplicity: 2,
    },
    TermSpec {
        labels: 4,
        distinct: &[(0, 1), (2, 3)],
        factors: &[Pr(0, 1), Pr(2, 3)],
        slots: [(0, 1), (2, 3), (2, 3), (0, 1)],
        multiplicity: 1,
    },
    TermSpec {
        labels: 2,
        distinct: &[(0, 1)],
        factors: &[Pr(0, 1), Pr(0, 1)],
        slots: [(0, 1), (0, 1), (0, 1), (0, 1)],
        multiplicity: -1,
    },
];

fn statistic_sums() -> [LabelSum; N_STATS] {
    let s = |labels: usize, distinct: &[(u8, u8)], factors: &[Factor]| LabelSum {
        labels,
        distinct: distinct.to_vec(),
        factors: factors.to_vec(),
    };
    [
        s(1, &[], &[Dg(0), Dg(0), Dg(0), Dg(0)]),
        s(2, &[], &[Dg(0), Dg(0), Dg(0), Dg(1)]),
        s(2, &[], &[Dg(0), Dg(0), Dg(1), Dg(1)]),
        s(3, &[], &[Dg(0), Dg(0), Dg(1), Dg(2)]),
        s(4, &[], &[Dg(0), Dg(1), Dg(2), Dg(3)]),
        s(2, &[(0, 1)], &[Dg(0), Dg(1), Pr(0, 1)]),
        s(2, &[(0, 1)], &[Dg(0), Dg(0), Pr(0, 1)]),
        s(3, &[(1, 2)], &[Dg(0), Dg(0), Pr(1, 2)]),
        s(4, &[(0, 1)], &[Pr(0, 1), Dg(2), Dg(3)]),
        s(3, &[(0, 1)], &[Dg(0), Pr(0, 1), Dg(2)]),
        s(2, &[(0, 1)], &[Pr(0, 1), Pr(0, 1)]),
        s(4, &[(0, 1), (2, 3)], &[Pr(0, 1), Pr(2, 3)]),
        s(3, &[(0, 1), (1, 2), (0, 2)], &[Pr(0, 1), Pr(1, 2)]),
    ]
}

/// Number of site-index assignments surviving the column pairing `tau`.
///
/// The eight eigenvector entries carry site indices `(j,α) (k',α') (k,β)
/// (j',β')` on the unconjugated side and `(j',α') (k,α) (k',β') (j,β)` on the
/// conjugated side; `j, j', k, k'` live in 𝒜 and the Greek ones in ℬ.
fn site_count(tau: &[usize], d_a: usize, d_b: usize) -> u64 {
    const J: usize = 0;
    const JP: usize = 1;
    const K: usize = 2;
    const KP: usize = 3;
    const AL: usize = 4;
    const ALP: usize = 5;
    const BE: usize = 6;
    const BEP: usize = 7;
    let plain = [(J, AL), (KP, ALP), (K, BE), (JP, BEP)];
    let conj = [(JP, ALP), (K, AL), (KP, BEP), (J, BE)];
    let mut uf = UnionFind::new(8);
    for (k, &(x, y)) in plain.iter().enumerate() {
        let (u, v) = conj[tau[k]];
        uf.union(x, u);
        uf.union(y, v);
    }
    let mut count = 1u64;
    for v in 0..8 {
        if uf.find(v) == v {
            count *= if v < 4 { d_a as u64 } else { d_b as u64 };
        }
    }
    count
}

/// Weights `w_n` such that the Haar-averaged purity is `(1/n_w²) Σ_n w_n T_n`,
/// together with the split over the six summands.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable<T> {
    d_a: usize,
    d_b: usize,
    weights: Vec<T>,
    term_weights: Vec<Vec<T>>,
}

impl<T: Field> WeightTable<T> {
    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn d(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Weights of summand `term` (0-based, six summands).
    pub fn term_weights(&self, term: usize) -> &[T] {
        &self.term_weights[term]
    }

    fn combine(w: &[T], stats: &OperatorStatistics<T>) -> T {
        let n_w = T::from_count(stats.n as u64);
        let acc = w.iter().zip(&stats.t).fold(T::zero(), |acc, (w, t)| acc + w.clone() * t.clone());
        acc / (n_w.clone() * n_w)
    }

    pub fn assemble(&self, stats: &OperatorStatistics<T>) -> T {
        Self::combine(&self.weights, stats)
    }

    pub fn assemble_term(&self, term: usize, stats: &OperatorStatistics<T>) -> T {
        Self::combine(&self.term_weights[term], stats)
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> WeightTable<U> {
        WeightTable {
            d_a: self.d_a,
            d_b: self.d_b,
            weights: self.weights.iter().map(&f).collect(),
            term_weights: self.term_weights.iter().map(|w| w.iter().map(&f).collect()).collect(),
        }
    }
}

/// Derives the weights over the field `T`; exact when `T` is rational.
pub fn derive_weights_in<T: Field>(d_a: usize, d_b: usize) -> Result<WeightTable<T>> {
    let d = d_a * d_b;
    if d_a == 0 || d_b == 0 || d < 4 {
        return Err(Error::SingularGram { n: 4, d });
    }
    let wg = weingarten::<T>(4, d)?;
    let perms = wg.perms();
    // K_σ = Σ_τ Wg(σ, τ) C_τ
    let counts: Vec<T> = perms.perms().iter().map(|t| T::from_count(site_count(t.images(), d_a, d_b))).collect();
    let k_sigma: Vec<T> = (0..perms.len())
        .map(|s| (0..perms.len()).fold(T::zero(), |acc, t| acc + wg.pair(s, t).clone() * counts[t].clone()))
        .collect();

    let stat_expansions: Vec<BTreeMap<Pattern, i64>> = statistic_sums().iter().map(LabelSum::expand).collect();
    let mut index: BTreeMap<Pattern, usize> = BTreeMap::new();
    for e in &stat_expansions {
        for p in e.keys() {
            let next = index.len();
            index.entry(p.clone()).or_insert(next);
        }
    }
    if index.len() != N_STATS {
        return Err(Error::Unrepresentable);
    }
    // a[p][n]: coefficient of pattern p in T_n
    let mut a = vec![vec![T::zero(); N_STATS]; N_STATS];
    for (n, e) in stat_expansions.iter().enumerate() {
        for (p, &c) in e {
            a[index[p]][n] = T::from_int(c);
        }
    }

    let mut rhs = vec![vec![T::zero(); N_TERMS]; N_STATS];
    for (ti, term) in TERMS.iter().enumerate() {
        let plain: [u8; 4] = [term.slots[0].0, term.slots[1].1, term.slots[2].0, term.slots[3].1];
        let conj: [u8; 4] = [term.slots[0].1, term.slots[1].0, term.slots[2].1, term.slots[3].0];
        for (s, sigma) in perms.perms().iter().enumerate() {
            if k_sigma[s].is_zero() {
                continue;
            }
            let mut uf = UnionFind::new(term.labels);
            for k in 0..4 {
                uf.union(plain[k] as usize, conj[sigma.apply(k)] as usize);
            }
            if term.distinct.iter().any(|&(x, y)| uf.find(x as usize) == uf.find(y as usize)) {
                continue;
            }
            let mut class = vec![u8::MAX; term.labels];
            let mut next = 0u8;
            let mut map = vec![0u8; term.labels];
            for (l, slot) in map.iter_mut().enumerate() {
                let r = uf.find(l);
                if class[r] == u8::MAX {
                    class[r] = next;
                    next += 1;
                }
                *slot = class[r];
            }
            let merged = LabelSum {
                labels: next as usize,
                distinct: term.distinct.iter().map(|&(x, y)| (map[x as usize], map[y as usize])).collect(),
                factors: term.factors.iter().map(|f| f.relabel(&map)).collect(),
            };
            let weight = k_sigma[s].clone() * T::from_int(term.multiplicity);
            for (p, c) in merged.expand() {
                let row = *index.get(&p).ok_or(Error::Unrepresentable)?;
                rhs[row][ti] = rhs[row][ti].clone() + weight.clone() * T::from_int(c);
            }
        }
    }

    let solved = gauss::solve(&a, &rhs)?;
    let term_weights: Vec<Vec<T>> = (0..N_TERMS).map(|t| (0..N_STATS).map(|n| solved[n][t].clone()).collect()).collect();
    let weights = (0..N_STATS)
        .map(|n| term_weights.iter().fold(T::zero(), |acc, w| acc + w[n].clone()))
        .collect();
    Ok(WeightTable { d_a, d_b, weights, term_weights })
}

/// Exact rational weights.
pub fn derive_weights_exact(d_a: usize, d_b: usize) -> Result<WeightTable<Rational>> {
    derive_weights_in::<Rational>(d_a, d_b)
}

type Cache = Mutex<HashMap<(usize, usize), Arc<WeightTable<f64>>>>;

/// `f64` weights, derived exactly and rounded once; cached per `(d_A, d_B)`.
pub fn derive_weights(d_a: usize, d_b: usize) -> Result<Arc<WeightTable<f64>>> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(w) = cache.lock().expect("weight cache poisoned").get(&(d_a, d_b)) {
        return Ok(Arc::clone(w));
    }
    let exact = derive_weights_exact(d_a, d_b)?;
    let table = Arc::new(exact.map(|x| x.to_f64().unwrap_or(f64::NAN)));
    cache.lock().expect("weight cache poisoned").insert((d_a, d_b), Arc::clone(&table));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirteen_patterns() {
        let mut all = std::collections::BTreeSet::new();
        for s in statistic_sums() {
            all.extend(s.expand().into_keys());
        }
        assert_eq!(all.len(), N_STATS);
    }

    #[test]
    fn partitions_are_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52];
        for (k, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(k).len(), b);
        }
    }

    #[test]
    fn site_count_identity() {
        // identity pairing: j=j', k=k' fused with α-β structure
        let c = site_count(&[0, 1, 2, 3], 2, 3);
        assert!(c > 0);
        assert_eq!(site_count(&[0, 1, 2, 3], 1, 1), 1);
    }

    #[test]
    fn float_matches_exact() {
        let exact = derive_weights_exact(2, 4).unwrap();
        let float = derive_weights_in::<f64>(2, 4).unwrap();
        for n in 0..N_STATS {
            let e = exact.weights()[n].to_f64().unwrap();
            assert!((e - float.weights()[n]).abs() <= 1e-10 * (1.0 + e.abs()), "w_{n}");
        }
    }

    #[test]
    fn too_small() {
        assert!(derive_weights(1, 3).is_err());
        assert!(derive_weights(2, 2).is_ok());
    }
}
