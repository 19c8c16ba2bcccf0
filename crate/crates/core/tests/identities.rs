//! The factorized six-term evaluator against a literal eight-index sum, and
//! against the frequency-decomposition form on real chains.

use faer::{Mat, MatRef};
use loe_core::haar::haar_isometry;
use loe_core::latetime::{mutual_info_identity, omega_purity, six_term_purity, FrameTables, Route};
use loe_core::liouville::{build_omega_basis, OmegaOptions};
use loe_core::spectral::{eigendecompose, to_energy_basis};
use loe_core::spin_chain::{build_mfim, build_site_pauli, center_site};
use loe_core::{Cut, HilbertGeometry, MfimParams, PauliAxis, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hermitian(n: usize, traceless: bool, rng: &mut impl Rng) -> Mat<C64> {
    let mut m = Mat::<C64>::zeros(n, n);
    for a in 0..n {
        m[(a, a)] = C64::new(rng.random::<f64>() - 0.2, 0.0);
        for b in a + 1..n {
            let v = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            m[(a, b)] = v;
            m[(b, a)] = v.conj();
        }
    }
    if traceless {
        let t = (0..n).map(|a| m[(a, a)].re).sum::<f64>() / n as f64;
        for a in 0..n {
            m[(a, a)].re -= t;
        }
    }
    let s = (m.as_ref().squared_norm_l2() / n as f64).sqrt();
    m *= faer::Scale(C64::new(1.0 / s, 0.0));
    m
}

/// `W(x1,x2,x3,x4) = Σ_{j,k,α,β} E^{x1}_{jα} E^{x2*}_{kα} E^{x3}_{kβ} E^{x4*}_{jβ}`
/// for every label quadruple. The eight site sums of each summand split into
/// this unprimed product times the conjugate of a primed one.
struct Quads {
    n: usize,
    w: Vec<C64>,
}

impl Quads {
    fn new(frames: MatRef<'_, C64>, cut: Cut) -> Self {
        let n = frames.ncols();
        let e = |x: usize, j: usize, al: usize| frames[(cut.index(j, al), x)];
        let mut w = vec![C64::new(0.0, 0.0); n * n * n * n];
        for x1 in 0..n {
            for x2 in 0..n {
                for x3 in 0..n {
                    for x4 in 0..n {
                        let mut acc = C64::new(0.0, 0.0);
                        for j in 0..cut.d_a {
                            for k in 0..cut.d_a {
                                for al in 0..cut.d_b {
                                    for be in 0..cut.d_b {
                                        acc += e(x1, j, al) * e(x2, k, al).conj() * e(x3, k, be) * e(x4, j, be).conj();
                                    }
                                }
                            }
                        }
                        w[((x1 * n + x2) * n + x3) * n + x4] = acc;
                    }
                }
            }
        }
        Self { n, w }
    }

    fn get(&self, x1: usize, x2: usize, x3: usize, x4: usize) -> C64 {
        let n = self.n;
        self.w[((x1 * n + x2) * n + x3) * n + x4]
    }
}

/// The six label sums written out one by one, each with its own index
/// restrictions.
fn literal_six_terms(frames: MatRef<'_, C64>, o: MatRef<'_, C64>, cut: Cut) -> [f64; 6] {
    let n = frames.ncols();
    let q = Quads::new(frames, cut);
    let dg = |a: usize| o[(a, a)].re;
    let p = |a: usize, b: usize| o[(a, b)].norm_sqr();
    let mut t = [C64::new(0.0, 0.0); 6];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    // all four diagonal
                    t[0] += dg(a) * dg(b) * dg(c) * dg(d) * q.get(a, b, c, d) * q.get(a, b, c, d).conj();
                    if c != d {
                        // diagonal a, b with the pair (c, d)
                        t[1] += 2.0 * dg(a) * dg(b) * p(c, d) * q.get(a, b, c, c) * q.get(a, b, d, d).conj();
                        t[3] += 2.0 * dg(a) * p(c, d) * dg(b) * q.get(a, c, c, b) * q.get(a, d, d, b).conj();
                    }
                    if a != b && c != d {
                        t[2] += p(a, b) * p(c, d) * q.get(a, a, c, c) * q.get(b, b, d, d).conj();
                        t[4] += p(a, b) * p(c, d) * q.get(a, c, c, a) * q.get(b, d, d, b).conj();
                    }
                }
            }
            if a != b {
                t[5] -= p(a, b) * p(a, b) * q.get(a, a, a, a) * q.get(b, b, b, b).conj();
            }
        }
    }
    t.map(|z| z.re / (n * n) as f64)
}

/// Time average of `Tr ρ(t)²` for generic energies: every index tuple whose
/// phases cancel, `{a,d,e,h} = {b,c,f,g}` as multisets, counted once.
fn balanced_tuple_purity(frames: MatRef<'_, C64>, o: MatRef<'_, C64>, cut: Cut) -> f64 {
    let n = frames.ncols();
    let q = Quads::new(frames, cut);
    let mut orders = Vec::new();
    for i in 0..4usize.pow(4) {
        let perm = [i % 4, i / 4 % 4, i / 16 % 4, i / 64];
        let mut s = perm;
        s.sort();
        if s == [0, 1, 2, 3] {
            orders.push(perm);
        }
    }
    let mut total = C64::new(0.0, 0.0);
    let mut seen: Vec<[usize; 4]> = Vec::with_capacity(24);
    for a in 0..n {
        for d in 0..n {
            for x in 0..n {
                for h in 0..n {
                    let pos = [a, d, x, h];
                    seen.clear();
                    for perm in &orders {
                        let neg = perm.map(|i| pos[i]);
                        if seen.contains(&neg) {
                            continue;
                        }
                        seen.push(neg);
                        let [b, c, f, g] = neg;
                        total += o[(a, b)] * o[(c, d)].conj() * o[(x, f)] * o[(g, h)].conj()
                            * q.get(a, c, x, g)
                            * q.get(b, d, f, h).conj();
                    }
                }
            }
        }
    }
    total.re / (n * n) as f64
}

fn cut_strategy() -> impl Strategy<Value = Cut> {
    prop_oneof![
        Just((2usize, 2usize)),
        Just((2, 4)),
        Just((4, 2)),
        Just((1, 8)),
        Just((2, 8)),
        Just((4, 4)),
        Just((8, 2)),
        Just((2, 3)),
    ]
    .prop_map(|(a, b)| Cut::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn factorized_matches_literal_sum(cut in cut_strategy(), frac in 0.1f64..=1.0, seed in any::<u64>(), traceless in any::<bool>()) {
        let d = cut.d();
        let n_w = ((d as f64 * frac).round() as usize).clamp(2, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frames = haar_isometry(d, n_w, &mut rng);
        let o = hermitian(n_w, traceless, &mut rng);
        let terms = literal_six_terms(frames.as_ref(), o.as_ref(), cut);
        let literal: f64 = terms.iter().sum();
        let auto = six_term_purity(frames.as_ref(), o.as_ref(), cut).unwrap();
        prop_assert!((auto.total - literal).abs() <= 1e-10 * literal.abs(), "{} vs {}", auto.total, literal);
        for route in [Route::Labels, Route::Overlaps] {
            let t = FrameTables::new(frames.as_ref(), cut, route).unwrap().evaluate(o.as_ref()).unwrap();
            for k in 0..6 {
                prop_assert!((t.terms[k] - terms[k]).abs() <= 1e-10 * literal.abs(), "{route:?} term {k}: {:?} vs {:?}", t.terms, terms);
            }
            prop_assert!(t.imag_residual <= 1e-10);
        }
    }

    #[test]
    fn purity_is_a_probability(cut in cut_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frames = haar_isometry(cut.d(), cut.d(), &mut rng);
        let o = hermitian(cut.d(), true, &mut rng);
        let p = six_term_purity(frames.as_ref(), o.as_ref(), cut).unwrap().total;
        let floor = 1.0 / (cut.d_a.min(cut.d_b) as f64).powi(2);
        prop_assert!(p >= floor - 1e-12 && p <= 1.0 + 1e-12, "{p}");
    }
}

#[test]
fn omega_form_matches_eigenstate_form() {
    for (l, axes) in [(4usize, &[PauliAxis::X, PauliAxis::Z][..]), (5, &[PauliAxis::X, PauliAxis::Z]), (6, &[PauliAxis::X])] {
        let spec = eigendecompose(&build_mfim(l, MfimParams::CHAOTIC).unwrap()).unwrap();
        for &axis in axes {
            let o = to_energy_basis(&build_site_pauli(l, center_site(l), axis).unwrap(), &spec).unwrap();
            let basis = build_omega_basis(&o, spec.eigenvalues(), OmegaOptions::default()).unwrap();
            for n_a in 1..l {
                let cut = HilbertGeometry::new(l, n_a).unwrap().cut();
                let split = omega_purity(&basis, &spec, cut).unwrap();
                let id = mutual_info_identity(&spec, &o, cut).unwrap();
                assert!((split.total() - id.ed_total).abs() <= 1e-10 * id.ed_total, "L={l} n_A={n_a}: {split:?} {id:?}");
                assert!(id.residual <= 1e-10 * id.ed_total, "L={l} n_A={n_a}: {id:?}");
                if let Some(c) = split.conjugate_pairs {
                    assert!(c.abs() < 0.05 * id.ed_total);
                }
            }
        }
    }
}

/// The non-resonant form drops index tuples that cancel only because Bohr
/// frequencies are differences of energies. For a chaotic chain those
/// carry a fraction of a percent of the purity.
#[test]
fn non_resonant_form_against_all_balanced_tuples() {
    let l = 4;
    let spec = eigendecompose(&build_mfim(l, MfimParams::CHAOTIC).unwrap()).unwrap();
    let o = to_energy_basis(&build_site_pauli(l, center_site(l), PauliAxis::X).unwrap(), &spec).unwrap();
    let frames = spec.frames(0..16);
    for n_a in 1..l {
        let cut = HilbertGeometry::new(l, n_a).unwrap().cut();
        let exact = balanced_tuple_purity(frames.as_ref(), o.to_complex().as_ref(), cut);
        let six = six_term_purity(frames.as_ref(), o.to_complex().as_ref(), cut).unwrap().total;
        let rel = (six - exact).abs() / exact;
        assert!(rel > 1e-6 && rel < 0.02, "n_A={n_a}: {six} vs {exact}");
    }
}

