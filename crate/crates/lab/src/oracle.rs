//! Brute-force reference for the six-term late-time purity, written as the
//! literal label sums over eight site indices. Quartic in the window size and
//! quadratic in `d`, so it is only meant for `d ≤ 16`.

use faer::{Mat, MatRef};
use loe_core::{Cut, C64};
use rand::Rng;

/// Largest Hilbert dimension the oracle accepts.
pub const ORACLE_MAX_DIM: usize = 16;

/// Random Hermitian `n × n` matrix normalized to `Tr O²/n = 1`.
pub fn random_hermitian(n: usize, traceless: bool, rng: &mut impl Rng) -> Mat<C64> {
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
/// for every label quadruple.
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

/// The six summands, each with its own index restrictions, in evaluator
/// order. `frames` is `d × n_w` and `o` the `n_w × n_w` window operator.
///
/// # Panics
/// If `d` exceeds [`ORACLE_MAX_DIM`] or the shapes disagree.
pub fn literal_six_terms(frames: MatRef<'_, C64>, o: MatRef<'_, C64>, cut: Cut) -> [f64; 6] {
    assert!(cut.d() <= ORACLE_MAX_DIM, "oracle is limited to d <= {ORACLE_MAX_DIM}");
    assert_eq!(frames.nrows(), cut.d());
    assert_eq!((o.nrows(), o.ncols()), (frames.ncols(), frames.ncols()));
    let n = frames.ncols();
    let q = Quads::new(frames, cut);
    let dg = |a: usize| o[(a, a)].re;
    let p = |a: usize, b: usize| o[(a, b)].norm_sqr();
    let mut t = [C64::new(0.0, 0.0); 6];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    t[0] += dg(a) * dg(b) * dg(c) * dg(d) * q.get(a, b, c, d) * q.get(a, b, c, d).conj();
                    if c != d {
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

/// Sum of [`literal_six_terms`].
pub fn literal_purity(frames: MatRef<'_, C64>, o: MatRef<'_, C64>, cut: Cut) -> f64 {
    literal_six_terms(frames, o, cut).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use loe_core::haar::haar_isometry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_operator_on_product_basis_is_unentangled() {
        // O = I in a product eigenbasis: the vectorized identity of each
        // basis state's projector is a product across the cut
        let cut = Cut::new(2, 2).unwrap();
        let frames = Mat::<C64>::identity(4, 4);
        let o = Mat::<C64>::identity(4, 4);
        let p = literal_purity(frames.as_ref(), o.as_ref(), cut);
        assert!(p > 0.0 && p <= 1.0 + 1e-12, "{p}");
    }

    #[test]
    fn purity_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cut = Cut::new(2, 4).unwrap();
        let frames = haar_isometry(8, 8, &mut rng);
        let o = random_hermitian(8, true, &mut rng);
        let p = literal_purity(frames.as_ref(), o.as_ref(), cut);
        assert!((1.0 / 16.0 - 1e-12..=1.0 + 1e-12).contains(&p), "{p}");
    }
}
