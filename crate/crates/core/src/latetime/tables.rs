//! Pair-overlap tables for a set of eigenvector frames and the factorized
//! six-term evaluation built on them.
//!
//! Every eigenvector `|x⟩` is reshaped into `E^x` (small side × large side)
//! and all products `M^{xy} = E^x E^{y†}` come out of one Gram matrix of the
//! stacked `E`'s. Terms then reduce to small traces:
//!
//! * `Φ = Σ_{ac} D_a D_c M^{ac} ⊗ conj M^{ac}` is `R(D)R(D)†` for the
//!   reshuffled diagonal part; term 1 is `‖Φ‖²` and term 2 pairs `Φ` with
//!   `ρ_e ⊗ conj ρ_f`;
//! * terms 3, 5 and 6 only need `Tr(ρ_a ρ_c)` and `‖M^{ac}‖²`;
//! * term 4 is term 2 seen from the large side, done either with the large
//!   side's own `Φ` or with `u^c_{ag} = Tr(M^{ac} M^{cg})`.
//!
//! For small windows it is cheaper to keep all `Tr(M^{wx} M^{yz})` and sum
//! labels directly; [`Route`] selects between the two by cost.

use faer::{Mat, MatRef};

use crate::spin_chain::Cut;
use crate::{Error, Result, C64};

/// Largest number of complex entries a single intermediate may hold.
const MEMORY_CAP: usize = 1 << 24;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Route {
    #[default]
    Auto,
    /// Full table of `Tr(M^{wx} M^{yz})`; cost `n_w⁴ s²`.
    Labels,
    /// `Φ` matrices and overlap tables; cost dominated by `s² d²`.
    Overlaps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LargeSide {
    Phi,
    Uvec,
}

/// Frame-dependent data shared by all operators evaluated on the same frames.
#[derive(Clone, Debug)]
pub struct FrameTables {
    cut: Cut,
    n_w: usize,
    /// The small side is ℬ, so every computed term is mirrored at the end.
    swapped: bool,
    s: usize,
    l: usize,
    frames: Mat<C64>,
    /// Block `(a, c)` of size `s × s` is `M^{ac}`.
    gram: Mat<C64>,
    /// `Tr(ρ_a ρ_c)` on the small side.
    r_small: Mat<f64>,
    /// `‖M^{ac}‖²`, equal to `Tr(ρ_a ρ_c)` on the large side.
    s_tab: Mat<f64>,
    /// Column `e` is `ρ_e` on the small side with `x[(j·s + k)] = ρ_e[k, j]`.
    x_small: Mat<C64>,
    x_large: Option<Mat<C64>>,
    /// `Tr(M^{wx} M^{yz})` at `[(w·n + x), (y·n + z)]`.
    labels: Option<Mat<C64>>,
    /// `u[a][g·n + c] = Tr(M^{ac} M^{cg})`.
    u: Option<Vec<Mat<C64>>>,
    route: Route,
    large: LargeSide,
}

/// The six summand values (prefactor included) and the largest imaginary
/// part discarded while forming them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SixTerms {
    pub terms: [f64; 6],
    pub imag_residual: f64,
}

fn cost_estimates(n: usize, s: usize, l: usize) -> (f64, f64, f64, bool, bool) {
    let (n, s, l) = (n as f64, s as f64, l as f64);
    let d = s * l;
    let gram = n * n * s * s * l;
    let labels = gram + n.powi(4) * s * s + 4.0 * n.powi(4);
    let phi_small = d * d * n + s * s * d * d + s.powi(4) * n + s * s * n * n;
    let phi_large = d * d * n + l * l * d * d + l.powi(4) * n + l * l * n * n;
    let uvec = n.powi(3) * s * s + n.powi(4);
    let labels_fit = n.powi(4) <= MEMORY_CAP as f64;
    let phi_fit = l.powi(4) <= MEMORY_CAP as f64 && d * d <= MEMORY_CAP as f64;
    (labels, gram + phi_small, phi_large.min(uvec), labels_fit, phi_fit && phi_large <= uvec)
}

impl FrameTables {
    /// `frames` holds one eigenvector per column in the site basis.
    pub fn new(frames: MatRef<'_, C64>, cut: Cut, route: Route) -> Result<Self> {
        let d = cut.d();
        if frames.nrows() != d {
            return Err(Error::DimensionMismatch { expected: d, got: frames.nrows() });
        }
        let n = frames.ncols();
        if n < 2 {
            return Err(Error::InvalidWindow { d_w: n, d });
        }
        let swapped = cut.d_a > cut.d_b;
        let (s, l) = if swapped { (cut.d_b, cut.d_a) } else { (cut.d_a, cut.d_b) };
        let (labels_cost, phi_cost, large_cost, labels_fit, phi_large) = cost_estimates(n, s, l);
        let route = match route {
            Route::Auto if labels_fit && labels_cost < phi_cost + large_cost => Route::Labels,
            Route::Auto => Route::Overlaps,
            r => r,
        };
        if route == Route::Labels && !labels_fit {
            return Err(Error::InvalidArgument(format!("label table for {n} states exceeds memory cap")));
        }
        let large = if phi_large { LargeSide::Phi } else { LargeSide::Uvec };

        let site = |i_small: usize, i_large: usize| if swapped { i_large * cut.d_b + i_small } else { i_small * cut.d_b + i_large };
        let stack = Mat::from_fn(n * s, l, |r, al| frames[(site(r % s, al), r / s)]);
        let gram = &stack * stack.adjoint();

        let x_small = Mat::from_fn(s * s, n, |p, e| gram[(e * s + p % s, e * s + p / s)]);
        let r_small = Mat::from_fn(n, n, |a, c| {
            let mut acc = 0.0;
            for p in 0..s * s {
                acc += (x_small[(p, a)].conj() * x_small[(p, c)]).re;
            }
            acc
        });
        let s_tab = Mat::from_fn(n, n, |a, c| {
            let mut acc = 0.0;
            for j in 0..s {
                for k in 0..s {
                    acc += gram[(a * s + j, c * s + k)].norm_sqr();
                }
            }
            acc
        });

        let mut tables = Self {
            cut,
            n_w: n,
            swapped,
            s,
            l,
            frames: frames.to_owned(),
            gram,
            r_small,
            s_tab,
            x_small,
            x_large: None,
            labels: None,
            u: None,
            route,
            large,
        };
        match (route, large) {
            (Route::Labels, _) => tables.labels = Some(tables.label_table()),
            (_, LargeSide::Phi) => tables.x_large = Some(tables.large_densities()),
            (_, LargeSide::Uvec) => {
                if n.pow(3) <= MEMORY_CAP {
                    tables.u = Some((0..n).map(|a| tables.u_block(a)).collect());
                }
            }
        }
        Ok(tables)
    }

    pub fn n_w(&self) -> usize {
        self.n_w
    }

    pub fn cut(&self) -> Cut {
        self.cut
    }

    pub fn route(&self) -> Route {
        self.route
    }

    #[inline]
    fn m(&self, a: usize, c: usize, j: usize, k: usize) -> C64 {
        self.gram[(a * self.s + j, c * self.s + k)]
    }

    fn site(&self, i_small: usize, i_large: usize) -> usize {
        if self.swapped {
            i_large * self.cut.d_b + i_small
        } else {
            i_small * self.cut.d_b + i_large
        }
    }

    fn label_table(&self) -> Mat<C64> {
        let (n, s) = (self.n_w, self.s);
        let left = Mat::from_fn(n * n, s * s, |wx, jk| self.m(wx / n, wx % n, jk / s, jk % s));
        let right = Mat::from_fn(s * s, n * n, |jk, yz| self.m(yz / n, yz % n, jk % s, jk / s));
        &left * &right
    }

    /// Column `e`: `ρ_e` on the large side, `x[(α·l + β)] = ρ_e[β, α]`.
    fn large_densities(&self) -> Mat<C64> {
        let (s, l) = (self.s, self.l);
        Mat::from_fn(l * l, self.n_w, |p, e| {
            let (al, be) = (p / l, p % l);
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..s {
                acc += self.frames[(self.site(j, be), e)] * self.frames[(self.site(j, al), e)].conj();
            }
            acc
        })
    }

    fn u_block(&self, a: usize) -> Mat<C64> {
        let (n, s) = (self.n_w, self.s);
        Mat::from_fn(n, n, |g, c| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..s {
                for k in 0..s {
                    acc += self.m(a, c, j, k) * self.m(c, g, k, j);
                }
            }
            acc
        })
    }

    /// `R(D)` in the table orientation: rows `(j, j')` on the small side,
    /// columns `(α, α')` on the large side.
    fn reshuffled_diagonal(&self, diag: &[f64]) -> Mat<C64> {
        let (s, l) = (self.s, self.l);
        let scaled = Mat::from_fn(self.cut.d(), self.n_w, |i, a| self.frames[(i, a)] * diag[a]);
        let dop = &scaled * self.frames.adjoint();
        Mat::from_fn(s * s, l * l, |r, c| dop[(self.site(r / s, c / l), self.site(r % s, c % l))])
    }

    /// `Σ_{e≠f} P_ef Tr[Φ (ρ_e ⊗ conj ρ_f)]` for `Φ` of size `r² × r²`.
    fn phi_pair_sum(phi: MatRef<'_, C64>, x: MatRef<'_, C64>, p: MatRef<'_, f64>, r: usize) -> C64 {
        let psi = Mat::from_fn(r * r, r * r, |jk, jpkp| phi[((jk / r) * r + jpkp / r, (jk % r) * r + jpkp % r)]);
        let right = Mat::from_fn(x.nrows(), x.ncols(), |i, f| x[(i, f)].conj());
        let q = x.transpose() * (&psi * &right);
        let mut acc = C64::new(0.0, 0.0);
        for e in 0..p.nrows() {
            for f in 0..p.ncols() {
                if e != f {
                    acc += q[(e, f)] * p[(e, f)];
                }
            }
        }
        acc
    }

    fn trace_pxpx(p: MatRef<'_, f64>, x: MatRef<'_, f64>) -> f64 {
        let px = p * x;
        let mut acc = 0.0;
        for i in 0..px.nrows() {
            for j in 0..px.ncols() {
                acc += px[(i, j)] * px[(j, i)];
            }
        }
        acc
    }

    /// Six-term purity of a window operator `o_w` (`n_w × n_w`, already
    /// normalized) on these frames.
    pub fn evaluate(&self, o_w: MatRef<'_, C64>) -> Result<SixTerms> {
        let n = self.n_w;
        if o_w.nrows() != n || o_w.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: o_w.nrows() });
        }
        let diag: Vec<f64> = (0..n).map(|a| o_w[(a, a)].re).collect();
        let p = Mat::from_fn(n, n, |a, b| if a == b { 0.0 } else { o_w[(a, b)].norm_sqr() });
        let mut imag: f64 = 0.0;
        let mut t = [0.0f64; 6];

        t[2] = Self::trace_pxpx(p.as_ref(), self.r_small.as_ref());
        t[4] = Self::trace_pxpx(p.as_ref(), self.s_tab.as_ref());
        for a in 0..n {
            for b in 0..n {
                t[5] -= p[(a, b)] * p[(a, b)] * self.r_small[(a, a)] * self.r_small[(b, b)];
            }
        }

        if let Some(tab) = &self.labels {
            let at = |w: usize, x: usize, y: usize, z: usize| tab[(w * n + x, y * n + z)];
            let mut t1 = 0.0;
            let mut t2 = C64::new(0.0, 0.0);
            let mut t4 = C64::new(0.0, 0.0);
            let mut v = vec![C64::new(0.0, 0.0); n];
            for a in 0..n {
                for c in 0..n {
                    let w = diag[a] * diag[c];
                    for b in 0..n {
                        for dd in 0..n {
                            t1 += w * diag[b] * diag[dd] * at(a, c, b, dd).norm_sqr();
                        }
                    }
                    if w != 0.0 {
                        for (e, ve) in v.iter_mut().enumerate() {
                            *ve = at(a, c, e, e);
                        }
                        t2 += quad(&v, p.as_ref()) * w;
                        for (cc, vc) in v.iter_mut().enumerate() {
                            *vc = at(a, cc, cc, c);
                        }
                        // here `c` plays the role of the second diagonal label g
                        t4 += quad(&v, p.as_ref()) * w;
                    }
                }
            }
            t[0] = t1;
            t[1] = 2.0 * t2.re;
            t[3] = 2.0 * t4.re;
            imag = imag.max(t2.im.abs()).max(t4.im.abs());
        } else {
            let r = self.reshuffled_diagonal(&diag);
            let phi = &r * r.adjoint();
            t[0] = phi.as_ref().squared_norm_l2();
            let t2 = Self::phi_pair_sum(phi.as_ref(), self.x_small.as_ref(), p.as_ref(), self.s);
            t[1] = 2.0 * t2.re;
            imag = imag.max(t2.im.abs());
            let t4 = match self.large {
                LargeSide::Phi => {
                    let gram_l = r.adjoint() * &r;
                    // Φ_large = conj(R† R)
                    let phi_l = Mat::from_fn(gram_l.nrows(), gram_l.ncols(), |i, j| gram_l[(i, j)].conj());
                    let x = self.x_large.as_ref().expect("large-side densities");
                    Self::phi_pair_sum(phi_l.as_ref(), x.as_ref(), p.as_ref(), self.l)
                }
                LargeSide::Uvec => {
                    let pc = Mat::from_fn(n, n, |a, b| C64::new(p[(a, b)], 0.0));
                    let mut acc = C64::new(0.0, 0.0);
                    let mut owned;
                    for a in 0..n {
                        if diag[a] == 0.0 {
                            continue;
                        }
                        let ua: &Mat<C64> = match &self.u {
                            Some(u) => &u[a],
                            None => {
                                owned = self.u_block(a);
                                &owned
                            }
                        };
                        let up = ua * &pc;
                        for g in 0..n {
                            let mut row = C64::new(0.0, 0.0);
                            for c in 0..n {
                                row += up[(g, c)] * ua[(g, c)].conj();
                            }
                            acc += row * (diag[a] * diag[g]);
                        }
                    }
                    acc
                }
            };
            t[3] = 2.0 * t4.re;
            imag = imag.max(t4.im.abs());
        }

        let pref = 1.0 / (n as f64 * n as f64);
        for x in t.iter_mut() {
            *x *= pref;
        }
        if self.swapped {
            t.swap(1, 3);
            t.swap(2, 4);
        }
        Ok(SixTerms { terms: t, imag_residual: imag * pref })
    }

    /// Only the ℬ-overlap term `Tr(P S P S)/n_w²`.
    pub fn term_g(&self, o_w: MatRef<'_, C64>) -> f64 {
        let n = self.n_w;
        let p = Mat::from_fn(n, n, |a, b| if a == b { 0.0 } else { o_w[(a, b)].norm_sqr() });
        let tab = if self.swapped { &self.r_small } else { &self.s_tab };
        Self::trace_pxpx(p.as_ref(), tab.as_ref()) / (n as f64 * n as f64)
    }
}

/// `Σ_{e≠f} P_ef v_e conj(v_f)` (`P` has zero diagonal).
fn quad(v: &[C64], p: MatRef<'_, f64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (e, ve) in v.iter().enumerate() {
        let mut inner = C64::new(0.0, 0.0);
        for (f, vf) in v.iter().enumerate() {
            inner += vf.conj() * p[(e, f)];
        }
        acc += ve * inner;
    }
    acc
}

/// `Tr(P S P S)/n_w²` computed from the overlaps `S_ac = ‖E^a E^{c†}‖²`
/// alone, on whichever side of the cut is smaller.
pub fn term_g_only(frames: MatRef<'_, C64>, o_w: MatRef<'_, C64>, cut: Cut) -> Result<f64> {
    let d = cut.d();
    let n = frames.ncols();
    if frames.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, got: frames.nrows() });
    }
    if o_w.nrows() != n || o_w.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: o_w.nrows() });
    }
    let (da, db) = (cut.d_a, cut.d_b);
    let s = if db <= da {
        // S_ac = Tr(σ_a σ_c) with σ_a the ℬ-reduced state
        let xb = Mat::from_fn(db * db, n, |p, e| {
            let (al, be) = (p / db, p % db);
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..da {
                acc += frames[(j * db + al, e)] * frames[(j * db + be, e)].conj();
            }
            acc
        });
        let g = xb.adjoint() * &xb;
        Mat::from_fn(n, n, |a, c| g[(a, c)].re)
    } else {
        let stack = Mat::from_fn(n * da, db, |r, al| frames[((r % da) * db + al, r / da)]);
        let gram = &stack * stack.adjoint();
        Mat::from_fn(n, n, |a, c| {
            let mut acc = 0.0;
            for j in 0..da {
                for k in 0..da {
                    acc += gram[(a * da + j, c * da + k)].norm_sqr();
                }
            }
            acc
        })
    };
    let p = Mat::from_fn(n, n, |a, b| if a == b { 0.0 } else { o_w[(a, b)].norm_sqr() });
    Ok(FrameTables::trace_pxpx(p.as_ref(), s.as_ref()) / (n as f64 * n as f64))
}
