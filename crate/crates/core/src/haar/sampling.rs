//! Monte Carlo oracles: the late-time purity evaluated on Haar-random
//! frames, Haar-state entanglement and the partial-swap averages.
//!
//! Sample `i` draws from ChaCha stream `i` of the given seed, and partial
//! sums are combined in a fixed chunk order, so every result is reproducible
//! bit for bit whatever the thread count.

use faer::{Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dynamics::renyi_from_spectrum;
use crate::latetime::{FrameTables, Route};
use crate::liouville::{OperatorInEnergyBasis, WindowNorm};
use crate::spectral::EnergyWindow;
use crate::spin_chain::Cut;
use crate::{Error, Result, C64};

const CHUNK: usize = 256;

fn sample_rng(seed: u64, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample as u64);
    rng
}

fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let (x, y): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
    C64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

/// `n` orthonormal columns in dimension `d` distributed as the first `n`
/// columns of a Haar unitary (QR of a Ginibre matrix with the phases of
/// `diag R` moved into `Q`).
pub fn haar_isometry(d: usize, n: usize, rng: &mut impl Rng) -> Mat<C64> {
    let g = Mat::from_fn(d, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.compute_thin_Q();
    let r = qr.thin_R();
    for j in 0..n {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        let phase = if norm > 0.0 { rjj / norm } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Sample mean and standard error of a Monte Carlo average.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    /// Means of the six summands, in evaluator order.
    pub term_means: [f64; 6],
}

impl MonteCarloEstimate {
    /// `|x − mean| / stderr`.
    pub fn z_score(&self, x: f64) -> f64 {
        (x - self.mean).abs() / self.stderr
    }
}

#[derive(Clone, Copy)]
struct Acc {
    sum: f64,
    sum_sq: f64,
    terms: [f64; 6],
}

impl Acc {
    const ZERO: Self = Self { sum: 0.0, sum_sq: 0.0, terms: [0.0; 6] };

    fn push(&mut self, terms: &[f64; 6]) {
        let total: f64 = terms.iter().sum();
        self.sum += total;
        self.sum_sq += total * total;
        for (a, t) in self.terms.iter_mut().zip(terms) {
            *a += t;
        }
    }

    fn merge(&mut self, other: &Self) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for (a, t) in self.terms.iter_mut().zip(&other.terms) {
            *a += t;
        }
    }

    fn finish(&self, n: usize) -> MonteCarloEstimate {
        let nf = n as f64;
        let mean = self.sum / nf;
        let var = ((self.sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        MonteCarloEstimate { mean, stderr: (var / nf).sqrt(), n_samples: n, term_means: self.terms.map(|t| t / nf) }
    }
}

fn chunked<T: Send>(n: usize, f: impl Fn(std::ops::Range<usize>) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let chunks: Vec<_> = (0..n.div_ceil(CHUNK)).map(|c| c * CHUNK..((c + 1) * CHUNK).min(n)).collect();
    chunks.into_par_iter().map(f).collect()
}

/// Haar frames evaluated on several window operators at once; each operator
/// is `n_w × n_w` in final normalization and shares the frames of every
/// sample.
pub fn monte_carlo_haar_purity_batch(
    ops: &[MatRef<'_, C64>],
    cut: Cut,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<MonteCarloEstimate>> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least two samples".into()));
    }
    let Some(first) = ops.first() else { return Ok(Vec::new()) };
    let n_w = first.nrows();
    if ops.iter().any(|o| o.nrows() != n_w || o.ncols() != n_w) || n_w < 2 || n_w > cut.d() {
        return Err(Error::InvalidWindow { d_w: n_w, d: cut.d() });
    }
    let partial = chunked(n_samples, |range| {
        let mut acc = vec![Acc::ZERO; ops.len()];
        for i in range {
            let mut rng = sample_rng(seed, i);
            let frames = haar_isometry(cut.d(), n_w, &mut rng);
            let tables = FrameTables::new(frames.as_ref(), cut, Route::Auto)?;
            for (a, o) in acc.iter_mut().zip(ops) {
                a.push(&tables.evaluate(*o)?.terms);
            }
        }
        Ok(acc)
    })?;
    let mut total = vec![Acc::ZERO; ops.len()];
    for chunk in &partial {
        for (t, a) in total.iter_mut().zip(chunk) {
            t.merge(a);
        }
    }
    Ok(total.iter().map(|a| a.finish(n_samples)).collect())
}

/// The late-time purity averaged over Haar eigenbases: a full unitary
/// without a window, `d_w` Haar columns in dimension `d` with one.
pub fn monte_carlo_haar_purity(
    o: &OperatorInEnergyBasis,
    cut: Cut,
    n_samples: usize,
    seed: u64,
    window: Option<&EnergyWindow>,
    norm: WindowNorm,
) -> Result<MonteCarloEstimate> {
    if cut.d() != o.dim() {
        return Err(Error::DimensionMismatch { expected: o.dim(), got: cut.d() });
    }
    let o_w = o.restrict(window.map_or(0..o.dim(), EnergyWindow::indices), norm)?;
    Ok(monte_carlo_haar_purity_batch(&[o_w.as_ref()], cut, n_samples, seed)?[0])
}

fn reduced_a(psi: MatRef<'_, C64>, col: usize, cut: Cut) -> Mat<C64> {
    Mat::from_fn(cut.d_a, cut.d_a, |j, k| {
        let mut acc = C64::new(0.0, 0.0);
        for al in 0..cut.d_b {
            acc += psi[(cut.index(j, al), col)] * psi[(cut.index(k, al), col)].conj();
        }
        acc
    })
}

fn reduced_b(psi: MatRef<'_, C64>, col: usize, cut: Cut) -> Mat<C64> {
    Mat::from_fn(cut.d_b, cut.d_b, |al, be| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..cut.d_a {
            acc += psi[(cut.index(j, al), col)] * psi[(cut.index(j, be), col)].conj();
        }
        acc
    })
}

fn trace_prod(x: &Mat<C64>, y: &Mat<C64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            acc += (x[(i, j)] * y[(j, i)]).re;
        }
    }
    acc
}

/// Mean Rényi-`α` entropy of `A` for Haar-random pure states.
pub fn haar_state_entanglement(cut: Cut, alpha: f64, n_samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least two samples".into()));
    }
    let partial = chunked(n_samples, |range| {
        let mut acc = Acc::ZERO;
        for i in range {
            let mut rng = sample_rng(seed, i);
            let psi = haar_isometry(cut.d(), 1, &mut rng);
            let rho = reduced_a(psi.as_ref(), 0, cut);
            let s = if alpha == 2.0 {
                -trace_prod(&rho, &rho).ln()
            } else {
                let e = rho.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
                renyi_from_spectrum(&e, alpha)?
            };
            acc.push(&[s, 0.0, 0.0, 0.0, 0.0, 0.0]);
        }
        Ok(acc)
    })?;
    let mut total = Acc::ZERO;
    partial.iter().for_each(|a| total.merge(a));
    Ok(total.finish(n_samples))
}

/// Sampled `⟨mm|S_A|mm⟩`, `⟨mp|S_A|mp⟩` and `⟨mp|S_A|pm⟩` for a Haar pair of
/// orthonormal states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PageMonteCarlo {
    pub dia: MonteCarloEstimate,
    pub semi: MonteCarloEstimate,
    pub perm: MonteCarloEstimate,
}

pub fn monte_carlo_page_weights(cut: Cut, n_samples: usize, seed: u64) -> Result<PageMonteCarlo> {
    if n_samples < 2 || cut.d() < 2 {
        return Err(Error::InvalidArgument("need n ≥ 2 samples and d ≥ 2".into()));
    }
    let partial = chunked(n_samples, |range| {
        let mut acc = [Acc::ZERO; 3];
        for i in range {
            let mut rng = sample_rng(seed, i);
            let psi = haar_isometry(cut.d(), 2, &mut rng);
            let (am, ap) = (reduced_a(psi.as_ref(), 0, cut), reduced_a(psi.as_ref(), 1, cut));
            let (bm, bp) = (reduced_b(psi.as_ref(), 0, cut), reduced_b(psi.as_ref(), 1, cut));
            let vals = [trace_prod(&am, &am), trace_prod(&am, &ap), trace_prod(&bm, &bp)];
            for (a, v) in acc.iter_mut().zip(vals) {
                a.push(&[v, 0.0, 0.0, 0.0, 0.0, 0.0]);
            }
        }
        Ok(acc)
    })?;
    let mut total = [Acc::ZERO; 3];
    for chunk in &partial {
        for (t, a) in total.iter_mut().zip(chunk) {
            t.merge(a);
        }
    }
    Ok(PageMonteCarlo {
        dia: total[0].finish(n_samples),
        semi: total[1].finish(n_samples),
        perm: total[2].finish(n_samples),
    })
}
