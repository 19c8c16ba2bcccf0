//! Self-check suites behind `loe-lab check`.

use faer::Mat;
use loe_core::haar::{
    haar_moment, haar_purity_of, monte_carlo_haar_purity_batch, monte_carlo_page_weights, weingarten, DeltaNetwork,
    Permutation,
};
use loe_core::latetime::page::page_weights;
use loe_core::latetime::{mutual_info_identity, omega_purity, FrameTables, Route};
use loe_core::liouville::{build_omega_basis, OmegaOptions};
use loe_core::spectral::{count_resonances, eigendecompose, to_energy_basis, DEFAULT_RESONANCE_TOL};
use loe_core::spin_chain::{build_mfim, build_site_pauli, center_site};
use loe_core::{Cut, HilbertGeometry, MfimParams, PauliAxis, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::manifest::CheckOutcome;
use crate::oracle::{literal_six_terms, random_hermitian};
use crate::LabError;

/// Relative agreement required between independent evaluations of the same
/// purity.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Looser level-sum tolerance whose counts are reported next to the asserted
/// ones, to show how many chance near-coincidences a chaotic spectrum has.
pub const LOOSE_RESONANCE_TOL: f64 = 1e-9;

/// Monte Carlo agreement is accepted up to this many standard errors.
pub const Z_BOUND: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Nonresonance,
    Oracle,
}

pub fn run_suite(suite: Suite) -> Result<Vec<CheckOutcome>, LabError> {
    match suite {
        Suite::Identities => identities(),
        Suite::Nonresonance => nonresonance(),
        Suite::Oracle => oracle(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn identities() -> Result<Vec<CheckOutcome>, LabError> {
    let mut out = Vec::new();
    for (l, axis) in [(4usize, PauliAxis::X), (4, PauliAxis::Z), (5, PauliAxis::X), (6, PauliAxis::X)] {
        let spec = eigendecompose(&build_mfim(l, MfimParams::CHAOTIC)?)?;
        let o = to_energy_basis(&build_site_pauli(l, center_site(l), axis)?, &spec)?;
        let oc = o.to_complex();
        let frames = spec.frames(0..spec.dim());
        let basis = build_omega_basis(&o, spec.eigenvalues(), OmegaOptions::default())?;
        let tag = format!("L={l} {axis:?}");
        for n_a in 1..l {
            let cut = HilbertGeometry::new(l, n_a)?.cut();
            let labels = FrameTables::new(frames.as_ref(), cut, Route::Labels)?.evaluate(oc.as_ref())?;
            let overlaps = FrameTables::new(frames.as_ref(), cut, Route::Overlaps)?.evaluate(oc.as_ref())?;
            let total: f64 = labels.terms.iter().sum();
            let route_gap = labels
                .terms
                .iter()
                .zip(&overlaps.terms)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / total;
            out.push(CheckOutcome::upper(format!("routes agree, {tag} n_A={n_a}"), route_gap, IDENTITY_TOL));

            let split = omega_purity(&basis, &spec, cut)?;
            out.push(CheckOutcome::upper(
                format!("frequency form, {tag} n_A={n_a}"),
                rel(split.total(), total),
                IDENTITY_TOL,
            ));

            let mi = mutual_info_identity(&spec, &o, cut)?;
            out.push(CheckOutcome::upper(
                format!("mutual-information decomposition, {tag} n_A={n_a}"),
                mi.residual / mi.ed_total,
                IDENTITY_TOL,
            ));

            if cut.d() <= crate::oracle::ORACLE_MAX_DIM {
                let literal: f64 = literal_six_terms(frames.as_ref(), oc.as_ref(), cut).iter().sum();
                out.push(CheckOutcome::upper(
                    format!("literal label sums, {tag} n_A={n_a}"),
                    rel(total, literal),
                    IDENTITY_TOL,
                ));
            }
        }
    }

    // random frames and operators against the literal sums
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (d_a, d_b, n_w) in [(2usize, 2usize, 4usize), (2, 4, 5), (4, 2, 8), (4, 4, 6), (2, 8, 16)] {
        let cut = Cut::new(d_a, d_b)?;
        let frames = loe_core::haar::haar_isometry(cut.d(), n_w, &mut rng);
        let o = random_hermitian(n_w, true, &mut rng);
        let literal: f64 = literal_six_terms(frames.as_ref(), o.as_ref(), cut).iter().sum();
        let fast: f64 = FrameTables::new(frames.as_ref(), cut, Route::Auto)?.evaluate(o.as_ref())?.terms.iter().sum();
        out.push(CheckOutcome::upper(
            format!("literal label sums, random {d_a}x{d_b} n_w={n_w}"),
            rel(fast, literal),
            IDENTITY_TOL,
        ));
    }
    Ok(out)
}

/// Largest `k` scanned per chain length; the subset-sum table grows as
/// `C(2^L, k)`.
pub const NONRESONANCE_PLAN: [(usize, usize); 3] = [(6, 4), (7, 3), (8, 3)];

fn nonresonance() -> Result<Vec<CheckOutcome>, LabError> {
    let mut out = Vec::new();
    for (l, k_max) in NONRESONANCE_PLAN {
        let spec = eigendecompose(&build_mfim(l, MfimParams::CHAOTIC)?)?;
        for k in 1..=k_max {
            let n = count_resonances(spec.eigenvalues(), k, DEFAULT_RESONANCE_TOL)? as f64;
            let name = format!("resonant {k}-subset pairs, L={l}, tol {DEFAULT_RESONANCE_TOL:e}");
            // k = 1, 2 are assumed by the late-time formula; higher orders
            // are reported only
            out.push(if k <= 2 { CheckOutcome::upper(name, n, 0.0) } else { CheckOutcome::report(name, n) });
            let loose = count_resonances(spec.eigenvalues(), k, LOOSE_RESONANCE_TOL)? as f64;
            out.push(CheckOutcome::report(format!("resonant {k}-subset pairs, L={l}, tol {LOOSE_RESONANCE_TOL:e}"), loose));
        }
    }
    Ok(out)
}

fn oracle() -> Result<Vec<CheckOutcome>, LabError> {
    let mut out = Vec::new();
    for d in [2usize, 3, 8, 64] {
        let df = d as f64;
        let w2 = weingarten::<f64>(2, d)?;
        let swap = Permutation::from_images(vec![1, 0])?;
        let id = w2.value(&Permutation::identity(2)).copied().unwrap_or(f64::NAN);
        let sw = w2.value(&swap).copied().unwrap_or(f64::NAN);
        let gap = (id - 1.0 / (df * df - 1.0)).abs().max((sw + 1.0 / (df * (df * df - 1.0))).abs());
        out.push(CheckOutcome::upper(format!("Weingarten n=2 closed form, d={d}"), gap, 1e-12));
    }
    for d in [8usize, 64] {
        out.push(CheckOutcome::upper(
            format!("Gram inverse residual n=4, d={d}"),
            weingarten::<f64>(4, d)?.inverse_residual(),
            1e-10,
        ));
    }
    for d in [2usize, 5, 16] {
        let mut net = DeltaNetwork::new();
        let (r, c) = (net.fixed(d, 0), net.fixed(d, 0));
        net.u(vec![r], vec![c]).u(vec![r], vec![c]).u_bar(vec![r], vec![c]).u_bar(vec![r], vec![c]);
        let m = haar_moment(&net, d)?;
        out.push(CheckOutcome::upper(
            format!("E|U_11|^4, d={d}"),
            (m.value - 2.0 / (d as f64 * (d as f64 + 1.0))).abs(),
            1e-12,
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (d_a, d_b) in [(2usize, 2usize), (2, 4)] {
        let cut = Cut::new(d_a, d_b)?;
        let ops: Vec<Mat<C64>> = (0..4).map(|i| random_hermitian(cut.d(), i % 2 == 0, &mut rng)).collect();
        let refs: Vec<_> = ops.iter().map(|o| o.as_ref()).collect();
        let mc = monte_carlo_haar_purity_batch(&refs, cut, 20_000, 9)?;
        for (i, (o, est)) in ops.iter().zip(&mc).enumerate() {
            let exact = haar_purity_of(o.as_ref(), cut)?;
            out.push(CheckOutcome::upper(
                format!("exact Haar average vs sampling, {d_a}x{d_b} operator {i} (z)"),
                est.z_score(exact.total),
                Z_BOUND,
            ));
        }
    }

    for (d_a, d_b) in [(2usize, 8usize), (4, 4)] {
        let cut = Cut::new(d_a, d_b)?;
        let w = page_weights::<f64>(d_a, cut.d())?;
        let mc = monte_carlo_page_weights(cut, 20_000, 21)?;
        for (label, exact, est) in [("dia", w.dia, mc.dia), ("semi", w.semi, mc.semi), ("perm", w.perm, mc.perm)] {
            out.push(CheckOutcome::upper(
                format!("Page {label} vs sampling, {d_a}x{d_b} (z)"),
                est.z_score(exact),
                Z_BOUND,
            ));
        }
    }
    Ok(out)
}
