use loe_core::eth::{compute_stats, synth_eth_operator, EthProfiles, SynthOptions};
use loe_core::spectral::{eigendecompose, select_window, to_energy_basis, EnergyWindow};
use loe_core::spin_chain::{build_mfim, build_site_pauli, center_site, MfimParams, PauliAxis};
use loe_core::{OperatorInEnergyBasis, SpectralData};

fn chain(l: usize) -> (SpectralData, OperatorInEnergyBasis) {
    let spec = eigendecompose(&build_mfim(l, MfimParams::CHAOTIC).unwrap()).unwrap();
    let o = to_energy_basis(&build_site_pauli(l, center_site(l), PauliAxis::X).unwrap(), &spec).unwrap();
    (spec, o)
}

// Tr σ_x² = d splits into the diagonal and off-diagonal second moments.
// `norm_combination` drops the squared off-diagonal mean, which is small but
// not zero for a real operator.
#[test]
fn second_moments_add_up_to_the_norm() {
    for l in [6, 8] {
        let (_, o) = chain(l);
        let s = compute_stats(&o, None).unwrap();
        let d = s.n_diag as f64;
        assert!(s.diag_mean.abs() < 1e-12);
        let full = s.diag_var + s.diag_mean.powi(2) + (d - 1.0) * (s.offdiag_var + s.offdiag_mean.norm_sqr());
        assert!((full - 1.0).abs() < 1e-12, "L={l}: {full}");
        let dropped = (d - 1.0) * s.offdiag_mean.norm_sqr();
        assert!((s.norm_combination() + dropped - 1.0).abs() < 1e-12);
        assert!(dropped < 1e-3, "L={l}: {dropped}");
    }
}

#[test]
fn whole_spectrum_window_is_the_default() {
    let (spec, o) = chain(6);
    let w = EnergyWindow::from_range(0..64, 64, spec.median()).unwrap();
    assert_eq!(compute_stats(&o, Some(&w)).unwrap(), compute_stats(&o, None).unwrap());
    let w = select_window(&spec, 20).unwrap();
    let s = compute_stats(&o, Some(&w)).unwrap();
    assert_eq!((s.n_diag, s.n_offdiag, s.window.len()), (20, 380, 20));
}

#[test]
fn synthetic_offdiagonal_variance_follows_the_profile() {
    let d = 64;
    let eigs: Vec<f64> = (0..d).map(|i| (i as f64 - 31.5) / 8.0).collect();
    let f = |_: f64, w: f64| (-0.25 * w * w).exp();
    let s = |_: f64| (d as f64).ln();
    let mc = |_: f64| 0.0;
    let p = EthProfiles { f: &f, entropy: &s, microcanonical: &mc };
    let expect: f64 = {
        let mut acc = 0.0;
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    acc += f(0.0, eigs[a] - eigs[b]).powi(2) / d as f64;
                }
            }
        }
        acc / (d * (d - 1)) as f64
    };
    let mut mean = 0.0;
    for seed in 0..50 {
        let o = synth_eth_operator(&eigs, &p, seed, SynthOptions::default()).unwrap();
        let st = compute_stats(&o, None).unwrap();
        mean += (st.offdiag_var + st.offdiag_mean.norm_sqr()) / 50.0;
    }
    assert!((mean / expect - 1.0).abs() < 0.02, "{mean} vs {expect}");
}

#[test]
fn synthetic_diagonal_follows_the_microcanonical_value() {
    let d = 400;
    let eigs: Vec<f64> = (0..d).map(|i| i as f64 / d as f64 - 0.5).collect();
    let f = |_: f64, _: f64| 1.0;
    let s = |_: f64| 12.0;
    let mc = |e: f64| 2.0 * e;
    let p = EthProfiles { f: &f, entropy: &s, microcanonical: &mc };
    let o = synth_eth_operator(&eigs, &p, 3, SynthOptions::default()).unwrap();
    let worst = (0..d).map(|a| (o.get(a, a).re - 2.0 * eigs[a]).abs()).fold(0.0, f64::max);
    // amplitude e^{-6} ≈ 2.5e-3; five standard deviations
    assert!(worst < 5.0 * (-6f64).exp(), "{worst}");
}
