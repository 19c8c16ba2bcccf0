use loe_core::dynamics::{default_time_grid, loe_timeseries, time_average_purity_numeric};
use loe_core::latetime::{latetime_purity_ed, state_latetime_purity};
use loe_core::spectral::{eigendecompose, select_window, to_energy_basis};
use loe_core::spin_chain::{build_mfim, build_site_pauli, center_site, HilbertGeometry, MfimParams, PauliAxis};
use loe_core::C64;

#[test]
fn time_average_settles_on_the_late_time_value() {
    let l = 6;
    let spec = eigendecompose(&build_mfim(l, MfimParams::CHAOTIC).unwrap()).unwrap();
    let o = to_energy_basis(&build_site_pauli(l, center_site(l), PauliAxis::X).unwrap(), &spec).unwrap();
    let (t_max, n) = default_time_grid(&spec);
    assert!(t_max * spec.mean_level_spacing() >= 100.0);
    for n_a in 1..=3 {
        let cut = HilbertGeometry::new(l, n_a).unwrap().cut();
        let avg = time_average_purity_numeric(&spec, &o, cut, t_max, n, None).unwrap();
        let ed = latetime_purity_ed(&spec, &o, cut, None).unwrap().total;
        assert!((avg.mean - ed).abs() / ed < 0.01, "n_A={n_a}: {} vs {ed}", avg.mean);
    }
}

#[test]
fn windowed_time_average_uses_the_window_operator() {
    let l = 8;
    let spec = eigendecompose(&build_mfim(l, MfimParams::CHAOTIC).unwrap()).unwrap();
    let o = to_energy_basis(&build_site_pauli(l, center_site(l), PauliAxis::X).unwrap(), &spec).unwrap();
    let w = select_window(&spec, 16).unwrap();
    let cut = HilbertGeometry::new(l, 2).unwrap().cut();
    let spacing = (spec.eigenvalues()[w.indices().end - 1] - spec.eigenvalues()[w.start()]) / 15.0;
    let avg = time_average_purity_numeric(&spec, &o, cut, 2000.0 * std::f64::consts::TAU / spacing, 8192, Some(&w)).unwrap();
    let ed = latetime_purity_ed(&spec, &o, cut, Some(&w)).unwrap().total;
    assert!((avg.mean - ed).abs() / ed < 0.02, "{} vs {ed}", avg.mean);
}

#[test]
fn operator_starts_unentangled_and_stays_a_probability() {
    let l = 6;
    let spec = eigendecompose(&build_mfim(l, MfimParams::CHAOTIC).unwrap()).unwrap();
    let site = center_site(l);
    let o = to_energy_basis(&build_site_pauli(l, site, PauliAxis::X).unwrap(), &spec).unwrap();
    let cut = HilbertGeometry::new(l, site + 1).unwrap().cut();
    let times: Vec<f64> = (0..400).map(|k| 0.05 * k as f64 * k as f64).collect();
    let ts = loe_timeseries(&spec, &o, cut, &times).unwrap();
    assert_eq!(ts[0].s2, 0.0);
    assert!(ts.iter().all(|p| p.purity > 0.0 && p.purity <= 1.0 && p.s2 >= 0.0));
    assert!(ts.last().unwrap().s2 > 1.0);
}

#[test]
fn infinite_temperature_state_reaches_the_page_value() {
    // uniform weights over eigenstates: the late-time purity of the state
    // only depends on the partial-swap averages
    let l = 8;
    let spec = eigendecompose(&build_mfim(l, MfimParams::CHAOTIC).unwrap()).unwrap();
    let d = spec.dim();
    let mut psi = vec![C64::new(0.0, 0.0); d];
    for a in 0..d {
        let c = C64::from_polar((d as f64).powf(-0.5), 0.7 * a as f64);
        for i in 0..d {
            psi[i] += c * spec.component(i, a);
        }
    }
    for n_a in 1..=4u32 {
        let cut = HilbertGeometry::new(l, n_a as usize).unwrap().cut();
        let s2 = -state_latetime_purity(&spec, &psi, cut).unwrap().ln();
        let page: f64 = loe_core::latetime::page::page_s2(n_a, d).unwrap();
        assert!((s2 - page).abs() < 0.15, "n_A={n_a}: {s2} vs {page}");
    }
}
