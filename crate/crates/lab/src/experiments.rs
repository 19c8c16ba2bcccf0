//! The eight experiments. Each one turns a validated configuration into
//! tables, a JSON summary and (for `page_check`) pass/fail checks.
//!
//! Grid cells (`n_A` × window, or `L` × window) are independent and run in
//! parallel; rows come back in grid order.

use std::time::Instant;

use loe_core::dynamics::{loe_timeseries, state_renyi};
use loe_core::eth::{compute_stats, EthStatistics};
use loe_core::haar::{derive_weights, haar_purity_exact, haar_state_entanglement, monte_carlo_page_weights};
use loe_core::latetime::page::{combination_purity, page_s2, page_weights, PageCombination};
use loe_core::latetime::{latetime_purity_ed_with, LatetimeOptions};
use loe_core::liouville::WindowNorm;
use loe_core::spectral::{eigendecompose, select_window, select_window_by_width, to_energy_basis};
use loe_core::spin_chain::{build_mfim, build_site_pauli};
use loe_core::{EnergyWindow, HilbertGeometry, OperatorInEnergyBasis, SpectralData};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExperimentKind, WindowSpec};
use crate::manifest::CheckOutcome;
use crate::table::{Cell, Table};
use crate::LabError;

/// Default `d_w` sweep when a windowed experiment lists no windows.
pub const DEFAULT_WINDOWS: [usize; 5] = [10, 20, 40, 60, 100];

/// Relative tolerance of the Page-law Monte Carlo check.
pub const PAGE_TOLERANCE: f64 = 0.01;

pub const RESULT_HEADER: [&str; 30] = [
    "experiment",
    "L",
    "J",
    "h_x",
    "h_z",
    "g_0",
    "g_l",
    "site",
    "axis",
    "n_a",
    "d_a",
    "d_b",
    "d_w",
    "window_start",
    "window_norm",
    "metric",
    "purity_ed",
    "purity_haar",
    "s2_ed",
    "s2_haar",
    "F_ed",
    "F_haar",
    "G_ed",
    "G_haar",
    "rel_error",
    "F_rel_error",
    "G_rel_error",
    "sigma2_diag",
    "sigma2_offdiag",
    "runtime_ms",
];

pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Value,
    pub checks: Vec<CheckOutcome>,
}

/// Hamiltonian spectrum and probe operator for one chain length.
pub struct Chain {
    pub l: usize,
    pub site: usize,
    pub spec: SpectralData,
    pub op: OperatorInEnergyBasis,
}

impl Chain {
    pub fn build(cfg: &ExperimentConfig, l: usize) -> Result<Self, LabError> {
        let spec = eigendecompose(&build_mfim(l, cfg.model.params())?)?;
        let site = cfg.operator.site_for(l);
        let op = to_energy_basis(&build_site_pauli(l, site, cfg.operator.axis.into())?, &spec)?;
        Ok(Self { l, site, spec, op })
    }

    pub fn window(&self, w: &WindowSpec) -> Result<EnergyWindow, LabError> {
        Ok(match *w {
            WindowSpec::Count { d_w } => select_window(&self.spec, d_w)?,
            WindowSpec::Width { delta_e } => select_window_by_width(&self.spec, delta_e)?,
        })
    }

    /// `None` stands for the whole spectrum.
    pub fn windows(&self, specs: &[WindowSpec]) -> Result<Vec<Option<EnergyWindow>>, LabError> {
        if specs.is_empty() {
            return Ok(vec![None]);
        }
        specs.iter().map(|w| self.window(w).map(Some)).collect()
    }
}

fn window_specs(cfg: &ExperimentConfig, default: &[usize], d: usize) -> Vec<WindowSpec> {
    if !cfg.windows.is_empty() {
        return cfg.windows.clone();
    }
    default.iter().filter(|&&d_w| d_w <= d).map(|&d_w| WindowSpec::Count { d_w }).collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::FullSpace => full_space(cfg),
        ExperimentKind::WindowSweep => window_sweep(cfg, ExperimentKind::WindowSweep, &DEFAULT_WINDOWS),
        ExperimentKind::FgTerms => fg_terms(cfg),
        ExperimentKind::Timeseries => timeseries(cfg),
        ExperimentKind::EthScaling => eth_scaling(cfg),
        ExperimentKind::PageCheck => page_check(cfg),
        ExperimentKind::WeightsDump => weights_dump(cfg),
        ExperimentKind::EigenstateEntanglement => eigenstate_entanglement(cfg),
    }
}

fn result_row(
    cfg: &ExperimentConfig,
    kind: ExperimentKind,
    chain: &Chain,
    n_a: usize,
    window: Option<&EnergyWindow>,
    stats: &EthStatistics,
) -> Result<Vec<Cell>, LabError> {
    let t0 = Instant::now();
    let geom = HilbertGeometry::new(chain.l, n_a)?;
    let norm: WindowNorm = cfg.window_norm.into();
    let opts = LatetimeOptions { norm, ..Default::default() };
    let ed = latetime_purity_ed_with(&chain.spec, &chain.op, geom.cut(), window, opts)?;
    let haar = haar_purity_exact(&chain.op, geom.cut(), window, norm)?;
    let m = cfg.metric;
    let (d_w, start) = window.map_or((geom.d(), 0), |w| (w.d_w(), w.start()));
    let p = &cfg.model;
    Ok(vec![
        kind.name().into(),
        chain.l.into(),
        p.j.into(),
        p.h_x.into(),
        p.h_z.into(),
        p.g_0.into(),
        p.g_l.into(),
        chain.site.into(),
        cfg.operator.axis.label().into(),
        n_a.into(),
        geom.d_a().into(),
        geom.d_b().into(),
        d_w.into(),
        start.into(),
        cfg.window_norm.label().into(),
        m.label().into(),
        ed.total.into(),
        haar.total.into(),
        ed.s2().into(),
        haar.s2().into(),
        ed.f().into(),
        haar.f().into(),
        ed.g().into(),
        haar.g().into(),
        m.rel_error(ed.total, haar.total).into(),
        m.rel_error(ed.f(), haar.f()).into(),
        m.rel_error(ed.g(), haar.g()).into(),
        stats.diag_var.into(),
        stats.offdiag_var.into(),
        (t0.elapsed().as_millis() as u64).into(),
    ])
}

/// Runs every `(window, n_A)` cell of one chain.
fn sweep_chain(
    cfg: &ExperimentConfig,
    kind: ExperimentKind,
    chain: &Chain,
    windows: &[Option<EnergyWindow>],
) -> Result<Vec<Vec<Cell>>, LabError> {
    let stats: Vec<EthStatistics> =
        windows.iter().map(|w| compute_stats(&chain.op, w.as_ref())).collect::<Result<_, _>>()?;
    let cells: Vec<(usize, usize)> =
        (0..windows.len()).flat_map(|wi| cfg.n_a.iter().map(move |&n_a| (wi, n_a))).collect();
    cells
        .par_iter()
        .map(|&(wi, n_a)| result_row(cfg, kind, chain, n_a, windows[wi].as_ref(), &stats[wi]))
        .collect()
}

fn full_space(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let mut table = Table::new("full_space", &RESULT_HEADER);
    for l in cfg.chain_lengths() {
        let chain = Chain::build(cfg, l)?;
        for row in sweep_chain(cfg, ExperimentKind::FullSpace, &chain, &[None])? {
            table.push(row);
        }
    }
    let errors: Vec<f64> = (0..table.rows.len()).filter_map(|r| table.float(r, "rel_error")).collect();
    let summary = json!({ "rel_error_min": fold_min(&errors), "rel_error_max": fold_max(&errors) });
    Ok(Outcome { tables: vec![table], summary, checks: Vec::new() })
}

fn window_sweep(cfg: &ExperimentConfig, kind: ExperimentKind, default: &[usize]) -> Result<Outcome, LabError> {
    let mut table = Table::new(kind.name(), &RESULT_HEADER);
    for l in cfg.chain_lengths() {
        let chain = Chain::build(cfg, l)?;
        let windows = chain.windows(&window_specs(cfg, default, chain.spec.dim()))?;
        for row in sweep_chain(cfg, kind, &chain, &windows)? {
            table.push(row);
        }
    }
    Ok(Outcome { tables: vec![table], summary: json!({}), checks: Vec::new() })
}

/// Depth of the dip of `−ln G` at the largest `n_A`: its maximum over the
/// listed cuts minus its last value.
pub fn dip_depth(neg_ln_g: &[f64]) -> f64 {
    match neg_ln_g.last() {
        Some(&last) => fold_max(neg_ln_g) - last,
        None => 0.0,
    }
}

fn fg_terms(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let out = window_sweep(cfg, ExperimentKind::FgTerms, &[10])?;
    let t = &out.tables[0];
    let mut groups: Vec<((i64, i64), Vec<f64>)> = Vec::new();
    let (cl, cw) = (t.column("L").expect("L column"), t.column("d_w").expect("d_w column"));
    for (r, row) in t.rows.iter().enumerate() {
        let key = match (&row[cl], &row[cw]) {
            (Cell::Int(l), Cell::Int(w)) => (*l, *w),
            _ => unreachable!("integer columns"),
        };
        let g = -t.float(r, "G_ed").expect("G_ed column").ln();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(g),
            None => groups.push((key, vec![g])),
        }
    }
    let dips: Vec<Value> = groups
        .iter()
        .map(|((l, d_w), g)| json!({ "L": l, "d_w": d_w, "neg_ln_g_ed": g, "dip_depth": dip_depth(g) }))
        .collect();
    Ok(Outcome { summary: json!({ "n_a": cfg.n_a, "g_dip": dips }), ..out })
}

fn timeseries(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let mut table = Table::new(
        "timeseries",
        &["L", "site", "axis", "n_a", "t", "purity", "s2", "latetime_purity", "latetime_s2"],
    );
    let times = cfg.times.times();
    for l in cfg.chain_lengths() {
        let chain = Chain::build(cfg, l)?;
        for &n_a in &cfg.n_a {
            let cut = HilbertGeometry::new(l, n_a)?.cut();
            let series = loe_timeseries(&chain.spec, &chain.op, cut, &times)?;
            let late = latetime_purity_ed_with(&chain.spec, &chain.op, cut, None, LatetimeOptions::default())?;
            for p in series {
                table.push(vec![
                    l.into(),
                    chain.site.into(),
                    cfg.operator.axis.label().into(),
                    n_a.into(),
                    p.t.into(),
                    p.purity.into(),
                    p.s2.into(),
                    late.total.into(),
                    late.s2().into(),
                ]);
            }
        }
    }
    Ok(Outcome { tables: vec![table], summary: json!({}), checks: Vec::new() })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn fold_max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn fold_min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn eth_scaling(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let header = [
        "L",
        "d",
        "d_w",
        "window_start",
        "diag_mean",
        "sigma2_diag",
        "offdiag_mean_abs",
        "sigma2_offdiag",
        "norm_combination",
    ];
    let mut table = Table::new("eth_scaling", &header);
    // per window spec: (d, σ²_diag, σ²_off) across L
    let n_specs = cfg.windows.len().max(1);
    let mut series: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); n_specs];
    for l in cfg.chain_lengths() {
        let chain = Chain::build(cfg, l)?;
        for (wi, w) in chain.windows(&cfg.windows)?.iter().enumerate() {
            let s = compute_stats(&chain.op, w.as_ref())?;
            let d = chain.spec.dim();
            table.push(vec![
                l.into(),
                d.into(),
                s.n_diag.into(),
                s.window.start.into(),
                s.diag_mean.into(),
                s.diag_var.into(),
                s.offdiag_mean.norm().into(),
                s.offdiag_var.into(),
                s.norm_combination().into(),
            ]);
            series[wi].push((d as f64, s.diag_var, s.offdiag_var));
        }
    }
    let fits: Vec<Value> = series
        .iter()
        .zip(cfg.windows.iter().map(Some).chain(std::iter::repeat(None)))
        .map(|(pts, spec)| {
            let d: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let diag: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let off: Vec<f64> = pts.iter().map(|p| p.2).collect();
            json!({
                "window": spec.map_or(Value::Null, |w| serde_json::to_value(w).expect("window serializes")),
                "offdiag_slope": if pts.len() >= 2 { loglog_slope(&d, &off) } else { f64::NAN },
                "diag_var_ratio": fold_max(&diag) / fold_min(&diag),
            })
        })
        .collect();
    Ok(Outcome { tables: vec![table], summary: json!({ "fits": fits }), checks: Vec::new() })
}

fn page_check(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let l = cfg.model.l;
    let d = 1usize << l;
    let samples = cfg.samples.unwrap_or(20_000);
    let mut table = Table::new(
        "page_check",
        &[
            "L", "d", "n_a", "d_a", "dia", "semi", "perm", "dia_mc", "dia_stderr", "semi_mc", "semi_stderr", "perm_mc",
            "perm_stderr", "s2_page", "s2_mc", "rel_gap", "pass",
        ],
    );
    let mut checks = Vec::new();
    for &n_a in &cfg.n_a {
        let geom = HilbertGeometry::new(l, n_a)?;
        let w = page_weights::<f64>(geom.d_a(), d)?;
        let mc = monte_carlo_page_weights(geom.cut(), samples, cfg.seed.wrapping_add(n_a as u64))?;
        let s2_page: f64 = page_s2(n_a as u32, d)?;
        let s2_mc = -mc.dia.mean.ln();
        let gap = (s2_mc - s2_page).abs() / s2_page.abs();
        let pass = gap <= PAGE_TOLERANCE;
        table.push(vec![
            l.into(),
            d.into(),
            n_a.into(),
            geom.d_a().into(),
            w.dia.into(),
            w.semi.into(),
            w.perm.into(),
            mc.dia.mean.into(),
            mc.dia.stderr.into(),
            mc.semi.mean.into(),
            mc.semi.stderr.into(),
            mc.perm.mean.into(),
            mc.perm.stderr.into(),
            s2_page.into(),
            s2_mc.into(),
            gap.into(),
            pass.into(),
        ]);
        checks.push(CheckOutcome::upper(format!("page_s2 vs Monte Carlo, n_A = {n_a}"), gap, PAGE_TOLERANCE));
    }

    let n_ws: Vec<usize> = if cfg.windows.is_empty() {
        vec![40]
    } else {
        cfg.windows
            .iter()
            .map(|w| match *w {
                WindowSpec::Count { d_w } => Ok(d_w),
                WindowSpec::Width { .. } => Err(LabError::Config("page_check windows are state counts".into())),
            })
            .collect::<Result<_, _>>()?
    };
    let mut combos = Table::new("page_combinations", &["L", "d", "n_w", "combination", "n_a", "purity", "s2"]);
    for &n_w in &n_ws {
        for combo in PageCombination::all() {
            for &n_a in &cfg.n_a {
                let d_a = 1usize << n_a;
                let p = combination_purity(&page_weights::<f64>(d_a, d)?, n_w, combo);
                combos.push(vec![
                    l.into(),
                    d.into(),
                    n_w.into(),
                    combo.label().into(),
                    n_a.into(),
                    p.into(),
                    (-p.ln()).into(),
                ]);
            }
        }
    }
    Ok(Outcome { tables: vec![table, combos], summary: json!({ "samples": samples }), checks })
}

fn weights_dump(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let l = cfg.model.l;
    let mut table = Table::new("weights_dump", &["L", "n_a", "d_a", "d_b", "n", "weight"]);
    for &n_a in &cfg.n_a {
        let geom = HilbertGeometry::new(l, n_a)?;
        let w = derive_weights(geom.d_a(), geom.d_b())?;
        for (n, &x) in w.weights().iter().enumerate() {
            table.push(vec![l.into(), n_a.into(), geom.d_a().into(), geom.d_b().into(), n.into(), x.into()]);
        }
    }
    Ok(Outcome { tables: vec![table], summary: json!({}), checks: Vec::new() })
}

fn eigenstate_entanglement(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let alphas = if cfg.alphas.is_empty() { vec![1.0, 2.0, 3.0, 4.0] } else { cfg.alphas.clone() };
    let samples = cfg.samples.unwrap_or(2_000);
    let mut table = Table::new(
        "eigenstate_entanglement",
        &["L", "n_a", "d_a", "alpha", "d_w", "eigen_mean", "eigen_std", "haar_mean", "haar_stderr", "page_s2"],
    );
    for l in cfg.chain_lengths() {
        let chain = Chain::build(cfg, l)?;
        let d = chain.spec.dim();
        for w in chain.windows(&cfg.windows)? {
            let range = w.as_ref().map_or(0..d, EnergyWindow::indices);
            let frames = chain.spec.frames(range.clone());
            for &n_a in &cfg.n_a {
                let geom = HilbertGeometry::new(l, n_a)?;
                for &alpha in &alphas {
                    let s: Vec<f64> = (0..range.len())
                        .into_par_iter()
                        .map(|c| {
                            let psi: Vec<_> = (0..d).map(|i| frames[(i, c)]).collect();
                            state_renyi(&psi, geom.cut(), alpha)
                        })
                        .collect::<Result<_, _>>()?;
                    let n = s.len() as f64;
                    let mean = s.iter().sum::<f64>() / n;
                    let std = (s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
                    let haar = haar_state_entanglement(geom.cut(), alpha, samples, cfg.seed)?;
                    let page: f64 = page_s2(n_a as u32, d)?;
                    table.push(vec![
                        l.into(),
                        n_a.into(),
                        geom.d_a().into(),
                        alpha.into(),
                        range.len().into(),
                        mean.into(),
                        std.into(),
                        haar.mean.into(),
                        haar.stderr.into(),
                        page.into(),
                    ]);
                }
            }
        }
    }
    Ok(Outcome { tables: vec![table], summary: json!({ "samples": samples }), checks: Vec::new() })
}

/// One line per unit of work with a rough floating-point operation count.
pub fn plan(cfg: &ExperimentConfig) -> Result<Vec<String>, LabError> {
    cfg.validate()?;
    let mut lines = vec![format!("experiment {} (figures: {})", cfg.experiment, cfg.experiment.figures().join(", "))];
    let mut total = 0.0;
    let mut add = |lines: &mut Vec<String>, what: String, flops: f64| {
        total += flops;
        lines.push(format!("  {what}: ~{flops:.1e} flop"));
    };
    match cfg.experiment {
        ExperimentKind::PageCheck => {
            let d = (1usize << cfg.model.l) as f64;
            let n = cfg.samples.unwrap_or(20_000) as f64;
            for &n_a in &cfg.n_a {
                add(&mut lines, format!("Monte Carlo n_A={n_a}, {n} samples"), n * d * (16.0 + 8.0 * (1usize << n_a) as f64));
            }
        }
        ExperimentKind::WeightsDump => {
            for &n_a in &cfg.n_a {
                add(&mut lines, format!("exact weights n_A={n_a}"), 1e7);
            }
        }
        _ => {
            for l in cfg.chain_lengths() {
                let d = (1usize << l) as f64;
                add(&mut lines, format!("eigensolve L={l} (d={d})"), 9.0 * d * d * d);
                let specs = match cfg.experiment {
                    ExperimentKind::FullSpace | ExperimentKind::Timeseries => Vec::new(),
                    ExperimentKind::WindowSweep => window_specs(cfg, &DEFAULT_WINDOWS, d as usize),
                    ExperimentKind::FgTerms => window_specs(cfg, &[10], d as usize),
                    _ => cfg.windows.clone(),
                };
                let widths: Vec<f64> = if specs.is_empty() {
                    vec![d]
                } else {
                    specs
                        .iter()
                        .map(|w| match *w {
                            WindowSpec::Count { d_w } => d_w as f64,
                            WindowSpec::Width { .. } => f64::NAN,
                        })
                        .collect()
                };
                for n_w in widths {
                    for &n_a in &cfg.n_a {
                        let (da, db) = ((1usize << n_a) as f64, d / (1usize << n_a) as f64);
                        let flops = match cfg.experiment {
                            ExperimentKind::Timeseries => cfg.times.n_points as f64 * 4.0 * d * d * d,
                            ExperimentKind::EigenstateEntanglement => n_w * d * da.min(db) * 8.0,
                            ExperimentKind::EthScaling => n_w * n_w,
                            _ => 8.0 * n_w * n_w * d * (da.min(db) + n_w.min(da * da)),
                        };
                        let label = if n_w.is_nan() { "width window".to_string() } else { format!("d_w={n_w}") };
                        add(&mut lines, format!("L={l} n_A={n_a} {label}"), flops);
                    }
                }
            }
        }
    }
    lines.push(format!("total ~{total:.1e} flop"));
    Ok(lines)
}
