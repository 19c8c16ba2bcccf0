//! Experiment configuration, read from JSON.

use std::fmt;
use std::path::{Path, PathBuf};

use loe_core::liouville::WindowNorm;
use loe_core::{MfimParams, PauliAxis};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::LabError;

/// Largest chain accepted for `full_space` without `--override-size-guard`.
pub const FULL_SPACE_MAX_L: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    FullSpace,
    WindowSweep,
    FgTerms,
    Timeseries,
    EthScaling,
    PageCheck,
    WeightsDump,
    EigenstateEntanglement,
}

impl ExperimentKind {
    pub const ALL: [Self; 8] = [
        Self::FullSpace,
        Self::WindowSweep,
        Self::FgTerms,
        Self::Timeseries,
        Self::EthScaling,
        Self::PageCheck,
        Self::WeightsDump,
        Self::EigenstateEntanglement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FullSpace => "full_space",
            Self::WindowSweep => "window_sweep",
            Self::FgTerms => "fg_terms",
            Self::Timeseries => "timeseries",
            Self::EthScaling => "eth_scaling",
            Self::PageCheck => "page_check",
            Self::WeightsDump => "weights_dump",
            Self::EigenstateEntanglement => "eigenstate_entanglement",
        }
    }

    /// Figures of the reference study this experiment regenerates. The
    /// time series has no figure of its own.
    pub fn figures(self) -> &'static [&'static str] {
        match self {
            Self::FullSpace => &["fig2", "fig3"],
            Self::WindowSweep => &["fig4", "fig5", "fig6", "fig7", "fig9", "fig10", "fig11"],
            Self::FgTerms => &["fig6", "fig7", "fig8"],
            Self::Timeseries => &[],
            Self::EthScaling => &["fig19", "fig20"],
            Self::PageCheck => &["fig13"],
            Self::WeightsDump => &["fig14", "table1"],
            Self::EigenstateEntanglement => &["fig12"],
        }
    }

    fn uses_cuts(self) -> bool {
        !matches!(self, Self::EthScaling)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub h_x: f64,
    pub h_z: f64,
    pub g_0: f64,
    pub g_l: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let p = MfimParams::CHAOTIC;
        Self { l: 6, j: p.j, h_x: p.h_x, h_z: p.h_z, g_0: p.g_0, g_l: p.g_l }
    }
}

impl ModelConfig {
    pub fn params(&self) -> MfimParams {
        MfimParams { j: self.j, h_x: self.h_x, h_z: self.h_z, g_0: self.g_0, g_l: self.g_l }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl From<Axis> for PauliAxis {
    fn from(a: Axis) -> Self {
        match a {
            Axis::X => PauliAxis::X,
            Axis::Y => PauliAxis::Y,
            Axis::Z => PauliAxis::Z,
        }
    }
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorSpec {
    /// Defaults to the center of the chain.
    pub site: Option<usize>,
    pub axis: Axis,
}

impl Default for OperatorSpec {
    fn default() -> Self {
        Self { site: None, axis: Axis::X }
    }
}

impl OperatorSpec {
    pub fn site_for(&self, l: usize) -> usize {
        self.site.unwrap_or_else(|| loe_core::spin_chain::center_site(l))
    }
}

/// An energy window, by state count or by energy width around the median.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowSpec {
    Count { d_w: usize },
    Width { delta_e: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMetric {
    #[default]
    S2Relative,
    PurityRelative,
}

impl ErrorMetric {
    pub fn label(self) -> &'static str {
        match self {
            Self::S2Relative => "s2_relative",
            Self::PurityRelative => "purity_relative",
        }
    }

    /// `|x_ed − x_haar| / |x_ed|` on purities, or on `−ln` of them.
    pub fn rel_error(self, purity_ed: f64, purity_haar: f64) -> f64 {
        let (a, b) = match self {
            Self::S2Relative => (-purity_ed.ln(), -purity_haar.ln()),
            Self::PurityRelative => (purity_ed, purity_haar),
        };
        (a - b).abs() / a.abs()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowNormConfig {
    #[default]
    Renormalize,
    Raw,
}

impl From<WindowNormConfig> for WindowNorm {
    fn from(n: WindowNormConfig) -> Self {
        match n {
            WindowNormConfig::Renormalize => WindowNorm::Renormalize,
            WindowNormConfig::Raw => WindowNorm::Raw,
        }
    }
}

impl WindowNormConfig {
    pub fn label(self) -> &'static str {
        match self {
            Self::Renormalize => "renormalize",
            Self::Raw => "raw",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { t_max: 50.0, n_points: 200, spacing: Spacing::Linear }
    }
}

impl TimeGrid {
    /// Linear grids start at 0; log grids run from `t_max / 10⁴` and get a
    /// leading `t = 0`.
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_points;
        match self.spacing {
            Spacing::Linear if n == 1 => vec![0.0],
            Spacing::Linear => (0..n).map(|k| self.t_max * k as f64 / (n - 1) as f64).collect(),
            Spacing::Log => {
                let lo = (self.t_max * 1e-4).ln();
                let hi = self.t_max.ln();
                let mut t = vec![0.0];
                t.extend((0..n.saturating_sub(1)).map(|k| (lo + (hi - lo) * k as f64 / (n - 2).max(1) as f64).exp()));
                t
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub operator: OperatorSpec,
    /// Bipartitions, as the number of sites in `A`.
    #[serde(default)]
    pub n_a: Vec<usize>,
    #[serde(default)]
    pub windows: Vec<WindowSpec>,
    /// Chain lengths for experiments that scan `L`; defaults to `model.L`.
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub metric: ErrorMetric,
    #[serde(default)]
    pub window_norm: WindowNormConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Monte Carlo sample count where an experiment samples.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub times: TimeGrid,
    /// Rényi orders for `eigenstate_entanglement`.
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_seed() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Chain lengths to run: `sizes` if given, otherwise `model.L`.
    pub fn chain_lengths(&self) -> Vec<usize> {
        if self.sizes.is_empty() {
            vec![self.model.l]
        } else {
            self.sizes.clone()
        }
    }

    /// Checks dimensions against each other. The size guard is separate
    /// (see [`ExperimentConfig::check_size_guard`]).
    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.experiment.uses_cuts() && self.n_a.is_empty() {
            return bad("at least one bipartition (n_a) is required".into());
        }
        for &l in &self.chain_lengths() {
            if !(2..=16).contains(&l) {
                return bad(format!("chain length {l} outside 2..=16"));
            }
            let site = self.operator.site_for(l);
            if site >= l {
                return bad(format!("operator site {site} outside a chain of {l}"));
            }
            for &n_a in &self.n_a {
                if n_a == 0 || n_a >= l {
                    return bad(format!("n_a = {n_a} must lie in 1..{l}"));
                }
            }
            let d = 1usize << l;
            for w in &self.windows {
                match *w {
                    WindowSpec::Count { d_w } if d_w < 2 || d_w > d => {
                        return bad(format!("window d_w = {d_w} outside 2..={d}"));
                    }
                    WindowSpec::Width { delta_e } if !(delta_e > 0.0) => {
                        return bad(format!("window width {delta_e} must be positive"));
                    }
                    _ => {}
                }
            }
        }
        if matches!(self.samples, Some(n) if n < 2) {
            return bad("samples must be at least 2".into());
        }
        if self.experiment == ExperimentKind::Timeseries && (self.times.n_points == 0 || !(self.times.t_max >= 0.0)) {
            return bad("time grid needs n_points ≥ 1 and t_max ≥ 0".into());
        }
        if self.alphas.iter().any(|&a| !(a >= 1.0)) {
            return bad("Rényi orders must be ≥ 1".into());
        }
        Ok(())
    }

    pub fn check_size_guard(&self, override_guard: bool) -> Result<(), LabError> {
        if self.experiment == ExperimentKind::FullSpace && !override_guard {
            if let Some(&l) = self.chain_lengths().iter().find(|&&l| l > FULL_SPACE_MAX_L) {
                return Err(LabError::SizeGuard(l));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form (after command-line overrides).
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
