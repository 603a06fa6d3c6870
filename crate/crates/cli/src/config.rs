//! TOML run configuration. Every block rejects unknown keys so typos fail
//! loudly instead of silently falling back to defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use frontspeed::simulator::{ChannelGrid, InitialData};
use frontspeed::{CellGrid, FieldSpec, ReactionSpec, TabulatedField};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Propagation direction `k`; defaults to `e₁` in the cell dimension.
    pub direction: Option<Vec<f64>>,
    pub field: Option<FieldBlock>,
    pub reaction: Option<ReactionBlock>,
    pub cell: Option<CellBlock>,
    pub eigen: Option<EigenBlock>,
    pub dispersion: Option<DispersionBlock>,
    pub speed: Option<SpeedBlock>,
    pub channel: Option<ChannelBlock>,
    pub simulate: Option<SimulateBlock>,
    pub validate: Option<ValidateBlock>,
    pub compare: Option<CompareBlock>,
    /// Directory of the config file, used to resolve relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKindName {
    Zero,
    Shear,
    Cellular,
    Tabulated,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    pub kind: FieldKindName,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "unit_modes")]
    pub modes: [u32; 2],
    #[serde(default)]
    pub eps_t: f64,
    #[serde(default = "one_u32")]
    pub m_t: u32,
    /// CSV of `x1,x2,t,b1,b2` rows for tabulated fields.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReactionKindName {
    Kpp,
    Degenerate,
    Arrhenius,
    Ignition,
    Tabulated,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionBlock {
    pub kind: ReactionKindName,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "two_u32")]
    pub m: u32,
    #[serde(default = "one")]
    pub activation: f64,
    /// Ignition temperature; the cut-off is applied to KPP with rate `r`.
    pub theta: Option<f64>,
    /// Nodal values of a tabulated `f` on a uniform grid of `[0, 1]`.
    pub values: Option<Vec<f64>>,
    pub slope_at_zero: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellBlock {
    #[serde(default = "two_usize")]
    pub dim: usize,
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default = "default_nt")]
    pub nt: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenBlock {
    #[serde(default = "default_eigen_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionBlock {
    /// Explicit λ list; overrides the uniform grid below.
    pub lambdas: Option<Vec<f64>>,
    #[serde(default = "default_lambda_min")]
    pub lambda_min: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_convexity_tol")]
    pub convexity_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedBlock {
    #[serde(default = "default_speed_tol")]
    pub tol: f64,
    /// Regularization parameters for `c*_ε`.
    #[serde(default)]
    pub epsilon: Vec<f64>,
    /// Speeds `c ≥ c*` for which the matching decay rate `λ_c` is reported.
    #[serde(default)]
    pub speeds: Vec<f64>,
    /// Also report the minimal speed in direction `−k`.
    #[serde(default)]
    pub reverse: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelBlock {
    #[serde(default = "default_length")]
    pub length: usize,
    #[serde(default = "default_per_unit")]
    pub per_unit: usize,
    #[serde(default = "yes")]
    pub moving_window: bool,
    pub dt: Option<f64>,
    #[serde(default = "default_buffer")]
    pub buffer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialName {
    Step,
    Decay,
    Bump,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    pub initial: InitialName,
    #[serde(default = "default_x0")]
    pub x0: f64,
    /// Decay rate for a single `decay` run.
    pub rate: Option<f64>,
    /// Decay rates for a sweep; takes precedence over `rate`.
    pub rates: Option<Vec<f64>>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    #[serde(default = "half")]
    pub m: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: f64,
    /// Fit window `[t0, t1]`; defaults to the last half of the run.
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateBlock {
    #[serde(default = "default_residual_tol")]
    pub divergence_tol: f64,
    #[serde(default = "default_residual_tol")]
    pub mean_tol: f64,
    #[serde(default = "default_kpp_samples")]
    pub kpp_samples: usize,
    /// Seeded random trials for the min-max upper bound spot check.
    #[serde(default)]
    pub trials: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareBlock {
    #[serde(default = "default_gap")]
    pub tolerance: f64,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn yes() -> bool {
    true
}
fn one_u32() -> u32 {
    1
}
fn two_u32() -> u32 {
    2
}
fn two_usize() -> usize {
    2
}
fn unit_modes() -> [u32; 2] {
    [1, 1]
}
fn default_nx() -> usize {
    64
}
fn default_nt() -> usize {
    512
}
fn default_eigen_tol() -> f64 {
    frontspeed::eigensolver::DEFAULT_TOL
}
fn default_max_iter() -> usize {
    frontspeed::eigensolver::DEFAULT_MAX_ITER
}
fn default_lambda_min() -> f64 {
    0.25
}
fn default_lambda_max() -> f64 {
    3.0
}
fn default_points() -> usize {
    17
}
fn default_convexity_tol() -> f64 {
    1e-6
}
fn default_speed_tol() -> f64 {
    1e-6
}
fn default_length() -> usize {
    80
}
fn default_per_unit() -> usize {
    16
}
fn default_buffer() -> f64 {
    10.0
}
fn default_x0() -> f64 {
    20.0
}
fn default_t_end() -> f64 {
    30.0
}
fn default_sample_every() -> f64 {
    0.1
}
fn default_residual_tol() -> f64 {
    1e-8
}
fn default_kpp_samples() -> usize {
    1001
}
fn default_gap() -> f64 {
    0.05
}

impl Default for CellBlock {
    fn default() -> Self {
        Self {
            dim: 2,
            nx: default_nx(),
            nt: default_nt(),
        }
    }
}

impl Default for EigenBlock {
    fn default() -> Self {
        Self {
            tol: default_eigen_tol(),
            max_iter: default_max_iter(),
        }
    }
}

impl Default for DispersionBlock {
    fn default() -> Self {
        Self {
            lambdas: None,
            lambda_min: default_lambda_min(),
            lambda_max: default_lambda_max(),
            points: default_points(),
            convexity_tol: default_convexity_tol(),
        }
    }
}

impl Default for SpeedBlock {
    fn default() -> Self {
        Self {
            tol: default_speed_tol(),
            epsilon: Vec::new(),
            speeds: Vec::new(),
            reverse: false,
        }
    }
}

impl Default for ChannelBlock {
    fn default() -> Self {
        Self {
            length: default_length(),
            per_unit: default_per_unit(),
            moving_window: true,
            dt: None,
            buffer: default_buffer(),
        }
    }
}

impl Default for ValidateBlock {
    fn default() -> Self {
        Self {
            divergence_tol: default_residual_tol(),
            mean_tol: default_residual_tol(),
            kpp_samples: default_kpp_samples(),
            trials: 0,
        }
    }
}

impl Default for CompareBlock {
    fn default() -> Self {
        Self {
            tolerance: default_gap(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let mut config =
            Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn field_spec(&self) -> Result<FieldSpec, CliError> {
        let block = self.field.as_ref().ok_or_else(|| missing("field"))?;
        let spec = match block.kind {
            FieldKindName::Zero => FieldSpec::zero(),
            FieldKindName::Shear => FieldSpec::shear(block.amplitude),
            FieldKindName::Cellular => FieldSpec::cellular(block.amplitude),
            FieldKindName::Tabulated => {
                let path = block
                    .path
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("[field] tabulated kind needs `path`".into()))?;
                let table = TabulatedField::from_csv(&self.base_dir.join(path))?;
                return Ok(FieldSpec::tabulated(table).with_modulation(block.eps_t, block.m_t));
            }
        };
        Ok(spec
            .with_modes(block.modes[0], block.modes[1])
            .with_modulation(block.eps_t, block.m_t))
    }

    pub fn reaction_spec(&self) -> Result<ReactionSpec, CliError> {
        let block = self.reaction.as_ref().ok_or_else(|| missing("reaction"))?;
        Ok(match block.kind {
            ReactionKindName::Kpp => ReactionSpec::KppQuadratic { r: block.r },
            ReactionKindName::Degenerate => ReactionSpec::Degenerate { m: block.m },
            ReactionKindName::Arrhenius => ReactionSpec::Arrhenius {
                activation: block.activation,
            },
            ReactionKindName::Ignition => ReactionSpec::IgnitionCutoff {
                base: Box::new(ReactionSpec::KppQuadratic { r: block.r }),
                theta: block.theta.ok_or_else(|| {
                    CliError::Usage("[reaction] ignition kind needs `theta`".into())
                })?,
            },
            ReactionKindName::Tabulated => {
                let values = block.values.clone().ok_or_else(|| {
                    CliError::Usage("[reaction] tabulated kind needs `values`".into())
                })?;
                let slope_at_zero =
                    block
                        .slope_at_zero
                        .unwrap_or_else(|| match values.as_slice() {
                            [a, b, ..] => (b - a) * (values.len() - 1) as f64,
                            _ => 0.0,
                        });
                ReactionSpec::Tabulated {
                    values,
                    slope_at_zero,
                }
            }
        })
    }

    pub fn cell_grid(&self) -> Result<CellGrid, CliError> {
        let block = self.cell.clone().unwrap_or_default();
        Ok(CellGrid::new(block.dim, block.nx, block.nt)?)
    }

    pub fn direction(&self) -> Result<Vec<f64>, CliError> {
        match &self.direction {
            Some(k) => Ok(k.clone()),
            None => {
                let dim = self.cell.clone().unwrap_or_default().dim;
                let mut k = vec![0.0; dim];
                k[0] = 1.0;
                Ok(k)
            }
        }
    }

    pub fn eigen(&self) -> EigenBlock {
        self.eigen.clone().unwrap_or_default()
    }

    pub fn dispersion(&self) -> DispersionBlock {
        self.dispersion.clone().unwrap_or_default()
    }

    pub fn speed(&self) -> SpeedBlock {
        self.speed.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> ValidateBlock {
        self.validate.clone().unwrap_or_default()
    }

    pub fn compare(&self) -> CompareBlock {
        self.compare.clone().unwrap_or_default()
    }

    /// Channel dimension follows the direction vector.
    pub fn channel_grid(&self) -> Result<ChannelGrid, CliError> {
        let block = self.channel.clone().unwrap_or_default();
        let k = self.direction()?;
        let mut grid = ChannelGrid::new(k.len(), block.length, block.per_unit, &k)?
            .with_moving_window(block.moving_window)
            .with_buffer(block.buffer);
        if let Some(dt) = block.dt {
            grid = grid.with_dt(dt);
        }
        Ok(grid)
    }

    pub fn simulate_block(&self) -> Result<&SimulateBlock, CliError> {
        self.simulate.as_ref().ok_or_else(|| missing("simulate"))
    }
}

impl SimulateBlock {
    pub fn initial_data(&self, rate: Option<f64>) -> Result<InitialData, CliError> {
        Ok(match self.initial {
            InitialName::Step => InitialData::Step { x0: self.x0 },
            InitialName::Decay => InitialData::ExpDecay {
                rate: rate.or(self.rate).ok_or_else(|| {
                    CliError::Usage("[simulate] decay data needs `rate` or `rates`".into())
                })?,
                x0: self.x0,
            },
            InitialName::Bump => InitialData::Bump {
                a1: self
                    .a1
                    .ok_or_else(|| CliError::Usage("[simulate] bump data needs `a1`".into()))?,
                a2: self
                    .a2
                    .ok_or_else(|| CliError::Usage("[simulate] bump data needs `a2`".into()))?,
                m: self.m,
            },
        })
    }
}

fn missing(block: &str) -> CliError {
    CliError::Usage(format!("config has no [{block}] block"))
}

/// Uniform grid of `points` values over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}
