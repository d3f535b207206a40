//! Run configuration: JSON document, flag overrides, hashing and initial data.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fhw_core::grid::{fhwg, BoxGrid, GridFunction};
use fhw_core::norms::{BallFamily, BallParams};
use fhw_core::scaling::{homogeneous_data, validate_params, Admissibility};
use fhw_core::solver::{ModelParams, Nonlinearity, TimeGrid};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub rho: f64,
    pub gamma_sign: i8,
    pub nu: f64,
    pub form: Nonlinearity,
    pub dealias: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            rho: 3.0,
            gamma_sign: 1,
            nu: 1.0,
            form: Nonlinearity::Signed,
            dealias: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    pub n: usize,
    /// Points per axis; a single entry is repeated over all axes.
    pub sizes: Vec<usize>,
    pub half_length: f64,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            n: 2,
            sizes: vec![32],
            half_length: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub horizon: f64,
    pub steps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { horizon: 1.0, steps: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceParamsConfig {
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    pub balls: BallParams,
}

impl Default for SpaceParamsConfig {
    fn default() -> Self {
        Self {
            p: 3.0,
            q: 3.2,
            mu: 0.0,
            balls: BallParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// `A exp(-|x|^2 / w^2)`
    Gaussian,
    /// `A sin(m pi x_1 / L)`
    Sine,
    /// `A prod_i cos(m pi x_i / L)`
    Cosine,
    /// `A (|x|^2 + eps^2)^{-1/(rho-1)}`
    Homogeneous,
    /// `A` on the closed ball of radius `w` about the origin
    Indicator,
    /// FHWG file
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSpec {
    pub kind: DataKind,
    pub amplitude: f64,
    /// Gaussian width or indicator radius.
    pub width: f64,
    pub mode: u32,
    /// Mollification of homogeneous data; `None` uses two grid spacings.
    pub eps: Option<f64>,
    pub path: Option<PathBuf>,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            kind: DataKind::Gaussian,
            amplitude: 0.5,
            width: 1.0,
            mode: 1,
            eps: None,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub picard_tol: f64,
    pub max_iter: usize,
    pub corrector_iters: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            picard_tol: 1e-10,
            max_iter: 100,
            corrector_iters: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; falls back to `$FHW_OUT_DIR`, then `fhw_out`.
    pub dir: Option<PathBuf>,
    /// Snapshot stride in time nodes.
    pub stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, stride: 1 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub space: SpaceConfig,
    pub time: TimeConfig,
    pub params: SpaceParamsConfig,
    pub data: DataSpec,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BallsArg {
    Auto,
    Exhaustive,
    Dyadic,
}

/// Config file plus per-field overrides shared by `params`, `solve` and `norms`.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON config; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Sign of the nonlinearity (-1, 0, 1)
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<i8>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Space dimension
    #[arg(long)]
    pub n: Option<usize>,
    /// Points per axis
    #[arg(long)]
    pub grid: Option<usize>,
    /// Box half-length L
    #[arg(long)]
    pub length: Option<f64>,
    /// Time horizon T
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Number of time steps
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, value_enum)]
    pub balls: Option<BallsArg>,
    #[arg(long, value_enum)]
    pub data: Option<DataKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub mode: Option<u32>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Initial data from an FHWG file (implies --data file)
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub corrector: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Snapshot stride in time nodes
    #[arg(long)]
    pub stride: Option<usize>,
    /// Run even when the parameter tuple is not admissible
    #[arg(long)]
    pub force: bool,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl ConfigArgs {
    pub fn load(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| Failure::usage(format!("bad config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        let m = &mut cfg.model;
        set(&mut m.alpha, self.alpha);
        set(&mut m.rho, self.rho);
        set(&mut m.gamma_sign, self.gamma);
        set(&mut m.nu, self.nu);
        set(&mut cfg.space.n, self.n);
        if let Some(g) = self.grid {
            cfg.space.sizes = vec![g];
        }
        set(&mut cfg.space.half_length, self.length);
        set(&mut cfg.time.horizon, self.horizon);
        set(&mut cfg.time.steps, self.steps);
        set(&mut cfg.params.p, self.p);
        set(&mut cfg.params.q, self.q);
        set(&mut cfg.params.mu, self.mu);
        if let Some(b) = self.balls {
            cfg.params.balls.family = match b {
                BallsArg::Auto => BallFamily::Auto,
                BallsArg::Exhaustive => BallFamily::Exhaustive,
                BallsArg::Dyadic => BallFamily::Dyadic,
            };
        }
        let d = &mut cfg.data;
        set(&mut d.kind, self.data);
        set(&mut d.amplitude, self.amplitude);
        set(&mut d.width, self.width);
        set(&mut d.mode, self.mode);
        if self.eps.is_some() {
            d.eps = self.eps;
        }
        if let Some(path) = &self.input {
            d.kind = DataKind::File;
            d.path = Some(path.clone());
        }
        set(&mut cfg.tolerances.picard_tol, self.tol);
        set(&mut cfg.tolerances.max_iter, self.max_iter);
        set(&mut cfg.tolerances.corrector_iters, self.corrector);
        if self.out.is_some() {
            cfg.output.dir = self.out.clone();
        }
        set(&mut cfg.output.stride, self.stride);
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn model(&self) -> Result<ModelParams, Failure> {
        let m = &self.model;
        let model = ModelParams {
            alpha: m.alpha,
            rho: m.rho,
            gamma_sign: m.gamma_sign,
            nu: m.nu,
            form: m.form,
            dealias: m.dealias,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn sizes(&self) -> Result<Vec<usize>, Failure> {
        let s = &self.space;
        match s.sizes.len() {
            1 => Ok(vec![s.sizes[0]; s.n]),
            k if k == s.n => Ok(s.sizes.clone()),
            k => Err(Failure::usage(format!("{k} grid sizes given for dimension {}", s.n))),
        }
    }

    pub fn grid(&self) -> Result<BoxGrid, Failure> {
        Ok(BoxGrid::new(self.sizes()?, self.space.half_length)?)
    }

    pub fn tgrid(&self) -> Result<TimeGrid, Failure> {
        Ok(TimeGrid::new(self.time.horizon, self.time.steps)?)
    }

    pub fn admissibility(&self) -> Result<Admissibility, Failure> {
        let p = &self.params;
        Ok(validate_params(self.space.n, self.model.alpha, self.model.rho, p.p, p.q, p.mu)?)
    }

    /// Admissibility report; an inadmissible tuple is a usage error unless forced.
    pub fn require_admissible(&self, force: bool) -> Result<Admissibility, Failure> {
        let adm = self.admissibility()?;
        if !adm.admissible && !force {
            let failed: Vec<String> = adm.failures().iter().map(|c| format!("{} ({})", c.name, c.detail)).collect();
            return Err(Failure::usage(format!(
                "parameter tuple is not admissible: {}; pass --force to run anyway",
                failed.join("; ")
            )));
        }
        Ok(adm)
    }

    pub fn initial_data(&self) -> Result<GridFunction, Failure> {
        let d = &self.data;
        let a = d.amplitude;
        let l = self.space.half_length;
        let mode = d.mode as f64;
        let sq = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let u = match d.kind {
            DataKind::File => {
                let path = d.path.as_ref().ok_or_else(|| Failure::usage("data kind 'file' needs a path"))?;
                let u = fhwg::read_file(path)?;
                let g = self.grid()?;
                if u.grid().sizes() != g.sizes() || u.grid().half_length() != g.half_length() {
                    return Err(Failure::usage(format!(
                        "{} holds a grid {:?} with L = {}, the config asks for {:?} with L = {}",
                        path.display(),
                        u.grid().sizes(),
                        u.grid().half_length(),
                        g.sizes(),
                        g.half_length()
                    )));
                }
                u
            }
            DataKind::Gaussian => {
                let w2 = d.width * d.width;
                GridFunction::from_fn(self.grid()?, |x| a * (-sq(x) / w2).exp())?
            }
            DataKind::Sine => GridFunction::from_fn(self.grid()?, |x| a * (mode * PI * x[0] / l).sin())?,
            DataKind::Cosine => {
                GridFunction::from_fn(self.grid()?, |x| a * x.iter().map(|v| (mode * PI * v / l).cos()).product::<f64>())?
            }
            DataKind::Homogeneous => {
                let g = self.grid()?;
                let eps = d.eps.unwrap_or(2.0 * g.min_spacing());
                homogeneous_data(&g, self.model.rho, a, eps)?
            }
            DataKind::Indicator => {
                let r2 = d.width * d.width;
                GridFunction::from_fn(self.grid()?, |x| if sq(x) <= r2 { a } else { 0.0 })?
            }
        };
        Ok(u)
    }

    /// Hash of the effective config, excluding the output location.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = None;
        hash_bytes(&serde_json::to_vec(&c).expect("config serializes"))
    }

    pub fn out_dir(&self) -> PathBuf {
        resolve_out_dir(self.output.dir.as_deref())
    }
}

pub fn resolve_out_dir(explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os("FHW_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("fhw_out")),
    }
}

/// First 16 hex digits of the SHA-256 digest.
pub fn hash_bytes(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Creates the output directory and echoes the effective config into it.
pub fn prepare_out_dir(cfg: &RunConfig) -> Result<PathBuf, Failure> {
    let dir = cfg.out_dir();
    std::fs::create_dir_all(&dir)?;
    let text = serde_json::to_string_pretty(cfg).expect("config serializes");
    std::fs::write(dir.join("config.json"), text + "\n")?;
    Ok(dir)
}
