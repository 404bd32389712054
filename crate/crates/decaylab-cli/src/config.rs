//! JSON campaign configuration, schema version 1.
//!
//! A campaign is a list of named runs plus an analysis policy. Each run is
//! either an `oracle` evaluation of the linear diffusion semigroup, an
//! `adv-diff` simulation, or an `mhd` simulation. Initial data comes from an
//! inline decay spec or from a field snapshot on disk.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use decaylab::models::{required_dealias_fraction, DtPolicy, FluxCoeffs};
use decaylab::spectral::GridSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub schema_version: u32,
    /// Base seed; run k without an explicit seed uses global_seed + k.
    #[serde(default)]
    pub global_seed: Option<u64>,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub analysis: AnalysisPolicy,
    pub runs: Vec<RunConfig>,
}

impl CampaignConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        config.validate(path.parent().unwrap_or(Path::new(".")))?;
        Ok(config)
    }

    pub fn validate(&self, base_dir: &Path) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            );
        }
        let mut names = BTreeSet::new();
        for run in &self.runs {
            if run.name.is_empty() || run.name.contains(['/', '\\']) {
                bail!("run name {:?} must be a nonempty path-safe string", run.name);
            }
            if !names.insert(&run.name) {
                bail!("duplicate run name {:?}", run.name);
            }
            run.validate(base_dir)
                .with_context(|| format!("run {:?}", run.name))?;
        }
        Ok(())
    }

    /// Seed for run index k: explicit per-run seed, else global + k.
    pub fn seed_for(&self, index: usize) -> u64 {
        let run = &self.runs[index];
        run.seed
            .unwrap_or_else(|| self.global_seed.unwrap_or(0).wrapping_add(index as u64))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisPolicy {
    /// Explicit fit window; `None` selects it from the box horizon and the
    /// transient policy.
    #[serde(default)]
    pub fit_window: Option<[f64; 2]>,
    #[serde(default)]
    pub fit_start: f64,
    #[serde(default = "default_monotonicity_start")]
    pub monotonicity_start: f64,
    /// Exponent tolerance; defaults to 0.05 for oracle runs and 0.1 for
    /// nonlinear runs when absent.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn default_monotonicity_start() -> f64 {
    5.0
}

impl Default for AnalysisPolicy {
    fn default() -> Self {
        Self {
            fit_window: None,
            fit_start: 0.0,
            monotonicity_start: default_monotonicity_start(),
        tolerance: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub name: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub analysis: Option<AnalysisPolicy>,
    #[serde(flatten)]
    pub model: ModelSection,
}

impl RunConfig {
    fn validate(&self, base_dir: &Path) -> Result<()> {
        match &self.model {
            ModelSection::Oracle(o) => o.validate(),
            ModelSection::AdvDiff(a) => a.validate(base_dir),
            ModelSection::Mhd(m) => m.validate(base_dir),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelSection {
    Oracle(OracleSection),
    AdvDiff(AdvDiffSection),
    Mhd(MhdSection),
}

/// Continuous-Fourier heat-semigroup reference curves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSection {
    pub r_star: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    pub cutoff_radius: f64,
    #[serde(default = "one")]
    pub nu: f64,
    #[serde(default = "default_m_hat")]
    pub m_hat: u32,
    pub t_first: f64,
    pub t_last: f64,
    #[serde(default = "default_oracle_samples")]
    pub samples: usize,
    /// Radialize a snapshot instead of using a synthetic power-law density.
    #[serde(default)]
    pub field_path: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

fn default_m_hat() -> u32 {
    3
}

fn default_oracle_samples() -> usize {
    30
}

impl OracleSection {
    fn validate(&self) -> Result<()> {
        if !(self.t_first > 0.0 && self.t_last > self.t_first) {
            bail!("oracle needs 0 < t_first < t_last");
        }
        if self.samples < 5 {
            bail!("oracle needs at least 5 samples");
        }
        if !(self.nu > 0.0) {
            bail!("oracle needs nu > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSection {
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub points_per_axis: usize,
    pub box_length: f64,
    /// Retained fraction of the Nyquist band; defaults to the value the flux
    /// degree requires.
    #[serde(default)]
    pub dealias_fraction: Option<f64>,
}

fn default_dim() -> usize {
    2
}

impl GridSection {
    pub fn build(&self, flux_degree: usize) -> Result<GridSpec> {
        let fraction = self
            .dealias_fraction
            .unwrap_or_else(|| required_dealias_fraction(flux_degree));
        Ok(GridSpec::with_dealias(
            self.dim,
            self.points_per_axis,
            self.box_length,
            fraction,
        )?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleSection {
    pub dt: f64,
    #[serde(default = "default_true")]
    pub cfl: bool,
    pub t_end: f64,
    pub sample_times: SampleSpec,
}

fn default_true() -> bool {
    true
}

impl ScheduleSection {
    pub fn dt_policy(&self) -> DtPolicy {
        DtPolicy {
            max_dt: self.dt,
            cfl_limited: self.cfl,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.sample_times.realize(self.t_end)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleSpec {
    /// Explicit strictly increasing times.
    Times(Vec<f64>),
    /// start, start + step, ... up to t_end.
    Linear { start: f64, step: f64 },
}

impl SampleSpec {
    pub fn realize(&self, t_end: f64) -> Vec<f64> {
        match self {
            SampleSpec::Times(t) => t.clone(),
            SampleSpec::Linear { start, step } => {
                let mut times = Vec::new();
                let mut k = 0u64;
                loop {
                    let t = start + k as f64 * step;
                    if t > t_end + 1e-12 {
                        break;
                    }
                    times.push(t.min(t_end));
                    k += 1;
                }
                times
            }
        }
    }
}

/// Initial data: inline decay spec or a field snapshot path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSection {
    DecaySpec {
        r_star: f64,
        amplitude: f64,
        cutoff_radius: f64,
        #[serde(default = "default_true")]
        randomize_phases: bool,
    },
    Snapshot { field_path: PathBuf },
}

impl InitialSection {
    fn validate(&self, base_dir: &Path) -> Result<()> {
        if let InitialSection::Snapshot { field_path } = self {
            let resolved = resolve(base_dir, field_path);
            if !resolved.exists() {
                bail!("initial field snapshot {} does not exist", resolved.display());
            }
        }
        Ok(())
    }
}

pub fn resolve(base_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base_dir.join(path)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForcingSection {
    pub beta: f64,
    pub amplitude: f64,
    pub sigma: f64,
    #[serde(default = "one")]
    pub t_on: f64,
    #[serde(default = "default_true")]
    pub self_similar: bool,
}

impl ForcingSection {
    pub fn to_spec(&self) -> decaylab::models::ForcingSpec {
        decaylab::models::ForcingSpec {
            beta: self.beta,
            amplitude: self.amplitude,
            sigma: self.sigma,
            t_on: self.t_on,
            self_similar: self.self_similar,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdvDiffSection {
    pub nu: f64,
    /// Per-axis polynomial coefficients of b_ℓ(u), ascending powers.
    pub flux: Vec<Vec<f64>>,
    pub grid: GridSection,
    pub schedule: ScheduleSection,
    #[serde(default = "default_m_hat")]
    pub m_hat: u32,
    pub initial: InitialSection,
    #[serde(default)]
    pub forcing: Option<ForcingSection>,
}

impl AdvDiffSection {
    fn validate(&self, base_dir: &Path) -> Result<()> {
        FluxCoeffs::new(self.flux.clone())?;
        self.initial.validate(base_dir)
    }

    pub fn build(&self) -> Result<decaylab::models::AdvDiffConfig> {
        let flux = FluxCoeffs::new(self.flux.clone())?;
        let grid = self.grid.build(flux.degree())?;
        let config = decaylab::models::AdvDiffConfig {
            nu: self.nu,
            flux_coeffs: flux,
            grid,
            dt: self.schedule.dt_policy(),
            t_end: self.schedule.t_end,
            sample_times: self.schedule.times(),
            m_hat: self.m_hat,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MhdSection {
    pub mu: f64,
    pub nu: f64,
    pub grid: GridSection,
    pub schedule: ScheduleSection,
    #[serde(default = "default_m_hat")]
    pub m_hat: u32,
    pub initial: InitialSection,
    /// Snapshot for b when the initial data is file-based.
    #[serde(default)]
    pub field_path_b: Option<PathBuf>,
}

impl MhdSection {
    fn validate(&self, base_dir: &Path) -> Result<()> {
        self.initial.validate(base_dir)?;
        if let InitialSection::Snapshot { .. } = self.initial {
            match &self.field_path_b {
                Some(p) if resolve(base_dir, p).exists() => {}
                Some(p) => bail!("magnetic snapshot {} does not exist", p.display()),
                None => bail!("snapshot-based MHD runs need field_path_b"),
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<decaylab::models::MhdConfig> {
        let grid = self.grid.build(1)?; // quadratic nonlinearity: 2/3 band
        let config = decaylab::models::MhdConfig {
            mu: self.mu,
            nu: self.nu,
            grid,
            dt: self.schedule.dt_policy(),
            t_end: self.schedule.t_end,
            sample_times: self.schedule.times(),
            m_hat: self.m_hat,
        };
        config.validate()?;
        Ok(config)
    }
}
