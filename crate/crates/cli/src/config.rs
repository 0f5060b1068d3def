//! TOML run configuration and its translation into library objects.
//!
//! The format is a flat sectioned file; parse → serialize → parse is the
//! identity on every valid config (covered by tests). All physical
//! preconditions are validated before any compute starts.

use acns_core::initial::InitialData;
use acns_core::solver::SolverConfig;
use acns_core::tensor4::{Amp, Modulation, Profile};
use acns_core::{PressureLaw, ViscosityTensor};
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Top-level run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Scenario name; prefixes every output file.
    pub scenario: String,
    pub grid: GridSection,
    pub law: LawSection,
    pub viscosity: ViscositySection,
    pub tensor: TensorSection,
    pub initial: InitialData,
    pub solver: SolverSection,
    #[serde(default)]
    pub monitor: MonitorSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Spatial dimension (2 or 3).
    pub d: usize,
    /// Points per axis (power of two, ≥ 4).
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSection {
    /// Pressure coefficient a in P(ρ) = a·ρ^γ.
    pub a: f64,
    /// Adiabatic exponent γ > 1.
    pub gamma: f64,
    /// Reference mean density M > 0.
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscositySection {
    /// Shear viscosity μ > 0.
    pub mu: f64,
    /// Second viscosity λ with μ + λ ≥ 0.
    pub lambda: f64,
}

/// Anisotropic-tensor construction: a named preset or an inline table, plus
/// an optional separable modulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorSection {
    #[serde(flatten)]
    pub preset: TensorPreset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<ModulationSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum TensorPreset {
    /// No anisotropic part.
    Zero,
    /// ε_ijkl = c·δ_ik δ_jl.
    ScaledIdentity { c: f64 },
    /// Full isotropic core with Lamé-like pair (μ̃, λ̃).
    Isotropic { mu_t: f64, lambda_t: f64 },
    /// Seeded random symmetric core with entries in [−amp, amp].
    RandomSymmetric { seed: u64, amp: f64 },
    /// Raw d⁴ coefficient table, row-major over (i,j,k,l).
    Inline { table: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSection {
    pub amp: AmpSection,
    pub profile: ProfileSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmpSection {
    Const,
    Sin { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSection {
    Const,
    CosAxis { axis: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Mollification width for single runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// δ list for sweep-delta (non-increasing).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    #[serde(default = "default_cadence")]
    pub cadence_dt: f64,
    #[serde(default = "default_rho_floor")]
    pub rho_floor: f64,
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_cfl() -> f64 {
    0.4
}
fn default_cadence() -> f64 {
    0.0125
}
fn default_rho_floor() -> f64 {
    1e-6
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSection {
    /// Smallness factor η of hypothesis (H4).
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Initial-data budget c₀.
    #[serde(default = "default_one")]
    pub c0: f64,
    /// Bootstrap constant C̃.
    #[serde(default = "default_one")]
    pub c_tilde: f64,
}

fn default_eta() -> f64 {
    0.1
}
fn default_one() -> f64 {
    1.0
}

impl Default for MonitorSection {
    fn default() -> Self {
        Self { eta: default_eta(), c0: default_one(), c_tilde: default_one() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; overridable by --out and the OUTPUT_DIR variable.
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

fn default_out_dir() -> String {
    "out".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_out_dir() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Start of the time window of the Cauchy norm ‖·‖_{L²((t0,T)×T^d)}.
    #[serde(default = "default_sweep_t0")]
    pub t0: f64,
}

fn default_sweep_t0() -> f64 {
    0.25
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { t0: default_sweep_t0() }
    }
}

impl RunConfig {
    /// Parses a config file with key/line context on errors.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: RunConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    /// Cross-field validation beyond what the library constructors enforce.
    pub fn validate(&self) -> Result<()> {
        if self.scenario.is_empty()
            || !self.scenario.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            bail!("scenario name {:?} must be a nonempty [A-Za-z0-9_-]+ token", self.scenario);
        }
        self.law()?;
        self.tensor()?;
        if let Some(delta) = self.solver.delta {
            self.solver_config(delta)?.validate()?;
        }
        if let Some(deltas) = &self.solver.deltas {
            if deltas.len() < 2 {
                bail!("solver.deltas needs at least two values for a sweep");
            }
            for pair in deltas.windows(2) {
                if pair[1] > pair[0] {
                    bail!("solver.deltas must be non-increasing, got {:?}", deltas);
                }
            }
            for &delta in deltas {
                self.solver_config(delta)?.validate()?;
            }
            if !(0.0 <= self.sweep.t0 && self.sweep.t0 < self.solver.t_end) {
                bail!(
                    "sweep.t0 = {} must lie in [0, t_end = {})",
                    self.sweep.t0,
                    self.solver.t_end
                );
            }
        }
        if self.solver.delta.is_none() && self.solver.deltas.is_none() {
            bail!("set solver.delta (single run) or solver.deltas (sweep)");
        }
        if !(self.monitor.eta > 0.0) {
            bail!("monitor.eta = {} must be > 0", self.monitor.eta);
        }
        if !(self.monitor.c0 > 0.0 && self.monitor.c_tilde > 0.0) {
            bail!("monitor.c0 and monitor.c_tilde must be > 0");
        }
        Ok(())
    }

    /// Pressure law object.
    pub fn law(&self) -> Result<PressureLaw> {
        let law = PressureLaw::new(self.law.a, self.law.gamma, self.law.m)?;
        law.validate_for_dimension(self.grid.d)?;
        Ok(law)
    }

    /// Viscosity tensor object (core preset plus modulation).
    pub fn tensor(&self) -> Result<ViscosityTensor> {
        let d = self.grid.d;
        let mu = self.viscosity.mu;
        let lambda = self.viscosity.lambda;
        let base = match &self.tensor.preset {
            TensorPreset::Zero => ViscosityTensor::zero(d, mu, lambda)?,
            TensorPreset::ScaledIdentity { c } => {
                ViscosityTensor::scaled_identity(d, mu, lambda, *c)?
            }
            TensorPreset::Isotropic { mu_t, lambda_t } => {
                ViscosityTensor::isotropic(d, mu, lambda, *mu_t, *lambda_t)?
            }
            TensorPreset::RandomSymmetric { seed, amp } => {
                ViscosityTensor::random_symmetric(d, mu, lambda, *seed, *amp)?
            }
            TensorPreset::Inline { table } => {
                ViscosityTensor::new(mu, lambda, d, table.clone(), None)?
            }
        };
        let modulation = self.tensor.modulation.map(|m| Modulation {
            amp: match m.amp {
                AmpSection::Const => Amp::Const,
                AmpSection::Sin { omega } => Amp::Sin { omega },
            },
            profile: match m.profile {
                ProfileSection::Const => Profile::Const,
                ProfileSection::CosAxis { axis } => Profile::CosAxis { axis },
            },
        });
        // Re-validate through the constructor so modulation axes are checked.
        Ok(ViscosityTensor::new(
            base.mu(),
            base.lambda(),
            base.d(),
            base.eps_core().to_vec(),
            modulation,
        )?)
    }

    /// Library solver configuration at the given mollification width.
    pub fn solver_config(&self, delta: f64) -> Result<SolverConfig> {
        let config = SolverConfig {
            d: self.grid.d,
            n: self.grid.n,
            delta,
            cfl: self.solver.cfl,
            t_end: self.solver.t_end,
            rho_floor: self.solver.rho_floor,
            dealias: self.solver.dealias,
            cadence_dt: self.solver.cadence_dt,
            store_velocity: false,
        };
        config.validate()?;
        Ok(config)
    }

    /// The single-run mollification width.
    pub fn single_delta(&self) -> Result<f64> {
        self.solver
            .delta
            .ok_or_else(|| anyhow::anyhow!("this command needs solver.delta (single width)"))
    }

    /// The sweep widths.
    pub fn sweep_deltas(&self) -> Result<&[f64]> {
        self.solver
            .deltas
            .as_deref()
            .ok_or_else(|| anyhow::anyhow!("this command needs solver.deltas (a sweep list)"))
    }
}
