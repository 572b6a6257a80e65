//! TOML run configuration. Every section is optional and defaults are
//! written back into the run manifest, so a manifest suffices to rerun.

use serde::{Deserialize, Serialize};

use crate::background::{
    make_minkowski_on, make_perturbed_axisymmetric, make_schwarzschild_on, NullConeModel, Perturbation,
};
use crate::base::{BaseGrid, GridMode};
use crate::error::{Error, Result};
use crate::flow::{FlowOptions, Prescription, Rho, RhoProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Flow,
    Foliate,
    Stability,
    Barriers,
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Flow => "flow",
            Command::Foliate => "foliate",
            Command::Stability => "stability",
            Command::Barriers => "barriers",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Minkowski,
    Schwarzschild,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub family: Family,
    /// Dimension of the cross-sections (Schwarzschild requires 2).
    pub dim: usize,
    pub mass: f64,
    pub r0: f64,
    /// Affine extent `Λ` of the cone.
    pub extent: f64,
    pub perturbation: Option<Perturbation>,
    /// Angular resolution of the perturbed model's expansion tables.
    pub table_n_theta: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            family: Family::Schwarzschild,
            dim: 2,
            mass: 1.0,
            r0: 2.0,
            extent: NullConeModel::DEFAULT_LAMBDA,
            perturbation: None,
            table_n_theta: BaseGrid::DEFAULT_N_THETA,
        }
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<NullConeModel> {
        let base = match self.family {
            Family::Minkowski => make_minkowski_on(self.dim, self.r0, self.extent)?,
            Family::Schwarzschild => {
                if self.dim != 2 {
                    return Err(Error::Config(format!("schwarzschild needs dim = 2, got {}", self.dim)));
                }
                make_schwarzschild_on(self.mass, self.r0, self.extent)?
            }
        };
        match self.perturbation {
            Some(p) => make_perturbed_axisymmetric(&base, p, self.table_n_theta),
            None => Ok(base),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub mode: GridMode,
    pub n_theta: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            mode: GridMode::Symmetric,
            n_theta: BaseGrid::DEFAULT_N_THETA,
        }
    }
}

impl GridConfig {
    pub fn build(&self, dim: usize) -> Result<BaseGrid> {
        match self.mode {
            GridMode::Symmetric => BaseGrid::symmetric(dim),
            GridMode::Axisymmetric => BaseGrid::axisymmetric(dim, self.n_theta),
        }
    }
}

/// Initial graph `ω₀ = s0 + amp cos ϑ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    pub s0: f64,
    pub amp: f64,
}

impl Default for InitialData {
    fn default() -> Self {
        Self { s0: 1.0, amp: 0.0 }
    }
}

impl InitialData {
    pub fn sample(&self, grid: &BaseGrid) -> Vec<f64> {
        grid.sample(|t| self.s0 + self.amp * t.cos())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSection {
    /// STCMC prescription `|H⃗|² = lambda`.
    pub lambda: Option<f64>,
    /// Prescribed density; exclusive with `lambda`.
    pub rho: Option<RhoProfile>,
    pub initial: InitialData,
    pub options: FlowOptions,
}

impl Default for FlowSection {
    fn default() -> Self {
        Self {
            lambda: None,
            rho: None,
            initial: InitialData::default(),
            options: FlowOptions::default(),
        }
    }
}

impl FlowSection {
    pub fn prescription(&self) -> Result<Prescription> {
        match (self.lambda, self.rho) {
            (Some(l), None) => Prescription::stcmc(l),
            (None, Some(r)) => Ok(Prescription::Prescribed(Rho::Profile(r))),
            _ => Err(Error::Config("flow needs exactly one of lambda and rho".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoliateSection {
    pub lambda_max: f64,
    pub dlambda: f64,
    /// Height of the MOTS slice; defaults to `r = 2M` for Schwarzschild and
    /// `s = 0` otherwise.
    pub mots_s: Option<f64>,
    pub flow_tol: f64,
    pub blowup_threshold: f64,
    /// Random restarts per interior leaf.
    pub restarts: usize,
    pub agreement: f64,
}

impl Default for FoliateSection {
    fn default() -> Self {
        Self {
            lambda_max: 1.0,
            dlambda: 1.0 / 540.0,
            mots_s: None,
            flow_tol: 1e-11,
            blowup_threshold: 1e6,
            restarts: 3,
            agreement: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilitySection {
    /// Coordinate slice to analyze.
    pub s: f64,
    /// Flow from the slice to the `lambda`-STCMC leaf first.
    pub lambda: Option<f64>,
    pub stcmc_tol: f64,
    pub threshold: f64,
}

impl Default for StabilitySection {
    fn default() -> Self {
        Self {
            s: 0.5,
            lambda: None,
            stcmc_tol: 1e-8,
            threshold: crate::stability::DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsSource {
    /// Sampled from the model over `[0, interval.1]`.
    Model,
    /// `c_r`, `c_chi`, `d_c` as given.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BarriersSection {
    pub constants: ConstantsSource,
    pub dim: Option<usize>,
    pub c_r: f64,
    pub c_chi: f64,
    pub d_c: f64,
    pub interval: (f64, f64),
    pub delta: Option<f64>,
    pub eta: Option<f64>,
    pub samples: usize,
    /// Fail with a hypothesis violation instead of reporting it.
    pub strict: bool,
    /// Monitor the key inequality along a flow with this STCMC value.
    pub monitor_lambda: Option<f64>,
    pub monitor_initial: InitialData,
}

impl Default for BarriersSection {
    fn default() -> Self {
        Self {
            constants: ConstantsSource::Model,
            dim: None,
            c_r: 0.0,
            c_chi: 0.0,
            d_c: 0.0,
            interval: (0.0, 5.0),
            delta: None,
            eta: None,
            samples: 200,
            strict: true,
            monitor_lambda: None,
            monitor_initial: InitialData::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub steps: Vec<f64>,
    pub n_theta: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            steps: vec![0.2, 0.1, 0.05, 0.025],
            n_theta: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    /// Run directory below the output root; defaults to the command name.
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub foliate: FoliateSection,
    #[serde(default)]
    pub stability: StabilitySection,
    #[serde(default)]
    pub barriers: BarriersSection,
    #[serde(default)]
    pub verify: VerifySection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn run_dir_name(&self) -> String {
        self.output_dir.clone().unwrap_or_else(|| self.command.name().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::parse("command = \"flow\"").unwrap();
        assert_eq!(c.model.family, Family::Schwarzschild);
        assert!(c.flow.prescription().is_err());
        assert_eq!(c.run_dir_name(), "flow");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [
            "command = \"flow\"\ncolour = 1",
            "command = \"flow\"\n[model]\nmas = 1.0",
            "command = \"flow\"\n[flow.options]\ntoll = 1e-3",
            "command = \"dance\"",
        ] {
            assert!(matches!(RunConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn round_trip() {
        let c = RunConfig::parse(
            "command = \"barriers\"\nseed = 7\n[model]\nfamily = \"minkowski\"\ndim = 3\n[barriers]\ninterval = [0.0, 20.0]",
        )
        .unwrap();
        let again = RunConfig::parse(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn exclusive_prescription() {
        let c = RunConfig::parse("command = \"flow\"\n[flow.rho]\namplitude = 0.1").unwrap();
        assert!(c.flow.prescription().is_ok());
        let c = RunConfig::parse("command = \"flow\"\n[flow]\nlambda = 0.01\n[flow.rho]\namplitude = 0.1").unwrap();
        assert!(c.flow.prescription().is_err());
    }
}
