//! Run configuration. Files are TOML: top-level keys plus `[grid]`,
//! `[operator]`, `[nonlinearity]`, `[solver]`, `[norms]`, `[data]` and
//! `[sweep]` tables. Every key is optional in a file; missing keys take the
//! defaults below and unknown keys are rejected.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use polyheat::GridSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    KernelProfile,
    VerifySmoothing,
    Norm,
    Rearrange,
    Witness,
    Solve,
    SplitSolve,
    Decay,
    CertifyLog,
    VerifyGamma,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::KernelProfile => "kernel-profile",
            Command::VerifySmoothing => "verify-smoothing",
            Command::Norm => "norm",
            Command::Rearrange => "rearrange",
            Command::Witness => "witness",
            Command::Solve => "solve",
            Command::SplitSolve => "split-solve",
            Command::Decay => "decay",
            Command::CertifyLog => "certify-log",
            Command::VerifyGamma => "verify-gamma",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// empty means `runs/<command>`
    pub output_dir: PathBuf,
    pub seed: u64,
    pub grid: GridConfig,
    pub operator: OperatorConfig,
    pub nonlinearity: NonlinearityConfig,
    pub solver: SolverSection,
    pub norms: NormsConfig,
    pub data: DataConfig,
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub dimension: usize,
    pub points: usize,
    pub box_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorConfig {
    pub d: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearityConfig {
    pub m: f64,
    pub lambda: f64,
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub horizon: f64,
    pub steps: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub eps: f64,
    /// "weighted" (t^σ‖·‖_p with the first tracked p) or "expl2"
    pub metric: String,
    pub dealias: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsConfig {
    /// tracked Lebesgue exponents; the first one drives the metric and decay fit
    pub p: Vec<f64>,
    /// Young function for `norm`: "expl2", "phi8" or "lp:<p>"
    pub phi: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// field file written by `write_binary`; overrides the generated datum
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// sup amplitude of the centered bump datum
    pub amp: f64,
    /// support radius of the bump datum
    pub width: f64,
    /// witness kind: "orl-leb-i", "orl-leb-ii", "orl-leb-iii:<r>" or "discontinuity"
    pub witness: String,
    /// scale α of the membership scan
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// random fields in the smoothing corpus
    pub fields: usize,
    /// sample times per sweep
    pub times: usize,
    pub t_min: f64,
    pub t_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_end: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Solve,
            output_dir: PathBuf::new(),
            seed: 0,
            grid: GridConfig::default(),
            operator: OperatorConfig::default(),
            nonlinearity: NonlinearityConfig::default(),
            solver: SolverSection::default(),
            norms: NormsConfig::default(),
            data: DataConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            dimension: 1,
            points: 4096,
            box_length: 128.0,
        }
    }
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self { d: 2 }
    }
}

impl Default for NonlinearityConfig {
    fn default() -> Self {
        Self {
            m: 9.0,
            lambda: 1.0,
            sign: 1.0,
        }
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            horizon: 100.0,
            steps: 256,
            tol: 1e-14,
            max_iter: 40,
            eps: 0.01,
            metric: "weighted".into(),
            dealias: true,
        }
    }
}

impl Default for NormsConfig {
    fn default() -> Self {
        Self {
            p: vec![9.0, 2.0],
            phi: "expl2".into(),
        }
    }
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            input: None,
            amp: 0.01,
            width: 2.0,
            witness: "discontinuity".into(),
            alpha: 1.0,
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            fields: 50,
            times: 10,
            t_min: 1e-3,
            t_max: 1e2,
            window_start: None,
            window_end: None,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn resolved_output_dir(&self) -> PathBuf {
        if self.output_dir.as_os_str().is_empty() {
            Path::new("runs").join(self.command.name())
        } else {
            self.output_dir.clone()
        }
    }

    pub fn grid_spec(&self) -> polyheat::Result<GridSpec> {
        GridSpec::new(self.grid.dimension, self.grid.points, self.grid.box_length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_lossless() {
        let mut c = RunConfig::default();
        c.command = Command::VerifySmoothing;
        c.norms.p = vec![1.0, f64::INFINITY, 4.5];
        c.data.input = Some("field.bin".into());
        c.sweep.window_start = Some(12.5);
        c.solver.tol = 1.234_567_890_123e-13;
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_files_take_defaults() {
        let c = RunConfig::from_toml("command = \"decay\"\n[nonlinearity]\nm = 5\n").unwrap();
        assert_eq!(c.command, Command::Decay);
        assert_eq!(c.nonlinearity.m, 5.0);
        assert_eq!(c.grid, GridConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("colour = 3\n").is_err());
        assert!(RunConfig::from_toml("[solver]\nstep = 3\n").is_err());
    }
}
