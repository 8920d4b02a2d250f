//! JSON experiment configs.
//!
//! Parsing is strict: unknown keys are rejected, every numeric field is range
//! checked before anything runs, and the returned config has all defaults
//! filled in so that it can be written back out verbatim.

use std::fmt;
use std::path::PathBuf;

use antipt_core::dynamics::{auto_step, DEFAULT_ERROR_BUDGET, DEFAULT_T_END, STABILITY_LIMIT};
use antipt_core::quench::{
    PulseMode, PulseSchedule, QuenchPlan, DEFAULT_PULSE_DURATION, HARDNESS_REJECT, MIN_PULSE_STEPS,
};
use antipt_core::spectral::DEFAULT_SOLVER_TOL;
use antipt_core::{
    build_hamiltonian, ChainParams, Error as ModelError, InitialProfile, IntegratorConfig,
    TargetSource,
};
use serde::{Deserialize, Serialize};

pub const DEFAULT_HALF_WIDTH: usize = 100;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_LEVELS: usize = 12;
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 1.0;

/// A config problem, carrying the key path it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config key `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Spectrum,
    Convergence,
    Probability,
    Switch,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Probability => "probability",
            ExperimentKind::Switch => "switch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    #[default]
    Rk4,
    /// Exact propagation in the full eigenbasis.
    Eigen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    /// Filled with the automatic step when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub method: MethodKind,
    #[serde(default = "default_sample_interval")]
    pub sample_interval: f64,
    #[serde(default = "default_error_budget")]
    pub error_budget: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            dt: None,
            method: MethodKind::Rk4,
            sample_interval: DEFAULT_SAMPLE_INTERVAL,
            error_budget: DEFAULT_ERROR_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchStart {
    G,
    E,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub start: f64,
    #[serde(default = "default_t_end")]
    pub t_relax: f64,
    #[serde(default)]
    pub mode: PulseMode,
    #[serde(default)]
    pub initial: SwitchStart,
    #[serde(default)]
    pub pulse_dt: Option<f64>,
    #[serde(default)]
    pub validated: bool,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            delta: DEFAULT_PULSE_DURATION,
            start: 0.0,
            t_relax: DEFAULT_T_END,
            mode: PulseMode::Finite,
            initial: SwitchStart::Both,
            pulse_dt: None,
            validated: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(rename = "J")]
    pub hopping: f64,
    #[serde(rename = "V")]
    pub potential: f64,
    #[serde(rename = "M", default = "default_half_width")]
    pub half_width: usize,
    /// Derived from `J` and `V`; a supplied value must agree with them.
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default = "default_solver_tol")]
    pub solver_tol: f64,
    /// Where `|g>` and `|e>` come from.
    #[serde(default)]
    pub targets: TargetSource,
    /// Number of modes in a spectrum run.
    #[serde(default)]
    pub levels: Option<usize>,
    /// Initial profiles of a convergence run.
    #[serde(default)]
    pub initial: Option<Vec<InitialProfile>>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub pulse: Option<PulseSection>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub label: Option<String>,
}

fn default_half_width() -> usize {
    DEFAULT_HALF_WIDTH
}
fn default_tail_tol() -> f64 {
    antipt_core::chain::DEFAULT_TAIL_TOL
}
fn default_solver_tol() -> f64 {
    DEFAULT_SOLVER_TOL
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_sample_interval() -> f64 {
    DEFAULT_SAMPLE_INTERVAL
}
fn default_error_budget() -> f64 {
    DEFAULT_ERROR_BUDGET
}
fn default_delta() -> f64 {
    DEFAULT_PULSE_DURATION
}
fn default_t_end() -> f64 {
    DEFAULT_T_END
}

/// Parses and resolves a JSON config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::at(path, e.into_inner().to_string())
    })?;
    cfg.resolve()
}

fn positive(path: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::at(path, format!("must be finite and > 0, got {x}")))
    }
}

fn model_error(prefix: &str, e: ModelError) -> ConfigError {
    match e {
        ModelError::InvalidParameter { name, reason } => {
            let path = if prefix.is_empty() {
                name.to_string()
            } else {
                format!("{prefix}.{name}")
            };
            ConfigError::at(path, reason)
        }
        other => ConfigError::at(prefix, other.to_string()),
    }
}

impl ExperimentConfig {
    /// A config for `experiment` with every optional field at its default.
    pub fn new(experiment: ExperimentKind, hopping: f64, potential: f64) -> Self {
        Self {
            experiment,
            hopping,
            potential,
            half_width: DEFAULT_HALF_WIDTH,
            omega: None,
            tail_tol: default_tail_tol(),
            solver_tol: DEFAULT_SOLVER_TOL,
            targets: TargetSource::Numeric,
            levels: None,
            initial: None,
            t_end: None,
            integrator: IntegratorSection::default(),
            pulse: None,
            seed: DEFAULT_SEED,
            out: None,
            label: None,
        }
    }

    pub fn chain_params(&self) -> Result<ChainParams, ConfigError> {
        ChainParams::with_tail_tol(self.hopping, self.potential, self.half_width, self.tail_tol)
            .map_err(|e| model_error("", e))
    }

    /// Validates every field and fills in defaults. Idempotent.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        let params = self.chain_params()?;
        if let Some(w) = self.omega {
            if !((w - params.omega()).abs() <= 1e-12 * params.omega()) {
                return Err(ConfigError::at(
                    "omega",
                    format!("{w} disagrees with sqrt(J V / 2) = {}", params.omega()),
                ));
            }
        }
        self.omega = Some(params.omega());
        positive("solver_tol", self.solver_tol)?;
        if let Some(label) = &self.label {
            if label.is_empty() || label.contains(['/', '\\']) {
                return Err(ConfigError::at("label", "must be a non-empty name without path separators"));
            }
        }

        let kind = self.experiment;
        let only_for = |key: &str, allowed: &str| {
            ConfigError::at(key, format!("not used by experiment `{}` (only `{allowed}`)", kind.name()))
        };
        if self.levels.is_some() && kind != ExperimentKind::Spectrum {
            return Err(only_for("levels", "spectrum"));
        }
        if self.initial.is_some() && kind != ExperimentKind::Convergence {
            return Err(only_for("initial", "convergence"));
        }
        if self.pulse.is_some() && kind != ExperimentKind::Switch {
            return Err(only_for("pulse", "switch"));
        }
        if self.t_end.is_some() && !matches!(kind, ExperimentKind::Convergence | ExperimentKind::Probability) {
            return Err(only_for("t_end", "convergence, probability"));
        }

        match kind {
            ExperimentKind::Spectrum => {
                let levels = self.levels.unwrap_or(DEFAULT_LEVELS.min(params.dim()));
                if levels == 0 || levels > params.dim() {
                    return Err(ConfigError::at(
                        "levels",
                        format!("must be in 1..={}, got {levels}", params.dim()),
                    ));
                }
                self.levels = Some(levels);
            }
            ExperimentKind::Convergence => {
                let profiles = self.initial.take().unwrap_or_else(InitialProfile::standard_set);
                if profiles.is_empty() {
                    return Err(ConfigError::at("initial", "needs at least one profile"));
                }
                for (i, p) in profiles.iter().enumerate() {
                    p.validate(&params).map_err(|e| model_error(&format!("initial[{i}]"), e))?;
                }
                self.initial = Some(profiles);
            }
            ExperimentKind::Probability => {}
            ExperimentKind::Switch => {
                self.pulse.get_or_insert_with(PulseSection::default);
            }
        }
        if matches!(kind, ExperimentKind::Convergence | ExperimentKind::Probability) {
            let t_end = self.t_end.unwrap_or(DEFAULT_T_END);
            positive("t_end", t_end)?;
            self.t_end = Some(t_end);
        }

        let ig = &mut self.integrator;
        positive("integrator.sample_interval", ig.sample_interval)?;
        positive("integrator.error_budget", ig.error_budget)?;
        if let Some(dt) = ig.dt {
            positive("integrator.dt", dt)?;
        }
        if kind != ExperimentKind::Spectrum {
            let h = build_hamiltonian(&params);
            let dt = ig
                .dt
                .unwrap_or_else(|| auto_step(params.spectral_radius_estimate(), ig.error_budget));
            ig.dt = Some(dt);
            let check = IntegratorConfig {
                error_budget: ig.error_budget,
                ..IntegratorConfig::rk4(dt)
            };
            if ig.method == MethodKind::Rk4 {
                check.validate(&h).map_err(|e| match e {
                    ModelError::StepSize { product, .. } => ConfigError::at(
                        "integrator.dt",
                        format!(
                            "dt * spectral radius = {product:.3} exceeds {STABILITY_LIMIT}; use dt <= {:.3e}",
                            STABILITY_LIMIT / h.spectral_radius_estimate()
                        ),
                    ),
                    other => model_error("integrator", other),
                })?;
            }
        }

        if let Some(pulse) = &self.pulse {
            positive("pulse.delta", pulse.delta)?;
            if !(pulse.start.is_finite() && pulse.start >= 0.0) {
                return Err(ConfigError::at("pulse.start", format!("must be finite and >= 0, got {}", pulse.start)));
            }
            if !(pulse.t_relax.is_finite() && pulse.t_relax >= 0.0) {
                return Err(ConfigError::at(
                    "pulse.t_relax",
                    format!("must be finite and >= 0, got {}", pulse.t_relax),
                ));
            }
            if let Some(pdt) = pulse.pulse_dt {
                if !(pdt > 0.0 && pdt <= pulse.delta / MIN_PULSE_STEPS as f64) {
                    return Err(ConfigError::at(
                        "pulse.pulse_dt",
                        format!("must be in (0, delta/{MIN_PULSE_STEPS}], got {pdt}"),
                    ));
                }
            }
            let plan = self.quench_plan_with(&params)?;
            plan.validate().map_err(|e| match e {
                ModelError::SoftPulse { ratio, .. } => ConfigError::at(
                    "pulse.delta",
                    format!("hardness ratio {ratio:.3} is below {HARDNESS_REJECT} for a validated switch"),
                ),
                other => model_error("pulse", other),
            })?;
        }
        Ok(self)
    }

    /// The integrator settings. Only meaningful after [`resolve`](Self::resolve).
    pub fn integrator_config(&self, params: &ChainParams) -> IntegratorConfig {
        let dt = self
            .integrator
            .dt
            .unwrap_or_else(|| auto_step(params.spectral_radius_estimate(), self.integrator.error_budget));
        IntegratorConfig {
            error_budget: self.integrator.error_budget,
            ..IntegratorConfig::rk4(dt).with_sample_interval(self.integrator.sample_interval)
        }
    }

    fn quench_plan_with(&self, params: &ChainParams) -> Result<QuenchPlan, ConfigError> {
        let pulse = self.pulse.clone().unwrap_or_default();
        let sched = PulseSchedule::new(pulse.delta, pulse.start).map_err(|e| model_error("pulse", e))?;
        let mut plan = QuenchPlan::new(*params, sched, pulse.t_relax);
        plan.integrator = self.integrator_config(params);
        plan.pulse_dt = pulse.pulse_dt;
        plan.mode = pulse.mode;
        plan.validated = pulse.validated;
        Ok(plan)
    }

    pub fn quench_plan(&self) -> Result<QuenchPlan, ConfigError> {
        self.quench_plan_with(&self.chain_params()?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
