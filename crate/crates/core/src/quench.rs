//! Linear-field pi pulse that swaps the two stable states.
//!
//! During `t0 < t < t0 + delta` the field `mu l` with `mu = pi / delta` is
//! added to the diagonal. Its time integral is `pi l`, so in the hard-pulse
//! limit the drive acts as `exp(-i pi l) = (-1)^l`, the parity operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{apply_parity, build_hamiltonian, ChainParams, Hamiltonian, SiteState};
use crate::dynamics::{
    auto_step, mesh_steps, propagate_from, Evolved, IntegratorConfig, ObservableSeries, StablePair,
};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_PULSE_DURATION: f64 = 0.02;
/// Pulse-window steps per duration `delta`, before any stability reduction.
pub const DEFAULT_PULSE_STEPS: usize = 400;
/// Coarsest allowed pulse-window resolution.
pub const MIN_PULSE_STEPS: usize = 200;
/// Below this hardness ratio the impulse approximation is reported as
/// questionable.
pub const HARDNESS_WARN: f64 = 10.0;
/// Below this ratio a validated switch is refused.
pub const HARDNESS_REJECT: f64 = 2.0;

/// Rectangular pulse of duration `delta` and amplitude `pi / delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    delta: f64,
    start: f64,
}

impl PulseSchedule {
    pub fn new(delta: f64, start: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid("delta", format!("must be finite and > 0, got {delta}")));
        }
        if !start.is_finite() || start < 0.0 {
            return Err(invalid("start", format!("must be finite and >= 0, got {start}")));
        }
        Ok(Self { delta, start })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.delta
    }

    /// `mu = pi / delta`.
    pub fn amplitude(&self) -> f64 {
        PI / self.delta
    }

    /// `mu / max(2J, V M^2)`.
    pub fn hardness_ratio(&self, params: &ChainParams) -> f64 {
        let scale = (2.0 * params.hopping()).max(params.potential() * (params.half_width() as f64).powi(2));
        self.amplitude() / scale
    }
}

/// `mu(t)`: `pi / delta` strictly inside the window, zero elsewhere.
pub fn pulse_amplitude(t: f64, sched: &PulseSchedule) -> f64 {
    if t > sched.start && t < sched.end() {
        sched.amplitude()
    } else {
        0.0
    }
}

/// `H + mu(t) sum_l l |l><l|`.
pub fn quenched_hamiltonian(h: &Hamiltonian, t: f64, sched: &PulseSchedule) -> Hamiltonian {
    let mu = pulse_amplitude(t, sched);
    if mu == 0.0 {
        return h.clone();
    }
    h.with_diagonal_shift(|l| Complex64::new(mu * l as f64, 0.0))
}

/// Hard-pulse limit of the drive: exactly the parity operator.
pub fn impulse_parity(state: &SiteState) -> SiteState {
    apply_parity(state)
}

/// Finite drive or its instantaneous-parity limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseMode {
    #[default]
    Finite,
    Impulse,
}

/// Which stable state the protocol starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoLevel {
    #[serde(rename = "g")]
    Ground,
    #[serde(rename = "e")]
    Excited,
}

#[derive(Debug, Clone)]
pub struct QuenchPlan {
    pub params: ChainParams,
    pub schedule: PulseSchedule,
    /// Free evolution after the pulse, in units of `1/J`.
    pub relax_time: f64,
    pub integrator: IntegratorConfig,
    /// Step inside the pulse window; defaults to `delta / 400`, reduced for
    /// stability, never coarser than `delta / 200`.
    pub pulse_dt: Option<f64>,
    pub mode: PulseMode,
    /// Refuse pulses softer than `HARDNESS_REJECT`.
    pub validated: bool,
}

impl QuenchPlan {
    pub fn new(params: ChainParams, schedule: PulseSchedule, relax_time: f64) -> Self {
        Self {
            integrator: IntegratorConfig::for_params(&params),
            params,
            schedule,
            relax_time,
            pulse_dt: None,
            mode: PulseMode::Finite,
            validated: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relax_time >= 0.0 && self.relax_time.is_finite()) {
            return Err(invalid("t_relax", format!("must be finite and >= 0, got {}", self.relax_time)));
        }
        let ratio = self.schedule.hardness_ratio(&self.params);
        if self.validated && ratio < HARDNESS_REJECT {
            return Err(Error::SoftPulse {
                ratio,
                limit: HARDNESS_REJECT,
            });
        }
        if ratio < HARDNESS_WARN {
            log::warn!("pulse hardness ratio {ratio:.2} is below {HARDNESS_WARN}; the impulse picture is not reliable");
        }
        if let Some(dt) = self.pulse_dt {
            if !(dt > 0.0) || dt > self.schedule.delta() / MIN_PULSE_STEPS as f64 {
                return Err(invalid(
                    "pulse_dt",
                    format!("must be in (0, delta/{MIN_PULSE_STEPS}], got {dt}"),
                ));
            }
        }
        Ok(())
    }

    /// Step used inside the pulse window, aligned so that a whole number of
    /// steps spans `delta`.
    pub fn window_step(&self, pulsed: &Hamiltonian) -> f64 {
        let delta = self.schedule.delta();
        let requested = self.pulse_dt.unwrap_or(delta / DEFAULT_PULSE_STEPS as f64);
        let stable = auto_step(pulsed.spectral_radius_estimate(), self.integrator.error_budget);
        let dt = requested.min(stable);
        delta / mesh_steps(delta, dt) as f64
    }

    pub fn end_time(&self) -> f64 {
        self.schedule.end() + self.relax_time
    }
}

/// Parameters of a switch run, written next to its CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwitchReport {
    pub initial: TwoLevel,
    pub mode: PulseMode,
    pub params: ChainParams,
    pub delta: f64,
    pub amplitude: f64,
    pub start: f64,
    pub relax_time: f64,
    pub hardness_ratio: f64,
    pub dt: f64,
    pub pulse_dt: f64,
    pub final_f_g: f64,
    pub final_f_e: f64,
}

#[derive(Debug, Clone)]
pub struct SwitchOutcome {
    pub series: ObservableSeries,
    pub final_state: SiteState,
    pub report: SwitchReport,
}

/// Runs the pulse protocol from `|g>` or `|e>` and records `F_g(t)`,
/// `F_e(t)`.
pub fn run_switch_experiment(
    plan: &QuenchPlan,
    initial: TwoLevel,
    pair: &StablePair,
) -> Result<SwitchOutcome> {
    plan.validate()?;
    let h = build_hamiltonian(&plan.params);
    let sched = plan.schedule;
    let mut series = pair.series()?;
    let start_state = match initial {
        TwoLevel::Ground => pair.ground.clone(),
        TwoLevel::Excited => pair.excited.clone(),
    };

    let mut cur = Evolved::start(start_state, 0.0);
    cur = propagate_from(&h, cur, sched.start(), &plan.integrator, Some(&mut series))?;

    let pulsed = quenched_hamiltonian(&h, sched.start() + 0.5 * sched.delta(), &sched);
    let window_dt = plan.window_step(&pulsed);
    cur = match plan.mode {
        PulseMode::Finite => {
            let cfg = IntegratorConfig {
                dt: window_dt,
                ..plan.integrator.clone()
            };
            propagate_from(&pulsed, cur, sched.end(), &cfg, Some(&mut series))?
        }
        PulseMode::Impulse => {
            let flipped = Evolved {
                state: impulse_parity(&cur.state),
                ..cur
            };
            propagate_from(&h, flipped, sched.end(), &plan.integrator, Some(&mut series))?
        }
    };
    cur = propagate_from(&h, cur, plan.end_time(), &plan.integrator, Some(&mut series))?;

    let report = SwitchReport {
        initial,
        mode: plan.mode,
        params: plan.params,
        delta: sched.delta(),
        amplitude: sched.amplitude(),
        start: sched.start(),
        relax_time: plan.relax_time,
        hardness_ratio: sched.hardness_ratio(&plan.params),
        dt: plan.integrator.dt,
        pulse_dt: window_dt,
        final_f_g: series.final_fidelity("g").unwrap_or(f64::NAN),
        final_f_e: series.final_fidelity("e").unwrap_or(f64::NAN),
    };
    Ok(SwitchOutcome {
        final_state: cur.physical(),
        series,
        report,
    })
}
