//! Fixed-step time evolution of `i d/dt Phi = H Phi`.
//!
//! The explicit method is classical RK4 with `H` held constant over each
//! step; time-dependent drives are handled by the caller splitting the run
//! into segments whose edges fall on mesh points.

use std::sync::Arc;

use num_complex::Complex64;

use super::expansion::expansion_coefficients;
use super::observables::ObservableSeries;
use crate::chain::{ChainParams, Hamiltonian, SiteState};
use crate::error::{invalid, Error, Result};
use crate::spectral::Spectrum;

/// Upper bound on `dt * spectral_radius_estimate` for the explicit method.
pub const STABILITY_LIMIT: f64 = 0.5;
pub const DEFAULT_DT: f64 = 0.02;
pub const DEFAULT_ERROR_BUDGET: f64 = 1e-6;
const UNDERFLOW_NORM: f64 = 1e-150;

#[derive(Debug, Clone)]
pub enum Method {
    /// Fourth-order Runge-Kutta on a uniform mesh.
    Rk4,
    /// Exact evolution in a complete biorthonormal eigenbasis.
    EigenExpansion(Arc<Spectrum>),
}

#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub method: Method,
    /// Time between recorded samples. The step is shortened so that every
    /// sample falls on the mesh.
    pub sample_interval: f64,
    /// Bound on the RK4 local error estimate `(rho dt)^5 / 120`.
    pub error_budget: f64,
}

impl IntegratorConfig {
    pub fn rk4(dt: f64) -> Self {
        Self {
            dt,
            method: Method::Rk4,
            sample_interval: 1.0,
            error_budget: DEFAULT_ERROR_BUDGET,
        }
    }

    /// Default step for a chain: `DEFAULT_DT`, reduced until both the
    /// stability and local-error bounds hold.
    pub fn for_params(params: &ChainParams) -> Self {
        Self::rk4(auto_step(params.spectral_radius_estimate(), DEFAULT_ERROR_BUDGET))
    }

    pub fn with_sample_interval(mut self, interval: f64) -> Self {
        self.sample_interval = interval;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// Checks the step against `h`. The eigen-expansion method has no step
    /// restriction.
    pub fn validate(&self, h: &Hamiltonian) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if !(self.sample_interval > 0.0) {
            return Err(invalid("sample_interval", "must be > 0"));
        }
        if let Method::Rk4 = self.method {
            let product = self.dt * h.spectral_radius_estimate();
            if product > STABILITY_LIMIT {
                return Err(Error::StepSize {
                    dt: self.dt,
                    product,
                    limit: STABILITY_LIMIT,
                });
            }
            if product.powi(5) / 120.0 > self.error_budget * (1.0 + 1e-9) {
                return Err(invalid(
                    "dt",
                    format!(
                        "local error estimate {:.2e} exceeds budget {:.1e}",
                        product.powi(5) / 120.0,
                        self.error_budget
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Largest step not above `DEFAULT_DT` satisfying both bounds for a given
/// spectral radius.
pub fn auto_step(spectral_radius: f64, error_budget: f64) -> f64 {
    let by_error = (120.0 * error_budget).powf(0.2);
    DEFAULT_DT.min(STABILITY_LIMIT.min(by_error) / spectral_radius)
}

/// A propagated state; the physical amplitudes are `state * exp(log_scale)`.
#[derive(Debug, Clone)]
pub struct Evolved {
    pub state: SiteState,
    pub log_scale: f64,
    pub time: f64,
}

impl Evolved {
    pub fn start(state: SiteState, time: f64) -> Self {
        Self {
            state,
            log_scale: 0.0,
            time,
        }
    }

    /// The physical state, which may underflow for very long runs.
    pub fn physical(&self) -> SiteState {
        if self.log_scale == 0.0 {
            self.state.clone()
        } else {
            self.state.scaled(self.log_scale.exp().into())
        }
    }
}

/// Number of uniform steps covering `span` with a step no larger than `dt`.
pub fn mesh_steps(span: f64, dt: f64) -> usize {
    ((span / dt) - 1e-9).ceil().max(1.0) as usize
}

/// Propagates `state` under the constant Hamiltonian `h` over
/// `[t_start, t_end]`, returning the raw (not renormalized) state and
/// recording samples into `series` on the uniform mesh.
pub fn propagate(
    h: &Hamiltonian,
    state: &SiteState,
    t_span: (f64, f64),
    config: &IntegratorConfig,
    series: Option<&mut ObservableSeries>,
) -> Result<SiteState> {
    let out = propagate_from(h, Evolved::start(state.clone(), t_span.0), t_span.1, config, series)?;
    Ok(out.physical())
}

/// As [`propagate`], continuing from an already evolved state so that runs
/// can be chained across Hamiltonian segments.
pub fn propagate_from(
    h: &Hamiltonian,
    start: Evolved,
    t_end: f64,
    config: &IntegratorConfig,
    mut series: Option<&mut ObservableSeries>,
) -> Result<Evolved> {
    if start.state.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: start.state.len(),
        });
    }
    let t0 = start.time;
    if !(t_end >= t0) {
        return Err(invalid("t_span", format!("end {t_end} precedes start {t0}")));
    }
    config.validate(h)?;
    if let Some(s) = series.as_deref_mut() {
        s.record(t0, &start.state, start.log_scale)?;
    }
    if t_end == t0 {
        return Ok(start);
    }

    let blocks = sample_blocks(t_end - t0, config.sample_interval, config.dt);
    // block j ends at t0 + (j + 1) * interval, the last one at t_end exactly
    let block_end = |j: usize| {
        if j + 1 == blocks.len() {
            t_end
        } else {
            t0 + (j + 1) as f64 * config.sample_interval
        }
    };

    match &config.method {
        Method::Rk4 => {
            let mut cur = start;
            let mut stepper = Rk4::new(h.dim());
            let mut block_start = t0;
            for (j, &(steps, dt)) in blocks.iter().enumerate() {
                for k in 1..=steps {
                    stepper.step(h, cur.state.amplitudes_mut(), dt);
                    let t = if k == steps { block_end(j) } else { block_start + k as f64 * dt };
                    let n2 = cur.state.norm_sqr();
                    if !n2.is_finite() {
                        return Err(Error::NumericBreakdown { time: t });
                    }
                    if n2 > 0.0 && n2 < UNDERFLOW_NORM * UNDERFLOW_NORM {
                        let n = n2.sqrt();
                        cur.state = cur.state.scaled((1.0 / n).into());
                        cur.log_scale += n.ln();
                    }
                    cur.time = t;
                }
                block_start = block_end(j);
                if let Some(s) = series.as_deref_mut() {
                    s.record(block_start, &cur.state, cur.log_scale)?;
                }
            }
            Ok(cur)
        }
        Method::EigenExpansion(spec) => {
            let physical = start.physical();
            let coeffs = expansion_coefficients(&physical, spec)?;
            if let Some(s) = series.as_deref_mut() {
                for j in 0..blocks.len() - 1 {
                    let t = block_end(j);
                    s.record(t, &coeffs.evolve(spec, t - t0)?, 0.0)?;
                }
            }
            let state = coeffs.evolve(spec, t_end - t0)?.with_label(physical.label);
            if let Some(s) = series {
                s.record(t_end, &state, 0.0)?;
            }
            Ok(Evolved::start(state, t_end))
        }
    }
}

/// Splits `span` into sample intervals, each covered by a whole number of
/// equal steps no longer than `dt`, plus a final partial interval if `span`
/// is not a multiple of `interval`. Returns `(steps, step)` per block.
pub fn sample_blocks(span: f64, interval: f64, dt: f64) -> Vec<(usize, f64)> {
    let full = ((span / interval) * (1.0 + 1e-12)).floor() as usize;
    let per = mesh_steps(interval, dt);
    let mut blocks = vec![(per, interval / per as f64); full];
    let rest = span - full as f64 * interval;
    if rest > 1e-9 * interval || full == 0 {
        let n = mesh_steps(rest, dt);
        blocks.push((n, rest / n as f64));
    }
    blocks
}

/// Scratch buffers for one RK4 step of `dpsi/dt = -i H psi`.
struct Rk4 {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    fn deriv(h: &Hamiltonian, x: &[Complex64], out: &mut [Complex64]) {
        h.apply_into(x, out);
        for o in out.iter_mut() {
            // -i * o
            *o = Complex64::new(o.im, -o.re);
        }
    }

    fn step(&mut self, h: &Hamiltonian, psi: &mut [Complex64], dt: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        Self::deriv(h, psi, k1);
        for (t, (p, d)) in self.tmp.iter_mut().zip(psi.iter().zip(k1.iter())) {
            *t = p + d * (0.5 * dt);
        }
        Self::deriv(h, &self.tmp, k2);
        for (t, (p, d)) in self.tmp.iter_mut().zip(psi.iter().zip(k2.iter())) {
            *t = p + d * (0.5 * dt);
        }
        Self::deriv(h, &self.tmp, k3);
        for (t, (p, d)) in self.tmp.iter_mut().zip(psi.iter().zip(k3.iter())) {
            *t = p + d * dt;
        }
        Self::deriv(h, &self.tmp, k4);
        let w = dt / 6.0;
        for i in 0..psi.len() {
            psi[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * w;
        }
    }
}
