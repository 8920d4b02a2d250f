//! Dissipative time evolution, initial-state families, and the fidelity and
//! probability observables.

mod expansion;
mod initial;
mod integrator;
mod observables;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use expansion::{expansion_coefficients, ExpansionCoefficients};
pub use initial::{make_initial_state, InitialProfile};
pub use integrator::{
    auto_step, mesh_steps, propagate, propagate_from, sample_blocks, Evolved, IntegratorConfig, Method,
    DEFAULT_DT, DEFAULT_ERROR_BUDGET, STABILITY_LIMIT,
};
pub use observables::{dirac_probability, fidelity, ObservableSeries};

use crate::chain::{build_hamiltonian, ChainParams, SiteState};
use crate::error::Result;
use crate::spectral::{analytic_wavefunction, numeric_spectrum, Branch, Spectrum};

/// Default duration of the convergence and switch runs, in units of `1/J`.
pub const DEFAULT_T_END: f64 = 600.0;

/// Where the stable states `|g>` and `|e>` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetSource {
    /// Exact diagonalization of the truncated chain.
    #[default]
    Numeric,
    /// Dirac-normalized samples of the Hermite-Gaussian closed form.
    Analytic,
}

/// Dirac-normalized ground and excited states of the two-level system.
#[derive(Debug, Clone)]
pub struct StablePair {
    pub ground: SiteState,
    pub excited: SiteState,
    pub ground_energy: Complex64,
    pub excited_energy: Complex64,
    /// The diagonalization that produced them, for the numeric source.
    pub spectrum: Option<Spectrum>,
}

impl StablePair {
    pub fn new(params: &ChainParams, source: TargetSource, tol: f64) -> Result<Self> {
        match source {
            TargetSource::Numeric => {
                let spec = numeric_spectrum(&build_hamiltonian(params), 2, tol)?;
                let (g, e) = spec.stable_pair()?;
                Ok(Self {
                    ground: g.right.normalized()?.with_label("g"),
                    excited: e.right.normalized()?.with_label("e"),
                    ground_energy: g.energy,
                    excited_energy: e.energy,
                    spectrum: Some(spec.clone()),
                })
            }
            TargetSource::Analytic => {
                let g = analytic_wavefunction(0, Branch::Plus, params)?;
                let e = analytic_wavefunction(0, Branch::Minus, params)?;
                Ok(Self {
                    ground: g.normalized()?.with_label("g"),
                    excited: e.normalized()?.with_label("e"),
                    ground_energy: crate::spectral::analytic_energy(0, Branch::Plus, params),
                    excited_energy: crate::spectral::analytic_energy(0, Branch::Minus, params),
                    spectrum: None,
                })
            }
        }
    }

    /// A series tracking `F_g` and `F_e`.
    pub fn series(&self) -> Result<ObservableSeries> {
        ObservableSeries::new(vec![
            ("g".into(), self.ground.clone()),
            ("e".into(), self.excited.clone()),
        ])
    }

    /// `(|g> + |e>) / sqrt(2)`, without renormalization.
    pub fn superposition(&self) -> Result<SiteState> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Ok(self.ground.combine(h, &self.excited, h)?.with_label("(g+e)/sqrt2"))
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceRun {
    pub profile: InitialProfile,
    pub initial: SiteState,
    pub series: ObservableSeries,
}

/// Propagates each initial profile to `t_end` and records `F_g`, `F_e`.
/// Runs are independent and execute in parallel.
pub fn run_convergence_experiment(
    profiles: &[InitialProfile],
    seed: u64,
    params: &ChainParams,
    t_end: f64,
    config: &IntegratorConfig,
    pair: &StablePair,
) -> Result<Vec<ConvergenceRun>> {
    let h = build_hamiltonian(params);
    profiles
        .par_iter()
        .map(|profile| {
            let initial = make_initial_state(profile, seed, params)?;
            let mut series = pair.series()?;
            propagate(&h, &initial, (0.0, t_end), config, Some(&mut series))?;
            Ok(ConvergenceRun {
                profile: profile.clone(),
                initial,
                series,
            })
        })
        .collect()
}

/// Evolves `(|g> + |e>)/sqrt(2)` and records `P(t)`.
pub fn run_probability_experiment(
    params: &ChainParams,
    t_end: f64,
    config: &IntegratorConfig,
    pair: &StablePair,
) -> Result<ObservableSeries> {
    let h = build_hamiltonian(params);
    let initial = pair.superposition()?;
    let mut series = pair.series()?;
    propagate(&h, &initial, (0.0, t_end), config, Some(&mut series))?;
    Ok(series)
}
