//! Hermite-Gaussian ladder of the continuum approximation.
//!
//! For slowly varying amplitudes the lattice Laplacian reduces to a second
//! derivative and the chain becomes a harmonic oscillator with complex
//! frequency. The `+` branch is `N_m exp(-alpha^2 l^2 / 2) H_m(alpha l)` with
//! `alpha = exp(-i pi/8) (V/J)^(1/4)`; the `-` branch is its image under
//! `PT`, `(-1)^l conj(psi_m^+(l))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hermite::{hermite_polynomial, MAX_HERMITE_ORDER};
use crate::chain::{apply_parity, build_hamiltonian, ChainParams, SiteState};
use crate::error::{Error, Result};
use crate::quadrature::CompositeRule;

/// Which member of an `E <-> -E*` pair a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// Scale and normalisation of one analytic mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticModeParams {
    pub alpha: Complex64,
    pub norm: f64,
    pub m: usize,
    pub branch: Branch,
}

impl AnalyticModeParams {
    pub fn new(m: usize, branch: Branch, params: &ChainParams) -> Result<Self> {
        let alpha = oscillator_scale(params);
        Ok(Self {
            alpha,
            norm: normalization(m, alpha)?,
            m,
            branch,
        })
    }
}

/// `alpha = exp(-i pi/8) (V/J)^(1/4)`.
pub fn oscillator_scale(params: &ChainParams) -> Complex64 {
    Complex64::from_polar(
        (params.potential() / params.hopping()).powf(0.25),
        -PI / 8.0,
    )
}

const GL_ORDER: usize = 16;
const START_PANELS: usize = 8;
const MAX_PANELS: usize = 1 << 14;
const REL_TOL: f64 = 1e-10;

fn cutoff(m: usize, alpha: Complex64) -> f64 {
    let scaled = 8.0_f64.max(2.0 * ((2 * m + 1) as f64).sqrt() + 4.0);
    scaled / (alpha * alpha).re.sqrt()
}

/// `integral H_m(alpha x) H_m(alpha* x) exp(-Re(alpha^2) x^2) dx` on a fixed
/// number of panels.
pub fn normalization_integral(m: usize, alpha: Complex64, panels: usize) -> Result<f64> {
    if m > MAX_HERMITE_ORDER {
        return Err(Error::HermiteOrder {
            order: m,
            max: MAX_HERMITE_ORDER,
        });
    }
    let re_a2 = (alpha * alpha).re;
    let x_max = cutoff(m, alpha);
    let rule = CompositeRule::new(GL_ORDER);
    let f = |x: f64| {
        // orders are range-checked above
        let a = hermite_polynomial(m, alpha * x).unwrap_or_default();
        let b = hermite_polynomial(m, alpha.conj() * x).unwrap_or_default();
        (a * b).re * (-re_a2 * x * x).exp()
    };
    Ok(rule.integrate(f, -x_max, x_max, panels))
}

/// `N_m`, with panels doubled until the integral changes by less than 1e-10
/// relative.
pub fn normalization(m: usize, alpha: Complex64) -> Result<f64> {
    let mut panels = START_PANELS;
    let mut prev = normalization_integral(m, alpha, panels)?;
    let mut change = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let next = normalization_integral(m, alpha, panels)?;
        change = ((next - prev) / next).abs();
        prev = next;
        if change < REL_TOL {
            if !(prev > 0.0 && prev.is_finite()) {
                break;
            }
            return Ok(prev.powf(-0.5));
        }
    }
    Err(Error::Quadrature { last_change: change })
}

/// Closed-form `N_0 = [V / (2 J pi^2)]^(1/8)`.
pub fn ground_normalization(params: &ChainParams) -> f64 {
    (params.potential() / (2.0 * params.hopping() * PI * PI)).powf(0.125)
}

/// `E_m^+ = (2m+1) omega - 2J - 2i m omega`, `E_m^- = -conj(E_m^+)`.
pub fn analytic_energy(m: usize, branch: Branch, params: &ChainParams) -> Complex64 {
    let (j, w) = (params.hopping(), params.omega());
    let re = (2 * m + 1) as f64 * w - 2.0 * j;
    let im = -2.0 * m as f64 * w;
    match branch {
        Branch::Plus => Complex64::new(re, im),
        Branch::Minus => Complex64::new(-re, im),
    }
}

/// Samples the analytic mode on the lattice. The vector carries the continuum
/// normalisation `N_m`, not unit Dirac norm on the sites.
pub fn analytic_wavefunction(m: usize, branch: Branch, params: &ChainParams) -> Result<SiteState> {
    let mode = AnalyticModeParams::new(m, branch, params)?;
    let a2 = mode.alpha * mode.alpha;
    let mut amps = Vec::with_capacity(params.dim());
    for k in 0..params.dim() {
        let l = crate::chain::site_of(k, params.half_width()) as f64;
        let h = hermite_polynomial(m, mode.alpha * l)?;
        amps.push(mode.norm * (-0.5 * a2 * l * l).exp() * h);
    }
    let plus = SiteState::new(params.half_width(), amps, format!("analytic m={m} +"))?;
    Ok(match branch {
        Branch::Plus => plus,
        Branch::Minus => apply_parity(&plus.conj()).with_label(format!("analytic m={m} -")),
    })
}

/// `||H psi - E psi|| / ||psi||` for the analytic ansatz on the truncated
/// chain; small only where the continuum approximation holds.
pub fn analytic_residual(m: usize, branch: Branch, params: &ChainParams) -> Result<f64> {
    let psi = analytic_wavefunction(m, branch, params)?;
    let h = build_hamiltonian(params);
    Ok(h.residual(analytic_energy(m, branch, params), psi.amplitudes()))
}
