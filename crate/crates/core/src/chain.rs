//! The physical model: parameters, the truncated site basis, the tridiagonal
//! Hamiltonian and the parity / time-reversal operators.
//!
//! The chain has hopping `-J` between neighbours, an on-site imaginary
//! harmonic potential `-i V l^2` and a constant shift `+i omega` with
//! `omega = sqrt(J V / 2)`. Sites run over `l in [-M, M]` with open ends;
//! storage index `k = l + M` never leaks through the public API.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default bound on the Gaussian envelope `exp(-omega M^2 / (2J))` at the
/// chain edge.
pub const DEFAULT_TAIL_TOL: f64 = 1e-13;

/// Default truncation half-width (201 sites).
pub const DEFAULT_HALF_WIDTH: usize = 100;

/// Parameters of the chain. `omega` is always derived from `J` and `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    hopping: f64,
    potential: f64,
    omega: f64,
    half_width: usize,
    tail_tol: f64,
}

impl ChainParams {
    pub fn new(hopping: f64, potential: f64, half_width: usize) -> Result<Self> {
        Self::with_tail_tol(hopping, potential, half_width, DEFAULT_TAIL_TOL)
    }

    pub fn with_tail_tol(
        hopping: f64,
        potential: f64,
        half_width: usize,
        tail_tol: f64,
    ) -> Result<Self> {
        if !hopping.is_finite() || hopping <= 0.0 {
            return Err(invalid("J", format!("must be finite and > 0, got {hopping}")));
        }
        if !potential.is_finite() || potential <= 0.0 {
            return Err(invalid("V", format!("must be finite and > 0, got {potential}")));
        }
        if half_width == 0 {
            return Err(invalid("M", "half-width must be at least 1"));
        }
        if !tail_tol.is_finite() || tail_tol <= 0.0 {
            return Err(invalid("tail_tol", format!("must be finite and > 0, got {tail_tol}")));
        }
        let edge = potential * (half_width as f64).powi(2);
        if !edge.is_finite() {
            return Err(invalid("M", format!("V * M^2 overflows for M = {half_width}")));
        }
        let params = Self {
            hopping,
            potential,
            omega: (hopping * potential / 2.0).sqrt(),
            half_width,
            tail_tol,
        };
        if params.edge_tail() > tail_tol {
            log::warn!(
                "truncation tail exp(-omega M^2/2J) = {:.3e} exceeds tail_tol {:.1e} (M = {})",
                params.edge_tail(),
                tail_tol,
                half_width
            );
        }
        Ok(params)
    }

    /// Parameters from the ratio `omega / J`, using `V = 2 omega^2 / J`.
    pub fn from_omega_ratio(hopping: f64, ratio: f64, half_width: usize) -> Result<Self> {
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(invalid("omega", format!("ratio must be finite and > 0, got {ratio}")));
        }
        let omega = ratio * hopping;
        Self::new(hopping, 2.0 * omega * omega / hopping, half_width)
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn potential(&self) -> f64 {
        self.potential
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn dim(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Envelope of the stable modes at the chain edge.
    pub fn edge_tail(&self) -> f64 {
        (-self.omega * (self.half_width as f64).powi(2) / (2.0 * self.hopping)).exp()
    }

    pub fn tail_ok(&self) -> bool {
        self.edge_tail() <= self.tail_tol
    }

    /// Gaussian width `sqrt(J / omega)` of the stable bound states, in sites.
    pub fn localization_length(&self) -> f64 {
        (self.hopping / self.omega).sqrt()
    }

    /// `max(2J, V M^2) + omega`.
    pub fn spectral_radius_estimate(&self) -> f64 {
        (2.0 * self.hopping).max(self.potential * (self.half_width as f64).powi(2)) + self.omega
    }
}

/// Physical site index of storage slot `k` on a chain of half-width `m`.
#[inline]
pub fn site_of(k: usize, half_width: usize) -> i64 {
    k as i64 - half_width as i64
}

#[inline]
fn parity_sign(l: i64) -> f64 {
    if l.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Complex amplitudes over the sites `l in [-M, M]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteState {
    half_width: usize,
    amplitudes: Vec<Complex64>,
    pub label: String,
}

impl SiteState {
    pub fn new(
        half_width: usize,
        amplitudes: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let expected = 2 * half_width + 1;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            half_width,
            amplitudes,
            label: label.into(),
        })
    }

    pub fn zeros(half_width: usize, label: impl Into<String>) -> Self {
        Self {
            half_width,
            amplitudes: vec![Complex64::new(0.0, 0.0); 2 * half_width + 1],
            label: label.into(),
        }
    }

    /// Builds a state from a function of the physical site index.
    pub fn from_fn(
        half_width: usize,
        label: impl Into<String>,
        f: impl Fn(i64) -> Complex64,
    ) -> Self {
        let amplitudes = (0..2 * half_width + 1)
            .map(|k| f(site_of(k, half_width)))
            .collect();
        Self {
            half_width,
            amplitudes,
            label: label.into(),
        }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Amplitude at physical site `l`, or `None` outside the chain.
    pub fn at(&self, l: i64) -> Option<Complex64> {
        let k = l + self.half_width as i64;
        if k < 0 {
            return None;
        }
        self.amplitudes.get(k as usize).copied()
    }

    /// `(l, amplitude)` pairs in ascending site order.
    pub fn sites(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.half_width;
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(k, &a)| (site_of(k, m), a))
    }

    /// Dirac norm squared, `sum_l |psi(l)|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    /// Returns a copy rescaled to unit Dirac norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            half_width: self.half_width,
            amplitudes: self.amplitudes.iter().map(|&a| a * factor).collect(),
            label: self.label.clone(),
        }
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            half_width: self.half_width,
            amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect(),
            label: self.label.clone(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.check_same_len(other)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(Self {
            half_width: self.half_width,
            amplitudes,
            label: self.label.clone(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

/// Tridiagonal Hamiltonian on the truncated chain: a complex diagonal and a
/// constant real hopping on both first off-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    half_width: usize,
    diagonal: Vec<Complex64>,
    off_diagonal: f64,
    params: Option<ChainParams>,
}

/// Builds `H = -J sum (|l><l+1| + h.c.) - i V sum l^2 |l><l| + i omega`.
pub fn build_hamiltonian(params: &ChainParams) -> Hamiltonian {
    let m = params.half_width();
    let (v, omega) = (params.potential(), params.omega());
    let diagonal = (0..params.dim())
        .map(|k| {
            let l = site_of(k, m) as f64;
            Complex64::new(0.0, omega - v * l * l)
        })
        .collect();
    Hamiltonian {
        half_width: m,
        diagonal,
        off_diagonal: -params.hopping(),
        params: Some(*params),
    }
}

impl Hamiltonian {
    /// A tridiagonal operator from raw parts, not tied to any `ChainParams`.
    pub fn from_parts(
        half_width: usize,
        diagonal: Vec<Complex64>,
        off_diagonal: f64,
    ) -> Result<Self> {
        let expected = 2 * half_width + 1;
        if diagonal.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: diagonal.len(),
            });
        }
        if !off_diagonal.is_finite() || diagonal.iter().any(|d| !d.is_finite()) {
            return Err(invalid("hamiltonian", "entries must be finite"));
        }
        Ok(Self {
            half_width,
            diagonal,
            off_diagonal,
            params: None,
        })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> f64 {
        self.off_diagonal
    }

    /// The parameters this operator was built from, if any.
    pub fn params(&self) -> Option<&ChainParams> {
        self.params.as_ref()
    }

    /// Diagonal entry at physical site `l`.
    pub fn diagonal_at(&self, l: i64) -> Option<Complex64> {
        let k = l + self.half_width as i64;
        if k < 0 {
            return None;
        }
        self.diagonal.get(k as usize).copied()
    }

    /// Matrix entry in physical site coordinates.
    pub fn entry(&self, a: i64, b: i64) -> Complex64 {
        let m = self.half_width as i64;
        if a.abs() > m || b.abs() > m {
            return Complex64::new(0.0, 0.0);
        }
        match a - b {
            0 => self.diagonal[(a + m) as usize],
            1 | -1 => Complex64::new(self.off_diagonal, 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Returns a copy whose diagonal at site `l` is shifted by `shift(l)`.
    /// The original parameters stay attached.
    pub fn with_diagonal_shift(&self, shift: impl Fn(i64) -> Complex64) -> Self {
        let m = self.half_width;
        let diagonal = self
            .diagonal
            .iter()
            .enumerate()
            .map(|(k, &d)| d + shift(site_of(k, m)))
            .collect();
        Self {
            half_width: m,
            diagonal,
            off_diagonal: self.off_diagonal,
            params: self.params,
        }
    }

    /// `out = H x`.
    pub fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.diagonal.len();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        let t = self.off_diagonal;
        for k in 0..n {
            let mut acc = self.diagonal[k] * x[k];
            if k > 0 {
                acc += x[k - 1] * t;
            }
            if k + 1 < n {
                acc += x[k + 1] * t;
            }
            out[k] = acc;
        }
    }

    pub fn apply(&self, state: &SiteState) -> Result<SiteState> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply_into(state.amplitudes(), &mut out);
        SiteState::new(self.half_width, out, state.label.clone())
    }

    /// Elementwise complex conjugate `H*`.
    pub fn conj(&self) -> Self {
        Self {
            half_width: self.half_width,
            diagonal: self.diagonal.iter().map(|d| d.conj()).collect(),
            off_diagonal: self.off_diagonal,
            params: self.params,
        }
    }

    /// `||H v - E v|| / ||v||`.
    pub fn residual(&self, energy: Complex64, v: &[Complex64]) -> f64 {
        let mut hv = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply_into(v, &mut hv);
        let num: f64 = hv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - energy * b).norm_sqr())
            .sum();
        let den: f64 = v.iter().map(|b| b.norm_sqr()).sum();
        (num / den).sqrt()
    }

    /// `max(2|t|, max_l |d_l - d_0|) + |d_0|`; for the unperturbed chain this
    /// is `max(2J, V M^2) + omega`.
    pub fn spectral_radius_estimate(&self) -> f64 {
        let d0 = self.diagonal[self.half_width];
        let spread = self
            .diagonal
            .iter()
            .map(|d| (d - d0).norm())
            .fold(0.0_f64, f64::max);
        (2.0 * self.off_diagonal.abs()).max(spread) + d0.norm()
    }

    /// Dense row-major copy, for diagnostics and tests.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        let mut dense = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for k in 0..n {
            dense[k][k] = self.diagonal[k];
            if k + 1 < n {
                dense[k][k + 1] = Complex64::new(self.off_diagonal, 0.0);
                dense[k + 1][k] = Complex64::new(self.off_diagonal, 0.0);
            }
        }
        dense
    }
}

/// `P|l> = (-1)^l |l>`.
pub fn apply_parity(state: &SiteState) -> SiteState {
    let m = state.half_width();
    let amplitudes = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            if parity_sign(site_of(k, m)) < 0.0 {
                -a
            } else {
                a
            }
        })
        .collect();
    SiteState {
        half_width: m,
        amplitudes,
        label: state.label.clone(),
    }
}

/// Max-entry magnitude of `PT H (PT)^-1 + H`.
///
/// `T` conjugates matrix entries and `P` is the `(-1)^l` similarity, so entry
/// `(a, b)` of `PT H (PT)^-1` is `(-1)^(a+b) conj(H_ab)`.
pub fn anti_pt_residual(h: &Hamiltonian) -> f64 {
    let diag = h
        .diagonal()
        .iter()
        .map(|&d| (d.conj() + d).norm())
        .fold(0.0_f64, f64::max);
    let t = Complex64::new(h.off_diagonal(), 0.0);
    let off = if h.dim() > 1 { (-t.conj() + t).norm() } else { 0.0 };
    diag.max(off)
}
