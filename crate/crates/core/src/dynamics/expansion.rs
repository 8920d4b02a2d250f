use num_complex::Complex64;

use crate::chain::SiteState;
use crate::error::{Error, Result};
use crate::spectral::{dirac_overlap, LadderLabel, Spectrum};

/// Coefficients `c_n = <left_n|state>` of a state in a biorthonormal
/// eigenbasis.
#[derive(Debug, Clone)]
pub struct ExpansionCoefficients {
    pub labels: Vec<Option<LadderLabel>>,
    pub energies: Vec<Complex64>,
    pub values: Vec<Complex64>,
}

pub fn expansion_coefficients(state: &SiteState, spec: &Spectrum) -> Result<ExpansionCoefficients> {
    let mut values = Vec::with_capacity(spec.len());
    for (i, mode) in spec.modes.iter().enumerate() {
        let left = mode.left.as_ref().ok_or(Error::MissingLeftVector { index: i })?;
        values.push(dirac_overlap(left, state)?);
    }
    Ok(ExpansionCoefficients {
        labels: spec.modes.iter().map(|m| m.label).collect(),
        energies: spec.energies(),
        values,
    })
}

impl ExpansionCoefficients {
    /// `sum_n c_n exp(-i E_n t) |right_n>`.
    pub fn evolve(&self, spec: &Spectrum, t: f64) -> Result<SiteState> {
        let first = spec
            .modes
            .first()
            .ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
        let mut out = SiteState::zeros(first.right.half_width(), "expansion");
        for ((mode, &c), &energy) in spec.modes.iter().zip(&self.values).zip(&self.energies) {
            let w = c * (Complex64::new(0.0, -t) * energy).exp();
            mode.right.check_same_len(&out)?;
            for (o, r) in out.amplitudes_mut().iter_mut().zip(mode.right.amplitudes()) {
                *o += w * r;
            }
        }
        Ok(out)
    }

    pub fn reconstruct(&self, spec: &Spectrum) -> Result<SiteState> {
        self.evolve(spec, 0.0)
    }

    /// Coefficient of the mode carrying `label`.
    pub fn get(&self, label: LadderLabel) -> Option<Complex64> {
        self.labels
            .iter()
            .position(|l| *l == Some(label))
            .map(|i| self.values[i])
    }
}
