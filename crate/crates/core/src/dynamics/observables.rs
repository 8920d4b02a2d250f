use std::fmt::Write as _;

use crate::chain::SiteState;
use crate::error::{Error, Result};
use crate::spectral::dirac_overlap;

/// `|<target|evolved>|^2 / <evolved|evolved>` for a normalized target.
pub fn fidelity(target: &SiteState, evolved: &SiteState) -> Result<f64> {
    let t2 = target.norm_sqr();
    if (t2 - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized {
            label: target.label.clone(),
            norm2: t2,
        });
    }
    let e2 = evolved.norm_sqr();
    if e2 == 0.0 || !e2.is_finite() {
        return Err(Error::ZeroState);
    }
    let overlap = dirac_overlap(target, evolved)?;
    // Cauchy-Schwarz holds exactly; clamp only rounding above 1
    Ok((overlap.norm_sqr() / (e2 * t2)).min(1.0))
}

/// `P = |<Phi|Phi>|^2`, the square of the Dirac norm squared.
pub fn dirac_probability(state: &SiteState) -> f64 {
    state.norm_sqr().powi(2)
}

/// Time-stamped observables of one propagation.
#[derive(Debug, Clone)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    /// Dirac norm squared of the raw (unnormalized) state.
    pub norm2: Vec<f64>,
    /// `norm2^2`.
    pub probability: Vec<f64>,
    pub target_names: Vec<String>,
    /// One row per target, one entry per sample.
    pub fidelities: Vec<Vec<f64>>,
    pub snapshots: Vec<(f64, SiteState)>,
    targets: Vec<SiteState>,
    snapshot_stride: Option<usize>,
    samples: usize,
}

impl ObservableSeries {
    /// A series tracking the fidelity against each named target. Targets must
    /// be Dirac-normalized.
    pub fn new(targets: Vec<(String, SiteState)>) -> Result<Self> {
        let mut names = Vec::with_capacity(targets.len());
        let mut states = Vec::with_capacity(targets.len());
        for (name, state) in targets {
            let n2 = state.norm_sqr();
            if (n2 - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized { label: name, norm2: n2 });
            }
            names.push(name);
            states.push(state);
        }
        Ok(Self {
            times: Vec::new(),
            norm2: Vec::new(),
            probability: Vec::new(),
            fidelities: vec![Vec::new(); names.len()],
            target_names: names,
            snapshots: Vec::new(),
            targets: states,
            snapshot_stride: None,
            samples: 0,
        })
    }

    /// Keep a full copy of the state on every `stride`-th sample.
    pub fn with_snapshots(mut self, stride: usize) -> Self {
        self.snapshot_stride = Some(stride.max(1));
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Records a sample. The true state is `state * exp(log_scale)`.
    /// Samples at or before the last recorded time are ignored.
    pub fn record(&mut self, time: f64, state: &SiteState, log_scale: f64) -> Result<()> {
        if self.times.last().is_some_and(|&last| time <= last) {
            return Ok(());
        }
        let raw = state.norm_sqr();
        if !raw.is_finite() {
            return Err(Error::NumericBreakdown { time });
        }
        let norm2 = raw * (2.0 * log_scale).exp();
        for (target, row) in self.targets.iter().zip(self.fidelities.iter_mut()) {
            row.push(fidelity(target, state)?);
        }
        self.times.push(time);
        self.norm2.push(norm2);
        self.probability.push(norm2 * norm2);
        if let Some(stride) = self.snapshot_stride {
            if self.samples % stride == 0 {
                self.snapshots.push((time, state.scaled(log_scale.exp().into())));
            }
        }
        self.samples += 1;
        Ok(())
    }

    pub fn fidelity_series(&self, name: &str) -> Option<&[f64]> {
        let i = self.target_names.iter().position(|n| n == name)?;
        Some(&self.fidelities[i])
    }

    pub fn final_fidelity(&self, name: &str) -> Option<f64> {
        self.fidelity_series(name)?.last().copied()
    }

    /// `max_t |P(t) - 1|`.
    pub fn max_probability_deviation(&self) -> f64 {
        self.probability
            .iter()
            .map(|p| (p - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `time,norm2,P,F_<target>...`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,norm2,P");
        for name in &self.target_names {
            let _ = write!(out, ",F_{name}");
        }
        out.push('\n');
        for i in 0..self.times.len() {
            let _ = write!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.times[i], self.norm2[i], self.probability[i]
            );
            for row in &self.fidelities {
                let _ = write!(out, ",{:.16e}", row[i]);
            }
            out.push('\n');
        }
        out
    }
}
