//! Built-in experiments: the spectral ladder, convergence from four initial
//! states, probability conservation at three ratios, and the pi-pulse switch.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind, PulseSection};
use crate::output::{write_run, Artifact};
use crate::run::{ratio_label, run_experiment, RunOutput};
use crate::svg::{emit_svg, observable_curve, PlotStyle, Quantity};
use crate::CliError;

pub const PRESETS: [&str; 4] = ["fig2", "fig3", "fig4", "fig5"];

/// `omega / J` values and half-widths of the probability study. The largest
/// ratio has a localization length of about 1.6 sites, so a short chain
/// suffices and keeps `V M^2` manageable.
pub const PROBABILITY_RATIOS: [(f64, usize); 3] = [(0.01, 100), (0.1, 50), (0.4, 30)];
pub const PROBABILITY_T_END: f64 = 200.0;

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    /// Sub-directory (empty for the preset directory itself) and config.
    pub runs: Vec<(String, ExperimentConfig)>,
}

pub fn preset(name: &str) -> Result<Preset, ConfigError> {
    let weak = |kind| ExperimentConfig::new(kind, 1.0, 2e-4);
    let (name, runs) = match name {
        "fig2" => ("fig2", vec![(String::new(), weak(ExperimentKind::Spectrum))]),
        "fig3" => ("fig3", vec![(String::new(), weak(ExperimentKind::Convergence))]),
        "fig4" => (
            "fig4",
            PROBABILITY_RATIOS
                .iter()
                .map(|&(ratio, m)| {
                    let mut cfg = ExperimentConfig::new(ExperimentKind::Probability, 1.0, 2.0 * ratio * ratio);
                    cfg.half_width = m;
                    cfg.t_end = Some(PROBABILITY_T_END);
                    let dir = format!("omega_{ratio}");
                    cfg.label = Some(dir.clone());
                    (dir, cfg)
                })
                .collect(),
        ),
        "fig5" => {
            let mut cfg = weak(ExperimentKind::Switch);
            cfg.pulse = Some(PulseSection::default());
            ("fig5", vec![(String::new(), cfg)])
        }
        other => {
            return Err(ConfigError {
                path: "preset".into(),
                message: format!("unknown preset `{other}` (expected one of {})", PRESETS.join(", ")),
            })
        }
    };
    let runs = runs
        .into_iter()
        .map(|(dir, cfg)| Ok((dir, cfg.resolve()?)))
        .collect::<Result<_, ConfigError>>()?;
    Ok(Preset { name, runs })
}

impl Preset {
    pub fn with_seed(mut self, seed: u64) -> Self {
        for (_, cfg) in &mut self.runs {
            cfg.seed = seed;
        }
        self
    }

    /// Runs every config, in parallel when there are several.
    pub fn execute(&self) -> Result<Vec<RunOutput>, CliError> {
        self.runs.par_iter().map(|(_, cfg)| run_experiment(cfg)).collect()
    }

    /// Runs the preset and writes one directory per run below `out`, plus a
    /// `combined` directory for multi-run presets. Returns the directories
    /// written.
    pub fn run_into(&self, out: &Path) -> Result<(Vec<PathBuf>, Vec<RunOutput>), CliError> {
        let outputs = self.execute()?;
        let mut dirs = Vec::new();
        for ((sub, _), res) in self.runs.iter().zip(&outputs) {
            let dir = if sub.is_empty() { out.to_path_buf() } else { out.join(sub) };
            let mut cfg = res.config.clone();
            cfg.out = Some(dir.clone());
            dirs.push(write_run(&dir, &cfg.to_json(), &res.files, &res.notes)?);
        }
        if outputs.len() > 1 {
            dirs.push(self.write_combined(&out.join("combined"), &outputs)?);
        }
        Ok((dirs, outputs))
    }

    fn write_combined(&self, dir: &Path, outputs: &[RunOutput]) -> Result<PathBuf, CliError> {
        let configs: Vec<_> = outputs.iter().map(|o| &o.config).collect();
        let mut config = serde_json::to_string_pretty(&serde_json::json!({
            "preset": self.name,
            "runs": configs,
        }))
        .expect("configs serialize");
        config.push('\n');

        let mut csv = String::from("omega_ratio,time,norm2,P\n");
        let mut curves = Vec::new();
        for res in outputs {
            let params = res.config.chain_params()?;
            let ratio = ratio_label(&params);
            for (name, series) in &res.series {
                for i in 0..series.times.len() {
                    let _ = writeln!(
                        csv,
                        "{ratio},{:.16e},{:.16e},{:.16e}",
                        series.times[i], series.norm2[i], series.probability[i]
                    );
                }
                curves.push(observable_curve(series, &Quantity::Probability, name.clone()));
            }
        }
        let svg = emit_svg(
            &curves,
            &PlotStyle::versus_time("Dirac probability of (|g> + |e>)/sqrt 2", "P(t)"),
        )?;
        let notes = vec!["combined view of the runs in the sibling directories".to_string()];
        write_run(
            dir,
            &config,
            &[Artifact::new("probability.csv", csv), Artifact::new("probability.svg", svg)],
            &notes,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for name in PRESETS {
            let p = preset(name).unwrap();
            assert!(!p.runs.is_empty());
        }
        assert_eq!(preset("fig6").unwrap_err().path, "preset");
    }

    #[test]
    fn fig4_uses_v_equal_two_omega_squared() {
        let p = preset("fig4").unwrap();
        let vs: Vec<f64> = p.runs.iter().map(|(_, c)| c.potential).collect();
        for (v, want) in vs.iter().zip([2e-4, 2e-2, 0.32]) {
            assert!((v - want).abs() < 1e-15);
        }
        let ms: Vec<usize> = p.runs.iter().map(|(_, c)| c.half_width).collect();
        assert_eq!(ms, [100, 50, 30]);
        // the stiff chain gets a reduced step
        assert!(p.runs[2].1.integrator.dt.unwrap() < 1e-3);
    }
}
