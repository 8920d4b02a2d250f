//! Executes a resolved config and collects its CSV and SVG artifacts.

use std::collections::HashMap;
use std::fmt::Write;
use std::sync::Arc;

use antipt_core::quench::{run_switch_experiment, TwoLevel};
use antipt_core::spectral::analytic_spectrum;
use antipt_core::{
    build_hamiltonian, numeric_spectrum, run_convergence_experiment, run_probability_experiment,
    ChainParams, IntegratorConfig, Method, ObservableSeries, Spectrum, StablePair,
};

use crate::config::{ExperimentConfig, ExperimentKind, MethodKind, SwitchStart};
use crate::output::Artifact;
use crate::svg::{emit_svg, observable_curve, Curve, PlotStyle, Quantity};
use crate::CliError;

/// Everything a run produces, before it touches the disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub files: Vec<Artifact>,
    /// Short human-readable results.
    pub summary: Vec<String>,
    /// Remarks recorded in the manifest.
    pub notes: Vec<String>,
    /// The observable series, for callers that want the numbers.
    pub series: Vec<(String, ObservableSeries)>,
}

/// `omega / J` formatted for legends, e.g. `0.01`.
pub fn ratio_label(params: &ChainParams) -> String {
    let r = params.omega() / params.hopping();
    let s = format!("{r:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn integrator(cfg: &ExperimentConfig, params: &ChainParams) -> Result<IntegratorConfig, CliError> {
    let ic = cfg.integrator_config(params);
    Ok(match cfg.integrator.method {
        MethodKind::Rk4 => ic,
        MethodKind::Eigen => {
            let h = build_hamiltonian(params);
            let spec = numeric_spectrum(&h, params.dim(), cfg.solver_tol)?;
            ic.with_method(Method::EigenExpansion(Arc::new(spec)))
        }
    })
}

fn base_notes(cfg: &ExperimentConfig, params: &ChainParams) -> Vec<String> {
    let mut notes = vec![
        "times are in units of 1/J; run durations are the configured values, not taken from any figure axis".to_string(),
        format!("omega = {:.16e}, omega/J = {}", params.omega(), ratio_label(params)),
    ];
    if !params.tail_ok() {
        notes.push(format!(
            "truncation tail exp(-omega M^2 / 2J) = {:.3e} exceeds tail_tol {:.1e}",
            params.edge_tail(),
            cfg.tail_tol
        ));
    }
    notes
}

/// Runs a resolved config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let params = cfg.chain_params()?;
    let mut out = RunOutput {
        config: cfg.clone(),
        files: Vec::new(),
        summary: Vec::new(),
        notes: base_notes(cfg, &params),
        series: Vec::new(),
    };
    match cfg.experiment {
        ExperimentKind::Spectrum => spectrum_run(cfg, &params, &mut out)?,
        ExperimentKind::Convergence => convergence_run(cfg, &params, &mut out)?,
        ExperimentKind::Probability => probability_run(cfg, &params, &mut out)?,
        ExperimentKind::Switch => switch_run(cfg, &params, &mut out)?,
    }
    Ok(out)
}

fn energy_points(spec: &Spectrum) -> Vec<(f64, f64)> {
    spec.modes.iter().map(|m| (m.energy.re, m.energy.im)).collect()
}

fn spectrum_run(cfg: &ExperimentConfig, params: &ChainParams, out: &mut RunOutput) -> Result<(), CliError> {
    let levels = cfg.levels.unwrap_or(crate::config::DEFAULT_LEVELS);
    let h = build_hamiltonian(params);
    let numeric = numeric_spectrum(&h, levels, cfg.solver_tol)?;
    let analytic = analytic_spectrum(params, levels.div_ceil(2))?;
    for mode in &numeric.modes {
        let label = match mode.label {
            Some(l) => format!("m={} {}", l.m, l.branch.symbol()),
            None => "unassigned".into(),
        };
        out.summary.push(format!(
            "{label}: E = {:+.10} {:+.10}i (residual {:.1e})",
            mode.energy.re, mode.energy.im, mode.residual
        ));
    }
    let svg = emit_svg(
        &[
            Curve::points("numeric", energy_points(&numeric)),
            Curve::points("closed form", energy_points(&analytic)),
        ],
        &PlotStyle::new(
            format!("Spectral ladder, omega/J = {}", ratio_label(params)),
            "Re E (J)",
            "Im E (J)",
        ),
    )?;
    out.files.push(Artifact::new("spectrum.csv", numeric.to_table()));
    out.files.push(Artifact::new("analytic.csv", analytic.to_table()));
    out.files.push(Artifact::new("ladder.svg", svg));
    Ok(())
}

fn convergence_run(cfg: &ExperimentConfig, params: &ChainParams, out: &mut RunOutput) -> Result<(), CliError> {
    let profiles = cfg.initial.clone().unwrap_or_default();
    let t_end = cfg.t_end.unwrap_or(antipt_core::dynamics::DEFAULT_T_END);
    let pair = StablePair::new(params, cfg.targets, cfg.solver_tol)?;
    let ic = integrator(cfg, params)?;
    let runs = run_convergence_experiment(&profiles, cfg.seed, params, t_end, &ic, &pair)?;

    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut names = Vec::with_capacity(runs.len());
    for run in &runs {
        let base = run.profile.name();
        let n = seen.entry(base).or_insert(0);
        *n += 1;
        names.push(if *n == 1 { base.to_string() } else { format!("{base}_{n}") });
    }

    let mut curves = Vec::new();
    for (name, run) in names.iter().zip(&runs) {
        let f_g = run.series.final_fidelity("g").unwrap_or(f64::NAN);
        let f_e = run.series.final_fidelity("e").unwrap_or(f64::NAN);
        out.summary.push(format!("{name}: F_g({t_end}) = {f_g:.6}, F_e({t_end}) = {f_e:.6}"));
        out.files.push(Artifact::new(format!("convergence_{name}.csv"), run.series.to_csv()));
        curves.push(observable_curve(&run.series, &Quantity::Fidelity("g".into()), name.clone()));
        out.series.push((name.clone(), run.series.clone()));
    }
    out.files.push(Artifact::new(
        "fidelity.svg",
        emit_svg(
            &curves,
            &PlotStyle::versus_time(format!("Convergence onto |g>, omega/J = {}", ratio_label(params)), "F_g(t)"),
        )?,
    ));

    // initial profiles next to the ground state
    let mut csv = String::from("l");
    for name in &names {
        let _ = write!(csv, ",{name}");
    }
    csv.push_str(",re_g,im_g,abs_g\n");
    for (k, (l, g)) in pair.ground.sites().enumerate() {
        let _ = write!(csv, "{l}");
        for run in &runs {
            let _ = write!(csv, ",{:.16e}", run.initial.amplitudes()[k].re);
        }
        let _ = writeln!(csv, ",{:.16e},{:.16e},{:.16e}", g.re, g.im, g.norm());
    }
    out.files.push(Artifact::new("profiles.csv", csv));
    let mut curves: Vec<Curve> = names
        .iter()
        .zip(&runs)
        .map(|(name, run)| {
            Curve::line(
                name.clone(),
                run.initial.sites().map(|(l, a)| (l as f64, a.re)).collect(),
            )
        })
        .collect();
    curves.push(Curve::line("|g|", pair.ground.sites().map(|(l, a)| (l as f64, a.norm())).collect()));
    out.files.push(Artifact::new(
        "profiles.svg",
        emit_svg(&curves, &PlotStyle::new("Initial states and |g>", "site l", "amplitude"))?,
    ));
    Ok(())
}

fn probability_run(cfg: &ExperimentConfig, params: &ChainParams, out: &mut RunOutput) -> Result<(), CliError> {
    let t_end = cfg.t_end.unwrap_or(antipt_core::dynamics::DEFAULT_T_END);
    let pair = StablePair::new(params, cfg.targets, cfg.solver_tol)?;
    let ic = integrator(cfg, params)?;
    let series = run_probability_experiment(params, t_end, &ic, &pair)?;
    out.summary.push(format!(
        "omega/J = {}: max |P(t) - 1| over t <= {t_end} is {:.6e}",
        ratio_label(params),
        series.max_probability_deviation()
    ));
    let name = format!("ω/J = {}", ratio_label(params));
    out.files.push(Artifact::new("probability.csv", series.to_csv()));
    out.files.push(Artifact::new(
        "probability.svg",
        emit_svg(
            &[observable_curve(&series, &Quantity::Probability, name.clone())],
            &PlotStyle::versus_time("Dirac probability of (|g> + |e>)/sqrt 2", "P(t)"),
        )?,
    ));
    out.series.push((name, series));
    Ok(())
}

fn switch_run(cfg: &ExperimentConfig, params: &ChainParams, out: &mut RunOutput) -> Result<(), CliError> {
    let pulse = cfg.pulse.clone().unwrap_or_default();
    let plan = cfg.quench_plan()?;
    let pair = StablePair::new(params, cfg.targets, cfg.solver_tol)?;
    let starts: &[TwoLevel] = match pulse.initial {
        SwitchStart::G => &[TwoLevel::Ground],
        SwitchStart::E => &[TwoLevel::Excited],
        SwitchStart::Both => &[TwoLevel::Ground, TwoLevel::Excited],
    };
    let ratio = plan.schedule.hardness_ratio(params);
    out.notes.push(format!(
        "pulse hardness ratio (pi/delta) / max(2J, V M^2) = {ratio:.6}"
    ));
    let mut summary = String::from(
        "initial,mode,delta,amplitude,start,t_relax,hardness_ratio,dt,pulse_dt,final_F_g,final_F_e\n",
    );
    for &start in starts {
        let res = run_switch_experiment(&plan, start, &pair)?;
        let r = &res.report;
        let tag = match start {
            TwoLevel::Ground => "g",
            TwoLevel::Excited => "e",
        };
        let mode = match r.mode {
            antipt_core::PulseMode::Finite => "finite",
            antipt_core::PulseMode::Impulse => "impulse",
        };
        let _ = writeln!(
            summary,
            "{tag},{mode},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.delta, r.amplitude, r.start, r.relax_time, r.hardness_ratio, r.dt, r.pulse_dt, r.final_f_g, r.final_f_e
        );
        out.summary.push(format!(
            "from |{tag}>: F_g(end) = {:.6}, F_e(end) = {:.6}",
            r.final_f_g, r.final_f_e
        ));
        out.files.push(Artifact::new(format!("switch_from_{tag}.csv"), res.series.to_csv()));
        out.files.push(Artifact::new(
            format!("switch_from_{tag}.svg"),
            emit_svg(
                &[
                    observable_curve(&res.series, &Quantity::Fidelity("g".into()), "F_g"),
                    observable_curve(&res.series, &Quantity::Fidelity("e".into()), "F_e"),
                ],
                &PlotStyle::versus_time(
                    format!("Pi pulse from |{tag}>, delta = {} / J", r.delta),
                    "fidelity",
                ),
            )?,
        ));
        out.series.push((format!("from_{tag}"), res.series));
    }
    out.files.push(Artifact::new("switch_summary.csv", summary));
    Ok(())
}
