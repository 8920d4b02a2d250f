//! Command-line front end for `antipt-core`.
//!
//! `antipt run <config>` executes a JSON experiment config, `antipt preset
//! <name>` one of the built-in studies, and `antipt spectrum <config>` the
//! spectrum of the chain a config describes. Every run directory holds the
//! resolved config, CSV data, SVG plots and a hashed manifest.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{parse_config, ConfigError, ExperimentConfig, ExperimentKind};
pub use presets::{preset, Preset};
pub use run::{run_experiment, RunOutput};
pub use svg::{emit_svg, Curve, PlotStyle, SvgError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] antipt_core::Error),
    #[error("plot: {0}")]
    Svg(#[from] SvgError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 1 for anything the user can fix in the input, 2 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        use antipt_core::Error as E;
        match self {
            CliError::Model(E::Quadrature { .. })
            | CliError::Model(E::NoConvergence { .. })
            | CliError::Model(E::ZeroState)
            | CliError::Model(E::NumericBreakdown { .. })
            | CliError::Svg(SvgError::NonFinite(_)) => EXIT_NUMERIC,
            _ => EXIT_VALIDATION,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "antipt", version, about = "Anti-PT-symmetric chain experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in study: fig2, fig3, fig4 or fig5.
    Preset {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Compute the low-lying spectrum of the chain a config describes.
    Spectrum {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RNG seed (overrides `seed` in the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for independent runs.
    #[arg(long)]
    pub threads: Option<usize>,
}

fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialized; --threads {n} ignored");
        }
    }
    Ok(())
}

fn default_out(name: &str) -> PathBuf {
    Path::new("antipt-out").join(name)
}

/// Runs a single config and writes its directory. Returns the directory and
/// the summary lines.
pub fn run_config(mut cfg: ExperimentConfig, common: &Common) -> Result<(PathBuf, Vec<String>), CliError> {
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| default_out(cfg.label.as_deref().unwrap_or(cfg.experiment.name())));
    cfg.out = Some(dir.clone());
    let cfg = cfg.resolve()?;
    let res = run_experiment(&cfg)?;
    output::write_run(&dir, &cfg.to_json(), &res.files, &res.notes)?;
    Ok((dir, res.summary))
}

pub fn execute(cli: Cli) -> Result<Vec<String>, CliError> {
    let mut lines = Vec::new();
    match cli.command {
        Command::Run { config, common } => {
            init_threads(common.threads)?;
            let (dir, summary) = run_config(read_config(&config)?, &common)?;
            lines.extend(summary);
            lines.push(format!("wrote {}", dir.display()));
        }
        Command::Spectrum { config, common } => {
            init_threads(common.threads)?;
            let src = read_config(&config)?;
            let mut cfg = ExperimentConfig::new(ExperimentKind::Spectrum, src.hopping, src.potential);
            cfg.half_width = src.half_width;
            cfg.tail_tol = src.tail_tol;
            cfg.solver_tol = src.solver_tol;
            cfg.seed = src.seed;
            cfg.label = src.label.clone();
            cfg.out = src.out.clone();
            cfg.levels = (src.experiment == ExperimentKind::Spectrum).then_some(src.levels).flatten();
            let (dir, summary) = run_config(cfg, &common)?;
            lines.extend(summary);
            lines.push(format!("wrote {}", dir.display()));
        }
        Command::Preset { name, common } => {
            init_threads(common.threads)?;
            let mut p = preset(&name)?;
            if let Some(seed) = common.seed {
                p = p.with_seed(seed);
            }
            let out = common.out.clone().unwrap_or_else(|| default_out(p.name));
            let (dirs, outputs) = p.run_into(&out)?;
            for res in &outputs {
                lines.extend(res.summary.iter().cloned());
            }
            for d in dirs {
                lines.push(format!("wrote {}", d.display()));
            }
        }
    }
    Ok(lines)
}

/// Parses `args`, runs, prints and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
