//! Command-line front end.
//!
//! ```text
//! cosmohist background|massfn|csfr [--config PATH] [--output DIR] [--<key> VALUE ...]
//! ```
//!
//! Settings resolve as flags, then the config file, then
//! `COSMOHIST_OUTPUT_DIR` (output directory only), then built-in defaults.

pub mod commands;
pub mod config;
pub mod format;
pub mod manifest;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{cmd_background, cmd_csfr, cmd_massfn, Outcome};
pub use config::{ConfigError, RunConfig, OUTPUT_DIR_ENV};
pub use manifest::{verify_manifest, RunManifest, Verification};

use crate::error::Error as ModelError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(ModelError),
    #[error("I/O failure at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParam { key, value, expected } => CliError::Config(ConfigError::InvalidValue {
                key: key.into(),
                value: value.to_string(),
                expected,
            }),
            ModelError::NotFlat { omega_m, omega_lambda } => {
                CliError::Config(ConfigError::NotFlat { omega_m, omega_lambda })
            }
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cosmohist",
    version,
    about = "Background cosmology, halo mass function and cosmic star formation history"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Age, distances, volume and growth on the redshift grid.
    Background(RunArgs),
    /// Press-Schechter mass function at one redshift.
    Massfn {
        #[command(flatten)]
        run: RunArgs,
        /// Redshift of the mass function.
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Star formation history and its plot.
    Csfr(RunArgs),
}

impl Command {
    pub fn run_args(&self) -> &RunArgs {
        match self {
            Command::Background(run) | Command::Csfr(run) => run,
            Command::Massfn { run, .. } => run,
        }
    }
}

/// Config file, output directory and per-key overrides. Each override flag
/// is the config key with `-` for `_`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub output: Option<String>,
    #[arg(long, value_name = "VALUE")]
    pub omega_m: Option<String>,
    #[arg(long, value_name = "VALUE")]
    pub omega_b: Option<String>,
    #[arg(long, value_name = "VALUE")]
    pub omega_lambda: Option<String>,
    #[arg(long, value_name = "VALUE")]
    pub h: Option<String>,
    #[arg(long, value_name = "VALUE")]
    pub sigma8: Option<String>,
    #[arg(long, value_name = "VALUE")]
    pub ns: Option<String>,
    #[arg(long, value_name = "VALUE", allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, value_name = "YEARS")]
    pub tau: Option<String>,
    #[arg(long, value_name = "VALUE")]
    pub n: Option<String>,
    #[arg(long, value_name = "M_SUN")]
    pub m_low: Option<String>,
    #[arg(long, value_name = "M_SUN")]
    pub m_high: Option<String>,
    #[arg(long, value_name = "VALUE")]
    pub return_fraction: Option<String>,
    #[arg(long, value_name = "LOG10_M")]
    pub mass_min: Option<String>,
    #[arg(long, value_name = "LOG10_M")]
    pub mass_max: Option<String>,
    #[arg(long, value_name = "Z")]
    pub z_max: Option<String>,
    #[arg(long, value_name = "N")]
    pub samples: Option<String>,
    #[arg(long, value_name = "N")]
    pub mass_samples: Option<String>,
    #[arg(long, value_name = "VALUE")]
    pub rel_tol: Option<String>,
}

impl RunArgs {
    /// `(key, value)` for every flag that was given.
    pub fn overrides(&self) -> Vec<(&'static str, String)> {
        let fields: [(&'static str, &Option<String>); 19] = [
            ("omega_m", &self.omega_m),
            ("omega_b", &self.omega_b),
            ("omega_lambda", &self.omega_lambda),
            ("h", &self.h),
            ("sigma8", &self.sigma8),
            ("ns", &self.ns),
            ("x", &self.x),
            ("tau", &self.tau),
            ("n", &self.n),
            ("m_low", &self.m_low),
            ("m_high", &self.m_high),
            ("return_fraction", &self.return_fraction),
            ("mass_min", &self.mass_min),
            ("mass_max", &self.mass_max),
            ("z_max", &self.z_max),
            ("samples", &self.samples),
            ("mass_samples", &self.mass_samples),
            ("rel_tol", &self.rel_tol),
            ("output_dir", &self.output),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect()
    }

    pub fn resolve(&self, env_output_dir: Option<String>) -> Result<RunConfig, ConfigError> {
        RunConfig::resolve(self.config.as_deref(), &self.overrides(), env_output_dir)
    }
}

/// Resolves the configuration and runs the selected subcommand.
pub fn run(cli: &Cli, env_output_dir: Option<String>) -> Result<Outcome, CliError> {
    let cfg = cli.command.run_args().resolve(env_output_dir)?;
    match &cli.command {
        Command::Background(_) => cmd_background(&cfg),
        Command::Massfn { z, .. } => cmd_massfn(&cfg, *z),
        Command::Csfr(_) => cmd_csfr(&cfg),
    }
}

/// Entry point used by the binary; returns the process exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli, std::env::var(OUTPUT_DIR_ENV).ok()) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            println!("manifest {}", outcome.manifest.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
    }
}
