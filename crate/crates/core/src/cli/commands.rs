//! The `background`, `massfn` and `csfr` subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::RunConfig;
use super::format::Csv;
use super::manifest::{sha256_hex, RunManifest, ARTIFACT_VERSION};
use super::svg::LineChart;
use super::CliError;
use crate::background::Background;
use crate::error::Result as ModelResult;
use crate::pipeline::Pipeline;
use crate::structure::PressSchechter;

pub const BACKGROUND_HEADER: [&str; 6] = ["z", "t_yr", "d_c_mpc", "v_c_mpc3", "growth", "delta_c"];
pub const MASSFN_HEADER: [&str; 5] = ["log10_m", "dn_dm", "n_above", "sigma", "dlnsigma_dlnm"];
pub const CSFR_HEADER: [&str; 4] = ["z", "t_yr", "rho_gas", "csfr"];

/// Files written by one subcommand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// `z_i = z_max i / samples` for `i = 0..=samples`, with the last point exact.
pub fn redshift_grid(z_max: f64, samples: usize) -> Vec<f64> {
    (0..=samples)
        .map(|i| {
            if i == samples {
                z_max
            } else {
                z_max * i as f64 / samples as f64
            }
        })
        .collect()
}

/// `mass_samples` evenly spaced `log10 M` values over the mass bounds.
pub fn log10_mass_grid(cfg: &RunConfig) -> Vec<f64> {
    let n = cfg.mass_samples - 1;
    (0..=n)
        .map(|i| {
            if i == n {
                cfg.mass_max
            } else {
                cfg.mass_min + (cfg.mass_max - cfg.mass_min) * i as f64 / n as f64
            }
        })
        .collect()
}

pub fn massfn_file_name(z: f64) -> String {
    format!("massfn_z{z:.2}.csv")
}

/// Writes a set of files into one directory; on failure everything written
/// so far is removed.
struct RunWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
    digests: Vec<(String, String)>,
}

impl RunWriter {
    fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            digests: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        // record before writing so a half-written file is cleaned up too
        self.written.push(path.clone());
        if let Err(source) = std::fs::write(&path, bytes) {
            self.discard();
            return Err(CliError::Io { path, source });
        }
        self.digests.push((name.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    fn discard(&mut self) {
        for path in self.written.drain(..) {
            let _ = std::fs::remove_file(path);
        }
    }

    fn finish(
        mut self,
        command: &str,
        manifest_name: &str,
        config: Vec<(String, String)>,
        started: Instant,
    ) -> Result<Outcome, CliError> {
        let manifest = RunManifest {
            version: ARTIFACT_VERSION.into(),
            command: command.into(),
            config,
            files: self.digests.clone(),
            wall_clock: started.elapsed(),
        };
        let files = self.written.clone();
        self.write(manifest_name, manifest.render().as_bytes())?;
        Ok(Outcome {
            files,
            manifest: self.dir.join(manifest_name),
        })
    }
}

/// Cosmic time, comoving distance, comoving volume, growth and collapse
/// threshold on the redshift grid.
pub fn background_table(cfg: &RunConfig) -> ModelResult<String> {
    let bg = Background::new(cfg.cosmology(), cfg.tolerance())?;
    let rows = redshift_grid(cfg.z_max, cfg.samples)
        .into_par_iter()
        .map(|z| {
            Ok([
                z,
                bg.age(z)?,
                bg.comoving_distance(z)?,
                bg.comoving_volume(z)?,
                bg.growth(z)?,
                bg.delta_c(z)?,
            ])
        })
        .collect::<ModelResult<Vec<_>>>()?;
    let mut csv = Csv::new(&BACKGROUND_HEADER);
    for row in &rows {
        csv.row(row);
    }
    Ok(csv.into_string())
}

/// Press-Schechter mass function at redshift `z` on the mass grid.
pub fn massfn_table(cfg: &RunConfig, z: f64) -> ModelResult<String> {
    let ps = PressSchechter::new(cfg.cosmology(), cfg.mass_min, cfg.mass_max, cfg.tolerance())?;
    let rows = log10_mass_grid(cfg)
        .into_par_iter()
        .map(|lm| {
            let m = 10f64.powf(lm);
            let sample = ps.mass_function_sample(m, z)?;
            let (sigma, slope) = ps.sigma_table().sigma_and_slope(m)?;
            Ok([lm, sample.dn_dm, sample.n_above, sigma, slope])
        })
        .collect::<ModelResult<Vec<_>>>()?;
    let mut csv = Csv::new(&MASSFN_HEADER);
    for row in &rows {
        csv.row(row);
    }
    Ok(csv.into_string())
}

/// CSFR table and its plot.
pub fn csfr_outputs(cfg: &RunConfig) -> ModelResult<(String, String)> {
    let pipeline = Pipeline::new(cfg.pipeline())?;
    let (_, history) = pipeline.run_csfr()?;
    let mut csv = Csv::new(&CSFR_HEADER);
    for i in 0..history.len() {
        csv.row(&[history.zs[i], history.ts[i], history.rho_gas[i], history.csfr[i]]);
    }
    let chart = LineChart {
        title: "Cosmic star formation rate".into(),
        x_label: "redshift z".into(),
        y_label: "star formation rate density [M_sun / yr / Mpc^3]".into(),
        xs: history.zs.clone(),
        ys: history.csfr.clone(),
    };
    Ok((csv.into_string(), chart.render()))
}

pub fn cmd_background(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let csv = background_table(cfg)?;
    let mut out = RunWriter::create(&cfg.output_dir)?;
    out.write("background.csv", csv.as_bytes())?;
    out.finish("background", "manifest_background.txt", cfg.echo(), started)
}

pub fn cmd_massfn(cfg: &RunConfig, z: f64) -> Result<Outcome, CliError> {
    if !(z >= 0.0 && z <= cfg.z_max) {
        return Err(CliError::Config(super::config::ConfigError::InvalidValue {
            key: "z".into(),
            value: z.to_string(),
            expected: format!("0 <= z <= z_max ({})", cfg.z_max),
        }));
    }
    let started = Instant::now();
    let csv = massfn_table(cfg, z)?;
    let name = massfn_file_name(z);
    let mut out = RunWriter::create(&cfg.output_dir)?;
    out.write(&name, csv.as_bytes())?;
    let mut echo = cfg.echo();
    echo.push(("z".into(), z.to_string()));
    let stem = name.trim_end_matches(".csv");
    out.finish("massfn", &format!("manifest_{stem}.txt"), echo, started)
}

pub fn cmd_csfr(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let (csv, svg) = csfr_outputs(cfg)?;
    let mut out = RunWriter::create(&cfg.output_dir)?;
    out.write("csfr.csv", csv.as_bytes())?;
    out.write("csfr.svg", svg.as_bytes())?;
    out.finish("csfr", "manifest_csfr.txt", cfg.echo(), started)
}
