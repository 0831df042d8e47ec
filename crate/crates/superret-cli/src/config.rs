//! Shared flags, the optional TOML config file, and their merge rules.
//!
//! Precedence: command-line flag, then config-file key, then built-in
//! default. Physical lengths are accepted only here; everything behind the
//! CLI boundary is dimensionless (`X = 2 pi d / lambda`).

use clap::{Args, ValueEnum};
use serde::Deserialize;
use std::path::PathBuf;

use superret::greens::Regime;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Full,
    Nonretarded,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Full => Regime::Full,
            RegimeArg::Nonretarded => Regime::NonRetarded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output path; '-' writes to stdout
    #[arg(long)]
    pub out: Option<String>,

    /// Grid resolution (points per axis, or sweep points)
    #[arg(long)]
    pub resolution: Option<usize>,

    /// Worker threads; 0 picks the number of cores
    #[arg(long)]
    pub threads: Option<usize>,

    /// Seed for the Monte Carlo cross-checks
    #[arg(long)]
    pub seed: Option<u64>,

    /// Green's tensor regime
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,

    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// TOML file mirroring the flags; explicit flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Dimensionless-geometry flags: either `--x-dimensionless` directly or the
/// physical pair `--wavelength` and `--distance` (any common length unit,
/// the ratio is all that matters).
#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    /// Dimensionless distance X = 2 pi d / lambda
    #[arg(long, conflicts_with_all = ["wavelength", "distance"])]
    pub x_dimensionless: Option<f64>,

    /// Transition wavelength (with --distance)
    #[arg(long, requires = "distance")]
    pub wavelength: Option<f64>,

    /// Physical distance (with --wavelength)
    #[arg(long, requires = "wavelength")]
    pub distance: Option<f64>,
}

/// The config file mirrors the long flags, snake_cased.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<String>,
    pub resolution: Option<usize>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub regime: Option<String>,
    pub format: Option<String>,
    pub x_dimensionless: Option<f64>,
    pub wavelength: Option<f64>,
    pub distance: Option<f64>,
    pub half_extent: Option<f64>,
    pub n_donors: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub z0_min: Option<f64>,
    pub z0_max: Option<f64>,
    pub radius: Option<f64>,
    pub k: Option<usize>,
    pub ring_points: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&PathBuf>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }

    pub fn regime(&self) -> Result<Option<RegimeArg>, CliError> {
        match self.regime.as_deref() {
            None => Ok(None),
            Some("full") => Ok(Some(RegimeArg::Full)),
            Some("nonretarded") => Ok(Some(RegimeArg::Nonretarded)),
            Some(other) => Err(CliError::Config(format!(
                "config regime must be 'full' or 'nonretarded', got '{other}'"
            ))),
        }
    }

    pub fn format(&self) -> Result<Option<FormatArg>, CliError> {
        match self.format.as_deref() {
            None => Ok(None),
            Some("csv") => Ok(Some(FormatArg::Csv)),
            Some("json") => Ok(Some(FormatArg::Json)),
            Some(other) => Err(CliError::Config(format!(
                "config format must be 'csv' or 'json', got '{other}'"
            ))),
        }
    }
}

/// Settings every command needs, after merging flags, file, and defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub out: String,
    pub resolution: usize,
    pub seed: u64,
    pub regime: Regime,
    pub format: FormatArg,
    pub file: FileConfig,
}

pub fn resolve_common(
    args: &CommonArgs,
    default_regime: RegimeArg,
    default_format: FormatArg,
) -> Result<Resolved, CliError> {
    let file = FileConfig::load(args.config.as_ref())?;
    let resolution = args.resolution.or(file.resolution).unwrap_or(201);
    if resolution < 8 {
        return Err(CliError::Config(format!(
            "resolution must be at least 8, got {resolution}"
        )));
    }
    let threads = args.threads.or(file.threads).unwrap_or(0);
    if threads > 0 {
        // Ignore the error if a pool already exists (tests call this twice).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let regime = args.regime.or(file.regime()?).unwrap_or(default_regime);
    let format = args.format.or(file.format()?).unwrap_or(default_format);
    Ok(Resolved {
        out: args.out.clone().or(file.out.clone()).unwrap_or_else(|| "-".to_string()),
        resolution,
        seed: args.seed.or(file.seed).unwrap_or(0),
        regime: regime.into(),
        format,
        file,
    })
}

/// Dimensionless X from the geometry flags or the config file.
pub fn resolve_x(geom: &GeometryArgs, file: &FileConfig, default_x: f64) -> Result<f64, CliError> {
    if let Some(x) = geom.x_dimensionless {
        check_positive("x-dimensionless", x)?;
        return Ok(x);
    }
    match (geom.wavelength, geom.distance) {
        (Some(w), Some(d)) => {
            check_positive("wavelength", w)?;
            check_positive("distance", d)?;
            return Ok(2.0 * std::f64::consts::PI * d / w);
        }
        (None, None) => {}
        // clap's `requires` already rejects half-specified pairs; config
        // files funnel through the arm below.
        _ => unreachable!("clap rejects a lone wavelength/distance flag"),
    }
    if let Some(x) = file.x_dimensionless {
        check_positive("x_dimensionless", x)?;
        return Ok(x);
    }
    match (file.wavelength, file.distance) {
        (Some(w), Some(d)) => {
            check_positive("wavelength", w)?;
            check_positive("distance", d)?;
            Ok(2.0 * std::f64::consts::PI * d / w)
        }
        (None, None) => Ok(default_x),
        _ => Err(CliError::Config(
            "config must set wavelength and distance together".to_string(),
        )),
    }
}

pub fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if !v.is_finite() || v <= 0.0 {
        return Err(CliError::Config(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}
