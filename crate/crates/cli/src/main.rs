//! `mmdose`: reflection, penetration, field, temperature and exposure-limit
//! calculations for millimeter waves on layered tissue, written as CSV.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mmdose::compliance::{Population, Standard};
use mmdose::dielectrics::{SkinModel, Tissue};
use mmdose::planewave::Polarization;

use crate::config::ScenarioFlags;

#[derive(Debug, Parser)]
#[command(
    name = "mmdose",
    version,
    about = "Millimeter-wave dosimetry for layered tissue"
)]
struct Cli {
    /// Scenario file (TOML). Flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory with replacement data tables
    /// (skin_models.csv, tissue_dielectric.csv, tissue_thermal.csv).
    #[arg(long, global = true, value_name = "DIR")]
    data_dir: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Power reflectance at the air/skin interface against incidence angle.
    Reflect(ReflectArgs),
    /// Penetration depth 1/α against frequency.
    Depth(DepthArgs),
    /// SAR·ρ and |E| against depth for a layered scenario.
    Fields(FieldsArgs),
    /// Steady temperature elevation against depth.
    Temp(TempArgs),
    /// Surface temperature and skin transmission against clothing thickness.
    SweepClothing(SweepArgs),
    /// Far-field power density against an exposure limit.
    Compliance(ComplianceArgs),
    /// Far-field power density against distance.
    Farfield(FarfieldArgs),
}

/// Permittivity sources shared by `reflect` and `depth`.
#[derive(Debug, Clone, Args)]
struct MediumArgs {
    /// Skin model(s); all six when no source is given.
    #[arg(long = "model", value_name = "MODEL")]
    models: Vec<SkinModel>,
    /// Tabulated tissue(s).
    #[arg(long = "tissue", value_name = "TISSUE")]
    tissues: Vec<Tissue>,
    /// Fixed permittivity as `eps_real,eps_imag` (ε* = ε′ − jε″).
    #[arg(long = "eps", value_name = "RE,IM", value_parser = commands::parse_eps)]
    eps: Vec<(f64, f64)>,
}

#[derive(Debug, Args)]
struct ReflectArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// GHz.
    #[arg(long = "frequency", default_value_t = 60.0, value_name = "GHZ")]
    frequency_ghz: f64,
    /// Incidence angles start, stop and step in degrees.
    #[arg(long, default_value_t = 0.0)]
    theta_start: f64,
    #[arg(long, default_value_t = 89.0)]
    theta_stop: f64,
    #[arg(long, default_value_t = 1.0)]
    theta_step: f64,
    /// Polarization; both when omitted.
    #[arg(long)]
    polarization: Option<Polarization>,
}

#[derive(Debug, Args)]
struct DepthArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Frequency range start, stop and step in GHz.
    #[arg(long, default_value_t = 40.0)]
    f_start: f64,
    #[arg(long, default_value_t = 100.0)]
    f_stop: f64,
    #[arg(long, default_value_t = 10.0)]
    f_step: f64,
}

#[derive(Debug, Args)]
struct FieldsArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    /// Depth grid step, mm.
    #[arg(long, default_value_t = 0.01)]
    z_step: f64,
    /// Deepest point, mm from the first interface.
    #[arg(long, default_value_t = 10.0)]
    z_max: f64,
}

#[derive(Debug, Args)]
struct TempArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    /// Depth grid step, mm below the skin surface.
    #[arg(long, default_value_t = 0.01)]
    z_step: f64,
    /// Also write absolute temperature (baseline plus elevation).
    #[arg(long)]
    absolute: bool,
    /// Use the finite-difference solver instead of the closed form; the grid
    /// step must then be at most 0.05 mm and divide every layer.
    #[arg(long)]
    finite_difference: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    /// Clothing thickness range start, stop and step in mm.
    #[arg(long, default_value_t = 0.0)]
    d_start: f64,
    #[arg(long, default_value_t = 10.0)]
    d_stop: f64,
    #[arg(long, default_value_t = 0.01)]
    d_step: f64,
}

#[derive(Debug, Clone, Args)]
struct DeviceArgs {
    /// Radiated power, mW.
    #[arg(long = "power", value_name = "MW")]
    power_mw: f64,
    /// Antenna gain, dBi.
    #[arg(long = "gain", value_name = "DBI", default_value_t = 0.0)]
    gain_dbi: f64,
    /// Largest antenna dimension, mm.
    #[arg(long = "dimension", value_name = "MM")]
    dimension_mm: f64,
    /// GHz.
    #[arg(long = "frequency", value_name = "GHZ")]
    frequency_ghz: Option<f64>,
}

#[derive(Debug, Args)]
struct ComplianceArgs {
    #[command(flatten)]
    device: DeviceArgs,
    /// Distance from the antenna, cm.
    #[arg(long = "distance", value_name = "CM")]
    distance_cm: f64,
    #[arg(long, default_value = "ICNIRP")]
    standard: Standard,
    #[arg(long, default_value = "general-public")]
    population: Population,
    /// Compare against the localized spatial-peak limit.
    #[arg(long)]
    peak: bool,
}

#[derive(Debug, Args)]
struct FarfieldArgs {
    #[command(flatten)]
    device: DeviceArgs,
    /// Distance range start, stop and step in cm.
    #[arg(long, default_value_t = 1.0)]
    d_start: f64,
    #[arg(long, default_value_t = 100.0)]
    d_stop: f64,
    #[arg(long, default_value_t = 1.0)]
    d_step: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
