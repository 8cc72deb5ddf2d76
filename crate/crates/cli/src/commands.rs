use std::process::ExitCode;

use mmdose::bioheat::{
    baseline_temperature_fd, clothing_thickness_temperature_sweep, solve_steady_theta,
    solve_steady_theta_fd, FdProfile, ThermalStack,
};
use mmdose::compliance::{
    evaluate, far_field_pd, gain_from_db, DeviceFarFieldDescriptor, ExposureContext, Verdict,
};
use mmdose::constants::{GHZ, MM};
use mmdose::dielectrics::{ComplexPermittivity, DielectricDatabase};
use mmdose::multilayer::{clothing_sweep, solve_layer_fields};
use mmdose::planewave::{
    absorption_depth, penetration_depth, power_coefficients, IncidenceGeometry, Polarization,
};
use mmdose::{Error, Result};

use crate::config::{self, Scenario, ScenarioConfig, ScenarioFlags};
use crate::output::{grid, num, CsvOut};
use crate::{Cli, Command, DeviceArgs, MediumArgs};

pub fn parse_eps(s: &str) -> std::result::Result<(f64, f64), String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(re)?, parse(im)?))
}

struct Context {
    db: DielectricDatabase,
    config: ScenarioConfig,
    output: Option<std::path::PathBuf>,
}

impl Context {
    fn csv(&self) -> Result<CsvOut> {
        CsvOut::open(self.output.as_deref())
    }

    fn scenario(&self, flags: &ScenarioFlags) -> Result<Scenario> {
        config::resolve(&self.config, flags, &self.db)
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let db = match &cli.data_dir {
        Some(dir) => DielectricDatabase::load_overrides(dir)?,
        None => DielectricDatabase::bundled().clone(),
    };
    let config = match &cli.config {
        Some(path) => config::load(path)?,
        None => ScenarioConfig::default(),
    };
    let output = cli.output.clone().or_else(|| config.output.clone());
    let ctx = Context { db, config, output };

    match cli.command {
        Command::Reflect(a) => reflect(
            &ctx,
            &a.medium,
            a.frequency_ghz,
            (a.theta_start, a.theta_stop, a.theta_step),
            a.polarization,
        ),
        Command::Depth(a) => depth(&ctx, &a.medium, (a.f_start, a.f_stop, a.f_step)),
        Command::Fields(a) => fields(&ctx, &a.scenario, a.z_step, a.z_max),
        Command::Temp(a) => temp(&ctx, &a.scenario, a.z_step, a.absolute, a.finite_difference),
        Command::SweepClothing(a) => sweep(&ctx, a.scenario, (a.d_start, a.d_stop, a.d_step)),
        Command::Compliance(a) => {
            let device = device(&ctx, &a.device, a.distance_cm * 1e-2)?;
            let context = ExposureContext::new(a.standard, a.population, device.frequency, a.peak)?;
            let report = evaluate(&device, &context)?;
            println!("{report}");
            return Ok(match report.verdict {
                Verdict::Compliant => ExitCode::SUCCESS,
                Verdict::NonCompliant => ExitCode::from(2),
                Verdict::NearFieldIndeterminate => ExitCode::from(3),
            });
        }
        Command::Farfield(a) => farfield(&ctx, &a.device, (a.d_start, a.d_stop, a.d_step)),
    }?;
    Ok(ExitCode::SUCCESS)
}

/// (label, permittivity at `frequency`) for every requested medium.
fn media(
    ctx: &Context,
    medium: &MediumArgs,
    frequency: f64,
    default_all_models: bool,
) -> Vec<(String, Result<ComplexPermittivity>)> {
    let mut out = Vec::new();
    let none_given = medium.models.is_empty() && medium.tissues.is_empty() && medium.eps.is_empty();
    let models: Vec<_> = if none_given && default_all_models {
        mmdose::dielectrics::SkinModel::ALL.to_vec()
    } else {
        medium.models.clone()
    };
    let tissues: Vec<_> = if none_given && !default_all_models {
        vec![mmdose::dielectrics::Tissue::Skin]
    } else {
        medium.tissues.clone()
    };
    for m in models {
        out.push((
            m.to_string(),
            ctx.db
                .lookup_skin_model(m, frequency)
                .map(|l| l.permittivity),
        ));
    }
    for t in tissues {
        out.push((
            t.to_string(),
            ctx.db
                .tissue_permittivity(t, frequency)
                .map(|l| l.permittivity),
        ));
    }
    for &(re, im) in &medium.eps {
        out.push((format!("eps={re}-j{im}"), ComplexPermittivity::new(re, im)));
    }
    out
}

fn reflect(
    ctx: &Context,
    medium: &MediumArgs,
    frequency_ghz: f64,
    (start, stop, step): (f64, f64, f64),
    polarization: Option<Polarization>,
) -> Result<()> {
    let thetas = grid(start, stop, step)?;
    let geometries = thetas
        .iter()
        .map(|&deg| IncidenceGeometry::from_degrees(deg))
        .collect::<Result<Vec<_>>>()?;
    let pols: Vec<Polarization> = match polarization {
        Some(p) => vec![p],
        None => Polarization::ALL.to_vec(),
    };
    let sources = media(ctx, medium, frequency_ghz * GHZ, true)
        .into_iter()
        .map(|(label, eps)| eps.map(|e| (label, e)))
        .collect::<Result<Vec<_>>>()?;

    let mut csv = ctx.csv()?;
    csv.row([
        "source",
        "frequency_GHz",
        "theta_deg",
        "polarization",
        "reflectance",
    ])?;
    for (label, eps) in &sources {
        for &pol in &pols {
            for (deg, g) in thetas.iter().zip(&geometries) {
                let r = power_coefficients(*eps, *g, pol).reflectance;
                csv.row([
                    label.clone(),
                    num(frequency_ghz),
                    num(*deg),
                    pol.name().to_string(),
                    num(r),
                ])?;
            }
        }
    }
    csv.finish()
}

fn depth(ctx: &Context, medium: &MediumArgs, (start, stop, step): (f64, f64, f64)) -> Result<()> {
    let freqs = grid(start, stop, step)?;
    let mut csv = ctx.csv()?;
    csv.row([
        "source",
        "frequency_GHz",
        "depth_mm",
        "depth_90pct_mm",
        "note",
    ])?;
    let mut rows: Vec<(usize, f64, [String; 5])> = Vec::new();
    for &f_ghz in &freqs {
        for (i, (label, eps)) in media(ctx, medium, f_ghz * GHZ, false)
            .into_iter()
            .enumerate()
        {
            let f = f_ghz * GHZ;
            let computed =
                eps.and_then(|e| Ok((penetration_depth(e, f)?, absorption_depth(e, f, 0.9)?)));
            let row = match computed {
                Ok((d, d90)) => [label, num(f_ghz), num(d / MM), num(d90 / MM), String::new()],
                Err(e) => [
                    label,
                    num(f_ghz),
                    String::new(),
                    String::new(),
                    e.to_string(),
                ],
            };
            rows.push((i, f_ghz, row));
        }
    }
    // Group rows by source, frequencies ascending within each.
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    for (_, _, row) in rows {
        csv.row(row)?;
    }
    csv.finish()
}

fn fields(ctx: &Context, flags: &ScenarioFlags, z_step: f64, z_max: f64) -> Result<()> {
    let scenario = ctx.scenario(flags)?;
    let solution = solve_layer_fields(&scenario.stack, &scenario.excitation, &ctx.db)?;
    let mut csv = ctx.csv()?;
    csv.row(["z_mm", "tissue", "sar_rho_W_per_m3", "E_abs_V_per_m"])?;
    for z_mm in grid(0.0, z_max, z_step)? {
        let z = z_mm * MM;
        let (i, _) = solution.locate(z)?;
        csv.row([
            num(z_mm),
            solution.layers[i].tissue.to_string(),
            num(solution.sar_rho_at(z)?),
            num(solution.e_at(z)?.norm()),
        ])?;
    }
    csv.finish()
}

fn interpolate(profile: &FdProfile, z: f64) -> f64 {
    let zs = &profile.z;
    let j = zs.partition_point(|&x| x <= z).clamp(1, zs.len() - 1);
    let (z0, z1) = (zs[j - 1], zs[j]);
    let t = ((z - z0) / (z1 - z0)).clamp(0.0, 1.0);
    profile.values[j - 1] * (1.0 - t) + profile.values[j] * t
}

fn temp(
    ctx: &Context,
    flags: &ScenarioFlags,
    z_step: f64,
    absolute: bool,
    finite_difference: bool,
) -> Result<()> {
    let scenario = ctx.scenario(flags)?;
    let solution = solve_layer_fields(&scenario.stack, &scenario.excitation, &ctx.db)?;
    let thermal = ThermalStack::from_stack(&scenario.stack, &ctx.db)?
        .with_temperatures(scenario.t_air, scenario.t_blood);
    let depth_mm = thermal.depth() / MM;

    let (z_mm, theta): (Vec<f64>, Vec<f64>) = if finite_difference {
        let fd = solve_steady_theta_fd(&thermal, &solution, z_step * MM)?;
        let z: Vec<f64> = grid(0.0, depth_mm, z_step)?;
        if z.len() != fd.z.len() {
            return Err(Error::Usage(
                "grid step must divide the thermal depth".into(),
            ));
        }
        (z, fd.values)
    } else {
        let closed = solve_steady_theta(&thermal, &solution)?;
        let z = grid(0.0, depth_mm, z_step)?;
        let theta = closed.profile(&z.iter().map(|v| v * MM).collect::<Vec<_>>())?;
        (z, theta)
    };
    let baseline = if absolute {
        Some(baseline_temperature_fd(&thermal, 10e-6)?)
    } else {
        None
    };

    let mut csv = ctx.csv()?;
    if absolute {
        csv.row(["z_mm", "theta_degC", "T_degC"])?;
    } else {
        csv.row(["z_mm", "theta_degC"])?;
    }
    for (z, t) in z_mm.iter().zip(&theta) {
        match &baseline {
            Some(b) => csv.row([num(*z), num(*t), num(t + interpolate(b, z * MM))])?,
            None => csv.row([num(*z), num(*t)])?,
        }
    }
    csv.finish()
}

fn sweep(
    ctx: &Context,
    mut flags: ScenarioFlags,
    (start, stop, step): (f64, f64, f64),
) -> Result<()> {
    if flags.preset.is_none() && ctx.config.preset.is_none() && ctx.config.layers.is_none() {
        flags.preset = Some("hat-on-forehead".into());
    }
    let scenario = ctx.scenario(&flags)?;
    let thicknesses: Vec<f64> = grid(start, stop, step)?;
    let metres: Vec<f64> = thicknesses.iter().map(|d| d * MM).collect();
    let temps = clothing_thickness_temperature_sweep(
        &scenario.stack,
        &metres,
        &scenario.excitation,
        &ctx.db,
    )?;
    let trans = clothing_sweep(&scenario.stack, &metres, scenario.frequency(), &ctx.db)?;

    let mut csv = ctx.csv()?;
    csv.row([
        "d_c_mm",
        "theta_surface_degC",
        "transmission_full",
        "transmission_two_interface",
        "transmission_air_clothing",
    ])?;
    for ((d, t), p) in thicknesses.iter().zip(&temps).zip(&trans) {
        csv.row([
            num(*d),
            num(t.surface_theta),
            num(p.transmission.clothing_skin_full),
            num(p.transmission.clothing_skin),
            num(p.transmission.air_clothing),
        ])?;
    }
    csv.finish()
}

fn device(ctx: &Context, args: &DeviceArgs, distance: f64) -> Result<DeviceFarFieldDescriptor> {
    let f_ghz = args
        .frequency_ghz
        .or(ctx.config.frequency_ghz)
        .unwrap_or(60.0);
    DeviceFarFieldDescriptor::new(
        args.power_mw * 1e-3,
        gain_from_db(args.gain_dbi),
        args.dimension_mm * MM,
        distance,
        f_ghz * GHZ,
    )
}

fn farfield(ctx: &Context, args: &DeviceArgs, (start, stop, step): (f64, f64, f64)) -> Result<()> {
    let distances = grid(start, stop, step)?;
    let mut csv = ctx.csv()?;
    csv.row(["distance_cm", "pd_W_per_m2", "region"])?;
    for d_cm in distances {
        let dev = device(ctx, args, d_cm * 1e-2)?;
        match far_field_pd(&dev) {
            Ok(pd) => csv.row([num(d_cm), num(pd), "far-field".into()])?,
            Err(Error::NearField { .. }) => {
                csv.row([num(d_cm), String::new(), "near-field".into()])?
            }
            Err(e) => return Err(e),
        }
    }
    csv.finish()
}
