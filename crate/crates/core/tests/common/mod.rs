//! Randomized invariant checks shared by the property and acceptance
//! targets. Each suite runs [`CASES`] generated cases.

#![allow(dead_code)]

use std::f64::consts::PI;

use mmdose::bioheat::{solve_steady_theta, ThermalStack};
use mmdose::compliance::{
    evaluate, far_field_pd, limit_for, DeviceFarFieldDescriptor, ExposureContext, LimitCatalog,
    Population, Standard, Verdict,
};
use mmdose::constants::{GHZ, MM};
use mmdose::dielectrics::{
    eps_imag_to_sigma, sigma_to_eps_imag, ComplexPermittivity, DielectricDatabase, SkinModel,
    Tissue,
};
use mmdose::multilayer::{
    solve_layer_fields, DielectricSource, LayerStack, ModelPreset, PlaneWaveExcitation, TissueLayer,
};
use mmdose::planewave::{
    brewster_angle, power_coefficients, reflection_coefficient, IncidenceGeometry, Polarization,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub const CASES: u32 = 500;

pub type Outcome = Result<(), String>;

fn run<S: Strategy>(strategy: &S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome {
    let mut runner = TestRunner::new(Config {
        failure_persistence: None,
        ..Config::with_cases(CASES)
    });
    runner.run(strategy, test).map_err(|e| e.to_string())
}

fn permittivity() -> impl Strategy<Value = ComplexPermittivity> {
    (1.0f64..100.0, 0.0f64..100.0).prop_map(|(re, im)| ComplexPermittivity::new(re, im).unwrap())
}

fn polarization() -> impl Strategy<Value = Polarization> {
    prop_oneof![
        Just(Polarization::Parallel),
        Just(Polarization::Perpendicular)
    ]
}

fn preset() -> impl Strategy<Value = ModelPreset> {
    prop::sample::select(ModelPreset::ALL.to_vec())
}

fn skin_model() -> impl Strategy<Value = Option<SkinModel>> {
    prop::option::of(prop::sample::select(vec![
        SkinModel::Gandhi,
        SkinModel::Gabriel,
        SkinModel::ChahatPalm,
        SkinModel::ChahatWristForearm,
        SkinModel::AlekseevPalm,
        SkinModel::AlekseevForearm,
    ]))
}

/// A preset at a random frequency inside the tabulated tissue range, optionally with
/// one of the skin models (which restricts the frequency to 60 GHz), and a
/// random clothing thickness.
fn scenario() -> impl Strategy<Value = (LayerStack, f64)> {
    (preset(), 40.0f64..=100.0, skin_model(), 0.0f64..=10.0).prop_map(|(p, f_ghz, model, d_mm)| {
        let stack = LayerStack::preset(p, d_mm * MM).unwrap();
        match model {
            Some(m) => (stack.with_skin_model(m), 60.0 * GHZ),
            None => (stack, f_ghz * GHZ),
        }
    })
}

fn random_layer() -> impl Strategy<Value = TissueLayer> {
    let tissue = prop::sample::select(vec![
        Tissue::Skin,
        Tissue::Sat,
        Tissue::Muscle,
        Tissue::Bone,
        Tissue::Clothing,
    ]);
    (tissue, 0.0f64..5.0, prop::option::of(permittivity())).prop_map(|(t, d_mm, fixed)| {
        let layer = TissueLayer::new(t, d_mm * MM);
        match fixed {
            Some(eps) => layer.with_dielectric(DielectricSource::Fixed(eps)),
            None => layer,
        }
    })
}

fn random_stack() -> impl Strategy<Value = LayerStack> {
    (
        prop::collection::vec(random_layer(), 0..5),
        prop::sample::select(vec![Tissue::Muscle, Tissue::Bone, Tissue::Skin]),
    )
        .prop_map(|(mut layers, last)| {
            layers.push(TissueLayer::semi_infinite(last));
            LayerStack::new(layers).unwrap()
        })
}

pub fn normal_incidence_is_polarization_blind() -> Outcome {
    run(&permittivity(), |eps| {
        let r_par = reflection_coefficient(eps, IncidenceGeometry::NORMAL, Polarization::Parallel);
        let r_perp =
            reflection_coefficient(eps, IncidenceGeometry::NORMAL, Polarization::Perpendicular);
        prop_assert!((r_par.norm() - r_perp.norm()).abs() < 1e-12);
        Ok(())
    })
}

pub fn reflectance_is_a_fraction() -> Outcome {
    run(
        &(permittivity(), 0.0f64..90.0, polarization()),
        |(eps, deg, pol)| {
            let g = IncidenceGeometry::from_degrees(deg).unwrap();
            let r = reflection_coefficient(eps, g, pol).norm_sqr();
            prop_assert!((0.0..=1.0).contains(&r), "{}", r);
            Ok(())
        },
    )
}

pub fn reflectance_and_transmittance_sum_to_one() -> Outcome {
    run(
        &(permittivity(), 0.0f64..90.0, polarization()),
        |(eps, deg, pol)| {
            let g = IncidenceGeometry::from_degrees(deg).unwrap();
            let p = power_coefficients(eps, g, pol);
            prop_assert!((p.reflectance + p.transmittance - 1.0).abs() < 1e-12);
            Ok(())
        },
    )
}

pub fn lossless_brewster_is_arctan_sqrt() -> Outcome {
    run(&(1.1f64..100.0), |re| {
        let eps = ComplexPermittivity::new(re, 0.0).unwrap();
        let got = brewster_angle(eps).unwrap().to_degrees();
        prop_assert!((got - re.sqrt().atan().to_degrees()).abs() < 0.05);
        Ok(())
    })
}

pub fn conductivity_conversions_invert() -> Outcome {
    run(&(1e-6f64..1e3, 0.1f64..1000.0), |(sigma, f_ghz)| {
        let f = f_ghz * GHZ;
        let back = eps_imag_to_sigma(sigma_to_eps_imag(sigma, f).unwrap(), f).unwrap();
        prop_assert!((back - sigma).abs() <= 1e-12 * sigma);
        Ok(())
    })
}

pub fn multilayer_conserves_energy() -> Outcome {
    run(
        &(random_stack(), 40.0f64..=100.0, 0.1f64..100.0),
        |(stack, f_ghz, pd)| {
            let db = DielectricDatabase::bundled();
            let ex = PlaneWaveExcitation::new(f_ghz * GHZ, pd).unwrap();
            let sol = solve_layer_fields(&stack, &ex, db).unwrap();
            prop_assert!(
                sol.energy_balance_error() < 1e-9,
                "{}",
                sol.energy_balance_error()
            );
            prop_assert!(
                sol.max_interface_residual() < 1e-10,
                "{}",
                sol.max_interface_residual()
            );
            Ok(())
        },
    )
}

pub fn empty_interior_layer_changes_nothing() -> Outcome {
    run(
        &(
            random_stack(),
            prop::sample::select(vec![Tissue::Skin, Tissue::Sat, Tissue::Clothing]),
            0usize..8,
            40.0f64..=100.0,
            prop::collection::vec(0.0f64..1.0, 8),
        ),
        |(stack, tissue, slot, f_ghz, probes)| {
            let db = DielectricDatabase::bundled();
            let ex = PlaneWaveExcitation::new(f_ghz * GHZ, 10.0).unwrap();
            let mut layers = stack.layers().to_vec();
            let at = 1 + slot % layers.len().max(1);
            let at = at.min(layers.len() - 1);
            layers.insert(at, TissueLayer::new(tissue, 0.0));
            let padded = LayerStack::new(layers).unwrap();

            let plain = solve_layer_fields(&stack, &ex, db).unwrap();
            let with_empty = solve_layer_fields(&padded, &ex, db).unwrap();
            let scale = plain.incident.norm();
            prop_assert!((plain.reflected - with_empty.reflected).norm() < 1e-10 * scale);
            let depth: f64 = stack
                .layers()
                .iter()
                .filter_map(|l| l.thickness)
                .sum::<f64>()
                + 2.0 * MM;
            for p in probes {
                let z = p * depth;
                let a = plain.e_at(z).unwrap();
                let b = with_empty.e_at(z).unwrap();
                prop_assert!(
                    (a - b).norm() < 1e-10 * scale,
                    "z = {} mm: {} vs {}",
                    z * 1e3,
                    a,
                    b
                );
            }
            Ok(())
        },
    )
}

pub fn temperature_is_linear_in_power() -> Outcome {
    run(
        &(
            scenario(),
            0.1f64..50.0,
            prop::sample::select(vec![2.0, 5.0, 10.0]),
            prop::collection::vec(0.0f64..35.0, 6),
        ),
        |((stack, f), pd, factor, probes)| {
            let db = DielectricDatabase::bundled();
            let thermal = ThermalStack::from_stack(&stack, db).unwrap();
            let solve = |pd: f64| {
                let fields =
                    solve_layer_fields(&stack, &PlaneWaveExcitation::new(f, pd).unwrap(), db)
                        .unwrap();
                solve_steady_theta(&thermal, &fields).unwrap()
            };
            let base = solve(pd);
            let scaled = solve(factor * pd);
            for z_mm in probes {
                let a = base.theta_at(z_mm * MM).unwrap();
                let b = scaled.theta_at(z_mm * MM).unwrap();
                prop_assert!(
                    (b - factor * a).abs() <= 1e-10 * (factor * a).abs().max(1e-300),
                    "{} vs {}",
                    b,
                    factor * a
                );
            }
            Ok(())
        },
    )
}

pub fn temperature_vanishes_at_depth_and_is_non_negative() -> Outcome {
    run(&(scenario(), 0.0f64..50.0), |((stack, f), pd)| {
        let db = DielectricDatabase::bundled();
        let thermal = ThermalStack::from_stack(&stack, db).unwrap();
        let fields =
            solve_layer_fields(&stack, &PlaneWaveExcitation::new(f, pd).unwrap(), db).unwrap();
        let sol = solve_steady_theta(&thermal, &fields).unwrap();
        prop_assert_eq!(sol.theta_at(35.0 * MM).unwrap(), 0.0);
        let grid: Vec<f64> = (0..=350).map(|i| i as f64 * 0.1 * MM).collect();
        for (z, t) in grid.iter().zip(sol.profile(&grid).unwrap()) {
            prop_assert!(
                t >= -1e-12 * sol.surface_theta().abs().max(1e-12),
                "θ({} mm) = {}",
                z * 1e3,
                t
            );
        }
        Ok(())
    })
}

pub fn temperature_is_continuous_across_interfaces() -> Outcome {
    run(&(scenario(), 0.0f64..50.0), |((stack, f), pd)| {
        let db = DielectricDatabase::bundled();
        let thermal = ThermalStack::from_stack(&stack, db).unwrap();
        let fields =
            solve_layer_fields(&stack, &PlaneWaveExcitation::new(f, pd).unwrap(), db).unwrap();
        let sol = solve_steady_theta(&thermal, &fields).unwrap();
        for (dt, dflux) in sol.interface_residuals() {
            prop_assert!(dt < 1e-9, "Δθ = {}", dt);
            prop_assert!(dflux < 1e-9, "Δflux = {}", dflux);
        }
        prop_assert!(sol.surface_residual() < 1e-9);
        Ok(())
    })
}

pub fn far_field_pd_decreases_with_distance() -> Outcome {
    run(
        &(1e-3f64..10.0, 0.0f64..30.0, 0.05f64..5.0, 1e-3f64..5.0),
        |(power, gain_db, d1, extra)| {
            let gain = 10f64.powf(gain_db / 10.0);
            let near = DeviceFarFieldDescriptor::new(power, gain, 1e-3, d1, 60.0 * GHZ).unwrap();
            let far = near.with_distance(d1 + extra).unwrap();
            let (a, b) = (far_field_pd(&near).unwrap(), far_field_pd(&far).unwrap());
            prop_assert!(b < a);
            prop_assert!((a - gain * power / (4.0 * PI * d1 * d1)).abs() <= 1e-12 * a);
            Ok(())
        },
    )
}

pub fn no_verdict_inside_the_evaluation_boundary() -> Outcome {
    run(
        &(1e-3f64..0.1, 1e-3f64..1.0, 10.0f64..100.0, 1e-3f64..10.0),
        |(dimension, distance, f_ghz, power)| {
            let device =
                DeviceFarFieldDescriptor::new(power, 10.0, dimension, distance, f_ghz * GHZ)
                    .unwrap();
            let ctx = ExposureContext::new(
                Standard::Icnirp,
                Population::GeneralPublic,
                f_ghz * GHZ,
                false,
            )
            .unwrap();
            let report = evaluate(&device, &ctx).unwrap();
            let boundary = device.fraunhofer_distance().max(0.05);
            if distance < boundary {
                prop_assert_eq!(report.verdict, Verdict::NearFieldIndeterminate);
                prop_assert!(report.power_density.is_none());
            } else {
                prop_assert_ne!(report.verdict, Verdict::NearFieldIndeterminate);
            }
            Ok(())
        },
    )
}

pub fn occupational_limits_dominate() -> Outcome {
    run(
        &(
            prop::sample::select(Standard::ALL.to_vec()),
            any::<bool>(),
            0.0f64..=1.0,
        ),
        |(standard, peak, t)| {
            let (lo, hi) = LimitCatalog::bundled().band(standard).unwrap();
            let f = (lo + t * (hi - lo)) * GHZ;
            let general = limit_for(
                &ExposureContext::new(standard, Population::GeneralPublic, f, peak).unwrap(),
            );
            let occupational = limit_for(
                &ExposureContext::new(standard, Population::Occupational, f, peak).unwrap(),
            );
            match (general, occupational) {
                (Ok(g), Ok(o)) => {
                    prop_assert!(o.pd_limit >= g.pd_limit, "{} vs {}", o.pd_limit, g.pd_limit)
                }
                (Err(_), Err(_)) => {}
                (g, o) => {
                    prop_assert!(false, "populations disagree on coverage: {:?} / {:?}", g, o)
                }
            }
            Ok(())
        },
    )
}

pub type Suite = (&'static str, fn() -> Outcome);

pub const SUITES: &[Suite] = &[
    (
        "normal_incidence_is_polarization_blind",
        normal_incidence_is_polarization_blind,
    ),
    ("reflectance_is_a_fraction", reflectance_is_a_fraction),
    (
        "reflectance_and_transmittance_sum_to_one",
        reflectance_and_transmittance_sum_to_one,
    ),
    (
        "lossless_brewster_is_arctan_sqrt",
        lossless_brewster_is_arctan_sqrt,
    ),
    (
        "conductivity_conversions_invert",
        conductivity_conversions_invert,
    ),
    ("multilayer_conserves_energy", multilayer_conserves_energy),
    (
        "empty_interior_layer_changes_nothing",
        empty_interior_layer_changes_nothing,
    ),
    (
        "temperature_is_linear_in_power",
        temperature_is_linear_in_power,
    ),
    (
        "temperature_vanishes_at_depth_and_is_non_negative",
        temperature_vanishes_at_depth_and_is_non_negative,
    ),
    (
        "temperature_is_continuous_across_interfaces",
        temperature_is_continuous_across_interfaces,
    ),
    (
        "far_field_pd_decreases_with_distance",
        far_field_pd_decreases_with_distance,
    ),
    (
        "no_verdict_inside_the_evaluation_boundary",
        no_verdict_inside_the_evaluation_boundary,
    ),
    ("occupational_limits_dominate", occupational_limits_dominate),
];
