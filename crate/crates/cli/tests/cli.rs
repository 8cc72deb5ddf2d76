use std::path::PathBuf;
use std::process::{Command, Output};

fn mmdose(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmdose"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv(args: &[&str]) -> Vec<Vec<String>> {
    let out = mmdose(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = rows[0].iter().position(|h| h == name).unwrap();
    rows[1..].iter().map(|r| r[i].parse().unwrap()).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mmdose-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn headers() {
    let cases: &[(&[&str], &str)] = &[
        (
            &["reflect"],
            "source,frequency_GHz,theta_deg,polarization,reflectance",
        ),
        (
            &["depth"],
            "source,frequency_GHz,depth_mm,depth_90pct_mm,note",
        ),
        (&["fields"], "z_mm,tissue,sar_rho_W_per_m3,E_abs_V_per_m"),
        (&["temp"], "z_mm,theta_degC"),
        (&["temp", "--absolute"], "z_mm,theta_degC,T_degC"),
        (
            &["sweep-clothing", "--d-stop", "1"],
            "d_c_mm,theta_surface_degC,transmission_full,transmission_two_interface,transmission_air_clothing",
        ),
        (
            &["farfield", "--power", "1", "--dimension", "5", "--frequency", "60"],
            "distance_cm,pd_W_per_m2,region",
        ),
    ];
    for (args, header) in cases {
        assert_eq!(csv(args)[0].join(","), *header, "{args:?}");
    }
}

#[test]
fn gabriel_normal_reflectance() {
    let rows = csv(&[
        "reflect",
        "--model",
        "gabriel",
        "--theta-stop",
        "0",
        "--polarization",
        "te",
    ]);
    assert_eq!(rows.len(), 2);
    let r = column(&rows, "reflectance")[0];
    assert!((r - 0.378).abs() < 0.005, "{r}");
}

#[test]
fn matched_medium_reflects_nothing_measurable() {
    let rows = csv(&[
        "reflect",
        "--eps",
        "1,0",
        "--theta-stop",
        "80",
        "--theta-step",
        "10",
    ]);
    assert_eq!(rows.len(), 1 + 2 * 9);
    assert!(column(&rows, "reflectance").iter().all(|&r| r < 1e-24));
}

#[test]
fn skin_depth_shrinks_with_frequency() {
    let rows = csv(&["depth"]);
    let f = column(&rows, "frequency_GHz");
    let d = column(&rows, "depth_mm");
    assert_eq!(f, vec![40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0]);
    assert!((d[2] - 0.48).abs() < 0.02, "{}", d[2]);
    assert!(d.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn lossless_depth_is_reported_not_fatal() {
    let rows = csv(&[
        "depth", "--eps", "4,0", "--tissue", "skin", "--f-stop", "40",
    ]);
    assert_eq!(rows.len(), 3);
    let lossless = rows.iter().find(|r| r[0] == "eps=4-j0").unwrap();
    assert!(lossless[2].is_empty());
    assert!(!lossless[4].is_empty());
}

#[test]
fn temperature_scales_with_power() {
    let at = |pd: &str| column(&csv(&["temp", "--pd", pd, "--z-step", "0.5"]), "theta_degC");
    let ten = at("10");
    let fifty = at("50");
    let zero = at("0");
    assert!((fifty[0] - 0.8).abs() < 0.2, "{}", fifty[0]);
    assert!(zero.iter().all(|&t| t == 0.0));
    for (a, b) in ten.iter().zip(&fifty) {
        if *a > 0.0 {
            assert!((b / a - 5.0).abs() < 1e-9);
        }
    }
}

#[test]
fn clothing_sweep() {
    let rows = csv(&["sweep-clothing", "--d-step", "0.01", "--d-stop", "6"]);
    let d = column(&rows, "d_c_mm");
    let t = column(&rows, "transmission_full");
    let naked = column(
        &csv(&["temp", "--preset", "naked-forehead", "--z-step", "1"]),
        "theta_degC",
    )[0];
    assert!((column(&rows, "theta_surface_degC")[0] - naked).abs() < 1e-12);

    let peaks: Vec<f64> = (1..t.len() - 1)
        .filter(|&i| t[i] > t[i - 1] && t[i] >= t[i + 1])
        .map(|i| d[i])
        .collect();
    assert!(peaks.len() >= 2, "{peaks:?}");
    let spacing = peaks[1] - peaks[0];
    assert!((spacing - 1.97).abs() < 0.05, "{spacing}");
    let best = (1..t.len())
        .filter(|&i| d[i] < 1.0)
        .map(|i| t[i])
        .fold(0.0, f64::max);
    assert!(best > t[0], "{best} vs {}", t[0]);
}

#[test]
fn compliance_exit_codes() {
    let run = |extra: &[&str]| {
        let mut args = vec![
            "compliance",
            "--power",
            "100",
            "--gain",
            "10",
            "--dimension",
            "10",
            "--frequency",
            "60",
        ];
        args.extend_from_slice(extra);
        mmdose(&args).status.code()
    };
    assert_eq!(run(&["--distance", "10"]), Some(0));
    assert_eq!(run(&["--distance", "5"]), Some(2));
    assert_eq!(
        run(&["--distance", "5", "--population", "occupational"]),
        Some(0)
    );
    assert_eq!(run(&["--distance", "3"]), Some(3));
    assert_eq!(run(&["--distance", "-1"]), Some(1));
    assert_eq!(run(&["--distance", "10", "--frequency", "5"]), Some(1));
    assert_eq!(mmdose(&["compliance"]).status.code(), Some(1));
    assert_eq!(mmdose(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn farfield_blanks_the_near_field() {
    let rows = csv(&[
        "farfield",
        "--power",
        "100",
        "--gain",
        "10",
        "--dimension",
        "10",
        "--frequency",
        "60",
        "--d-stop",
        "10",
    ]);
    assert_eq!(rows[4][1..], ["", "near-field"]);
    assert_eq!(rows[5][2], "far-field");
    let pd: f64 = rows[10][1].parse().unwrap();
    assert!((pd - 7.9577).abs() < 1e-3, "{pd}");
}

#[test]
fn output_is_deterministic() {
    let args = ["sweep-clothing", "--d-stop", "2"];
    assert_eq!(mmdose(&args).stdout, mmdose(&args).stdout);
    let file = scratch("fields.csv");
    let to_file = mmdose(&["fields", "-o", file.to_str().unwrap()]);
    assert!(to_file.status.success() && to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), mmdose(&["fields"]).stdout);
}

#[test]
fn config_file_with_flag_override() {
    let path = scratch("scenario.toml");
    std::fs::write(
        &path,
        "preset = \"naked-skin\"\nfrequency_ghz = 60\nincident_pd = 50\n",
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = column(
        &csv(&["temp", "--config", cfg, "--z-step", "1"]),
        "theta_degC",
    );
    let overridden = column(
        &csv(&["temp", "--config", cfg, "--pd", "10", "--z-step", "1"]),
        "theta_degC",
    );
    assert!((from_file[0] / overridden[0] - 5.0).abs() < 1e-9);

    std::fs::write(&path, "preset = 1\nbogus = 3\n").unwrap();
    assert_eq!(mmdose(&["temp", "--config", cfg]).status.code(), Some(1));
}

#[test]
fn custom_layers_from_config() {
    let path = scratch("layers.toml");
    std::fs::write(
        &path,
        r#"
frequency_ghz = 60
[[layers]]
tissue = "skin"
thickness_mm = 1
[[layers]]
tissue = "sat"
thickness_mm = 3
[[layers]]
tissue = "muscle"
"#,
    )
    .unwrap();
    let custom = csv(&["fields", "--config", path.to_str().unwrap(), "--z-max", "5"]);
    let preset = csv(&["fields", "--preset", "naked-skin", "--z-max", "5"]);
    assert_eq!(custom, preset);
}
