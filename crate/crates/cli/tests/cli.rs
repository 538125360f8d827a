use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_mifr");

/// Bare 6g(6) binding energy at 18.2 G in the built-in registry, Hz.
const E_6G6: f64 = 158_970.567_918_742_54;

fn mifr(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("MIFR_SPECIES").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Data rows of a CSV table, header dropped.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

/// Four 6g(6) scans at 18.2 G of order `order`, windows centered on the
/// light-shifted resonance.
fn write_scans(dir: &Path, order: u32, bases: [f64; 4]) {
    for base in bases {
        let intensity = base * E_6G6 / 228.7e3;
        let center = (E_6G6 + 8e3 * intensity) / order as f64;
        let out = mifr(&[
            "scan",
            "--state",
            "6g(6)",
            "--field",
            "18.2",
            "--intensity",
            &intensity.to_string(),
            "--modulation-depth",
            "1",
            "--from",
            &(center - 15e3).to_string(),
            "--to",
            &(center + 15e3).to_string(),
            "--points",
            "151",
            "--seed",
            "7",
            "-o",
            dir.join(format!("m{order}-i{base}")).to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
}

fn write_closed_loop_scans(dir: &Path) {
    write_scans(dir, 1, [0.7, 0.9, 1.1, 1.3]);
}

#[test]
fn help_exits_zero_for_every_subcommand() {
    for sub in [
        "fictitious-field",
        "scattering-rate",
        "heating-rate",
        "resonances",
        "floquet-gap",
        "scattering-length",
        "dressed",
        "scan",
        "fit",
        "energy-map",
    ] {
        let out = mifr(&[sub, "--help"]);
        assert_eq!(code(&out), 0, "{sub}");
        assert!(stdout(&out).contains("Usage"), "{sub}");
    }
    assert_eq!(code(&mifr(&["--help"])), 0);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&mifr(&["fictitious-field", "--no-such-flag"])), 2);
    assert_eq!(code(&mifr(&["no-such-command"])), 2);
}

#[test]
fn missing_required_value_is_a_usage_error() {
    let out = mifr(&["fictitious-field", "--detuning", "-23e9"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--intensity"), "{}", stderr(&out));
}

#[test]
fn fictitious_field_rows() {
    let out = mifr(&["fictitious-field", "--intensity", "0.87,1.74", "--detuning", "-23e9", "--pol", "sigma-minus"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# schema_version: 1\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    let b0: f64 = rows[0][4].parse().unwrap();
    let b1: f64 = rows[1][4].parse().unwrap();
    assert!((b0 + 28.61).abs() < 0.05, "{b0}");
    assert!((b1 - 2.0 * b0).abs() < 1e-9 * b0.abs());

    let linear = mifr(&["fictitious-field", "--intensity", "0.87", "--detuning", "-23e9", "--pol", "linear"]);
    let b: f64 = csv_rows(&stdout(&linear))[0][4].parse().unwrap();
    assert_eq!(b, 0.0);
}

#[test]
fn json_envelope() {
    let out = mifr(&["scattering-rate", "--intensity", "0.87", "--detuning", "-23e9", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "scattering-rate");
    let rate = v["rows"][0]["scattering_rate_hz"].as_f64().unwrap();
    assert!(rate > 0.0);
    assert!(v["rows"][0].get("heating_nk_per_ms").is_none());
}

#[test]
fn resonance_orders_are_subharmonics() {
    let out = mifr(&["resonances", "--state", "6g(6)", "--field", "18.2", "--max-order", "3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    let f: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!((f[0] - E_6G6).abs() < 1e-6);
    assert!((f[1] - E_6G6 / 2.0).abs() < 1e-6);
    assert!((f[2] - E_6G6 / 3.0).abs() < 1e-6);
    assert!(rows.iter().all(|r| r[3] == "true"));
}

#[test]
fn unknown_state_is_a_usage_error() {
    assert_eq!(code(&mifr(&["resonances", "--state", "9z", "--field", "18.2"])), 2);
}

#[test]
fn field_outside_state_window_is_a_domain_error() {
    assert_eq!(code(&mifr(&["resonances", "--state", "6g(6)", "--field", "500"])), 3);
}

#[test]
fn pole_is_a_domain_error() {
    let out = mifr(&[
        "scattering-length",
        "--a-bk",
        "1000",
        "--width",
        "10e3",
        "--position",
        "100e3",
        "--order",
        "-1",
        "--freq",
        "100e3",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).starts_with("error: "));
}

#[test]
fn scattering_length_grid() {
    let out = mifr(&[
        "scattering-length",
        "--a-bk",
        "1000",
        "--width",
        "10e3",
        "--position",
        "100e3",
        "--order",
        "-1",
        "--from",
        "50e3",
        "--to",
        "90e3",
        "--points",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(csv_rows(&stdout(&out)).len(), 5);
}

#[test]
fn dressed_model_without_loss_has_no_beta() {
    let out = mifr(&[
        "dressed",
        "--a-bk",
        "1000",
        "--width",
        "10e3",
        "--gamma",
        "0",
        "--energy",
        "-100e3",
        "--order",
        "1",
        "--freq",
        "80e3,120e3",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for row in csv_rows(&stdout(&out)) {
        let beta: f64 = row[2].parse().unwrap();
        assert!(beta.abs() < 1e-9, "{beta}");
    }
}

#[test]
fn scan_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = mifr(&[
            "scan",
            "--state",
            "6g(6)",
            "--field",
            "18.2",
            "--intensity",
            "0.6",
            "--from",
            "140e3",
            "--to",
            "170e3",
            "--points",
            "101",
            "--seed",
            seed,
            "-o",
            dir.path().join(name).to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        (
            std::fs::read(dir.path().join(format!("{name}.csv"))).unwrap(),
            std::fs::read(dir.path().join(format!("{name}.json"))).unwrap(),
        )
    };
    let a = run("a", "11");
    let b = run("b", "11");
    let c = run("c", "12");
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
}

/// Strong drive: the fundamental and its second and third subharmonics
/// all appear in one scan, set up entirely from a config file.
#[test]
fn scan_from_config_shows_three_orders() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("ladder");
    let config = dir.path().join("ladder.toml");
    std::fs::write(
        &config,
        format!(
            "seed = 3\noutput = \"{}\"\n\n[scan]\nstate = \"6g(6)\"\nfield = 18.2\nintensity = 12.0\n\
             modulation_depth = 1.0\nfrom = 60e3\nto = 300e3\npoints = 2401\n",
            base.display()
        ),
    )
    .unwrap();
    let out = mifr(&["--config", config.to_str().unwrap(), "scan"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("ladder.csv")).unwrap();
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("ladder.json")).unwrap()).unwrap();
    assert_eq!(meta["metadata"]["seed"], 3);
    let pts: Vec<(f64, f64)> = csv_rows(&text).iter().map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    let min_near = |f: f64| pts.iter().filter(|(x, _)| (x - f).abs() < 3e3).map(|p| p.1).fold(f64::INFINITY, f64::min);
    let f1 = E_6G6 + 8e3 * 12.0;
    for k in 1..=3 {
        assert!(min_near(f1 / k as f64) < 0.5, "order {k} dip missing");
    }
    for between in [105e3, 180e3] {
        assert!(min_near(between) > 0.8, "spurious dip near {between}");
    }
}

#[test]
fn zero_width_scan_is_flat() {
    let out = mifr(&[
        "scan",
        "--source",
        "two-channel",
        "--width",
        "0",
        "--position",
        "100e3",
        "--order",
        "-1",
        "--from",
        "80e3",
        "--to",
        "120e3",
        "--points",
        "41",
        "--noise",
        "0",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let ys: Vec<f64> = csv_rows(&stdout(&out)).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(ys.len(), 41);
    assert!(ys.iter().all(|&y| (y - ys[0]).abs() < 1e-12));
}

#[test]
fn fano_fit_recovers_scan_resonance() {
    let dir = tempfile::tempdir().unwrap();
    let intensity = 0.9 * E_6G6 / 228.7e3;
    let center = E_6G6 + 8e3 * intensity;
    let base = dir.path().join("s");
    let out = mifr(&[
        "scan",
        "--state",
        "6g(6)",
        "--field",
        "18.2",
        "--intensity",
        &intensity.to_string(),
        "--modulation-depth",
        "1",
        "--from",
        &(center - 15e3).to_string(),
        "--to",
        &(center + 15e3).to_string(),
        "--points",
        "151",
        "--seed",
        "5",
        "-o",
        base.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let window = format!("{},{}", center - 6e3, center + 6e3);
    for ext in ["csv", "json"] {
        let input = dir.path().join(format!("s.{ext}"));
        let out = mifr(&["fit", "fano", input.to_str().unwrap(), "--window", &window]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["converged"], true);
        assert_eq!(v["model"], "fano");
        let fitted = v["center"].as_f64().unwrap();
        let width = v["width"].as_f64().unwrap();
        assert!((fitted - center).abs() < width, "{fitted} vs {center}");
    }
}

#[test]
fn malformed_csv_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "intensity,center\n1.0,100e3\n2.0,oops\n").unwrap();
    let out = mifr(&["fit", "linear", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn linear_fit_of_light_shift() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shift.csv");
    let mut text = String::from("intensity,center,sigma\n");
    for i in [0.5, 1.0, 1.5, 2.0] {
        text += &format!("{i},{},100\n", 150e3 - 8e3 * i);
    }
    std::fs::write(&path, text).unwrap();
    let out = mifr(&["fit", "linear", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["intercept"].as_f64().unwrap() - 150e3).abs() < 1e-6);
    assert!((v["slope"].as_f64().unwrap() + 8e3).abs() < 1e-6);
    assert_eq!(v["weighted"], true);
}

#[test]
fn landau_zener_fit_recovers_gap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lz.csv");
    let mut text = String::from("# two branches around 18.66 G\nb_g,energy_hz,branch\n");
    let (bc, ec, si, sj, v) = (18.66, -150e3, 0.02e6, 1.5e6, 25e3);
    for k in 0..21 {
        let b = 18.56 + 0.01 * k as f64;
        let (ei, ej) = (ec + si * (b - bc), ec + sj * (b - bc));
        let mean = 0.5 * (ei + ej);
        let half = 0.5 * (ei - ej).hypot(v);
        text += &format!("{b},{},lower\n{b},{},upper\n", mean - half, mean + half);
    }
    std::fs::write(&path, text).unwrap();
    let out = mifr(&["fit", "lz", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let gap = v["coupling"].as_f64().unwrap();
    assert!((gap - 25e3).abs() < 1.0, "{gap}");
}

#[test]
fn floquet_gap_follows_bessel_coupling() {
    let out = mifr(&[
        "floquet-gap",
        "--state",
        "6g(6)",
        "--field",
        "18.2",
        "--rabi",
        "2e3",
        "--amplitude",
        "100e3",
        "--order",
        "1,2",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    for row in rows {
        let rel: f64 = row[4].parse().unwrap();
        assert!(rel.abs() < 1e-3, "{row:?}");
    }
}

#[test]
fn energy_map_closed_loop() {
    let dir = tempfile::tempdir().unwrap();
    write_closed_loop_scans(dir.path());
    let out = mifr(&["energy-map", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(row[5], "6g(6)");
    assert_eq!(row[4], "-1");
    assert_eq!(row[7], "matched");
    let f: f64 = row[1].parse().unwrap();
    let err: f64 = row[2].parse().unwrap();
    assert!((f - E_6G6).abs() < 3.0 * err, "{f} ± {err}");
}

#[test]
fn energy_map_assigns_mixed_orders() {
    let dir = tempfile::tempdir().unwrap();
    write_closed_loop_scans(dir.path());
    write_scans(dir.path(), 2, [3.75, 4.5, 5.25, 6.0]);
    let out = mifr(&["energy-map", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut rows = csv_rows(&stdout(&out));
    rows.sort_by(|a, b| a[4].cmp(&b[4]));
    assert_eq!(rows.len(), 2, "{rows:?}");
    assert_eq!((rows[0][4].as_str(), rows[1][4].as_str()), ("-1", "-2"));
    for row in &rows {
        assert_eq!(row[5], "6g(6)");
        assert_eq!(row[7], "matched");
        let omega: f64 = row[3].parse().unwrap();
        let err: f64 = row[2].parse().unwrap();
        let order: f64 = row[4].parse::<f64>().unwrap().abs();
        assert!((omega.abs() - E_6G6).abs() < 3.0 * order * err, "{row:?}");
    }
}

#[test]
fn energy_map_flags_ambiguous_labels() {
    let dir = tempfile::tempdir().unwrap();
    let scans = dir.path().join("scans");
    std::fs::create_dir(&scans).unwrap();
    write_closed_loop_scans(&scans);
    // A state at exactly twice the 6g(6) energy matches the same peak at second order.
    let registry = dir.path().join("registry.toml");
    std::fs::write(
        &registry,
        format!(
            r#"
[[state]]
label = "6g(6)"
e0_hz = -150e3
mu_rel_hz_per_g = 0.02e6
b_ref_g = 18.66
partner = "6s"
coupling_hz = 25e3

[[state]]
label = "6s"
e0_hz = -150e3
mu_rel_hz_per_g = 1.5e6
b_ref_g = 18.66
partner = "6g(6)"
coupling_hz = 25e3

[[state]]
label = "ghost"
e0_hz = {}
mu_rel_hz_per_g = 0.0
b_ref_g = 18.2
"#,
            -2.0 * E_6G6
        ),
    )
    .unwrap();
    let out = mifr(&["energy-map", scans.to_str().unwrap(), "--registry", registry.to_str().unwrap()]);
    assert_eq!(code(&out), 5, "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][7], "ambiguous");
    assert!(rows[0][8].contains("6g(6):1") && rows[0][8].contains("ghost:2"), "{:?}", rows[0]);
}

#[test]
fn energy_map_of_empty_directory_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&mifr(&["energy-map", dir.path().to_str().unwrap()])), 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "[fictitious-field]\nintensity = [0.87]\ndetuning = -23e9\npol = \"linear\"\n").unwrap();
    let cfg = config.to_str().unwrap();

    let from_file = mifr(&["--config", cfg, "fictitious-field"]);
    assert_eq!(code(&from_file), 0, "{}", stderr(&from_file));
    assert_eq!(csv_rows(&stdout(&from_file))[0][4].parse::<f64>().unwrap(), 0.0);

    let overridden = mifr(&["--config", cfg, "fictitious-field", "--pol", "sigma-minus"]);
    assert_eq!(code(&overridden), 0);
    let b: f64 = csv_rows(&stdout(&overridden))[0][4].parse().unwrap();
    assert!((b + 28.61).abs() < 0.05, "{b}");
}

#[test]
fn config_globals_set_format_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    let table = dir.path().join("rows.json");
    std::fs::write(
        &config,
        format!(
            "format = \"json\"\noutput = \"{}\"\n\n[resonances]\nstate = \"6g(6)\"\nfield = 18.2\n",
            table.display()
        ),
    )
    .unwrap();
    let out = mifr(&["--config", config.to_str().unwrap(), "resonances"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&table).unwrap()).unwrap();
    assert_eq!(v["command"], "resonances");

    let out = mifr(&["--config", config.to_str().unwrap(), "resonances", "--format", "csv", "-o", "-"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).starts_with("# schema_version: 1\n"));
}

#[test]
fn config_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let unknown_key = dir.path().join("a.toml");
    std::fs::write(&unknown_key, "[fictitious-field]\nintensity = [0.87]\ndetuning = -23e9\ncolour = 1\n").unwrap();
    let out = mifr(&["--config", unknown_key.to_str().unwrap(), "fictitious-field"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("colour"), "{}", stderr(&out));

    let unknown_section = dir.path().join("b.toml");
    std::fs::write(&unknown_section, "[fictitous-field]\ndetuning = 1\n").unwrap();
    assert_eq!(code(&mifr(&["--config", unknown_section.to_str().unwrap(), "resonances"])), 2);

    let broken = dir.path().join("c.toml");
    std::fs::write(&broken, "[scan]\nfrom = \n").unwrap();
    let out = mifr(&["--config", broken.to_str().unwrap(), "scan"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn species_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("cs.toml");
    std::fs::write(&empty, "").unwrap();
    let missing = dir.path().join("missing.toml");
    let args = ["fictitious-field", "--intensity", "0.87", "--detuning", "-23e9"];

    let env_only = Command::new(BIN).args(args).env("MIFR_SPECIES", &missing).output().unwrap();
    assert_eq!(code(&env_only), 2);

    let flag_wins = Command::new(BIN)
        .args(args)
        .args(["--species", empty.to_str().unwrap()])
        .env("MIFR_SPECIES", &missing)
        .output()
        .unwrap();
    assert_eq!(code(&flag_wins), 0, "{}", stderr(&flag_wins));
}
