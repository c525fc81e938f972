//! End-to-end tests of the `logson` binary: exit codes, error wording,
//! table schemas, determinism, and the metadata sidecar.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn logson(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Parse a CSV table into (header, rows of raw fields).
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn formulas_pins_the_closed_forms() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "f.json",
        r#"{"command":"formulas",
            "grid":{"dim":1,"half_extent":12.0,"points_per_axis":64},
            "params":{"gamma":2.0,"omega":0.0},
            "output_path":"OUT"}"#,
    );
    let out_path = dir.path().join("f.csv");
    let out = logson(&[
        "formulas",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let (header, rows) = read_csv(&out_path);
    assert_eq!(header, ["gamma", "omega", "dim", "d_omega", "gausson_mass"]);
    assert_eq!(rows.len(), 1);
    let d: f64 = rows[0][3].parse().unwrap();
    let mass: f64 = rows[0][4].parse().unwrap();
    assert!((d - 4.630404235103551).abs() < 1e-12 * d, "d_omega = {d}");
    assert!((mass - 2.0 * d).abs() < 1e-12 * mass, "gausson_mass = {mass}");
    // 17-significant-digit fields round-trip: re-rendering the parsed value
    // reproduces the bytes.
    assert_eq!(format!("{d:.16e}"), rows[0][3]);

    let summary = stdout_of(&out);
    assert_eq!(summary.lines().count(), 1);
    assert!(summary.starts_with("formulas:"), "{summary}");
}

#[test]
fn groundstate_matches_closed_form_and_reruns_byte_identically() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "gs.json",
        &format!(
            r#"{{"command":"groundstate",
                "grid":{{"dim":1,"half_extent":12.0,"points_per_axis":256}},
                "params":{{"gamma":2.0,"omega":0.0}},
                "solver":{{"seed":42}},
                "output_path":"{}"}}"#,
            dir.path().join("gs.csv").display()
        ),
    );
    let out = logson(&["groundstate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let table = dir.path().join("gs.csv");
    let (header, rows) = read_csv(&table);
    assert_eq!(
        header,
        [
            "gamma",
            "omega",
            "dim",
            "action",
            "closed_form",
            "nehari_residual",
            "ep_residual",
            "aligned_distance",
            "iters"
        ]
    );
    let action: f64 = rows[0][3].parse().unwrap();
    let closed: f64 = rows[0][4].parse().unwrap();
    assert!((action - closed).abs() < 1e-4 * closed, "action = {action}");

    let first = fs::read(&table).unwrap();
    let rerun = logson(&["groundstate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(rerun.status.code(), Some(0));
    assert_eq!(fs::read(&table).unwrap(), first, "output is not deterministic");

    // Sidecar: config echo plus code version, next to the table.
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("gs.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["command"], "groundstate");
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["params"]["gamma"], 2.0);
    assert_eq!(meta["overrides"]["seed"], serde_json::Value::Null);
}

#[test]
fn zero_dt_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "ev.json",
        r#"{"command":"evolve",
            "grid":{"dim":1,"half_extent":10.0,"points_per_axis":64},
            "params":{"gamma":2.0,"omega":0.0},
            "evolve":{"dt":0.0,"t_final":1.0},
            "output_path":"ev.csv"}"#,
    );
    let out = logson(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr_of(&out).contains("dt must be positive"),
        "{}",
        stderr_of(&out)
    );
}

#[test]
fn shallow_gamma_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"command":"formulas",
            "grid":{"dim":1,"half_extent":10.0,"points_per_axis":64},
            "params":{"gamma":0.5,"omega":0.0},
            "output_path":"g.csv"}"#,
    );
    let out = logson(&["formulas", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr_of(&out).contains("gamma must exceed 1"),
        "{}",
        stderr_of(&out)
    );
}

#[test]
fn unknown_config_keys_are_named() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "u.json",
        r#"{"command":"formulas",
            "grid":{"dim":1,"half_extent":10.0,"points_per_axis":64},
            "params":{"gamma":2.0,"omeag":0.0},
            "output_path":"u.csv"}"#,
    );
    let out = logson(&["formulas", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("omeag"), "{}", stderr_of(&out));
}

#[test]
fn missing_command_field_is_named() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.json",
        r#"{"grid":{"dim":1,"half_extent":10.0,"points_per_axis":64},
            "params":{"gamma":2.0,"omega":0.0},
            "output_path":"m.csv"}"#,
    );
    let out = logson(&["formulas", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("command"), "{}", stderr_of(&out));
}

#[test]
fn command_mismatch_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "mm.json",
        r#"{"command":"groundstate",
            "grid":{"dim":1,"half_extent":10.0,"points_per_axis":64},
            "params":{"gamma":2.0,"omega":0.0},
            "output_path":"mm.csv"}"#,
    );
    let out = logson(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr_of(&out);
    assert!(msg.contains("mismatch"), "{msg}");
    assert!(msg.contains("groundstate") && msg.contains("evolve"), "{msg}");
}

#[test]
fn an_output_path_is_required() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "n.json",
        r#"{"command":"formulas",
            "grid":{"dim":1,"half_extent":10.0,"points_per_axis":64},
            "params":{"gamma":2.0,"omega":0.0}}"#,
    );
    let out = logson(&["formulas", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("output path"), "{}", stderr_of(&out));
}

#[test]
fn unconverged_solve_exits_2_but_still_writes_the_table() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("short.csv");
    let cfg = write_config(
        dir.path(),
        "short.json",
        &format!(
            r#"{{"command":"groundstate",
                "grid":{{"dim":1,"half_extent":12.0,"points_per_axis":64}},
                "params":{{"gamma":2.0,"omega":0.0}},
                "solver":{{"max_iters":2}},
                "output_path":"{}"}}"#,
            table.display()
        ),
    );
    let out = logson(&["groundstate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("did not converge"),
        "{}",
        stderr_of(&out)
    );
    let (_, rows) = read_csv(&table);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][8], "2"); // iters column records the cap
}

#[test]
fn non_finite_run_exits_2_with_the_last_finite_time() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("blow.csv");
    // ω this large overflows the Gaussian amplitude, so the very first
    // diagnostic record is already non-finite.
    let cfg = write_config(
        dir.path(),
        "blow.json",
        &format!(
            r#"{{"command":"stability",
                "grid":{{"dim":1,"half_extent":12.0,"points_per_axis":64}},
                "params":{{"gamma":2.0,"omega":1500.0}},
                "stability":{{"kind":"amplitude-scale","deltas":[0.001],
                              "horizon":0.05,"dt":0.01}},
                "output_path":"{}"}}"#,
            table.display()
        ),
    );
    let out = logson(&["stability", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_of(&out);
    assert!(msg.contains("lost finiteness"), "{msg}");
    assert!(msg.contains("t = -inf"), "{msg}");
    let (_, rows) = read_csv(&table);
    assert_eq!(rows[0][3], "NaN"); // sup_dist of the failed row
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "so.json",
        r#"{"command":"sobolev",
            "grid":{"dim":1,"half_extent":10.0,"points_per_axis":64},
            "params":{"gamma":2.0,"omega":0.0},
            "sobolev":{"count":4,"seed":9},
            "output_path":"so.csv"}"#,
    );
    let run = |out_name: &str, seed: &str| {
        let path = dir.path().join(out_name);
        let out = logson(&[
            "sobolev",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
        fs::read(&path).unwrap()
    };
    let a = run("a.csv", "5");
    let b = run("b.csv", "5");
    let c = run("c.csv", "6");
    assert_eq!(a, b, "same seed must give identical bytes");
    assert_ne!(a, c, "different seeds must draw different fields");
}

#[test]
fn sobolev_rows_stay_nonnegative_and_end_with_the_matched_gaussian() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("so.csv");
    let cfg = write_config(
        dir.path(),
        "so.json",
        &format!(
            r#"{{"command":"sobolev",
                "grid":{{"dim":1,"half_extent":12.0,"points_per_axis":128}},
                "params":{{"gamma":3.0,"omega":0.0}},
                "sobolev":{{"count":10,"seed":2}},
                "output_path":"{}"}}"#,
            table.display()
        ),
    );
    let out = logson(&["sobolev", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let (header, rows) = read_csv(&table);
    assert_eq!(header, ["case", "alpha", "residual"]);
    assert_eq!(rows.len(), 11);
    for row in &rows[..10] {
        let res: f64 = row[2].parse().unwrap();
        assert!(res > -1e-10, "case {} residual {res}", row[0]);
    }
    let last = &rows[10];
    assert_eq!(last[0], "matched-gaussian");
    let alpha: f64 = last[1].parse().unwrap();
    let res: f64 = last[2].parse().unwrap();
    assert!((alpha - (std::f64::consts::PI / 3.0).sqrt()).abs() < 1e-12);
    assert!(res.abs() < 1e-8, "matched residual {res}");
}

#[test]
fn evolve_table_tracks_conservation() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("ev.csv");
    let cfg = write_config(
        dir.path(),
        "ev.json",
        &format!(
            r#"{{"command":"evolve",
                "grid":{{"dim":1,"half_extent":12.0,"points_per_axis":128}},
                "params":{{"gamma":2.0,"omega":0.5}},
                "evolve":{{"dt":0.001,"t_final":0.05,"record_every":10}},
                "output_path":"{}"}}"#,
            table.display()
        ),
    );
    let out = logson(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(stdout_of(&out).starts_with("evolve:"), "{}", stdout_of(&out));

    let (header, rows) = read_csv(&table);
    assert_eq!(header, ["t", "mass", "energy", "energy_m", "orbital_distance"]);
    assert_eq!(rows.len(), 6); // t = 0 plus every 10th of 50 steps
    let m0: f64 = rows[0][1].parse().unwrap();
    for row in &rows {
        let m: f64 = row[1].parse().unwrap();
        assert!((m - m0).abs() < 1e-11 * m0, "mass drift at t = {}", row[0]);
        let d: f64 = row[4].parse().unwrap();
        assert!(d < 1e-3, "orbital distance {d} at t = {}", row[0]);
    }
}

#[test]
fn boundary_heavy_fields_trigger_a_warning() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "tight.json",
        &format!(
            r#"{{"command":"evolve",
                "grid":{{"dim":1,"half_extent":3.0,"points_per_axis":64}},
                "params":{{"gamma":1.5,"omega":0.0}},
                "evolve":{{"dt":0.01,"t_final":0.02}},
                "output_path":"{}"}}"#,
            dir.path().join("tight.csv").display()
        ),
    );
    let out = logson(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("half_extent"), "{}", stderr_of(&out));
}

#[test]
fn stability_table_carries_one_row_per_delta() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("st.csv");
    let cfg = write_config(
        dir.path(),
        "st.json",
        &format!(
            r#"{{"command":"stability",
                "grid":{{"dim":1,"half_extent":12.0,"points_per_axis":64}},
                "params":{{"gamma":2.0,"omega":0.0}},
                "stability":{{"kind":"amplitude-scale","deltas":[0.0,0.01],
                              "horizon":0.1,"dt":0.01,"mode":"exact-log"}},
                "output_path":"{}"}}"#,
            table.display()
        ),
    );
    let out = logson(&["stability", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let (header, rows) = read_csv(&table);
    assert_eq!(header, ["delta", "kind", "init_dist", "sup_dist", "ratio"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], "amplitude-scale");
    assert_eq!(rows[0][4], "NaN"); // δ = 0 sits at the alignment floor
    let ratio: f64 = rows[1][4].parse().unwrap();
    assert!((ratio - 1.0).abs() < 1e-2, "amplitude ratio {ratio}");
}

#[test]
fn json_output_keeps_the_column_order() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("f.json");
    let cfg = write_config(
        dir.path(),
        "fj.json",
        &format!(
            r#"{{"command":"formulas",
                "grid":{{"dim":2,"half_extent":8.0,"points_per_axis":64}},
                "params":{{"gamma":1.5,"omega":-1.0}},
                "output_path":"{}","output_format":"json"}}"#,
            table.display()
        ),
    );
    let out = logson(&["formulas", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&table).unwrap()).unwrap();
    assert_eq!(doc["columns"][3], "d_omega");
    let d = doc["rows"][0][3].as_f64().unwrap();
    let expected = 0.5 * (std::f64::consts::PI / 1.5) * (-1.0_f64 + 3.0).exp();
    assert!((d - expected).abs() < 1e-12 * expected, "d_omega = {d}");
}
