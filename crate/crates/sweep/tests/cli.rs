use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qtt_sweep::figures::figure;
use qtt_sweep::{load_scenario_file, run_sweep, write_csv};

fn qtt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtt"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_reports_the_reference_collision() {
    let out = qtt(&["validate", "transistor"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("981 points"));
    assert!(text.contains("warning: degenerate M frequencies 02,ge^M and 12,ge^M"));
    assert!(text.contains("secular_ok: false"));
}

#[test]
fn spectrum_csv_lists_levels_and_frequencies() {
    let out = qtt(&["spectrum", "transistor", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 12 + 18);
    assert!(text.contains("bohr,ge,0^L,-6.5000000000000000e1"));
}

#[test]
fn steady_and_currents_at_base_point() {
    let steady =
        String::from_utf8(qtt(&["steady", "transistor", "--format", "csv"]).stdout).unwrap();
    let total: f64 = steady
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);

    let out = qtt(&["currents", "transistor"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("J_L = 4.50"), "{text}");
}

#[test]
fn schema_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(
        dir.path(),
        "a.json",
        r#"{"sweep": {"variable": "T_M", "values": [1]}, "colour": 1}"#,
    );
    let out = qtt(&["sweep", &unknown]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("colour"));

    let bad_step = write(
        dir.path(),
        "b.json",
        r#"{"sweep": {"variable": "T_M", "start": 1, "stop": 2, "step": 0}}"#,
    );
    assert_eq!(code(&qtt(&["validate", &bad_step])), 2);
    assert_eq!(code(&qtt(&["figure", "no_such_figure"])), 2);
}

#[test]
fn io_errors_exit_4() {
    assert_eq!(code(&qtt(&["validate", "/nonexistent/scenario.json"])), 4);
    let out = qtt(&["sweep", "stabilizer_tr", "-o", "/nonexistent/dir/out.csv"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("/nonexistent/dir/out.csv"));
}

#[test]
fn all_points_failing_exits_3_but_still_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(
        dir.path(),
        "c.json",
        r#"{"sweep": {"variable": "T_M", "values": [-1, -2]}}"#,
    );
    let csv_path = dir.path().join("c.csv");
    let out = qtt(&["sweep", &doc, "-o", csv_path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let text = fs::read_to_string(csv_path).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.contains("invalid_temperature")));

    // one good point is enough for success
    let mixed = write(
        dir.path(),
        "d.json",
        r#"{"sweep": {"variable": "T_M", "values": [-1, 5]}}"#,
    );
    assert_eq!(code(&qtt(&["sweep", &mixed])), 0);
}

#[test]
fn sweep_file_matches_library_and_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    let many = dir.path().join("many.csv");
    for (threads, path) in [("1", &one), ("3", &many)] {
        let out = qtt(&[
            "--threads",
            threads,
            "sweep",
            "transistor",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        let summary = String::from_utf8(out.stderr).unwrap();
        assert!(
            summary.contains("|alpha_L| >= 100 in T_M: [6.7800, 7.1000]"),
            "{summary}"
        );
    }
    let bytes = fs::read(&one).unwrap();
    assert_eq!(bytes, fs::read(&many).unwrap());

    let s = figure("transistor").unwrap().unwrap();
    let mut expected = Vec::new();
    write_csv(&s, &run_sweep(&s, Some(2)).unwrap(), &mut expected).unwrap();
    assert_eq!(bytes, expected);
}

#[test]
fn figure_writes_named_csv_with_step_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = qtt(&[
        "figure",
        "transistor",
        "-o",
        dir.path().to_str().unwrap(),
        "--step-override",
        "0.1",
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("transistor.csv")).unwrap();
    // 0.2..10 step 0.1
    assert_eq!(text.lines().count(), 1 + 99);
}

#[test]
fn figure_list_and_bundled_files_agree() {
    let out = qtt(&["figure", "--list"]);
    assert_eq!(code(&out), 0);
    let names: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(names.len(), 19);
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for name in &names {
        let from_disk = load_scenario_file(&dir.join(format!("{name}.json"))).unwrap();
        assert_eq!(from_disk, figure(name).unwrap().unwrap());
    }
    assert_eq!(fs::read_dir(dir).unwrap().count(), names.len());
}
