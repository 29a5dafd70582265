//! End-to-end tests of the `vdelta` binary: flag handling, config-file
//! merging, output formats, determinism, and exit codes.

use std::io::Write as _;
use std::process::{Command, Output};

fn vdelta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdelta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn bound_flat_weight_golden() {
    let out = vdelta(&["bound", "--thm", "2", "--weight", "bernardi:c=0", "--xi", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("beta=-0.629445676"), "{text}");
}

#[test]
fn bound_inadmissible_tuple_stays_in_row() {
    let out = vdelta(&[
        "bound", "--thm", "1", "--alpha", "1", "--gamma", "1", "--xi", "0", "--format", "json",
    ]);
    // in-row errors do not fail the bound command
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("complex mu,nu"), "{text}");
    assert!(text.starts_with("{\"meta\":"), "{text}");
}

#[test]
fn bound_mixed_grid_keeps_good_rows() {
    let out = vdelta(&[
        "bound", "--thm", "1", "--alpha", "1,2", "--gamma", "0,1", "--xi", "0", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "header + 4 rows: {text}");
    assert!(lines[0].starts_with("thm,weight,alpha,gamma,delta,xi,beta,"));
    // both gamma = 1 tuples have complex roots; both gamma = 0 rows survive
    assert_eq!(text.matches("complex mu,nu").count(), 2, "{text}");
    assert_eq!(text.matches("Thm1Quadrature").count(), 2, "{text}");
}

#[test]
fn closed_and_quadrature_methods_agree() {
    let quad = stdout(&vdelta(&["bound", "--thm", "2", "--xi", "0.25", "--format", "csv"]));
    let closed = stdout(&vdelta(&[
        "bound", "--thm", "2", "--xi", "0.25", "--method", "closed", "--format", "csv",
    ]));
    let get_beta = |s: &str| -> f64 {
        let row = s.lines().nth(1).unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        cols[2].parse().unwrap()
    };
    let (a, b) = (get_beta(&quad), get_beta(&closed));
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}

#[test]
fn verify_commands_set_exit_code() {
    let ok = vdelta(&["verify", "sharpness", "--thm", "2", "--weight", "bernardi:c=0", "--xi", "0"]);
    assert!(ok.status.success());
    let ok = vdelta(&["verify", "identity", "--weight", "hohlov:a=1,b=1,c=2", "--count", "5"]);
    assert!(ok.status.success());
    // an impossible tolerance must flip the exit code
    let bad = vdelta(&[
        "verify", "identity", "--weight", "bernardi:c=0", "--count", "2", "--tol", "0",
    ]);
    assert_eq!(bad.status.code(), Some(1), "{:?}", bad.status);
}

#[test]
fn membership_of_identity_function() {
    let out = vdelta(&[
        "verify", "membership", "--f", "identity", "--beta", "0.25", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains("true"), "{text}");
    // margin 1 - beta for f = z
    assert!(row.contains("7.5000000000"), "{text}");
}

#[test]
fn malformed_input_is_a_hard_error() {
    let out = vdelta(&["bound", "--thm", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let out = vdelta(&["bound", "--thm", "1", "--weight", "pareto:c=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = vdelta(&["verify", "membership", "--f", "sigmoid"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_flags_win() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# defaults for the regression sweep").unwrap();
    writeln!(file, "thm=2").unwrap();
    writeln!(file, "weight=bernardi:c=1").unwrap();
    writeln!(file, "xi=0").unwrap();
    writeln!(file, "format=csv").unwrap();
    file.flush().unwrap();
    let path = file.path().to_str().unwrap();

    let from_config = stdout(&vdelta(&["bound", "--config", path]));
    assert!(from_config.contains("bernardi:c=1"), "{from_config}");
    assert!(from_config.starts_with("thm,weight,xi,"), "{from_config}");

    // command-line flag overrides the file
    let overridden = stdout(&vdelta(&["bound", "--config", path, "--weight", "bernardi:c=0"]));
    assert!(overridden.contains("bernardi:c=0"), "{overridden}");
    assert!(overridden.contains("-6.294456766"), "{overridden}");
}

#[test]
fn config_rejects_unknown_and_malformed_keys() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "thm=2\nresolution=9000").unwrap();
    file.flush().unwrap();
    let out = vdelta(&["bound", "--config", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "just a line").unwrap();
    file.flush().unwrap();
    let out = vdelta(&["bound", "--config", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_weight_from_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    for i in 0..=32 {
        let t = i as f64 / 32.0;
        writeln!(file, "{t} {}", 1.0 + t).unwrap();
    }
    file.flush().unwrap();
    let desc = format!("custom:path={}", file.path().display());
    let out = vdelta(&["bound", "--thm", "2", "--weight", &desc, "--xi", "0"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("beta="), "{}", stdout(&out));
}

#[test]
fn json_and_csv_outputs_are_deterministic() {
    for format in ["json", "csv"] {
        let args = [
            "bound", "--thm", "1", "--alpha", "1,2", "--xi", "-0.5,0,0.5", "--format", format,
        ];
        let a = stdout(&vdelta(&args));
        let b = stdout(&vdelta(&args));
        assert_eq!(a, b, "{format} output not reproducible");
        assert!(!a.is_empty());
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_vdelta"))
            .args(["bound", "--thm", "1", "--alpha", "1,2,3", "--xi", "-0.5,0,0.5", "--format", "json"])
            .env("VDELTA_THREADS", threads)
            .output()
            .expect("binary runs");
        String::from_utf8(out.stdout).unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert!(!one.is_empty());
    assert_eq!(one, four);
}

#[test]
fn selftest_passes_and_reports_every_check() {
    let out = vdelta(&["selftest", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().count() > 10, "{text}");
    assert!(!text.contains("false"), "{text}");
}
