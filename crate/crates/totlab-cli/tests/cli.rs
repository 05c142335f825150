//! End-to-end tests of the binary: known row values, exit codes,
//! determinism, and JSON/CSV numeric agreement.

use std::process::{Command, Output};

fn totlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_totlab"))
        .args(args)
        .env_remove("TOTLAB_FORMAT")
        .env_remove("TOTLAB_THREADS")
        .env_remove("TOTLAB_KAPPA")
        .env_remove("TOTLAB_EPSILON")
        .output()
        .expect("spawn totlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn phi_example_row() {
    let o = totlab(&["phi", "--k", "2", "--n", "3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("\"n\": 3"));
    assert!(s.contains("\"k\": 2"));
    assert!(s.contains("\"phi_k\": \"8\""));
    // brute route agrees
    let b = totlab(&["phi", "--k", "2", "--n", "3", "--brute"]);
    assert!(stdout(&b).contains("\"phi_k\": \"8\""));
    assert!(stdout(&b).contains("\"method\": \"brute\""));
}

#[test]
fn count_example_row() {
    let o = totlab(&["count", "--k", "1", "--beta", "0", "--x", "10", "--y", "4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("\"count\": 8"));
    assert!(s.contains("\"regime\": \"THM6_MAIN\""));
    assert!(s.contains("\"schema_version\": \"1\""));
}

#[test]
fn constant_r_row() {
    let o = totlab(&[
        "constant", "--which", "r", "--k", "1", "--z", "1", "--tol", "1e-6",
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    let re = s
        .split("\"value_re\": ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap();
    let v: f64 = re.parse().unwrap();
    assert!((v - 1.9435964368).abs() < 1e-6, "value_re {v}");
    assert!(s.contains("\"tail_bound\": "));
    assert!(s.contains("\"truncation_prime\": "));
}

#[test]
fn reruns_are_byte_identical() {
    let a = totlab(&["mertens", "--xs", "10,100,1000"]);
    let b = totlab(&["mertens", "--xs", "10,100,1000"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_independent_of_thread_count() {
    let one = totlab(&[
        "count", "--k", "2", "--beta", "1", "--x", "100000", "--y", "30000", "--threads", "1",
    ]);
    let four = totlab(&[
        "count", "--k", "2", "--beta", "1", "--x", "100000", "--y", "30000", "--threads", "4",
    ]);
    assert!(one.status.success());
    let norm = |o: &Output| stdout(o).replace("\"threads\": \"1\"", "").replace("\"threads\": \"4\"", "");
    assert_eq!(norm(&one), norm(&four));
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let j = stdout(&totlab(&["mertens", "--xs", "10"]));
    let c = stdout(&totlab(&["mertens", "--xs", "10", "--format", "csv"]));
    let data_line = c
        .lines()
        .find(|l| !l.starts_with('#') && l.starts_with("10,"))
        .expect("csv data row");
    for field in data_line.split(',').skip(1) {
        assert!(
            j.contains(field),
            "csv field {field} missing from json:\n{j}"
        );
    }
    // header row names every column
    let header = c.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("x,sum,"));
}

#[test]
fn env_format_and_flag_precedence() {
    let env_csv = Command::new(env!("CARGO_BIN_EXE_totlab"))
        .args(["phi", "--k", "1", "--n", "6"])
        .env("TOTLAB_FORMAT", "csv")
        .output()
        .unwrap();
    assert!(stdout(&env_csv).starts_with("# schema_version,1"));
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_totlab"))
        .args(["phi", "--k", "1", "--n", "6", "--format", "json"])
        .env("TOTLAB_FORMAT", "csv")
        .output()
        .unwrap();
    assert!(stdout(&flag_wins).starts_with("{"));
}

#[test]
fn kappa_override_recorded_and_used() {
    // kappa shifts the THM3/THM4 threshold; pick y between the two thresholds
    let default = stdout(&totlab(&[
        "count", "--k", "2", "--beta", "3/2", "--x", "1000000", "--y", "12",
    ]));
    assert!(default.contains("THM3_MAIN"), "{default}");
    let overridden = stdout(&totlab(&[
        "count", "--k", "2", "--beta", "3/2", "--x", "1000000", "--y", "12", "--kappa", "5.0",
    ]));
    assert!(overridden.contains("THM4_BOUND"), "{overridden}");
    assert!(overridden.contains("\"kappa\": 5"));
}

#[test]
fn exit_codes() {
    // argument error -> 2
    let o = totlab(&["count", "--k", "0", "--beta", "0", "--x", "10", "--y", "1"]);
    assert_eq!(o.status.code(), Some(2));
    // malformed rational -> 2
    let o = totlab(&["count", "--k", "1", "--beta", "0", "--x", "10", "--y", "1e3"]);
    assert_eq!(o.status.code(), Some(2));
    // capacity error -> 3
    let o = totlab(&["bateman", "--y", "100000000"]);
    assert_eq!(o.status.code(), Some(3));
    // unknown flag -> 2 (clap usage error)
    let o = totlab(&["count", "--nope"]);
    assert_eq!(o.status.code(), Some(2));
    // missing per-mode flag -> 2
    let o = totlab(&["perron", "--mode", "kernel", "--y", "2"]);
    assert_eq!(o.status.code(), Some(2));
    // precision error -> 3
    let o = totlab(&[
        "constant", "--which", "r", "--k", "2", "--z", "1", "--tol", "1e-12",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn range_writes_file() {
    let dir = std::env::temp_dir().join(format!("totlab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("range.json");
    let o = totlab(&["range", "--k", "1", "--x", "10", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.contains("\"command\": \"range\""));
    assert!(body.contains("\"n\": 10"));
    // log_ratio(6) = ln(1/3)
    assert!(body.contains("-1.09861228866811e0"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cdf_and_verify_commands_run() {
    let o = totlab(&["cdf", "--k", "1", "--x", "10", "--grid", "0,0.5,1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("\"alpha\": 5.00000000000000e-1, \"f_hat\": 5.00000000000000e-1"));

    let o = totlab(&[
        "verify-distribution", "--k", "1", "--beta", "0", "--x", "1000", "--alphas", "0.25,0.4",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"regime\": \"THM6_MAIN\""));

    let o = totlab(&["verify-extremal", "--k", "2", "--smax", "25"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("\"kind\": \"minimal\""));
    assert!(s.contains("\"kind\": \"maximal\""));

    let o = totlab(&["bateman", "--y", "4"]);
    assert!(stdout(&o).contains("\"count\": 9"));

    let o = totlab(&[
        "perron", "--mode", "kernel", "--y", "2", "--a", "1", "--t", "200",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"h\": 1"));

    let o = totlab(&[
        "perron", "--mode", "count", "--method", "exact-a", "--k", "1", "--beta", "0", "--x",
        "200", "--y", "81/2", "--b", "0.5", "--tau", "150", "--steps", "20",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"estimate\": "));
}
