use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use subjective_calibration::witness::{WitnessCertificate, WitnessKind};

fn seucal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seucal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn check_worse_gamble() {
    let o = seucal(&["check", &scenario("worse_gamble.toml")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("MUST_REMAIN_OPTIMAL\n"));
}

#[test]
fn check_machine_format() {
    let o = seucal(&[
        "check",
        &scenario("safer_gamble.toml"),
        "--format",
        "machine",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "decision=WITNESS_EXISTS\nloss_grows=false\nactuarial_worsening=true\n"
    );
}

#[test]
fn malformed_scenario_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.toml", "wealth = [0.0]\n[r]\nalpha = 1.0\n");
    let o = seucal(&["check", bad.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error=parse message="), "{err}");

    let unknown = write(
        &dir,
        "unknown.toml",
        "wealth = [0.0]\nextra = 1\n[r]\nalpha = 1.0\nbeta = 1.0\n[r_hat]\nalpha = 1.0\nbeta = 1.0\n",
    );
    assert_eq!(
        seucal(&["check", unknown.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let negative = write(
        &dir,
        "neg.toml",
        "wealth = [0.0]\n[r]\nalpha = 1.0\nbeta = -1.0\n[r_hat]\nalpha = 1.0\nbeta = 1.0\n",
    );
    let o = seucal(&["check", negative.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error="));
}

#[test]
fn missing_file_and_bad_flags_exit_two() {
    assert_eq!(
        seucal(&["check", "/nonexistent/scenario.toml"])
            .status
            .code(),
        Some(2)
    );
    let o = seucal(&["check", &scenario("worse_gamble.toml"), "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error=usage"));
    assert_eq!(seucal(&[]).status.code(), Some(2));
}

#[test]
fn witness_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.toml");
    let o = seucal(&[
        "witness",
        &scenario("safer_gamble.toml"),
        "--out",
        out.to_str().unwrap(),
        "--format",
        "machine",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("decision=WITNESS_EXISTS\nkind=large_k\nk="));
    assert!(text.contains("belief="));
    let cert = WitnessCertificate::from_toml_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(matches!(cert.kind, WitnessKind::LargeK { .. }));
    cert.reverify(1e-12).unwrap();
}

#[test]
fn witness_on_worse_pair_reports_decision() {
    let o = seucal(&[
        "witness",
        &scenario("worse_gamble.toml"),
        "--format",
        "machine",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "decision=MUST_REMAIN_OPTIMAL\n");
}

#[test]
fn interval_witness_and_too_wide() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("interval.toml");
    let ok = seucal(&[
        "interval-witness",
        &scenario("safer_gamble.toml"),
        "--lo",
        "0",
        "--hi",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert!(stdout(&ok).contains("kind: interval"));
    assert!(out.exists());

    let wide = seucal(&[
        "interval-witness",
        &scenario("safer_gamble.toml"),
        "--lo",
        "-0.5",
        "--hi",
        "0.5",
    ]);
    assert_eq!(wide.status.code(), Some(2));
    assert!(stderr(&wide).starts_with("error=interval_too_wide"));
}

#[test]
fn regions_table_shape() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(
        &dir,
        "grid.toml",
        "wealth = { lo = -4.0, hi = 4.0, step = 0.5 }\n[r]\nalpha = 2.0\nbeta = 2.0\n[r_hat]\nalpha = 1.0\nbeta = 1.0\n",
    );
    let out = dir.path().join("curves.csv");
    let o = seucal(&[
        "regions",
        sc.to_str().unwrap(),
        "--k",
        "1,4,16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "wealth,region,k,belief,limit_belief");
    assert_eq!(lines.len(), 17 * 3 + 1);
    assert!(lines[1].starts_with("-4.0000000000000000e0,extreme_low,1,"));
}

#[test]
fn indifference_blocks_per_k() {
    let o = seucal(&[
        "indifference",
        &scenario("worse_gamble.toml"),
        "--k",
        "1,2,4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let blocks: Vec<&str> = text.trim_end().split("\n\n").collect();
    assert_eq!(blocks.len(), 3);
    for (block, k) in blocks.iter().zip(["1", "2", "4"]) {
        let lines: Vec<&str> = block.lines().collect();
        assert_eq!(lines[0], "wealth,region,belief,k");
        assert_eq!(lines.len(), 3);
        assert!(lines[1..].iter().all(|l| l.ends_with(&format!(",{k}"))));
    }
}

#[test]
fn invalid_k_is_an_input_error() {
    let o = seucal(&["regions", &scenario("worse_gamble.toml"), "--k", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error=invalid_k"));
}

#[test]
fn oracle_prints_evidence() {
    let o = seucal(&[
        "oracle",
        &scenario("small_oracle.toml"),
        "--format",
        "machine",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("decision=WITNESS_EXISTS\n"));
    assert!(text.contains("[evidence]"));
    assert!(text.contains("utilities = ["));
}

#[test]
fn output_is_deterministic() {
    let args = ["regions", &scenario("safer_gamble.toml"), "--k", "1,8,64"];
    assert_eq!(seucal(&args).stdout, seucal(&args).stdout);
    let args = [
        "verify",
        "--seed",
        "11",
        "--suite",
        "remark",
        "--suite",
        "sufficiency",
        "--format",
        "machine",
    ];
    let (a, b) = (seucal(&args), seucal(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        stdout(&a),
        "suite=sufficiency seed=11 instances=10000 violations=0\nsuite=remark seed=11 instances=300 violations=0\n"
    );
}

#[test]
fn unwritable_output_exits_three() {
    let o = seucal(&[
        "regions",
        &scenario("worse_gamble.toml"),
        "--k",
        "1",
        "--out",
        "/nonexistent-dir/curves.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error=io"));
}

#[test]
fn help_lists_examples() {
    for sub in [
        "check",
        "witness",
        "interval-witness",
        "indifference",
        "regions",
        "oracle",
        "verify",
    ] {
        let o = seucal(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(&format!("seucal {sub}")), "{sub}");
    }
}
