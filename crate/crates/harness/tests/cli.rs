use std::path::Path;
use std::process::{Command, Output};

use certgd_harness::read_trace;

fn certgd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_certgd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn run(dir: &Path, file: &str, extra: &[&str]) -> Output {
    let out = dir.join(file);
    let mut args = vec!["run", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    certgd(&args)
}

#[test]
fn passing_certificate_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "agm.json",
        &["--problem", "p2", "--method", "agm2", "--steps", "100", "--certify", "--theorems", "nest-agm2"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("nest-agm2        PASS"));
    let doc = read_trace(&dir.path().join("agm.json")).unwrap();
    assert_eq!(doc.meta.pass, Some(true));
}

#[test]
fn failing_certificate_exits_one() {
    // The (t+1)/β schedule under the halved distance weight breaks the
    // potential once, near t = 45.
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "full.json",
        &[
            "--problem", "p2", "--method", "agm-constrained", "--schedule", "constrained-full", "--set", "ball",
            "--steps", "300", "--certify",
        ],
    );
    assert_eq!(code(&out), 1);
    let doc = read_trace(&dir.path().join("full.json")).unwrap();
    let cert = &doc.meta.certificates[0];
    assert!(cert.run_pass && cert.step_violations == Some(1));
    assert!(cert.flags.iter().any(|f| f == "alternative eta schedule"));
}

#[test]
fn numeric_blow_up_exits_one_with_last_good_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "nan.json",
        &["--problem", "p3", "--method", "smooth-gd", "--steps", "10", "--x0", "1e308,1e308"],
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("last good step is 0"));
    assert!(!dir.path().join("nan.json").exists());
}

#[test]
fn config_errors_exit_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (&["--problem", "p9", "--method", "agm2", "--steps", "5"], "`problem`"),
        (&["--problem", "p2", "--method", "agm9", "--steps", "5"], "`method`"),
        (&["--problem", "p2", "--method", "agm2", "--schedule", "harmonic", "--steps", "5"], "`schedule`"),
        (&["--problem", "p2", "--method", "agm2", "--set", "ball", "--steps", "5"], "`set`"),
        (&["--problem", "p2", "--method", "agm2", "--steps", "0"], "`steps`"),
        (&["--problem", "p2", "--method", "agm2", "--steps", "5", "--x0", "1,2,3"], "`x0`"),
        (&["--problem", "p2", "--method", "smooth-gd", "--set", "ball", "--steps", "5", "--x0", "3,0"], "`x0`"),
        (&["--problem", "p2", "--method", "agm2", "--steps", "5", "--certify", "--theorems", "mirror"], "`theorems`"),
        (&["--problem", "lse3", "--method", "sc-agm", "--steps", "5"], "`problem`"),
        (&["--problem", "experts-alt", "--method", "smooth-gd", "--steps", "5"], "`method`"),
        (&["--problem", "p2", "--method", "frank-wolfe", "--set", "unconstrained", "--steps", "5"], "`set`"),
        (&["--problem", "p2", "--method", "mirror-negentropy", "--set", "ball", "--steps", "5"], "`set`"),
    ];
    for (args, key) in cases {
        let out = run(dir.path(), "bad.json", args);
        assert_eq!(code(&out), 2, "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{args:?}: {err}");
    }
    assert!(!dir.path().join("bad.json").exists());
}

#[test]
fn list_names_every_registered_id() {
    let out = certgd(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for id in ["p1", "lse3", "experts-alt", "box-offset", "restart-agm", "nest-wcond", "failed-attempt"] {
        assert!(text.contains(id), "{id}");
    }
}

#[test]
fn suite_runs_every_config_and_reports_the_worst() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let good = format!(
        r#"[
            {{"problem": "p2", "method": "agm2", "steps": 100, "certify": true, "out": "{d}/a.json"}},
            {{"problem": "experts-alt", "method": "mirror-negentropy", "steps": 100, "certify": true,
              "theorems": ["mirror"], "out": "{d}/b.json"}},
            {{"problem": "p3", "method": "well-conditioned", "steps": 50, "out": "{d}/c.csv", "format": "csv"}}
        ]"#
    );
    let cfg = dir.path().join("suite.json");
    std::fs::write(&cfg, good).unwrap();
    let out = certgd(&["suite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    for f in ["a.json", "b.json", "c.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }

    let failing = format!(
        r#"[
            {{"problem": "p2", "method": "agm2", "steps": 10, "out": "{d}/d.json"}},
            {{"problem": "p2", "method": "agm-constrained", "schedule": "constrained-full", "set": "ball",
              "steps": 300, "certify": true, "out": "{d}/e.json"}}
        ]"#
    );
    std::fs::write(&cfg, failing).unwrap();
    assert_eq!(code(&certgd(&["suite", "--config", cfg.to_str().unwrap()])), 1);

    let clash = format!(
        r#"[
            {{"problem": "p2", "method": "agm2", "steps": 10, "out": "{d}/f.json"}},
            {{"problem": "p1", "method": "agm2", "steps": 10, "out": "{d}/f.json"}}
        ]"#
    );
    std::fs::write(&cfg, clash).unwrap();
    let out = certgd(&["suite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[1].out"));
    assert!(!dir.path().join("f.json").exists());

    std::fs::write(&cfg, r#"[{"problem": "p2", "method": "agm2", "steps": 10, "out": "x", "colour": 1}]"#).unwrap();
    assert_eq!(code(&certgd(&["suite", "--config", cfg.to_str().unwrap()])), 2);
}
