use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vortexlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn vortexlab(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vortexlab"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn malformed_config_exits_2_without_artifacts() {
    let dir = scratch("malformed");
    let cases = [
        ("syntax.json", "{ \"spectral_n\": "),
        ("unknown.json", r#"{ "spectral_nn": 512 }"#),
        ("range.json", r#"{ "lab": { "profile": { "alpha": -1.0 } } }"#),
        ("ladder.json", r#"{ "nonuniq": { "ladder": [0.1] } }"#),
    ];
    for (file, text) in cases {
        let cfg = dir.join(file);
        std::fs::write(&cfg, text).unwrap();
        let out = dir.join(format!("run-{file}"));
        let o = vortexlab(&["profile", "build"], Some(&cfg), &out);
        assert_eq!(o.status.code(), Some(2), "{file}: {}", stderr(&o));
        assert!(!out.exists(), "{file} left {}", out.display());
    }
}

#[test]
fn profile_and_spectrum_runs_are_byte_identical() {
    let dir = scratch("determinism");
    let cfg = dir.join("small.json");
    std::fs::write(&cfg, r#"{ "spectral_n": 512, "scan_m": [2, 3] }"#).unwrap();
    let read = |p: PathBuf| std::fs::read(p).unwrap();
    for (args, files) in [
        (&["profile", "build"][..], &["profile.csv", "profile.json", "class_c.json"][..]),
        (&["spectrum"][..], &["spectrum.csv", "manifest.json"][..]),
    ] {
        let (a, b) = (dir.join(format!("{}-a", args[0])), dir.join(format!("{}-b", args[0])));
        for out in [&a, &b] {
            let o = vortexlab(args, Some(&cfg), out);
            assert!(o.status.success(), "{args:?}: {}", stderr(&o));
        }
        for f in files {
            assert_eq!(read(a.join(f)), read(b.join(f)), "{args:?} {f}");
        }
    }
    let csv = std::fs::read_to_string(dir.join("spectrum-a/spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "m,l,gamma,kappa,Re,Im,residual_pencil,residual_integral,n,t_min,t_max"
    );
    assert!(lines.any(|l| l.starts_with("2,")));
}

#[test]
fn profile_verify_accepts_a_built_profile() {
    let dir = scratch("verify");
    let built = dir.join("built");
    assert!(vortexlab(&["profile", "build"], None, &built).status.success());
    let doc = built.join("profile.json");
    let o = vortexlab(&["profile", "verify", "--profile", doc.to_str().unwrap()], None, &dir.join("checked"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.join("checked/class_c.json").is_file());
}

#[test]
fn report_flags_incomplete_runs() {
    let dir = scratch("report");
    let empty = dir.join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let o = vortexlab(&["report", empty.to_str().unwrap()], None, &dir.join("unused"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("manifest.json"), "{}", stderr(&o));

    let run = dir.join("run");
    assert!(vortexlab(&["profile", "build"], None, &run).status.success());
    let o = vortexlab(&["report", run.to_str().unwrap()], None, &dir.join("unused"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(run.join("report.json").is_file());

    std::fs::remove_file(run.join("profile.csv")).unwrap();
    let o = vortexlab(&["report", run.to_str().unwrap()], None, &dir.join("unused"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("profile.csv"), "{}", stderr(&o));
}

#[test]
fn nonuniq_run_exports_a_report() {
    let dir = scratch("nonuniq");
    let cfg = dir.join("tiny.json");
    std::fs::write(
        &cfg,
        r#"{ "lab": { "operator_n": 300, "pencil_n": 512, "n": 64 },
             "nonuniq": { "n": 64, "ladder": [0.1, 0.05], "t_final": 0.25, "report_times": [0.0, 0.25], "weak_tests": 2 } }"#,
    )
    .unwrap();
    let run = dir.join("run");
    let o = vortexlab(&["nonuniq"], Some(&cfg), &run);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = vortexlab(&["report", run.to_str().unwrap()], None, &dir.join("unused"));
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(run.join("report.json")).unwrap()).unwrap();
    let ladder = report["ladder"].as_array().unwrap();
    assert_eq!(ladder.len(), 2);
    assert!(ladder.iter().all(|row| row["initial_distance"].as_f64().unwrap() > 0.0));
}
