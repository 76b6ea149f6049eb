use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pillowcase"))
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    root().join("fixtures").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().arg("--out").arg(out).args(args).env_remove("PILLOW_SEED").output().unwrap()
}

fn golden(name: &str, actual: &str) {
    let path = fixture("golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

#[test]
fn every_subcommand_has_help() {
    for args in [
        vec!["--help"],
        vec!["charvar", "--help"],
        vec!["shear", "--help"],
        vec!["shear", "fit", "--help"],
        vec!["shear", "apply", "--help"],
        vec!["shear", "critical", "--help"],
        vec!["splice", "--help"],
        vec!["triangle", "--help"],
        vec!["triangle", "run", "--help"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{args:?}");
    }
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [vec!["frobnicate"], vec!["charvar"], vec!["--format", "png", "charvar", "--knot", "trefoil"]] {
        let out = run(&args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--step", "0.05", "splice", "--left", "unknot", "--right", "trefoil", "--restarts", "8", "--expect-nonempty"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["charvar", "--knot", "torus:2,4"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--step=0", "charvar", "--knot", "trefoil"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn triangle_transcripts_match_goldens() {
    for name in ["incompressible", "s2xs1_surgery"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&["triangle", "run", "--axioms", fixture(&format!("{name}.json")).to_str().unwrap()], dir.path());
        assert_eq!(out.status.code(), Some(0));
        let text = std::fs::read_to_string(dir.path().join("derivation.txt")).unwrap();
        assert!(text.ends_with("CONTRADICTION\n"));
        assert_eq!(String::from_utf8(out.stdout).unwrap(), text);
        golden(&format!("{name}.txt"), &text);
        golden(&format!("{name}.json"), &std::fs::read_to_string(dir.path().join("derivation.json")).unwrap());
    }
}

#[test]
fn small_window_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["triangle", "run", "--axioms", fixture("incompressible.json").to_str().unwrap(), "--window", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window"));
}

#[test]
fn charvar_svg_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--format", "svg", "charvar", "--knot", "trefoil"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(!dir.path().join("curves.json").exists());
    golden("trefoil_charvar.svg", &std::fs::read_to_string(dir.path().join("charvar.svg")).unwrap());
}

#[test]
fn splice_reports_casson_note() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--format", "json", "splice", "--left", "torus:2,3", "--right", "trefoil", "--expect-nonempty"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("splice.json")).unwrap()).unwrap();
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 8);
    golden("casson_note.txt", &format!("{}\n", v["casson_note"].as_str().unwrap()));
}

#[test]
fn env_supplies_defaults_and_flags_override() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let env_only = bin()
        .args(["charvar", "--knot", "trefoil", "--restarts", "8"])
        .env("PILLOW_OUT", a.path())
        .env("PILLOW_STEP", "0.05")
        .env("PILLOW_FORMAT", "json")
        .output()
        .unwrap();
    assert_eq!(env_only.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.path().join("curves.json")).unwrap()).unwrap();
    assert_eq!(v["config"]["step"], 0.05);
    let flag = bin()
        .args(["--step", "0.04", "charvar", "--knot", "trefoil", "--restarts", "8"])
        .env("PILLOW_OUT", b.path())
        .env("PILLOW_STEP", "0.05")
        .output()
        .unwrap();
    assert_eq!(flag.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(b.path().join("curves.json")).unwrap()).unwrap();
    assert_eq!(v["config"]["step"], 0.04);
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn runs_are_byte_identical_across_repeats_and_thread_counts() {
    let cases: Vec<Vec<String>> = vec![
        vec!["--seed".into(), "7".into(), "charvar".into(), "--knot".into(), "torus:2,5".into()],
        vec!["--seed".into(), "3".into(), "splice".into(), "--left".into(), "trefoil".into(), "--right".into(), "trefoil".into()],
        vec!["shear".into(), "critical".into(), "--knot".into(), "trefoil".into()],
        vec!["triangle".into(), "run".into(), "--axioms".into(), fixture("s2xs1_surgery.json").to_string_lossy().into_owned()],
    ];
    for args in cases {
        let mut runs = Vec::new();
        for threads in ["1", "1", "4"] {
            let dir = tempfile::tempdir().unwrap();
            let out = bin().arg("--out").arg(dir.path()).args(&args).env("RAYON_NUM_THREADS", threads).output().unwrap();
            assert_eq!(out.status.code(), Some(0), "{args:?}");
            runs.push(artifacts(dir.path()));
        }
        assert!(!runs[0].is_empty());
        assert_eq!(runs[0], runs[1], "{args:?} repeat");
        assert_eq!(runs[0], runs[2], "{args:?} threads");
    }
}
