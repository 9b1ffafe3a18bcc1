use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sinemodel"));
    c.env_remove("SINEMODEL_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_srer_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("amfm.wav");
    let truth = dir.path().join("amfm.json");
    ok(&["gen", "--signal", "amfm", "--out", p(&wav), "--truth", p(&truth)]);
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&truth).unwrap()).unwrap();
    assert_eq!(t["tracks"].as_array().unwrap().len(), 10);
    assert!(t["gain"].as_f64().unwrap() < 1.0);
    let out = ok(&["srer", "--ref", p(&wav), "--test", p(&wav)]);
    assert_eq!(out.trim(), "300.0000");
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |name: &str, seed: Option<&str>| {
        let path = dir.path().join(name);
        let mut c = bin();
        c.args(["gen", "--signal", "amfm", "--out", p(&path)]);
        if let Some(s) = seed {
            c.env("SINEMODEL_SEED", s);
        }
        assert!(c.status().unwrap().success());
        fs::read(path).unwrap()
    };
    let a = gen("a.wav", None);
    let b = gen("b.wav", None);
    let c = gen("c.wav", Some("7"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn pitch_and_analyze_each_model() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("vib.wav");
    let f0 = dir.path().join("f0.csv");
    ok(&["gen", "--signal", "vibrato", "--out", p(&wav)]);
    ok(&["pitch", "--in", p(&wav), "--out", p(&f0)]);
    let rows = fs::read_to_string(&f0).unwrap().lines().count();
    assert!(rows > 900, "{rows}");

    for (model, extra) in [
        ("sm", vec![]),
        ("edsm", vec!["--f0", p(&f0)]),
        ("eaqhm", vec!["--f0", p(&f0), "--partials", "10", "--max-adapt", "3"]),
    ] {
        let params = dir.path().join(format!("{model}.json"));
        let resynth = dir.path().join(format!("{model}.wav"));
        let mut args = vec![
            "analyze",
            "--model",
            model,
            "--in",
            p(&wav),
            "--params",
            p(&params),
            "--resynth",
            p(&resynth),
        ];
        args.extend(extra);
        let out = ok(&args);
        assert!(out.contains("SRER"), "{out}");
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&params).unwrap()).unwrap();
        assert_eq!(v["model"], model);
        let srer: f64 = ok(&["srer", "--ref", p(&wav), "--test", p(&resynth)])
            .trim()
            .parse()
            .unwrap();
        assert!(srer > 15.0, "{model}: {srer}");
    }
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let json = dir.path().join("a.json");
    for out in [&a, &b] {
        ok(&[
            "sweep",
            "--signal",
            "chirp",
            "--models",
            "sm,edsm",
            "--multiples",
            "1,2",
            "--out",
            p(out),
            "--json",
            p(&json),
        ]);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("model,multiple,window_ms,window_samples,srer_db,status"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn compare_reads_a_list() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", "--signal", "damped", "--out", p(&dir.path().join("damped.wav"))]);
    let list = dir.path().join("files.txt");
    fs::write(&list, "# local stand-in\ndamped.wav\n").unwrap();
    let table = dir.path().join("table.csv");
    ok(&["compare", "--list", p(&list), "--out", p(&table)]);
    let text = fs::read_to_string(&table).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("id,status,sm_srer_db,sm_params_per_partial,sm_params,edsm_srer_db"));
    assert!(!lines[0].contains("seconds"));
    assert!(lines[1].starts_with("damped,ok,"));

    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    ok(&["compare", "--list", p(&empty), "--out", p(&table)]);
    assert_eq!(fs::read_to_string(&table).unwrap().lines().count(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    // usage
    assert_eq!(
        run(&["sweep", "--signal", "amfm", "--multiples", "2:1", "--out", p(&out)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["analyze", "--model", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["compare", "--out", p(&out)]).status.code(), Some(2));
    // I/O
    let missing = dir.path().join("missing.wav");
    assert_eq!(
        run(&["pitch", "--in", p(&missing), "--out", p(&out)]).status.code(),
        Some(3)
    );
    // analysis: window shorter than the conditioning bound
    let wav = dir.path().join("amfm.wav");
    ok(&["gen", "--signal", "amfm", "--out", p(&wav)]);
    let code = run(&[
        "analyze",
        "--model",
        "eaqhm",
        "--in",
        p(&wav),
        "--window-periods",
        "1",
        "--partials",
        "5",
        "--params",
        p(&dir.path().join("p.json")),
        "--resynth",
        p(&dir.path().join("r.wav")),
    ])
    .status
    .code();
    assert_eq!(code, Some(4));
}
