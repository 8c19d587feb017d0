use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spanalign"));
    c.env_remove("SPANALIGN_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn spanalign")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Generates the planted demo bitext and its planted predictions in `dir`.
fn fixture(dir: &Path, threads: &str) -> Output {
    let out = run(&["--out-dir", s(dir), "--threads", threads, "--seed", "11", "pipeline", "--docs", "12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

struct Fixture {
    _tmp: tempfile::TempDir,
    dir: PathBuf,
}

impl Fixture {
    fn new() -> Self {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("fixture");
        fixture(&dir, "2");
        Fixture { _tmp: tmp, dir }
    }

    fn p(&self, name: &str) -> String {
        s(&self.dir.join(name)).to_string()
    }
}

#[test]
fn pipeline_recovers_planted_alignment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = fixture(tmp.path(), "1");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("planted+ilp"), "{stdout}");
    let report: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("report.json")).unwrap()).unwrap();
    let text = report.to_string();
    assert!(text.contains("100"), "{text}");
}

#[test]
fn outputs_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let one = tmp.path().join("one");
    let many = tmp.path().join("many");
    fixture(&one, "1");
    fixture(&many, "8");
    assert_eq!(files(&one), files(&many));
}

#[test]
fn unidirectional_weights_equal_forward_only() {
    let fx = Fixture::new();
    let both = fx.dir.join("both");
    let fwd_only = fx.dir.join("fwd");
    let (src, tgt) = (fx.p("bitext.src.jsonl"), fx.p("bitext.tgt.jsonl"));
    let (fwd, rev) = (fx.p("predictions.fwd.jsonl"), fx.p("predictions.rev.jsonl"));
    let a = run(&[
        "--out-dir",
        s(&both),
        "align-ilp",
        "--src",
        &src,
        "--tgt",
        &tgt,
        "--fwd",
        &fwd,
        "--rev",
        &rev,
        "--c",
        "1",
        "--c-prime",
        "0",
    ]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&["--out-dir", s(&fwd_only), "align-ilp", "--src", &src, "--tgt", &tgt, "--fwd", &fwd]);
    assert_eq!(b.status.code(), Some(0), "{}", String::from_utf8_lossy(&b.stderr));
    let name = "alignments.ilp.jsonl";
    let x = fs::read(both.join(name)).unwrap();
    assert!(!x.is_empty());
    assert_eq!(x, fs::read(fwd_only.join(name)).unwrap());
}

#[test]
fn synth_is_reproducible() {
    let fx = Fixture::new();
    let (src, tgt, gold) = (fx.p("bitext.src.jsonl"), fx.p("bitext.tgt.jsonl"), fx.p("bitext.gold.jsonl"));
    let mut outputs = Vec::new();
    for run_dir in ["r1", "r2"] {
        let dir = fx.dir.join(run_dir);
        let out = run(&[
            "--out-dir",
            s(&dir),
            "synth",
            "--src",
            &src,
            "--tgt",
            &tgt,
            "--gold",
            &gold,
            "--negatives",
            "9",
            "--seed",
            "7",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(fs::read(dir.join("squad.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let doc: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(doc["version"], "v2.0");
}

#[test]
fn synth_null_examples_need_v2() {
    let fx = Fixture::new();
    let (src, tgt, gold) = (fx.p("bitext.src.jsonl"), fx.p("bitext.tgt.jsonl"), fx.p("bitext.gold.jsonl"));
    let dir = fx.dir.join("v2");
    let base = ["--out-dir", s(&dir), "synth", "--src", &src, "--tgt", &tgt, "--gold", &gold, "--null-examples"];
    let mut args = base.to_vec();
    args.extend(["--squad-version", "v1.1"]);
    let v1 = run(&args);
    assert_eq!(v1.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&v1.stderr).contains("v1.1"));
    let v2 = run(&base);
    assert_eq!(v2.status.code(), Some(0), "{}", String::from_utf8_lossy(&v2.stderr));
    let text = fs::read_to_string(dir.join("squad.json")).unwrap();
    assert!(text.contains("\"is_impossible\":true"));
}

#[test]
fn lexical_scoring_baseline_and_eval() {
    let fx = Fixture::new();
    let (src, tgt, gold, dict) =
        (fx.p("bitext.src.jsonl"), fx.p("bitext.tgt.jsonl"), fx.p("bitext.gold.jsonl"), fx.p("bitext.dict.tsv"));
    let lex = fx.dir.join("lex");
    let out =
        run(&["--out-dir", s(&lex), "score", "--src", &src, "--tgt", &tgt, "--scorer", "lexical", "--dict", &dict]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (fwd, rev) = (lex.join("predictions.fwd.jsonl"), lex.join("predictions.rev.jsonl"));
    let out =
        run(&["--out-dir", s(&lex), "align-sym", "--src", &src, "--tgt", &tgt, "--fwd", s(&fwd), "--rev", s(&rev)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["--out-dir", s(&lex), "baseline", "--src", &src, "--tgt", &tgt, "--dict", &dict]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "--out-dir",
        s(&lex),
        "eval",
        "--src",
        &src,
        "--tgt",
        &tgt,
        "--mode",
        "pair",
        "--gold",
        &gold,
        "--pred",
        s(&lex.join("alignments.baseline.jsonl")),
        "--format",
        "json",
        "--report-file",
        "baseline.json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!report.to_string().is_empty());
    assert!(lex.join("baseline.json").is_file());
    let out = run(&[
        "--out-dir",
        s(&lex),
        "eval",
        "--src",
        &src,
        "--tgt",
        &tgt,
        "--mode",
        "span",
        "--gold",
        &gold,
        "--pred",
        s(&fwd),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("F1"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["synth", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn version_prints_build_metadata() {
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn missing_input_is_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.jsonl");
    let out = run(&["--out-dir", s(tmp.path()), "synth", "--src", s(&missing), "--tgt", s(&missing)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.jsonl"));
}

#[test]
fn solver_cap_exceeded_exits_2() {
    let fx = Fixture::new();
    let (src, tgt) = (fx.p("bitext.src.jsonl"), fx.p("bitext.tgt.jsonl"));
    let (fwd, rev) = (fx.p("predictions.fwd.jsonl"), fx.p("predictions.rev.jsonl"));
    let out = run(&[
        "--out-dir",
        s(&fx.dir.join("cap")),
        "align-ilp",
        "--src",
        &src,
        "--tgt",
        &tgt,
        "--fwd",
        &fwd,
        "--rev",
        &rev,
        "--exact-cap",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!fx.dir.join("cap").join("alignments.ilp.jsonl").exists());
}

#[test]
fn bad_input_line_is_named() {
    let fx = Fixture::new();
    let bad = fx.dir.join("bad.jsonl");
    let mut text = fs::read_to_string(fx.dir.join("bitext.src.jsonl")).unwrap();
    text.push_str("{not json\n");
    fs::write(&bad, text).unwrap();
    let tgt = fx.p("bitext.tgt.jsonl");
    let out = run(&["--out-dir", s(&fx.dir.join("x")), "synth", "--src", s(&bad), "--tgt", &tgt]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.jsonl") && err.contains("13"), "{err}");
}

#[test]
fn flags_override_config_and_env_supplies_default() {
    let fx = Fixture::new();
    let (src, tgt, gold) = (fx.p("bitext.src.jsonl"), fx.p("bitext.tgt.jsonl"), fx.p("bitext.gold.jsonl"));
    let cfg = fx.dir.join("run.toml");
    let from_config = fx.dir.join("cfg_out");
    fs::write(&cfg, format!("[global]\nout_dir = {:?}\nseed = 7\n[synth]\nnegatives = 3\n", s(&from_config))).unwrap();

    let out = bin()
        .env("SPANALIGN_CONFIG", &cfg)
        .args(["synth", "--src", &src, "--tgt", &tgt, "--gold", &gold])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let via_env = fs::read(from_config.join("squad.json")).unwrap();

    let flag_dir = fx.dir.join("flag_out");
    let out = run(&[
        "--config",
        s(&cfg),
        "--out-dir",
        s(&flag_dir),
        "synth",
        "--src",
        &src,
        "--tgt",
        &tgt,
        "--gold",
        &gold,
        "--negatives",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(via_env, fs::read(flag_dir.join("squad.json")).unwrap());

    let out = run(&[
        "--config",
        s(&cfg),
        "--out-dir",
        s(&flag_dir),
        "synth",
        "--src",
        &src,
        "--tgt",
        &tgt,
        "--gold",
        &gold,
        "--negatives",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(via_env, fs::read(flag_dir.join("squad.json")).unwrap());
}

#[test]
fn unknown_config_key_names_file_and_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "[global]\nseed = 1\n\n[snap]\nmin_scor = 0.1\n").unwrap();
    let out = run(&["--config", s(&cfg), "pipeline"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("run.toml") && err.contains('5'), "{err}");
}

#[test]
fn outputs_stay_inside_out_dir() {
    let fx = Fixture::new();
    let (src, tgt) = (fx.p("bitext.src.jsonl"), fx.p("bitext.tgt.jsonl"));
    let out =
        run(&["--out-dir", s(&fx.dir.join("o")), "synth", "--src", &src, "--tgt", &tgt, "--output", "../escape.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!fx.dir.join("escape.json").exists());
}

#[test]
fn config_fuzz_seeds_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/config");
    let mut n = 0;
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        spanalign_cli::config::RunConfig::load(&path).unwrap_or_else(|e| panic!("{e}"));
        n += 1;
    }
    assert!(n > 0);
}
