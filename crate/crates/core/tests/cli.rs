mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fccplate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fccplate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = fccplate(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    fccplate(args).status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Glyphs at `scale` and a template file built from them.
fn templates(dir: &Path, scale: &str) -> std::path::PathBuf {
    let glyphs = dir.join(format!("glyphs{scale}"));
    run_ok(&["synth", "--glyphs", "--scale", scale, "--out", p(&glyphs)]);
    let out = dir.join(format!("templates{scale}.fcc"));
    run_ok(&["build-templates", p(&glyphs), "--out", p(&out)]);
    out
}

fn untimed(json: &str) -> String {
    let mut value: serde_json::Value = serde_json::from_str(json).unwrap();
    let timing = value.as_object_mut().unwrap().remove("timing").expect("timing block");
    assert!(timing["min_seconds"].as_f64().unwrap() >= 0.0);
    assert!(timing["min_seconds"].as_f64() <= timing["mean_seconds"].as_f64());
    assert!(timing["mean_seconds"].as_f64() <= timing["max_seconds"].as_f64());
    serde_json::to_string_pretty(&value).unwrap() + "\n"
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(
        code(&["recognize", "x.pgm", "--segmenter", "magic", "--templates", "t"]),
        1
    );
    assert_eq!(code(&["--help"]), 0);
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.pgm");
    assert_eq!(code(&["synth", "--text", "ab", "--out", p(&out)]), 1);
    assert_eq!(code(&["synth", "--text", "AB", "--gap", "1", "--out", p(&out)]), 1);
}

#[test]
fn synth_is_deterministic_and_appends_truth() {
    let dir = TempDir::new().unwrap();
    let truth = dir.path().join("truth.csv");
    for name in ["a.pgm", "b.pgm"] {
        let out = dir.path().join(name);
        run_ok(&[
            "synth",
            "--text",
            "WGN8871",
            "--noise",
            "0.05",
            "--seed",
            "42",
            "--out",
            p(&out),
            "--truth",
            p(&truth),
        ]);
    }
    assert_eq!(
        fs::read(dir.path().join("a.pgm")).unwrap(),
        fs::read(dir.path().join("b.pgm")).unwrap()
    );
    assert_eq!(fs::read_to_string(&truth).unwrap(), "a.pgm,WGN8871\nb.pgm,WGN8871\n");

    let one = dir.path().join("one.pgm");
    run_ok(&["synth", "--text", "A", "--scale", "1", "--gap", "2", "--out", p(&one)]);
    let bytes = fs::read(&one).unwrap();
    assert!(bytes.starts_with(b"P5\n9 11\n255\n"));
}

#[test]
fn build_templates_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let first = templates(dir.path(), "3");
    let text = fs::read_to_string(&first).unwrap();
    assert!(text.starts_with("FCCT1 8\n"));
    assert_eq!(text.lines().count(), 37);
    let again = run_ok(&["build-templates", p(&dir.path().join("glyphs3"))]);
    assert_eq!(again, text);

    let missing = dir.path().join("nope").join("A.pbm");
    let out = fccplate(&["build-templates", p(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));

    let raw = run_ok(&["build-templates", "--raw-totals", p(&dir.path().join("glyphs3"))]);
    assert!(raw.starts_with("FCCR1 8\n"));
}

#[test]
fn recognize_reads_a_clean_plate() {
    let dir = TempDir::new().unwrap();
    let ts = templates(dir.path(), "3");
    let plate = dir.path().join("plate.pgm");
    run_ok(&["synth", "--text", "WGN8871", "--out", p(&plate)]);
    for segmenter in ["ccl", "projection"] {
        let out = run_ok(&["recognize", p(&plate), "--templates", p(&ts), "--segmenter", segmenter]);
        assert_eq!(out.lines().next(), Some("WGN8871"));
        assert_eq!(out.lines().count(), 8);
    }
    let json: serde_json::Value =
        serde_json::from_str(&run_ok(&["recognize", p(&plate), "--templates", p(&ts), "--json"])).unwrap();
    assert_eq!(json["text"], "WGN8871");
    let chars = json["characters"].as_array().unwrap();
    assert_eq!(chars.len(), 7);
    assert!(chars
        .iter()
        .all(|c| c["distance"] == 0.0 && c["elapsed_seconds"].as_f64().unwrap() >= 0.0));
}

#[test]
fn similar_characters_on_one_plate() {
    let dir = TempDir::new().unwrap();
    let ts = templates(dir.path(), "3");
    let plate = dir.path().join("plate.pgm");
    run_ok(&["synth", "--text", "O0B8G6D", "--out", p(&plate)]);
    let json: serde_json::Value =
        serde_json::from_str(&run_ok(&["recognize", p(&plate), "--templates", p(&ts), "--json"])).unwrap();
    assert_eq!(json["text"], "O0B8G6D");
    let runner_ups: Vec<&str> = json["characters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["runner_up"][0].as_str().unwrap())
        .collect();
    // Clean glyphs are still read correctly; the nearest wrong template for
    // 'O' is the zero.
    assert_eq!(runner_ups[0], "0");
}

#[test]
fn recognition_failures_have_distinct_codes() {
    let dir = TempDir::new().unwrap();
    let ts = templates(dir.path(), "3");
    let blank = dir.path().join("blank.pgm");
    fs::write(&blank, [b"P5\n20 10\n255\n".as_slice(), &[255u8; 200]].concat()).unwrap();
    assert_eq!(code(&["recognize", p(&blank), "--templates", p(&ts)]), 3);

    let plate = dir.path().join("plate.pgm");
    run_ok(&["synth", "--text", "AB", "--out", p(&plate)]);
    assert_eq!(
        code(&["recognize", p(&plate), "--templates", p(&ts), "--connectivity", "4"]),
        4
    );
    assert_eq!(
        code(&["recognize", p(&plate), "--templates", p(&ts), "--raw-totals"]),
        4
    );
    assert_eq!(
        code(&["recognize", p(&dir.path().join("missing.pgm")), "--templates", p(&ts)]),
        2
    );

    let broken = dir.path().join("broken.fcc");
    fs::write(&broken, "FCCT2 8\n").unwrap();
    assert_eq!(code(&["recognize", p(&plate), "--templates", p(&broken)]), 2);
}

#[test]
fn raw_total_matching() {
    let dir = TempDir::new().unwrap();
    let glyphs = dir.path().join("glyphs");
    run_ok(&["synth", "--glyphs", "--out", p(&glyphs)]);
    let ts = dir.path().join("raw.fcc");
    run_ok(&["build-templates", "--raw-totals", p(&glyphs), "--out", p(&ts)]);
    let plate = dir.path().join("plate.pgm");
    run_ok(&["synth", "--text", "KL42", "--out", p(&plate)]);
    let out = run_ok(&["recognize", p(&plate), "--templates", p(&ts), "--raw-totals"]);
    assert_eq!(out.lines().next(), Some("KL42"));
}

#[test]
fn trace_prints_start_codes_and_counts() {
    let dir = TempDir::new().unwrap();
    let img = dir.path().join("square.pbm");
    fs::write(&img, "P1\n4 3\n0000\n0110\n0110\n").unwrap();
    assert_eq!(run_ok(&["trace", p(&img)]), "1,1\n0642\n1 0 1 0 1 0 1 0\n");
    assert_eq!(
        run_ok(&["trace", p(&img), "--connectivity", "4"]),
        "1,1\n0321\n1 1 1 1\n"
    );
    assert_eq!(
        run_ok(&["trace", p(&img), "--row", "2", "--col", "2"]),
        "1,1\n0642\n1 0 1 0 1 0 1 0\n"
    );
    assert_eq!(code(&["trace", p(&img), "--connectivity", "6"]), 1);

    let diagonal = dir.path().join("diagonal.pbm");
    fs::write(&diagonal, "P1\n2 2\n1 0\n0 1\n").unwrap();
    assert_eq!(run_ok(&["trace", p(&diagonal)]), "0,0\n73\n0 0 0 1 0 0 0 1\n");
    assert_eq!(code(&["trace", p(&diagonal), "--connectivity", "4"]), 4);
}

#[test]
fn bench_matches_golden_report() {
    let dir = TempDir::new().unwrap();
    let ts = templates(dir.path(), "3");
    let corpus = dir.path().join("corpus");
    run_ok(&[
        "synth",
        "--count",
        "50",
        "--scale",
        "3",
        "--noise",
        "0.01",
        "--seed",
        "11",
        "--out",
        p(&corpus),
    ]);
    let report = dir.path().join("report.json");
    let first = run_ok(&[
        "bench",
        p(&corpus),
        "--templates",
        p(&ts),
        "--json",
        "--out",
        p(&report),
    ]);
    assert_eq!(fs::read_to_string(&report).unwrap(), first);
    let second = run_ok(&["bench", p(&corpus), "--templates", p(&ts), "--json"]);
    assert_eq!(untimed(&first), untimed(&second));
    common::check_golden("bench_noise001.json", &untimed(&first)).unwrap();

    let table = run_ok(&["bench", p(&corpus), "--templates", p(&ts)]);
    assert!(table.contains("Connected component labeling"));

    fs::write(corpus.join("truth.csv"), "plate_0000.pgm,ABC\n").unwrap();
    let out = fccplate(&["bench", p(&corpus), "--templates", p(&ts)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("plate_0001.pgm"));
}
