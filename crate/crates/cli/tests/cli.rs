use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn pairguess(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairguess"))
        .args(args)
        .env_remove("PAIRGUESS_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn structured(args: &[&str]) -> Value {
    let mut full = vec!["--format", "structured"];
    full.extend_from_slice(args);
    let o = pairguess(&full);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn simulate_to(dir: &TempDir, name: &str, args: &[&str]) -> std::path::PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["simulate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let o = pairguess(&full);
    assert!(o.status.success(), "{}", stderr(&o));
    path
}

fn certify(path: &Path, d: usize) -> Output {
    pairguess(&["certify", "--in", path.to_str().unwrap(), "--d", &d.to_string(), "--alpha", "0.01"])
}

#[test]
fn evaluate_trine_text() {
    let o = pairguess(&["evaluate", "--d", "3", "--strategy", "trine"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("average          0.9330127"), "{out}");
    assert!(out.contains("wins             true"), "{out}");
    assert!(out.contains("qrac reference   0.8535534"), "{out}");
}

#[test]
fn evaluate_classical_optimum_fraction() {
    let o = pairguess(&["evaluate", "--d", "4", "--strategy", "classical-optimum", "--levels", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("(5/6)"), "{out}");
    assert!(out.contains("wins             false"), "{out}");
}

#[test]
fn evaluate_structured_polygon() {
    let v = structured(&["evaluate", "--d", "4", "--strategy", "polygon"]);
    assert!((v["average"].as_f64().unwrap() - 0.902_368_927_062_182_4).abs() < 1e-12);
    assert_eq!(v["cells"].as_array().unwrap().len(), 12);
    assert_eq!(v["classical_bound_fraction"], "5/6");
}

#[test]
fn optimize_examples() {
    let v = structured(&["optimize", "--d", "3", "--mode", "quantum", "--restarts", "16", "--seed", "1"]);
    assert!(v["value"].as_f64().unwrap() >= 0.933_01 - 1e-6);

    let v = structured(&["optimize", "--d", "4", "--mode", "delta", "--grid-step", "0.005"]);
    for a in v["argmax"].as_array().unwrap() {
        assert!((a.as_f64().unwrap() - 0.59).abs() < 0.01, "{v}");
    }

    let v = structured(&["optimize", "--d", "5", "--mode", "classical", "--levels", "2"]);
    assert_eq!(v["value_fraction"], "4/5");
    assert_eq!(v["can_win"], false);
}

#[test]
fn optimize_is_reproducible() {
    let args = ["--format", "structured", "optimize", "--d", "4", "--mode", "quantum", "--restarts", "8", "--seed", "7"];
    let a = pairguess(&args);
    let single: Vec<&str> = ["--threads", "1"].iter().chain(args.iter()).copied().collect();
    let b = pairguess(&single);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["--d", "3", "--strategy", "trine", "--rounds", "100000", "--seed", "9"];
    let a = simulate_to(&dir, "a.jsonl", &args);
    let b = simulate_to(&dir, "b.jsonl", &args);
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert_eq!(text.iter().filter(|&&c| c == b'\n').count(), 100_000);
}

#[test]
fn simulate_noisy_tetrad_in_band() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("t.jsonl");
    let v = structured(&[
        "simulate", "--d", "4", "--strategy", "tetrad", "--noise", "0.3", "--rounds", "100000", "--seed", "3",
        "--out", path.to_str().unwrap(),
    ]);
    let target = 0.5 + 0.7 / 6f64.sqrt();
    let se = (target * (1.0 - target) / 1e5).sqrt();
    let avg = v["empirical_average"].as_f64().unwrap();
    assert!((avg - target).abs() < 4.0 * se, "{avg}");
    assert_eq!(v["generator"], "chacha8-stream-per-round");
}

#[test]
fn certify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let q = simulate_to(&dir, "q.jsonl", &["--d", "3", "--strategy", "trine", "--rounds", "100000", "--seed", "1"]);
    let o = certify(&q, 3);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("quantumness        QUANTUM"));

    let c = simulate_to(&dir, "c.jsonl", &["--d", "3", "--strategy", "classical-optimum", "--rounds", "100000", "--seed", "1"]);
    assert_eq!(certify(&c, 3).status.code(), Some(3));

    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"round\":1,\"x\":1,\"j\":1,\"guess\":1}\n{\"round\":2,\"x\":1,\"j\"\n").unwrap();
    let o = certify(&bad, 3);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let outside = dir.path().join("outside.jsonl");
    fs::write(&outside, "{\"round\":1,\"x\":3,\"j\":1,\"guess\":3}\n").unwrap();
    let o = certify(&outside, 3);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));
}

#[test]
fn certify_structured_report() {
    let dir = TempDir::new().unwrap();
    let q = simulate_to(&dir, "q.jsonl", &["--d", "3", "--strategy", "trine", "--rounds", "100000", "--seed", "2"]);
    let o = pairguess(&["--format", "structured", "certify", "--in", q.to_str().unwrap(), "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["quantumness_verdict"], "QUANTUM");
    assert_eq!(v["coherence_verdict"], "COHERENT");
    assert_eq!(v["total_rounds"], 100_000);
    assert_eq!(v["cells"].as_array().unwrap().len(), 6);
    assert!((v["confidence_radius"].as_f64().unwrap() - 0.005_147).abs() < 1e-6);
}

#[test]
fn simulate_certify_round_trip_matches_theory() {
    let dir = TempDir::new().unwrap();
    let cases: [(&[&str], usize); 6] = [
        (&["--strategy", "trine"], 3),
        (&["--strategy", "tetrad"], 4),
        (&["--strategy", "polygon"], 4),
        (&["--strategy", "polygon"], 5),
        (&["--strategy", "classical-optimum"], 3),
        (&["--strategy", "classical-optimum"], 5),
    ];
    for (k, (strategy, d)) in cases.iter().enumerate() {
        let ds = d.to_string();
        let mut eval = vec!["evaluate", "--d", &ds];
        eval.extend_from_slice(strategy);
        let theory = structured(&eval);
        let quantum = theory["average"].as_f64().unwrap() > theory["classical_bound"].as_f64().unwrap() + 1e-9;

        let mut sim = vec!["--d", &ds, "--rounds", "100000", "--seed", "5"];
        sim.extend_from_slice(strategy);
        let path = simulate_to(&dir, &format!("{k}.jsonl"), &sim);
        let code = certify(&path, *d).status.code();
        assert_eq!(code, Some(if quantum { 0 } else { 3 }), "case {k}: {strategy:?} d = {d}");
    }
}

#[test]
fn ensemble_file() {
    let dir = TempDir::new().unwrap();
    let good = dir.path().join("trine.txt");
    let h = 3f64.sqrt() / 2.0;
    fs::write(&good, format!("# trine\n1 0 0 0\n0.5 0 {} 0\n\n0.5 0 {h} 0\n", -h)).unwrap();
    let v = structured(&["evaluate", "--d", "3", "--ensemble-file", good.to_str().unwrap()]);
    assert!((v["average"].as_f64().unwrap() - 0.933_012_701_892_219_3).abs() < 1e-12);

    let short = dir.path().join("short.txt");
    fs::write(&short, "1 0 0 0\n0 0 1\n").unwrap();
    let o = pairguess(&["evaluate", "--d", "3", "--ensemble-file", short.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let unnormalized = dir.path().join("norm.txt");
    fs::write(&unnormalized, "1 0 0 0\n1 0 1 0\n0 0 1 0\n").unwrap();
    let o = pairguess(&["evaluate", "--d", "3", "--ensemble-file", unnormalized.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let missing = dir.path().join("missing.txt");
    let o = pairguess(&["evaluate", "--d", "3", "--ensemble-file", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_arguments_fail() {
    let o = pairguess(&["evaluate", "--d", "4", "--strategy", "trine"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d = 3"));
    let o = pairguess(&["evaluate", "--d", "3", "--strategy", "nonsense"]);
    assert!(!o.status.success());
    let o = pairguess(&["certify", "--in", "/nonexistent/file", "--d", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pairguess(&["evaluate", "--d", "3", "--strategy", "trine", "--noise", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}
