//! End-to-end runs of the `fidelis` binary.

use std::path::Path;
use std::process::{Command, Output};

fn fidelis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fidelis"))
        .args(args)
        .env_remove("FIDELIS_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fidelis(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    fidelis(args).status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn report_values(dir: &Path) -> (f64, f64, f64) {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    let g = |k: &str| v[k].as_f64().unwrap();
    (g("fid_plus"), g("fid_minus"), g("fid_delta"))
}

fn ba(dir: &Path, count: usize) -> std::path::PathBuf {
    let path = dir.join("ba.jsonl");
    ok(&["generate", "ba2motifs", "--count", &count.to_string(), "--seed", "7", "--out", p(&path)]);
    path
}

#[test]
fn generate_is_deterministic_and_sized() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a.jsonl"), t.path().join("b.jsonl"));
    let msg = ok(&["generate", "ba2motifs", "--count", "1000", "--seed", "7", "--out", p(&a)]);
    assert!(msg.contains("1000 graphs"), "{msg}");
    ok(&["generate", "ba2motifs", "--count", "1000", "--seed", "7", "--out", p(&b)]);
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    // One metadata header plus one record per graph.
    assert_eq!(text.iter().filter(|&&c| c == b'\n').count(), 1001);
    assert!(t.path().join("a.jsonl.manifest.json").exists());

    let msg = ok(&["generate", "tree-cycles", "--motifs", "80", "--out", p(&t.path().join("tc.jsonl"))]);
    assert!(msg.contains("80 motifs"), "{msg}");
}

#[test]
fn seed_comes_from_the_environment() {
    let t = tempfile::tempdir().unwrap();
    let run = |seed: Option<&str>, name: &str| {
        let path = t.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fidelis"));
        cmd.args(["generate", "ba2motifs", "--count", "4", "--out", p(&path)]);
        match seed {
            Some(s) => cmd.env("FIDELIS_SEED", s),
            None => cmd.env_remove("FIDELIS_SEED"),
        };
        assert!(cmd.output().unwrap().status.success());
        std::fs::read(path).unwrap()
    };
    let explicit = {
        let path = t.path().join("x.jsonl");
        ok(&["generate", "ba2motifs", "--count", "4", "--seed", "9", "--out", p(&path)]);
        std::fs::read(path).unwrap()
    };
    assert_eq!(run(Some("9"), "env.jsonl"), explicit);
    assert_ne!(run(None, "zero.jsonl"), explicit);
}

#[test]
fn usage_errors_exit_2() {
    let t = tempfile::tempdir().unwrap();
    let out = p(t.path());
    assert_eq!(code(&["generate", "nope", "--out", out]), 2);
    assert_eq!(code(&["generate", "ba2motifs", "--motifs", "3", "--out", out]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    let data = ba(t.path(), 4);
    let d = p(&data);
    assert_eq!(code(&["fidelity", "--data", d, "--alpha1", "1.5", "--out", out]), 2);
    assert_eq!(code(&["fidelity", "--data", d, "--classifier", "gcn", "--out", out]), 2);
    assert_eq!(code(&["sweep", "--data", d, "--betas", "0.5", "--out", out]), 2);
    assert_eq!(code(&["--workers", "0", "theory", "bounds"]), 2);
}

#[test]
fn fidelity_error_codes_are_distinct() {
    let t = tempfile::tempdir().unwrap();
    let out = p(t.path());
    let data = ba(t.path(), 4);
    let d = p(&data);

    let garbage = t.path().join("garbage.jsonl");
    std::fs::write(&garbage, "{\"num_nodes\": 3, \"edges\": [[0, 9]]}\n").unwrap();
    assert_eq!(code(&["fidelity", "--data", p(&garbage), "--out", out]), 3);
    assert_eq!(code(&["fidelity", "--data", p(&t.path().join("missing.jsonl")), "--out", out]), 3);

    assert_eq!(code(&["fidelity", "--data", d, "--classifier", "bridge:cmd=true", "--out", out]), 4);

    // Vertex 24 exists, but graph 0 has no edge 0-24.
    let unbound = t.path().join("unbound.jsonl");
    std::fs::write(&unbound, "{\"graph_index\": 0, \"edges\": [[0, 24]]}\n").unwrap();
    let o = fidelis(&["fidelity", "--data", d, "--explanations", p(&unbound), "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("without an explanation line"));

    assert_eq!(code(&["fidelity", "--data", d, "--estimator", "exact", "--cap", "2", "--out", out]), 5);
    assert_eq!(code(&["theory", "bounds", "--eps-star", "0.9", "--kappa", "0.9", "--delta", "0.9"]), 5);
}

#[test]
fn fidelity_reports_and_classical_reduction() {
    let t = tempfile::tempdir().unwrap();
    let data = ba(t.path(), 20);
    let d = p(&data);

    let dir = t.path().join("const");
    ok(&["fidelity", "--data", d, "--classifier", "builtin:constant:0.3,0.7", "--out", p(&dir)]);
    assert_eq!(report_values(&dir), (0.0, 0.0, 0.0));
    let csv = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    assert!(csv.starts_with("estimator,alpha1,alpha2,samples,num_graphs,fid_plus,fid_minus,fid_delta\n"));
    assert!(csv.contains("sampled,0.1,0.9,50,20,"), "{csv}");

    let (orig, samp) = (t.path().join("orig"), t.path().join("samp"));
    ok(&["fidelity", "--data", d, "--estimator", "original", "--out", p(&orig)]);
    ok(&["fidelity", "--data", d, "--alpha1", "1", "--alpha2", "0", "--mode", "ratio", "--out", p(&samp)]);
    assert_eq!(report_values(&orig), report_values(&samp));

    // Ground truth given explicitly matches the default.
    let expl = t.path().join("gt.jsonl");
    let lines: String = std::fs::read_to_string(&data)
        .unwrap()
        .lines()
        .skip(1)
        .enumerate()
        .map(|(i, l)| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            format!("{}\n", serde_json::json!({"graph_index": i, "edges": v["gt_explanation"]}))
        })
        .collect();
    std::fs::write(&expl, lines).unwrap();
    let given = t.path().join("given");
    ok(&["fidelity", "--data", d, "--explanations", p(&expl), "--estimator", "original", "--out", p(&given)]);
    assert_eq!(report_values(&orig), report_values(&given));
}

#[test]
fn sweep_writes_grids_and_summary() {
    let t = tempfile::tempdir().unwrap();
    let data = ba(t.path(), 6);
    let out = t.path().join("sweep");
    ok(&["sweep", "--data", p(&data), "--candidates", "1", "--samples", "2", "--seed", "3", "--out", p(&out)]);
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    let header = summary.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 1 + 7);
    assert!(summary.lines().nth(1).unwrap().starts_with("average,"));
    let grid = std::fs::read_to_string(out.join("heatmap_fid_alpha_delta.csv")).unwrap();
    let rows: Vec<&str> = grid.lines().collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.split(',').count() == 7));

    let again = t.path().join("again");
    ok(&["sweep", "--data", p(&data), "--candidates", "1", "--samples", "2", "--seed", "3", "--out", p(&again)]);
    assert_eq!(summary, std::fs::read_to_string(again.join("summary.csv")).unwrap());
}

#[test]
fn theory_commands_print_verdicts() {
    let s = ok(&["theory", "bounds", "--erf", "0.5"]);
    assert!(s.contains("e_rf(0.5),0.6931471805599453"), "{s}");
    let s = ok(&["theory", "prop3", "--n", "4"]);
    assert!(s.lines().last().unwrap().starts_with("PASS"), "{s}");
    assert_eq!(s.lines().count(), 1 + 6 + 1);
    let s = ok(&["theory", "prop4", "--trials", "200", "--p-grid", "0,1"]);
    assert!(s.starts_with("p,fid_plus,fid_minus,fid_delta,std_err,isotonic\n"));
}

#[test]
fn replay_reproduces_outputs() {
    let t = tempfile::tempdir().unwrap();
    let data = ba(t.path(), 6);
    let first = t.path().join("first");
    ok(&["fidelity", "--data", p(&data), "--samples", "5", "--seed", "11", "--out", p(&first)]);
    let second = t.path().join("second");
    ok(&["replay", p(&first.join("manifest.json")), "--out", p(&second)]);
    for f in ["report.json", "report.csv", "manifest.json"] {
        assert_eq!(std::fs::read(first.join(f)).unwrap(), std::fs::read(second.join(f)).unwrap(), "{f}");
    }
}
