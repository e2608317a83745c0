use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mincouple"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Value of a `key<TAB>value` line.
fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('\t')))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

const GOLDEN: &str = r#"{"distributions": [[0.5, 0.5], [0.75, 0.25]]}"#;

#[test]
fn glb_reports_bound_and_entropy() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", GOLDEN);
    let o = run(&["glb", s(&input)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(field(&text, "glb"), "[0.50000000000000000, 0.50000000000000000]");
    assert_eq!(field(&text, "entropy"), "1.0000000000000000");
    assert_eq!(text.matches("yes").count(), 2);
}

#[test]
fn glb_of_single_distribution_is_sorted_input() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", r#"{"distributions": [[0.25, 0.75]]}"#);
    let text = stdout(&run(&["glb", s(&input)]));
    assert_eq!(field(&text, "glb"), "[0.75000000000000000, 0.25000000000000000]");
}

#[test]
fn malformed_row_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", r#"{"distributions": [[0.5, 0.5], [0.5, 0.4]]}"#);
    let o = run(&["glb", s(&input)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("distribution 1"), "{}", stderr(&o));

    let input = write(&dir, "neg.json", r#"{"distributions": [[1.5, -0.5]]}"#);
    let o = run(&["couple", s(&input)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("index 1"), "{}", stderr(&o));

    let input = write(&dir, "junk.json", "not json");
    assert_eq!(run(&["glb", s(&input)]).status.code(), Some(2));
    assert_eq!(run(&["glb", "/no/such/file"]).status.code(), Some(2));
}

#[test]
fn couple_golden_then_verify() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", GOLDEN);
    let out = dir.path().join("c.json");
    let o = run(&["couple", s(&input), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = stdout(&o);
    assert_eq!(field(&summary, "gap"), "0.50000000000000000");
    assert_eq!(field(&summary, "bound"), "1.0000000000000000");
    assert_eq!(field(&summary, "support"), "3");

    let file: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file["q"], serde_json::json!([0.5, 0.25, 0.25]));
    assert_eq!(file["maps"], serde_json::json!([[0, 1, 1], [0, 0, 1]]));
    assert_eq!(file["m"], 2);

    let o = run(&["verify", s(&out), s(&input)]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(field(&stdout(&o), "result"), "ok");
}

#[test]
fn couple_without_out_writes_artifact_to_stdout() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", r#"{"distributions": [[0.2, 0.8]]}"#);
    let o = run(&["couple", s(&input)]);
    assert!(o.status.success());
    let file: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // one distribution: the coupling is the sorted pmf with the sort permutation as map
    assert_eq!(file["q"], serde_json::json!([0.8, 0.2]));
    assert_eq!(file["maps"], serde_json::json!([[1, 0]]));
    assert!(stderr(&o).contains("support\t2"));
}

#[test]
fn truncated_summary_reports_bound() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "in.json",
        r#"{"distributions": [[0.1, 0.2, 0.3, 0.4], [0.4, 0.3, 0.2, 0.1], [0.05, 0.05, 0.6, 0.3]]}"#,
    );
    let out = dir.path().join("c.json");
    let o = run(&["couple", s(&input), "--trunc", "10", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let bound: f64 = field(&stdout(&o), "tv_bound").parse().unwrap();
    assert_eq!(bound, (-10f64).exp2());
    assert!(run(&["verify", s(&out), s(&input)]).status.success());

    let o = run(&["couple", s(&input), "--eps", "1e-3", "--out", s(&out)]);
    let bound: f64 = field(&stdout(&o), "tv_bound").parse().unwrap();
    assert_eq!(bound, 1e-3);
}

#[test]
fn round_trip_on_many_inputs() {
    let dir = TempDir::new().unwrap();
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for k in 0..20 {
        let m = 1 + k % 5;
        let n = 2 + (k * 7) % 9;
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let w: Vec<f64> = (0..n).map(|_| next()).collect();
                let t: f64 = w.iter().sum();
                w.iter().map(|x| x / t).collect()
            })
            .collect();
        let body = serde_json::json!({ "distributions": rows }).to_string();
        let input = write(&dir, "in.json", &body);
        let out = dir.path().join("c.json");
        assert!(run(&["couple", s(&input), "--out", s(&out)]).status.success());
        let o = run(&["verify", s(&out), s(&input), "--alpha", "inf"]);
        assert!(o.status.success(), "instance {k}: {}", stdout(&o));
    }
}

#[test]
fn corrupted_map_fails_verification() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", GOLDEN);
    let bad = write(
        &dir,
        "c.json",
        r#"{"tool": "mincouple", "version": "0.1.0", "m": 2, "n": 2,
            "q": [0.5, 0.25, 0.25], "maps": [[0, 1, 0], [0, 0, 1]],
            "provenance": [[0, 0], [1, 0], [1, 1]], "truncation": null}"#,
    );
    let o = run(&["verify", s(&bad), s(&input)]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL\tmarginal\tdistribution 0"), "{text}");
}

#[test]
fn mismatched_m_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", GOLDEN);
    let out = dir.path().join("c.json");
    assert!(run(&["couple", s(&input), "--out", s(&out)]).status.success());
    let three = write(
        &dir,
        "three.json",
        r#"{"distributions": [[0.5, 0.5], [0.75, 0.25], [1.0, 0.0]]}"#,
    );
    let o = run(&["verify", s(&out), s(&three)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2 maps"), "{}", stderr(&o));
}

#[test]
fn sampling_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", GOLDEN);
    let out = dir.path().join("c.json");
    assert!(run(&["couple", s(&input), "--out", s(&out)]).status.success());

    let a = run(&["sample", s(&out), "--seed", "42", "--count", "1000"]);
    let b = run(&["sample", s(&out), "--seed", "42", "--count", "1000"]);
    let c = run(&["sample", s(&out), "--seed", "43", "--count", "1000"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().count(), 1000);
    for line in stdout(&a).lines() {
        let cols: Vec<usize> = line.split('\t').map(|x| x.parse().unwrap()).collect();
        let expected = [[0, 0, 0], [1, 1, 0], [2, 1, 1]];
        assert_eq!(cols, expected[cols[0]].to_vec());
    }

    let empty = run(&["sample", s(&out), "--count", "0"]);
    assert!(empty.status.success());
    assert!(empty.stdout.is_empty());

    let labels = run(&["sample", s(&out), "--seed", "42", "--count", "3", "--layout", "labels"]);
    assert!(stdout(&labels).lines().all(|l| l.split('\t').count() == 2));
}

#[test]
fn million_draws_match_marginals() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", GOLDEN);
    let out = dir.path().join("c.json");
    assert!(run(&["couple", s(&input), "--out", s(&out)]).status.success());
    let o = run(&["sample", s(&out), "--seed", "7", "--count", "1000000"]);
    let mut counts = [[0usize; 2]; 2];
    for line in stdout(&o).lines() {
        let cols: Vec<usize> = line.split('\t').map(|x| x.parse().unwrap()).collect();
        counts[0][cols[1]] += 1;
        counts[1][cols[2]] += 1;
    }
    for (c, p) in counts.iter().zip([[0.5, 0.5], [0.75, 0.25]]) {
        let tv = 0.5
            * c.iter()
                .zip(p)
                .map(|(&k, q)| (k as f64 / 1e6 - q).abs())
                .sum::<f64>();
        assert!(tv < 0.005, "TV {tv}");
    }
}

#[test]
fn causal_reports_direction() {
    let dir = TempDir::new().unwrap();
    let indep = write(&dir, "i.json", r#"{"joint": [[0.15, 0.075, 0.075], [0.35, 0.175, 0.175]]}"#);
    let o = run(&["causal", s(&indep)]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "direction"), "tie");

    let det = write(&dir, "d.json", r#"{"joint": [[0.2, 0.0], [0.3, 0.0], [0.0, 0.5]]}"#);
    let text = stdout(&run(&["causal", s(&det)]));
    assert_eq!(field(&text, "direction"), "X->Y");
    assert_eq!(field(&text, "H(glb Y|X)"), "0.0000000000000000");

    let zero = write(&dir, "z.json", r#"{"joint": [[0.5, 0.0], [0.5, 0.0]]}"#);
    let o = run(&["causal", s(&zero)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("column 1"));
}
