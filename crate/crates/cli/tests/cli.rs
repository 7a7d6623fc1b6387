use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_defclust"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corpus() -> String {
    data("synthetic_corpus.jsonl").display().to_string()
}

fn gold() -> String {
    data("synthetic_gold.jsonl").display().to_string()
}

fn small_corpus(dir: &Path) -> String {
    let p = dir.join("small.jsonl");
    fs::write(
        &p,
        concat!(
            r#"{"id":"a","text":"gato negro pequeño","gold_sense":"x"}"#,
            "\n",
            r#"{"id":"b","text":"gato negro grande","gold_sense":"x"}"#,
            "\n",
            r#"{"id":"c","text":"perro blanco","gold_sense":"y"}"#,
            "\n",
            r#"{"id":"d","text":"perro blanco viejo","gold_sense":"y"}"#,
            "\n",
        ),
    )
    .unwrap();
    p.display().to_string()
}

#[test]
fn sweep_writes_one_row_per_threshold() {
    let o = run(&["sweep", "--distance", "energy", &corpus(), &gold()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "alpha,num_groups,precision,recall,zone");
    assert_eq!(lines.len(), 101);
    assert!(lines[1].starts_with("0.01,"));
    assert!(lines[100].starts_with("1.00,1,"));
    assert!(lines[100].ends_with(",absolute"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("zone1"));
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let a = run(&["sweep", "--quiet", &corpus(), &gold()]);
    let b = run(&["sweep", "--quiet", &corpus(), &gold()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stderr.is_empty());
}

#[test]
fn hamming_shares_the_sweep_schema() {
    let e = run(&["sweep", "--quiet", &corpus(), &gold()]);
    let h = run(&["sweep", "--quiet", "--distance", "hamming", &corpus(), &gold()]);
    assert!(h.status.success());
    let (e, h) = (stdout(&e), stdout(&h));
    assert_eq!(e.lines().next(), h.lines().next());
    assert_eq!(e.lines().count(), h.lines().count());
    let alphas = |s: &str| -> Vec<String> {
        s.lines().skip(1).map(|l| l.split(',').next().unwrap().to_string()).collect()
    };
    assert_eq!(alphas(&e), alphas(&h));
}

#[test]
fn sweep_falls_back_to_corpus_gold() {
    let with = run(&["sweep", "--quiet", &corpus(), &gold()]);
    let without = run(&["sweep", "--quiet", &corpus()]);
    assert!(without.status.success());
    assert_eq!(with.stdout, without.stdout);
}

#[test]
fn custom_grid() {
    let o = run(&["sweep", "--quiet", "--grid", "0.5:0.6:0.05", &corpus()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let alphas: Vec<&str> = out.lines().skip(1).map(|l| &l[..4]).collect();
    assert_eq!(alphas, ["0.50", "0.55", "0.60"]);
}

#[test]
fn cluster_at_one_puts_everything_in_one_group() {
    let o = run(&["cluster", "--alpha", "1.0", &corpus()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let groups = v["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0].as_array().unwrap().len(), 120);
    assert!(v["ungrouped"].as_array().unwrap().is_empty());
}

#[test]
fn small_corpus_splits_in_two() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_corpus(dir.path());
    let o = run(&["cluster", "--alpha", "0.9", &c]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["groups"], serde_json::json!([["a", "b"], ["c", "d"]]));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["cluster", &corpus()]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--alpha", "0.5", &corpus()]).status.code(), Some(1));
    assert_eq!(run(&["cluster", "--alpha", "1.5", &corpus()]).status.code(), Some(1));
    assert_eq!(run(&["cluster", "--alpha", "0.5", "--min-size", "0", &corpus()]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--grid", "0.9:0.1:0.1", &corpus()]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_two() {
    let o = run(&["cluster", "--alpha", "0.5", "/nonexistent/corpus.jsonl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonexistent"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"id\":\"a\",\"text\":\"x\"}\nnot json\n").unwrap();
    let o = run(&["cluster", "--alpha", "0.5", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let dup = dir.path().join("dup.jsonl");
    fs::write(&dup, "{\"id\":\"a\",\"text\":\"x y\"}\n{\"id\":\"a\",\"text\":\"y z\"}\n").unwrap();
    assert_eq!(run(&["cluster", "--alpha", "0.5", dup.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn cluster_writes_files_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_corpus(dir.path());
    let out = dir.path().join("groups.json");
    let den = dir.path().join("tree.csv");
    let dist = dir.path().join("dist.csv");
    let energy = dir.path().join("energy.csv");
    let o = run(&[
        "cluster",
        "--alpha",
        "0.9",
        &c,
        "-o",
        out.to_str().unwrap(),
        "--dendrogram",
        den.to_str().unwrap(),
        "--dump-distances",
        dist.to_str().unwrap(),
        "--dump-energy",
        energy.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());

    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["alpha"], 0.9);

    let den = fs::read_to_string(den).unwrap();
    assert_eq!(den.lines().next(), Some("left_id,right_id,distance,new_id"));
    assert_eq!(den.lines().count(), 4);

    let dist = fs::read_to_string(dist).unwrap();
    assert_eq!(dist.lines().next(), Some("id_i,id_j,distance"));
    assert_eq!(dist.lines().count(), 7);
    assert!(dist.lines().any(|l| l.starts_with("a,b,")));

    let energy = fs::read_to_string(energy).unwrap();
    assert_eq!(energy.lines().next(), Some("id,a,b,c,d"));
    assert_eq!(energy.lines().count(), 5);
}

#[test]
fn eval_scores_a_clustering() {
    let dir = tempfile::tempdir().unwrap();
    let clustering = dir.path().join("c.json");
    fs::write(&clustering, r#"{"alpha":0.4,"groups":[["a","b","c"]],"ungrouped":["d"]}"#).unwrap();
    let gold = dir.path().join("g.jsonl");
    fs::write(
        &gold,
        "{\"id\":\"a\",\"sense\":\"x\"}\n{\"id\":\"b\",\"sense\":\"x\"}\n{\"id\":\"c\",\"sense\":\"y\"}\n{\"id\":\"d\",\"sense\":\"y\"}\n",
    )
    .unwrap();
    let o = run(&["eval", clustering.to_str().unwrap(), gold.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["num_groups"], 1);
    assert_eq!(v["recall"], 0.75);
    assert!((v["precision"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["zone"], "zone1");
    assert_eq!(v["intruders"], serde_json::json!(["c"]));
}

#[test]
fn report_lists_groups() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_corpus(dir.path());
    let o = run(&["report", "--alpha", "0.9", &c]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("2 groups"));
    assert!(out.contains("sense: x"));
    assert!(out.contains("gato negro grande"));
}

#[test]
fn extract_candidates_and_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("doc.txt");
    fs::write(
        &text,
        "Introducción.  La  Fobia es un miedo intenso a algo.\nAdemás la fobia permite evitar situaciones; otra cosa.\nLa fobia es un",
    )
    .unwrap();
    let t = text.to_str().unwrap();

    let o = run(&["extract", "--term", "fobia", t]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cands: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(cands.len(), 3);
    assert_eq!(cands[0]["source_id"], "doc.txt");
    assert_eq!(cands[0]["def_type"], "analytic");
    assert_eq!(cands[0]["tail"], "miedo intenso a algo");
    assert_eq!(cands[1]["def_type"], "functional");
    assert_eq!(cands[1]["tail"], "evitar situaciones");

    let o = run(&["extract", "--as-corpus", "--term", "fobia", t]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 candidates"));
    let docs: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(docs.len(), 2);
    assert_eq!(docs[0]["id"], "doc.txt#1");
    assert_eq!(docs[1]["id"], "doc.txt#2");
    assert_eq!(docs[0]["term"], "fobia");

    assert_eq!(run(&["extract", t]).status.code(), Some(1));
}

#[test]
fn plain_lines_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("defs.txt");
    fs::write(&p, "gato negro\ngato negro grande\n\nperro blanco\n").unwrap();
    let o = run(&["cluster", "--alpha", "0.5", "--format", "plain_lines", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["groups"], serde_json::json!([["1", "2"]]));
    assert_eq!(v["ungrouped"], serde_json::json!(["4"]));
}
