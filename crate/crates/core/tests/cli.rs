use alcove_sheaves::cli::{parse_bounds, parse_word};
use alcove_sheaves::sheaf::{ambient_for, bm_build, RingMode};
use alcove_sheaves::translation::{star, support_window, working_windows};
use alcove_sheaves::{MomentGraph, RootDatum};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

struct Out {
    stdout: String,
    stderr: String,
    code: i32,
}

fn alcove(args: &[&str]) -> Out {
    let o = Command::new(env!("CARGO_BIN_EXE_alcove")).args(args).env_remove("ALCOVE_CACHE_DIR").output().unwrap();
    Out { stdout: String::from_utf8(o.stdout).unwrap(), stderr: String::from_utf8(o.stderr).unwrap(), code: o.status.code().unwrap() }
}

/// Compare with `tests/golden/<name>.txt`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str]) -> String {
    let out = alcove(args);
    assert_eq!(out.code, 0, "{name}: {}", out.stderr);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(out.stdout, want, "{name} differs from its golden file");
    out.stdout
}

fn word_len(w: &str) -> i32 {
    if w == "e" { 0 } else { w.matches('s').count() as i32 }
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split('\t').map(String::from).collect()).collect()
}

fn v_pow(n: i32) -> String {
    match n {
        0 => "1".into(),
        1 => "v".into(),
        _ => format!("v^{n}"),
    }
}

#[test]
fn kl_a1_table_is_v_to_the_length_difference() {
    let text = golden("kl_a1", &["kl", "--top", "s0s1s0s1s0s1"]);
    let rows = rows(&text);
    // every y ≤ x occurs, with h_{y,x} = v^{ℓ(x)−ℓ(y)}
    for r in &rows {
        assert_eq!(r[2], v_pow(word_len(&r[1]) - word_len(&r[0])), "{r:?}");
    }
    // below x of length n ≥ 1 there are 2n elements
    let tops: Vec<&String> = rows.iter().map(|r| &r[1]).collect();
    for t in ["s0s1s0s1s0s1", "s1s0s1", "s0"] {
        assert_eq!(tops.iter().filter(|x| **x == t).count() as i32, 2 * word_len(t), "{t}");
    }
}

#[test]
fn kl_of_identity_has_one_row() {
    let text = golden("kl_e", &["kl", "--top", "e"]);
    assert_eq!(rows(&text), vec![vec!["e", "e", "1"]]);
}

#[test]
fn antispherical_a1_only_adjacent_entries() {
    let text = golden("kl_antispherical_a1", &["kl", "--top", "s0s1s0s1s0", "--flavor", "antispherical"]);
    for r in rows(&text) {
        let d = word_len(&r[1]) - word_len(&r[0]);
        assert!(d <= 1);
        assert_eq!(r[2], v_pow(d));
    }
}

#[test]
fn bm_reports() {
    let t = golden("bm_a1_s", &["bm", "--top", "s1", "--vertex", "s1"]);
    assert!(t.contains("KL ok") && !t.contains("FAIL"));
    let t = golden("bm_skyscraper", &["bm", "--top", "s0s1", "--vertex", "s0", "--skyscraper"]);
    assert_eq!(t.lines().filter(|l| l.starts_with("s0 ")).count(), 1);
    let t = golden("bm_a2_len4", &["--type", "A2", "bm", "--top", "s0s1s2s0", "--vertex", "s0s1s2s0"]);
    assert!(t.contains("KL ok") && !t.contains("FAIL"));
}

#[test]
fn act_reports() {
    let t = golden("act_empty", &["act", "--sheaf", "e", "--word", "e", "--window", "minus:0..plus:1"]);
    let (before, after) = t.split_once("after\n").unwrap();
    let before = before.split_once("before\n").unwrap().1;
    assert!(after.starts_with(before));
    let t = golden("act_theta_b_e", &["act", "--sheaf", "e", "--word", "s1", "--window", "minus:0..plus:0"]);
    assert!(t.contains("ch law ok") && !t.contains("FAIL"));
    let t = golden("act_theta_up", &["act", "--sheaf", "e", "--word", "s0", "--window", "e..e"]);
    assert!(t.contains("decomposition B((1,2))(1)\n"), "{t}");
    let after = t.split_once("after\n").unwrap().1;
    let stalks: Vec<&str> = after.lines().skip(1).take(2).map(|l| l.split_whitespace().nth(2).unwrap()).collect();
    assert_eq!(stalks, ["v", "v"]);
    let t = golden("act_two_letters_a2", &["--type", "A2", "act", "--sheaf", "s0s1", "--word", "s2s0"]);
    assert!(!t.contains("FAIL"));
}

#[test]
fn two_letters_agree_with_one_at_a_time() {
    let rd = Arc::new(RootDatum::from_label("A2").unwrap());
    let (lo, hi) = parse_bounds(&rd, "e..plus:1,1").unwrap();
    let x = rd.alcove(&rd.from_word(&[0, 1]).unwrap());
    let word = parse_word("s2s0").unwrap();
    let target: Vec<_> = support_window(&rd, lo, hi, x, &word).unwrap().iter().map(|a| a.coord()).collect();
    let small = MomentGraph::alcove_window(rd.clone(), &target.iter().map(|c| rd.alcove(c)).collect::<Vec<_>>()).unwrap();
    let wins = working_windows(&small, &target, &word).unwrap();
    let g = Arc::new(MomentGraph::alcove_window(rd.clone(), &wins[0].iter().map(|c| rd.alcove(c)).collect::<Vec<_>>()).unwrap());
    let f = bm_build(g.clone(), ambient_for(&g, RingMode::Labels).unwrap(), g.find_alcove(x).unwrap()).unwrap();
    let both = star(&f, &word, &target).unwrap();
    let first = star(&f, &word[..1], &wins[1]).unwrap();
    let second = star(&first, &word[1..], &target).unwrap();
    assert_eq!(both.summary().unwrap(), second.summary().unwrap());
    assert!(both.verify_axioms().unwrap().all_ok());
}

#[test]
fn ch_reports() {
    let t = golden("ch_skyscraper", &["ch", "--sheaf", "sky:s0"]);
    // v^{-ℓ(A)} A with ℓ = 1
    assert!(t.contains("ch = (v^-1)(1,2)"), "{t}");
    let t = golden("ch_check", &["--type", "A2", "ch", "--sheaf", "e", "--check", "0"]);
    assert!(t.contains("ch law ok"));
}

#[test]
fn export_dot_of_an_interval() {
    let t = golden("export_dot", &["export", "dot", "--top", "s0s1"]);
    assert!(t.starts_with("graph moment {"));
    assert_eq!(t.matches(" -- ").count(), 4);
}

#[test]
fn json_carries_normalizations() {
    let out = alcove(&["--format", "json", "bm", "--top", "s0s1", "--vertex", "s0s1"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["meta"]["type"], "A1");
    assert!(v["meta"]["form_normalization"].is_string());
    assert!(v["meta"]["length_normalization"].is_string());
    assert_eq!(v["result"]["kl_ok"], true);
}

#[test]
fn identical_runs_give_identical_bytes() {
    let args = ["--type", "A2", "--seed", "7", "check", "--instances", "4"];
    let a = alcove(&args);
    let b = alcove(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, alcove(&["--type", "A2", "--seed", "8", "check", "--instances", "4"]).stdout);
}

#[test]
fn resource_errors_exit_nonzero_without_output() {
    let out = alcove(&["kl", "--top", "s0s1s0s1s0s1s0s1s0s1s0s1"]);
    assert_eq!(out.code, 3);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.starts_with("error[budget]"), "{}", out.stderr);
}

#[test]
fn bad_config_is_rejected() {
    let dir = std::env::temp_dir().join(format!("alcove-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("cfg.json");
    std::fs::write(&p, r#"{"type":"A1","budget":5,"extra":true}"#).unwrap();
    let out = alcove(&["--config", p.to_str().unwrap(), "kl", "--top", "e"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.starts_with("error[invalid]"));
    std::fs::write(&p, r#"{"type":"A1","budget":2}"#).unwrap();
    let out = alcove(&["--config", p.to_str().unwrap(), "kl", "--top", "s0s1s0"]);
    assert_eq!(out.code, 3);
}

#[test]
fn cache_dir_reuses_output() {
    let dir = std::env::temp_dir().join(format!("alcove-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = || Command::new(env!("CARGO_BIN_EXE_alcove")).args(["kl", "--top", "s0s1"]).env("ALCOVE_CACHE_DIR", &dir).output().unwrap();
    let a = run();
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    assert_eq!(a.stdout, run().stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
