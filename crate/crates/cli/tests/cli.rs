use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }
}

fn phylo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phylo")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

const FLIP: &str = r#"{"states":["0","1"],"rows":[[-1,1],[1,-1]]}"#;
const UNIFORM2: &str = r#"{"states":["0","1"],"p":[0.5,0.5]}"#;

#[test]
fn canon_is_order_independent() {
    let s = Sandbox::new();
    let a = s.file("a.nwk", "((3:0,1:0):1.4,(4:0,5:0,2:0):1.3):0;");
    let b = s.file("b.nwk", "((2:0,5:0,4:0):1.3,(1:0,3:0):1.4);");
    let (oa, ob) = (phylo(&["canon", &a]), phylo(&["canon", &b]));
    assert!(oa.status.success());
    assert_eq!(stdout(&oa), stdout(&ob));
    let v = phylo(&["validate", &a]);
    assert_eq!(json(&v)["leaves"], 5);
}

#[test]
fn invalid_input_exits_one() {
    let s = Sandbox::new();
    for text in ["(1:0,1:0):0;", "(1:0):0;", "(1:0,2:-1):0;", "(1:0,2:0"] {
        let f = s.file("bad.nwk", text);
        let o = phylo(&["canon", &f]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert!(o.stdout.is_empty());
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
    assert_eq!(phylo(&["canon", "/nonexistent/t.nwk"]).status.code(), Some(1));
    let bad = s.file("h.json", r#"{"states":["0","1"],"rows":[[-1,2],[1,-1]]}"#);
    assert_eq!(phylo(&["limit", "--model", &bad]).status.code(), Some(1));
}

#[test]
fn compose_and_act() {
    let s = Sandbox::new();
    let a = s.file("a.nwk", "(1:0.5,2:0.25):0;");
    let b = s.file("b.nwk", "(1:0,2:0):0.5;");
    let o = phylo(&["compose", "--at", "1", &a, &b]);
    assert_eq!(stdout(&o), "((1:0,2:0):1,3:0.25):0;");
    let t = s.file("t.nwk", "((1:0,2:0):1,3:0):0;");
    let o = phylo(&["act", "--perm", "2,3,1", &t]);
    assert_eq!(stdout(&o), "(2:0,(1:0,3:0):1):0;");
    assert_eq!(phylo(&["act", "--perm", "1,1,2", &t]).status.code(), Some(1));
    assert_eq!(phylo(&["compose", "--at", "3", &a, &b]).status.code(), Some(1));
}

#[test]
fn decompose_recompose_round_trip() {
    let s = Sandbox::new();
    let t = s.file("t.nwk", "((1:0.5,2:0):1.25,3:2):0.75;");
    let d = phylo(&["decompose", &t]);
    let v = json(&d);
    assert_eq!(v["external"], serde_json::json!([0.75, 0.5, 0.0, 2.0]));
    let j = s.file("d.json", &stdout(&d));
    let back = phylo(&["recompose", &j]);
    assert_eq!(stdout(&back), stdout(&phylo(&["canon", &t])));
}

#[test]
fn reduce_to_normal_form() {
    let s = Sandbox::new();
    let m = s.file(
        "m.json",
        r#"{"com":[{"len":{"length":0.5,"child":{"len":{"length":0.25,"child":{"leaf":1}}}}},{"com":[{"leaf":2},{"leaf":3}]}]}"#,
    );
    let a = json(&phylo(&["reduce", &m]));
    let b = json(&phylo(&["reduce", "--seed", "7", &m]));
    assert_eq!(a["normal_form"], b["normal_form"]);
    assert_eq!(a["newick"], "(2:0,3:0,1:0.75):0;");
    assert!(a["moves"].as_u64().unwrap() >= 2);
}

#[test]
fn topologies_and_distance() {
    let v = json(&phylo(&["topologies", "--n", "4"]));
    assert_eq!(v["count"], 15);
    assert_eq!(v["faces_by_dimension"], serde_json::json!([1, 10, 15]));
    let s = Sandbox::new();
    let x = s.file("x.nwk", "((1:0,2:0):1,3:0,4:0):0;");
    let y = s.file("y.nwk", "((1:0,3:0):2,2:0,4:0):0;");
    for mode in ["exact4", "cone", "auto"] {
        assert_eq!(json(&phylo(&["dist", "--mode", mode, &x, &y]))["distance"], 3.0);
    }
}

#[test]
fn markov_commands() {
    let s = Sandbox::new();
    let jc = phylo(&["jc", "--mu", "1.0", "--k", "4"]);
    let h = s.file("jc.json", &stdout(&jc));
    let lim = json(&phylo(&["limit", "--model", &h]));
    for row in lim["rows"].as_array().unwrap() {
        for x in row.as_array().unwrap() {
            assert!((x.as_f64().unwrap() - 0.25).abs() < 1e-8);
        }
    }
    let model = s.file("flip.json", FLIP);
    let root = s.file("f.json", UNIFORM2);
    let t = s.file("t.nwk", "(1:1,2:0.5):0.2;");
    let e = json(&phylo(&["evaluate", "--model", &model, "--root", &root, &t]));
    let sum: f64 = e["data"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((sum - 1.0).abs() < 1e-12);
    let sim = |seed: &str| phylo(&["simulate", "--model", &model, "--root", &root, "--seed", seed, "--samples", "500", &t]);
    assert_eq!(stdout(&sim("3")), stdout(&sim("3")));
    let total: u64 = json(&sim("3"))["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["count"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 500);
}

#[test]
fn extended_trees() {
    let s = Sandbox::new();
    let w = s.file("w.nwk", "((1:inf,2:inf):0.5,3:inf):inf;");
    assert_eq!(json(&phylo(&["wcheck", &w]))["w_member"], true);
    let nw = s.file("nw.nwk", "(1:inf,2:1):inf;");
    assert_eq!(json(&phylo(&["wcheck", &nw]))["w_member"], false);
    assert_eq!(phylo(&["canon", &w]).status.code(), Some(1));

    let model = s.file("flip.json", FLIP);
    let root = s.file("f.json", r#"{"states":["0","1"],"p":[0.9,0.1]}"#);
    let e = json(&phylo(&["evaluate", "--model", &model, "--root", &root, "--extended", &w]));
    for x in e["data"].as_array().unwrap() {
        assert!((x.as_f64().unwrap() - 0.125).abs() < 1e-8);
    }
}

#[test]
fn reporting_tolerance_is_configurable() {
    let s = Sandbox::new();
    let model = s.file("flip.json", FLIP);
    let o = Command::new(env!("CARGO_BIN_EXE_phylo"))
        .args(["limit", "--model", &model])
        .env("PHYLO_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_phylo"))
        .args(["limit", "--model", &model])
        .env("PHYLO_TOL", "1e-6")
        .output()
        .unwrap();
    assert!(o.status.success());
}
