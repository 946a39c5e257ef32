use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pp")).args(args).env_remove("PP_NODE_BUDGET").output().expect("run pp")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SIGNED: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/signed_numbers.json");

#[test]
fn build_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("tower.json");
    assert_eq!(code(&pp(&["build", "-b", "tower(4)", "-o", path(&f)])), 0);
    let first: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let g = dir.path().join("again.json");
    assert_eq!(code(&pp(&["build", "-p", path(&f), "-o", path(&g)])), 0);
    let second: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(first["states"], second["states"]);
    assert_eq!(first["transitions"], second["transitions"]);
    // the saved file keeps the predicate, so verification still works
    let v = pp(&["verify", "-p", path(&f), "-n", "6"]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));
}

#[test]
fn unknown_state_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(SIGNED).unwrap()).unwrap();
    doc["transitions"][0][0] = Value::from("ghost");
    std::fs::write(&f, doc.to_string()).unwrap();
    let o = pp(&["verify", "-p", path(&f), "-n", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ghost"));
}

#[test]
fn signed_numbers_file_is_robust() {
    let o = pp(&["verify", "-p", SIGNED, "-n", "6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let reports = json(&o);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 27);
    assert!(reports.iter().all(|r| r["robust"] == true && r["well_specified"] == true));
}

/// Pre- and post-multisets of one net transition, by place label.
type Incidence = (Vec<String>, Vec<String>);

fn places_and_boxes(dot: &str) -> (Vec<String>, BTreeSet<Incidence>) {
    let mut label = std::collections::HashMap::new();
    let mut boxes = std::collections::BTreeMap::<String, Incidence>::new();
    for line in dot.lines().map(str::trim) {
        if let Some((from, to)) = line.split_once(" -> ") {
            let to = to.trim_end_matches(';');
            let (to, n) = match to.split_once(" [label=\"") {
                Some((t, l)) => (t, l.trim_end_matches("\"]").parse::<usize>().unwrap()),
                None => (to, 1),
            };
            for _ in 0..n {
                if from.starts_with('p') {
                    boxes.get_mut(to).unwrap().0.push(from.to_string());
                } else {
                    boxes.get_mut(from).unwrap().1.push(to.to_string());
                }
            }
        } else if let Some(rest) = line.strip_prefix('p').filter(|_| line.contains("[label=")) {
            let id = format!("p{}", rest.split_whitespace().next().unwrap());
            let name = line.split("label=\"").nth(1).unwrap().split('"').next().unwrap();
            label.insert(id, name.to_string());
        } else if line.starts_with('t') && line.contains("shape=box") {
            boxes.insert(line.split_whitespace().next().unwrap().to_string(), Default::default());
        }
    }
    let name = |ps: &[String]| {
        let mut v: Vec<String> = ps.iter().map(|p| label[p].clone()).collect();
        v.sort();
        v
    };
    let mut places: Vec<String> = label.values().cloned().collect();
    places.sort();
    (places, boxes.values().map(|(i, o)| (name(i), name(o))).collect())
}

#[test]
fn tower_net_shape() {
    let o = pp(&["export-dot", "-b", "tower(4)"]);
    assert_eq!(code(&o), 0);
    let (places, boxes) = places_and_boxes(&String::from_utf8_lossy(&o.stdout));
    assert_eq!(places, ["1", "2", "3", "4"]);
    assert_eq!(boxes.len(), 6);
}

#[test]
fn pebbles_net_incidence() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.dot");
    assert_eq!(code(&pp(&["export-dot", "-b", "pebbles(4)", "-o", path(&f)])), 0);
    let (places, boxes) = places_and_boxes(&std::fs::read_to_string(&f).unwrap());
    assert_eq!(places, ["0", "1", "2", "3", "4"]);
    // sums below 4 merge into one pouch, everything else jumps to 4,4
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let expected: BTreeSet<Incidence> = [
        (s(&["1", "1"]), s(&["0", "2"])),
        (s(&["1", "2"]), s(&["0", "3"])),
        (s(&["2", "2"]), s(&["4", "4"])),
        (s(&["1", "3"]), s(&["4", "4"])),
        (s(&["2", "3"]), s(&["4", "4"])),
        (s(&["3", "3"]), s(&["4", "4"])),
        (s(&["0", "4"]), s(&["4", "4"])),
        (s(&["1", "4"]), s(&["4", "4"])),
        (s(&["2", "4"]), s(&["4", "4"])),
        (s(&["3", "4"]), s(&["4", "4"])),
    ]
    .into_iter()
    .collect();
    assert_eq!(boxes, expected);
}

#[test]
fn exit_codes() {
    // non-robust without the flag is a finding
    assert_eq!(code(&pp(&["verify", "-b", "pebbles(4)", "-i", "x=5"])), 1);
    assert_eq!(code(&pp(&["verify", "-b", "pebbles(4)", "-i", "x=5", "--expect-nonrobust"])), 0);
    assert_eq!(code(&pp(&["verify", "-b", "tower(4)", "-n", "8"])), 0);
    assert_eq!(code(&pp(&["verify", "-b", "tower(4)", "-n", "8", "--expect-nonrobust"])), 1);
    assert_eq!(code(&pp(&["verify", "-b", "towr(4)", "-n", "3"])), 2);
    assert_eq!(code(&pp(&["verify", "-b", "tower(4)", "-i", "z=3"])), 2);
    assert_eq!(code(&pp(&["frobnicate"])), 2);
    assert_eq!(code(&pp(&["verify", "-b", "tower(5)", "-i", "x=9", "--budget", "3"])), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_pp"))
        .args(["verify", "-b", "tower(5)", "-i", "x=9"])
        .env("PP_NODE_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    // big-modulo below 2m agents is not promised to be correct
    assert_eq!(code(&pp(&["verify", "-b", "big-modulo([1],2,1)", "-n", "1"])), 1);
}

#[test]
fn tolerance_prints_unbounded_literally() {
    let o = pp(&["tolerance", "-b", "tower(4)", "--input", "x=2", "-k", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["tol"], "unbounded");
    assert_eq!(v["intol"], "unbounded");
}

#[test]
fn simulate_is_reproducible_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("run.jsonl");
    let args = ["simulate", "-b", "inhom-tower([3,2],5)", "--input", "x=2,y=2", "--seed", "9", "-k", "1"];
    let a = pp(&[&args[..], &["--trace", path(&t)]].concat());
    let b = pp(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let r = pp(&["replay", "-b", "inhom-tower([3,2],5)", "--trace", path(&t), "--format", "json"]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(json(&r)["output"], json(&a)["output"]);
}

#[test]
fn counterexamples_replay_from_reports() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("report.json");
    let o = pp(&["verify", "-b", "pebbles(4)", "-i", "x=5", "--expect-nonrobust"]);
    std::fs::write(&f, &o.stdout).unwrap();
    assert_eq!(code(&pp(&["replay", "-b", "pebbles(4)", "--trace", path(&f), "--expect", "reject"])), 0);
    assert_eq!(code(&pp(&["replay", "-b", "pebbles(4)", "--trace", path(&f), "--expect", "accept"])), 1);
    // a trace over unknown states does not parse
    assert_eq!(code(&pp(&["replay", "-b", "tower(4)", "--trace", path(&f)])), 2);
    // same names, but 1,2 -> 3,0 is not a move when the threshold is 3
    assert_eq!(code(&pp(&["replay", "-b", "pebbles(3)", "--trace", path(&f)])), 1);
}

#[test]
fn compiled_predicates_and_products() {
    let o = pp(&["verify", "-P", "(>= (+ (* 2 x) (* -1 y)) 3)", "-n", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = pp(&[
        "tolerance",
        "-b",
        "product(and, weak-convert(inhom-tower-cancel([2,-1],3)), weak-convert(inhom-tower-cancel([-1,1],1)))",
        "--input",
        "x=3,y=4",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["out0"], "reject");
    assert_eq!(v["tol"], 0);
    assert_eq!(v["robust"], false);
}

#[test]
fn probe_predicate_shows_the_gap_at_one_y() {
    let o = pp(&[
        "tolerance",
        "-P",
        "(or (>= x y) (and (>= (+ x 1) y) (= (mod x 5) 0)))",
        "--modulo-mode",
        "tower-only",
        "--input",
        "x=5,y=1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["out0"], "accept");
    assert_eq!(v["intol"], "unbounded");
    assert_eq!(v["tol"], 4);
}
