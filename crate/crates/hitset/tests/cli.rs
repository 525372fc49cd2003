use std::path::Path;
use std::process::{Command, Output};

fn hitset(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitset")).current_dir(dir).args(args).output().unwrap()
}

#[test]
fn gen_run_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = ["gen", "--kind", "disks", "--n", "40", "--m", "80", "--cap", "8", "--seed", "3", "-o", "a.json"];
    assert!(hitset(d, &gen).status.success());
    let mut again = gen;
    again[12] = "b.json";
    assert!(hitset(d, &again).status.success());
    assert_eq!(std::fs::read(d.join("a.json")).unwrap(), std::fs::read(d.join("b.json")).unwrap());

    let run = hitset(d, &["run", "--alg", "disks", "-i", "a.json", "-o", "r.csv", "--hits-out", "h.json"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(d.join("r.csv")).unwrap();
    assert!(csv.starts_with("step,object_id,was_hit,points_added,layer,lines_invoked,fallback\n"));
    assert!(csv.contains("|H|,|OPT|,opt_kind,ratio,ceiling,ms\n"));
    assert!(hitset(d, &["verify", "-i", "a.json", "--hits", "h.json"]).status.success());

    let exact = hitset(d, &["oracle", "-i", "a.json", "--exact", "-o", "opt.json"]);
    assert!(exact.status.success());
    assert!(hitset(d, &["verify", "-i", "a.json", "--hits", "opt.json"]).status.success());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = ["gen", "--kind", "bottomless", "--n", "20", "--m", "30", "--cap", "64", "--seed", "1", "-o", "a.json"];
    assert!(hitset(d, &gen).status.success());
    std::fs::write(d.join("empty.json"), "[]").unwrap();
    assert_eq!(hitset(d, &["verify", "-i", "a.json", "--hits", "empty.json"]).status.code(), Some(2));
    assert_eq!(hitset(d, &["run", "--alg", "disks", "-i", "a.json"]).status.code(), Some(4));
    std::fs::write(d.join("bad.json"), "{\"name\": 1}").unwrap();
    assert_eq!(hitset(d, &["run", "--alg", "bottomless", "-i", "bad.json"]).status.code(), Some(4));
    assert_eq!(hitset(d, &["gen", "--kind", "cubes", "--n", "1", "--m", "1", "--cap", "2"]).status.code(), Some(4));

    // disks covering consecutive pairs of a ring: no reduction applies
    let k = 100;
    let at = |i: usize| {
        let a = i as f64 * std::f64::consts::TAU / k as f64;
        (40.0 * a.cos(), 40.0 * a.sin())
    };
    let points: Vec<String> = (0..k).map(|i| format!("[{:?},{:?}]", at(i).0, at(i).1)).collect();
    let objects: Vec<String> = (0..k)
        .map(|i| {
            let (a, b) = (at(i), at((i + 1) % k));
            format!("{{\"type\":\"disk\",\"c\":[{:?},{:?}],\"r\":1.3}}", (a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
        })
        .collect();
    let ring = format!(
        "{{\"name\":\"ring\",\"params\":{{\"kind\":\"disks\",\"cap\":2,\"seed\":0}},\"points\":[{}],\"objects\":[{}]}}",
        points.join(","),
        objects.join(",")
    );
    std::fs::write(d.join("ring.json"), ring).unwrap();
    assert_eq!(hitset(d, &["oracle", "-i", "ring.json", "--exact"]).status.code(), Some(3));
    let g = hitset(d, &["oracle", "-i", "ring.json", "--greedy"]);
    assert!(g.status.success());
    let hits: Vec<usize> = serde_json::from_slice(&g.stdout).unwrap();
    assert_eq!(hits.len(), 50);
    let run = hitset(d, &["run", "--alg", "disks", "-i", "ring.json", "-o", "r.csv"]);
    assert!(run.status.success());
    let csv = std::fs::read_to_string(d.join("r.csv")).unwrap();
    assert!(csv.lines().last().unwrap().contains(",greedy,"));
}
