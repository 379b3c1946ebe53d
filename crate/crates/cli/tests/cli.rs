use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn barfill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barfill"))
        .args(args)
        .env_remove("BARFILL_CONFIG")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("barfill-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn homology_of_z2() {
    let v = json_of(&barfill(&["homology", "--group", "cyclic:2", "--n", "1", "--l", "2"]));
    assert_eq!(v["dim"], 1);
    assert_eq!(v["reps"].as_array().unwrap().len(), 1);
    assert_eq!(v["ranks"]["nullity_n"], 2);
}

#[test]
fn exhaustive_isop_of_z2() {
    let v = json_of(&barfill(&["isop", "--group", "cyclic:2", "--n", "1", "--l", "2", "--K", "1", "--mode", "exhaustive"]));
    assert_eq!(v["result"]["value"], 1);
    assert_eq!(v["result"]["exact"], true);
    let v = json_of(&barfill(&["isop", "--group", "cyclic:2", "--K", "2"]));
    assert_eq!(v["result"]["value"], 0);
}

#[test]
fn sampled_isop_is_a_lower_bound() {
    let args = ["isop", "--group", "sym:3", "--K", "2", "--mode", "sampled", "--samples", "50", "--seed", "4"];
    let a = barfill(&args);
    let b = barfill(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["result"]["mode"], "sampled");
    assert_eq!(v["result"]["bound"], "lower");
}

#[test]
fn torus_checks() {
    let v = json_of(&barfill(&["torus-check", "--group", "gl:2:4", "--n", "1", "--l", "3"]));
    assert_eq!(v["index"], 20);
    assert_eq!(v["index_prime_to_l"], true);
    assert_eq!(v["induced"]["surjective"], true);
    assert_eq!(v["consistent"], true);
    let v = json_of(&barfill(&["torus-check", "--group", "gl:2:3", "--n", "1", "--l", "2"]));
    assert_eq!(v["index"], 12);
    assert_eq!(v["index_prime_to_l"], false);
    let v = json_of(&barfill(&["torus-check", "--group", "sl:2:2", "--n", "1", "--l", "3"]));
    assert_eq!(v["order"], 6);
}

#[test]
fn exit_codes() {
    assert_eq!(barfill(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(barfill(&[]).status.code(), Some(64));
    assert_eq!(barfill(&["homology", "--group", "cyc:3"]).status.code(), Some(65));
    assert_eq!(barfill(&["homology", "--group", "cyclic:3", "--l", "4"]).status.code(), Some(2));
    assert_eq!(barfill(&["homology", "--group", "sym:8"]).status.code(), Some(3));
    assert_eq!(barfill(&["homology", "--group", "gl:2:3", "--n", "3"]).status.code(), Some(3));
    let refused = barfill(&["isop", "--group", "sym:4", "--K", "3", "--census-cap", "100"]);
    assert_eq!(refused.status.code(), Some(3));
    assert!(refused.stdout.is_empty());
    assert!(!refused.stderr.is_empty());
}

#[test]
fn config_file_then_flags() {
    let path = scratch("caps.conf");
    std::fs::write(&path, "# tight census\ncensus_cap = 5\n").unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["isop", "--group", "cyclic:5", "--K", "2"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_barfill"))
            .args(&args)
            .env("BARFILL_CONFIG", &path)
            .output()
            .unwrap()
    };
    assert_eq!(run(&[]).status.code(), Some(3));
    assert!(run(&["--census-cap", "1000"]).status.success());
    std::fs::write(&path, "no_such_key = 1\n").unwrap();
    assert_eq!(run(&[]).status.code(), Some(65));
}

#[test]
fn phi_and_psi() {
    let v = json_of(&barfill(&["phi", "--group", "cyclic:2", "--K", "1", "--K1", "1", "--K2", "0"]));
    assert_eq!(v["result"]["holds"], false);
    let v = json_of(&barfill(&["phi", "--group", "cyclic:2", "--K", "1", "--K1", "1", "--K2", "1"]));
    assert_eq!(v["result"]["holds"], true);
    let v = json_of(&barfill(&["psi", "--group", "cyclic:2", "--K", "1"]));
    assert_eq!(v["result"]["holds"], true);
    assert_eq!(v["profile"]["k1"][1], 1);
    let v = json_of(&barfill(&["psi", "--group", "cyclic:2", "--K", "1", "--K1", "1", "--H", "0"]));
    assert_eq!(v["result"]["holds"], false);
}

#[test]
fn fillnorm_from_recipe_and_file() {
    let v = json_of(&barfill(&["fillnorm", "--group", "gl:2:3", "--recipe", "d([t0,t1])"]));
    let size = v["filler_size"].as_u64().unwrap();
    assert_eq!(size, 1);
    assert_eq!(v["exact"], true);
    let path = scratch("b.json");
    std::fs::write(&path, serde_json::to_string(&v["input"]).unwrap()).unwrap();
    let again = json_of(&barfill(&["fillnorm", "--chain", path.to_str().unwrap()]));
    assert_eq!(again["filler_size"], v["filler_size"]);
    let not_boundary = barfill(&["fillnorm", "--group", "gl:2:3", "--recipe", "[t0]"]);
    assert_eq!(not_boundary.status.code(), Some(2));
    let d = json_of(&barfill(&["fillnorm", "--group", "gl:2:3", "--recipe", "[t0] + [t1]", "--other", "[t0.t1]"]));
    assert_eq!(d["distance"], 1);
}

#[test]
fn family_csv() {
    let out = barfill(&[
        "family", "--kind", "torus:1", "--q-range", "2..20", "--mod-filter", "3", "--l", "3",
        "--recipe", "d([t0,t0])", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,group_order,filler,exact"));
    let qs: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(qs, ["4", "7", "13", "16", "19"]);
}

#[test]
fn checkpoint_is_written() {
    let path = scratch("isop.ckpt");
    let v = json_of(&barfill(&["isop", "--group", "sym:3", "--K", "3", "--checkpoint", path.to_str().unwrap()]));
    let cp: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cp["value"], v["result"]["value"]);
    let resumed = json_of(&barfill(&["isop", "--group", "sym:3", "--K", "3", "--checkpoint", path.to_str().unwrap()]));
    assert_eq!(resumed, v);
}

#[test]
fn homology_matrix_dump() {
    let prefix = scratch("z3");
    json_of(&barfill(&["homology", "--group", "cyclic:3", "--n", "1", "--l", "3", "--dump-matrix", prefix.to_str().unwrap()]));
    let d2 = std::fs::read_to_string(format!("{}.d2.mtx", prefix.display())).unwrap();
    assert!(d2.starts_with("%%MatrixMarket"));
    assert!(std::path::Path::new(&format!("{}.d1.mtx", prefix.display())).exists());
}

#[test]
fn selftest_suite_is_reproducible() {
    let a = barfill(&["selftest", "--suite", "isop-micro", "--suite", "torus", "--seed", "3", "--threads", "2"]);
    let b = barfill(&["selftest", "--suite", "isop-micro", "--suite", "torus", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["passed"], true);
    assert_eq!(barfill(&["selftest", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn group_summary() {
    let v = json_of(&barfill(&["group", "--group", "sym:4", "--elements"]));
    assert_eq!(v["order"], 24);
    assert_eq!(v["abelian"], false);
    assert_eq!(v["abelianization_order"], 2);
    assert_eq!(v["elements"].as_array().unwrap().len(), 24);
}
