use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn pag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pag"))
        .args(args)
        .env_remove("PAG_MAX_SPACE")
        .output()
        .unwrap()
}

fn f(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(&pag(&["validate", &f("triangle_a.json")])), 0);
    let neg = pag(&["validate", &f("negative_power.json")]);
    assert_eq!(code(&neg), 2);
    assert!(String::from_utf8_lossy(&neg.stderr).contains("south"));
    let inv = pag(&["validate", &f("inverted_utility.json")]);
    assert_eq!(code(&inv), 2);
    assert!(String::from_utf8_lossy(&inv.stderr).contains("t(1) >= t(0)"));
    assert_eq!(code(&pag(&["validate", &f("missing.json")])), 2);
    assert_eq!(code(&pag(&["validate", &f("triangle_alloc.json")])), 2);
}

#[test]
fn states_of_the_example() {
    let out = pag(&["states", &f("triangle_a.json"), &f("triangle_alloc.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let states: Vec<&str> = ["1", "2", "3"]
        .iter()
        .map(|c| v["report"]["countries"][c]["state"].as_str().unwrap())
        .collect();
    assert_eq!(states, ["safe", "unsafe", "safe"]);
    assert_eq!(v["report"]["countries"]["2"]["tau"], "8/1");

    let out = pag(&["states", &f("triangle_a.json"), &f("all_on_self.json")]);
    let v = json(&out);
    assert!(["1", "2", "3"]
        .iter()
        .all(|c| v["report"]["countries"][c]["state"] == "safe"));

    assert_eq!(
        code(&pag(&[
            "states",
            &f("triangle_a.json"),
            &f("bad_allocation.json")
        ])),
        2
    );
}

#[test]
fn best_response_of_the_strong_country() {
    let out = pag(&[
        "best-response",
        &f("triangle_a.json"),
        &f("all_on_self.json"),
        "--country",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["report"]["value"], "3/1");
    assert_eq!(v["report"]["current_utility"], "2/1");
    assert_eq!(
        v["report"]["canonical_row"],
        serde_json::json!({"1": "2/1", "2": "6/1"})
    );
    assert_eq!(
        code(&pag(&[
            "best-response",
            &f("triangle_a.json"),
            &f("all_on_self.json"),
            "--country",
            "9"
        ])),
        2
    );
}

#[test]
fn paradox_on_the_example() {
    let out = pag(&[
        "paradox",
        &f("triangle_b.json"),
        &f("triangle_a.json"),
        "--country",
        "3",
        "--mode",
        "equilibria",
        "--grid",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["report"]["paradox"], true);
    assert_eq!(v["report"]["welfare_fewer_friends"], "4/1");
    assert_eq!(v["report"]["welfare_more_friends"], "3/1");
    assert_eq!(v["manifest"]["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(v["manifest"]["parameters"]["grid_denominator"], 1);

    // the reversed pair is not a friend extension
    let out = pag(&[
        "paradox",
        &f("triangle_a.json"),
        &f("triangle_b.json"),
        "--country",
        "3",
        "--grid",
        "1",
    ]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["error"]["kind"], "environment-pair");
}

#[test]
fn poa_of_all_friends_is_one() {
    let out = pag(&["poa", &f("allfriends.json"), "--grid", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["report"]["poa"], "1/1");
    assert_eq!(v["report"]["within_bounds"], true);
}

#[test]
fn bounds_command() {
    let v = json(&pag(&["bounds", &f("triangle_a.json")]));
    // A = 3 * 3 (each country: self plus two neighbors at value 1), B = 2 * 0 + 1
    assert_eq!(v["report"]["a"], "9/1");
    assert_eq!(v["report"]["b"], "1/1");
    assert_eq!(v["report"]["upper"], "9/1");
}

#[test]
fn grid_defaults_and_caps() {
    let out = pag(&["equilibria", &f("half_power.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(
        v["manifest"]["parameters"]["grid_source"],
        "largest-within-cap"
    );
    let d = v["manifest"]["parameters"]["grid_denominator"]
        .as_u64()
        .unwrap();
    assert!(d >= 2 && d.is_multiple_of(2));

    let out = pag(&["equilibria", &f("half_power.json"), "--grid", "1"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["error"]["kind"], "grid-not-integral");

    let capped = Command::new(env!("CARGO_BIN_EXE_pag"))
        .args(["equilibria", &f("triangle_a.json"), "--grid", "1"])
        .env("PAG_MAX_SPACE", "100")
        .output()
        .unwrap();
    assert_eq!(code(&capped), 3);
    let bad_cap = Command::new(env!("CARGO_BIN_EXE_pag"))
        .args(["equilibria", &f("triangle_a.json")])
        .env("PAG_MAX_SPACE", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&bad_cap), 2);
}

#[test]
fn construct_writes_a_valid_pair() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("t3");
    let out = pag(&[
        "construct",
        "single",
        "--n",
        "4",
        "--powers",
        "1,1,2,2",
        "--i",
        "1",
        "--j",
        "2",
        "--out-prefix",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let small = dir.path().join("t3_small.json");
    let large = dir.path().join("t3_large.json");
    for p in [&small, &large] {
        assert_eq!(code(&pag(&["validate", p.to_str().unwrap()])), 0);
    }
    let out = pag(&[
        "paradox",
        small.to_str().unwrap(),
        large.to_str().unwrap(),
        "--country",
        "1",
        "--grid",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["report"]["paradox"], true);

    let bad = pag(&[
        "construct",
        "single",
        "--n",
        "4",
        "--powers",
        "3,1,1,2",
        "--i",
        "1",
        "--j",
        "2",
    ]);
    assert_eq!(code(&bad), 3);
    assert_eq!(json(&bad)["error"]["kind"], "power-condition");
    assert_eq!(
        code(&pag(&[
            "construct",
            "single",
            "--n",
            "3",
            "--powers",
            "1,1",
            "--i",
            "1",
            "--j",
            "2"
        ])),
        2
    );
    let cor = pag(&[
        "construct",
        "targets",
        "--n",
        "5",
        "--powers",
        "1,0,0,1,1",
        "--i",
        "1",
        "--s",
        "2,3",
    ]);
    assert_eq!(code(&cor), 0);
}

#[test]
fn out_flag_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eq.json");
    let printed = pag(&["equilibria", &f("triangle_b.json"), "--grid", "1"]);
    let written = pag(&[
        "equilibria",
        &f("triangle_b.json"),
        "--grid",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&written), 0);
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), printed.stdout);
    assert_eq!(json(&printed)["report"]["count"], 458);
}

#[test]
fn dynamics_depend_only_on_the_seed() {
    let a = pag(&["dynamics", &f("triangle_a.json"), "--seed", "3"]);
    let b = pag(&[
        "dynamics",
        &f("triangle_a.json"),
        "--seed",
        "3",
        "--jobs",
        "4",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["report"]["converged"], true);
    assert_eq!(v["manifest"]["parameters"]["seed"], 3);
}

#[test]
fn malformed_input_never_panics() {
    let dir = tempfile::tempdir().unwrap();
    for (k, text) in [
        "",
        "{",
        "[]",
        "{\"countries\": 3}",
        "{\"countries\": [{\"label\": 1, \"power\": 1}]}",
        "\u{0}",
    ]
    .iter()
    .enumerate()
    {
        let p = dir.path().join(format!("m{k}.json"));
        std::fs::write(&p, text).unwrap();
        for cmd in ["validate", "equilibria", "poa", "bounds"] {
            let out = pag(&[cmd, p.to_str().unwrap()]);
            assert_eq!(code(&out), 2, "{cmd} on {text:?}");
        }
    }
}
