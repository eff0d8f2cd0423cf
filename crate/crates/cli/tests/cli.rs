use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use ahl_core::calculus::Derivation;
use ahl_core::syntax::parse_program;
use ahl_core::vcgen::vcgen;
use serde_json::Value;

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("ahl-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&d).unwrap();
    d
}

fn ahl_env(args: &[&str], env: &[(&str, &str)]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ahl"))
        .args(args)
        .envs(env.iter().copied())
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    (out.status.code().unwrap(), serde_json::from_str(&text).unwrap_or(Value::Null), text)
}

fn ahl(args: &[&str]) -> (i32, Value) {
    let (code, v, _) = ahl_env(args, &[]);
    (code, v)
}

#[test]
fn check_hotel() {
    let (code, v) = ahl(&["check", &corpus("hotel_p1.ahl")]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("valid")));
    let (code, v) = ahl(&["check", &corpus("hotel_p2.ahl")]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("invalid")));
    assert_eq!(v["counterexample"]["initial"], serde_json::json!({"dk": 0, "ck1": 1, "ck2": 1, "acc": false}));
    let (code, v) = ahl(&["check", &corpus("hotel_p2.ahl"), "--flavor", "hoare"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("valid")));
}

#[test]
fn verify_examples() {
    let (code, v) = ahl(&["verify", &corpus("checklist.ahl")]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("proved")));
    let (code, v) = ahl(&["verify", &corpus("checklist_noinv.ahl")]);
    assert_eq!((code, v["verdict"].as_str()), (2, Some("missing_invariant")));
    let (code, v) = ahl(&["verify", &corpus("hotel_p1.ahl")]);
    assert_eq!((code, v["verdict"].as_str(), v["loop_obligations"].as_u64()), (0, Some("proved"), Some(0)));
    let (code, v) = ahl(&["verify", &corpus("hotel_p2.ahl")]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("failed")));
    assert_eq!(v["failed_obligation"]["origin"], "top");
}

#[test]
fn transformer_examples() {
    let (code, v) = ahl(&["sp", &corpus("hotel_p1.ahl"), "--syntactic", "--check-corollary"]);
    assert_eq!(code, 0);
    assert_eq!((v["sp"]["size"].as_u64(), v["sp"]["of"].as_u64()), (Some(12), Some(16)));
    assert_eq!(v["syntactic"]["agrees"], true);
    assert_eq!(v["corollary"]["verdict"], "holds");

    let (code, v) = ahl(&["wp", &corpus("diverge.ahl")]);
    assert_eq!((code, v["qualified"].as_bool()), (2, Some(true)));
    assert_eq!(v["wp"]["size"], v["wp"]["of"]);

    let (code, v) = ahl(&["sp", &corpus("bitcoin_toy.ahl")]);
    assert_eq!(code, 0);
    let states = v["sp"]["states"].as_array().unwrap();
    assert_eq!(states.len(), 10);
    for s in states {
        let k = s["pubKey"].as_i64().unwrap();
        assert_eq!(s["pubKeyHash"].as_i64().unwrap(), (7 * k + 3) % 5);
        assert_eq!(s["sig"].as_i64().unwrap(), (k + 1) % 5);
    }

    let (code, _) = ahl(&["sp", &corpus("checklist.ahl"), "--syntactic"]);
    assert_eq!(code, 3);
}

#[test]
fn run_examples() {
    let (code, v) = ahl(&["run", &corpus("hotel_p1.ahl"), "--state", "dk=1,ck1=1,ck2=2,acc=false"]);
    assert_eq!(code, 0);
    assert_eq!((v["final"]["dk"].as_i64(), v["final"]["acc"].as_bool()), (Some(2), Some(true)));
    let (code, v) = ahl(&["run", &corpus("checklist.ahl"), "--state", "p=2,L=[1,2]"]);
    assert_eq!(code, 0);
    assert_eq!((v["final"]["acc"].as_bool(), v["final"]["i"].as_i64()), (Some(true), Some(3)));
    let (code, v) = ahl(&["run", &corpus("diverge.ahl"), "--fuel", "50"]);
    assert_eq!((code, v["verdict"].as_str(), v["fuel_used"].as_u64()), (2, Some("fuel_exhausted"), Some(50)));
    let (code, _) = ahl(&["run", &corpus("hotel_p1.ahl"), "--state", "nope=1"]);
    assert_eq!(code, 3);
    let (code, _) = ahl(&["run", &corpus("hotel_p1.ahl"), "--state", "dk=true"]);
    assert_eq!(code, 3);
}

#[test]
fn prove_examples() {
    let dir = scratch("prove");
    let good = dir.join("p1.json");
    let (code, _) = ahl(&["verify", &corpus("hotel_p1.ahl"), "--emit-derivation", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, v) = ahl(&["prove", &corpus("hotel_p1.ahl"), good.to_str().unwrap()]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("accepted")));

    // Break the assertion between the two halves of the composition.
    let mut d: Value = serde_json::from_str(&fs::read_to_string(&good).unwrap()).unwrap();
    let comp = &mut d["premises"][0]["premises"][1]["premises"][0];
    assert_eq!(comp["rule"], "comp");
    comp["premises"][0]["post"] = "false == true".into();
    let broken = dir.join("broken.json");
    fs::write(&broken, d.to_string()).unwrap();
    let (code, v) = ahl(&["prove", &corpus("hotel_p1.ahl"), broken.to_str().unwrap()]);
    assert_eq!((code, v["verdict"].as_str()), (1, Some("rejected")));
    let first = v["nodes"].as_array().unwrap().iter().find(|n| n["status"] == "rejected").unwrap();
    assert_eq!((first["path"].as_str(), first["rule"].as_str()), (Some("root.0.1.0"), Some("comp")));

    // Claim the secure precondition for the insecure program.
    let p2 = parse_program(&fs::read_to_string(corpus("hotel_p2.ahl")).unwrap()).unwrap();
    let sub = vcgen(&p2.body, p2.post.as_ref().unwrap()).unwrap().derivation;
    let lie = Derivation::conseq(p2.pre.clone().unwrap(), sub, p2.post.clone().unwrap());
    let bad = dir.join("lie.json");
    fs::write(&bad, lie.to_json().to_string()).unwrap();
    let (code, v) = ahl(&["prove", &corpus("hotel_p2.ahl"), bad.to_str().unwrap()]);
    assert_eq!((code, v["verdict"].as_str(), v["matches_file"].as_bool()), (1, Some("rejected"), Some(true)));
    let failed = v["obligations"].as_array().unwrap().iter().find(|o| o["verdict"] == "counterexample").unwrap();
    assert_eq!(failed["path"], "root");
    assert_eq!(failed["counterexample"]["ck1"], 1);

    let (code, v) = ahl(&["prove", &corpus("hotel_p2.ahl"), good.to_str().unwrap()]);
    assert_eq!((code, v["verdict"].as_str(), v["matches_file"].as_bool()), (1, Some("rejected"), Some(false)));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn dual_prints_negated_hoare_triple() {
    let (code, v) = ahl(&["dual", &corpus("hotel_p1.ahl")]);
    assert_eq!(code, 0);
    assert_eq!(v["dual"].as_str().unwrap().chars().next(), Some('{'));
    let (code, v) = ahl(&["dual", &corpus("hotel_p2.ahl"), "--check"]);
    assert_eq!((code, v["agree"].as_bool()), (1, Some(true)));
    assert_eq!(v["dual_check"]["verdict"], "invalid");
}

#[test]
fn state_cap_flag_and_env() {
    let file = corpus("checklist.ahl");
    let (code, v, _) = ahl_env(&["check", &file], &[("AHL_STATECAP", "100")]);
    assert_eq!((code, v["error"]["kind"].as_str()), (2, Some("cap_exceeded")));
    let (code, _, _) = ahl_env(&["check", &file, "--statecap", "5000"], &[("AHL_STATECAP", "100")]);
    assert_eq!(code, 0);

    let dir = scratch("cap");
    let capped = dir.join("capped.ahl");
    let src = fs::read_to_string(corpus("hotel_p1.ahl")).unwrap().replace("domains:\n", "domains:\n  statecap = 10\n");
    fs::write(&capped, src).unwrap();
    let (code, _, _) = ahl_env(&["check", capped.to_str().unwrap()], &[]);
    assert_eq!(code, 2);
    let (code, _, _) = ahl_env(&["check", capped.to_str().unwrap(), "--statecap", "16"], &[]);
    assert_eq!(code, 0);
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(ahl(&["check"]).0, 3);
    assert_eq!(ahl(&["frobnicate", &corpus("hotel_p1.ahl")]).0, 3);
    assert_eq!(ahl(&["check", "/nonexistent.ahl"]).0, 3);
    let dir = scratch("usage");
    let bad = dir.join("bad.ahl");
    fs::write(&bad, "domains:\n  x in 0..1\nprogram:\n  x := \n").unwrap();
    let (code, v) = ahl(&["check", bad.to_str().unwrap()]);
    assert_eq!((code, v["error"]["kind"].as_str()), (3, Some("parse")));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn pretty_output_carries_the_same_facts() {
    let (_, v, _) = ahl_env(&["check", &corpus("hotel_p2.ahl")], &[]);
    let (_, _, text) = ahl_env(&["check", &corpus("hotel_p2.ahl"), "--pretty"], &[]);
    for (k, x) in v.as_object().unwrap() {
        assert!(text.contains(&format!("{k}:")), "{k}");
        if let Some(s) = x.as_str() {
            assert!(text.contains(s), "{s}");
        }
    }
    assert!(text.contains("dk: 0"));
}

#[test]
fn timing_is_opt_in() {
    let (_, v) = ahl(&["check", &corpus("hotel_p1.ahl")]);
    assert!(v.get("wall_time_ms").is_none());
    let (_, v) = ahl(&["check", &corpus("hotel_p1.ahl"), "--timing"]);
    assert!(v["wall_time_ms"].is_number());
}
