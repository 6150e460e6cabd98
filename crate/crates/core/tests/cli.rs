use std::process::{Command, Output};

use serde_json::Value;

use principal_char::gz::jd_closed_form;
use principal_char::multivar::{termsum_equal, termsum_from_json};
use principal_char::weights::RootVec;

fn pchar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pchar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn jd_prints_the_rank_one_product() {
    let o = pchar(&["jd", "--n", "1", "--d", "2", "--json"]);
    assert!(o.status.success());
    let t = termsum_from_json(&json(&o)).unwrap();
    let want = jd_closed_form(1, &RootVec(vec![2])).unwrap();
    assert!(termsum_equal(&t, &want, 8, 1).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(
        pchar(&["verify", "--identity", "toda", "--n", "1", "--cutoff", "0"])
            .status
            .code(),
        Some(0)
    );
    let o = pchar(&[
        "verify",
        "--identity",
        "characters",
        "--n",
        "2",
        "--k",
        "1",
        "--window",
        "3,-10,40",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["pass"], Value::Bool(true));
    // with no specializations the negative control can never fire
    let o = pchar(&[
        "verify",
        "--identity",
        "whittaker",
        "--n",
        "2",
        "--trials",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["witness"].is_object());
    assert_eq!(
        pchar(&["verify", "--identity", "nonsense"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pchar(&["jd", "--n", "2", "--d", "1"]).status.code(),
        Some(2)
    );
    let o = pchar(&[
        "verify",
        "--identity",
        "tower-decomposition",
        "--n",
        "2",
        "--d",
        "1,1",
        "--boundaries",
        "0,1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    let args = [
        "verify",
        "--identity",
        "convolution",
        "--n",
        "2",
        "--k",
        "2",
        "--d",
        "1,1",
        "--seed",
        "7",
    ];
    let a = pchar(&args);
    let b = pchar(&args);
    let mut threaded = vec!["--threads", "3"];
    threaded.extend(args);
    let c = pchar(&threaded);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(json(&a)["params"]["seed"], Value::from(7));
}

#[test]
fn fermi_and_char_commands() {
    let o = pchar(&[
        "fermi",
        "--n",
        "1",
        "--d",
        "2",
        "--interval",
        "0:inf",
        "--window",
        "2,0,20",
        "--json",
    ]);
    assert!(o.status.success());
    assert!(json(&o).is_object());
    assert_eq!(
        pchar(&["fermi", "--n", "1", "--d", "2", "--interval", "-1:inf"])
            .status
            .code(),
        Some(2)
    );
    let f = pchar(&[
        "char", "--n", "2", "--k", "1", "--window", "3,-10,30", "--json",
    ]);
    let b = pchar(&[
        "char", "--n", "2", "--k", "1", "--window", "3,-10,30", "--method", "bosonic", "--json",
    ]);
    assert!(f.status.success() && b.status.success());
    assert_eq!(f.stdout, b.stdout);
}

#[test]
fn quick_suite_passes() {
    let o = pchar(&["suite", "--profile", "quick"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&o);
    assert_eq!(v["pass"], Value::Bool(true));
    assert!(v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["params"]["n"].as_u64().unwrap() <= 2 || r["identity"] == "whittaker"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("characters"));
}
