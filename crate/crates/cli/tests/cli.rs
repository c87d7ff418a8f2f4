use std::path::PathBuf;
use std::process::{Command, Output};

fn chsh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chsh"))
        .args(args)
        .env_remove("CHSH_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chsh-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const CHSH: [&str; 10] = [
    "--theta",
    "1.5707963",
    "--a0",
    "0",
    "--a1",
    "1.5707963",
    "--b0",
    "0.7853982",
    "--b1",
    "5.4977871",
];

#[test]
fn point_of_the_chsh_realisation() {
    let mut args = vec!["point"];
    args.extend(CHSH);
    let out = chsh(&args);
    assert!(out.status.success());
    let v = json(&out);
    let c: Vec<f64> = v["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expected = [0.0, 0.0, 0.0, 0.0, h, h, h, -h];
    for (g, e) in c.iter().zip(expected) {
        assert!((g - e).abs() < 1e-6);
    }
    assert_eq!(v["probabilities"].as_array().unwrap().len(), 16);
}

#[test]
fn product_point_is_deterministic() {
    let out = chsh(&[
        "point", "--theta", "0", "--a0", "0", "--a1", "0", "--b0", "0", "--b1", "0",
    ]);
    let v = json(&out);
    assert!(v["components"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x.as_f64() == Some(1.0)));
}

#[test]
fn degrees_match_radians() {
    let rad = json(&chsh(&[
        "point", "--theta", "0.5", "--a0", "0.1", "--a1", "1", "--b0", "2", "--b1", "-1",
    ]));
    let deg = json(&chsh(&[
        "--degrees",
        "point",
        "--theta",
        &0.5f64.to_degrees().to_string(),
        "--a0",
        &0.1f64.to_degrees().to_string(),
        "--a1",
        &1f64.to_degrees().to_string(),
        "--b0",
        &2f64.to_degrees().to_string(),
        "--b1",
        &(-1f64).to_degrees().to_string(),
    ]));
    for (a, b) in rad["components"]
        .as_array()
        .unwrap()
        .iter()
        .zip(deg["components"].as_array().unwrap())
    {
        assert!((a.as_f64().unwrap() - b.as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn malformed_and_out_of_range_input_exit_2() {
    assert_eq!(chsh(&["point", "--theta", "abc"]).status.code(), Some(2));
    assert_eq!(
        chsh(&["point", "--theta", "3", "--a0", "0", "--a1", "0", "--b0", "0", "--b1", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        chsh(&["family", "double-tilted", "--alpha", "2", "--phi", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(chsh(&["family", "wolfe-yelin", "--alpha0", "0"]).status.code(), Some(2));
    assert_eq!(chsh(&["scan", "double-tilted", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(chsh(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn family_values() {
    let v = json(&chsh(&["family", "wolfe-yelin", "--alpha0", "0", "--alpha1", "0"]));
    assert!((v["beta_q"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-12);
    let v = json(&chsh(&["family", "double-tilted", "--alpha", "1", "--phi", "0"]));
    assert!((v["beta_q"].as_f64().unwrap() - 10f64.sqrt()).abs() < 1e-12);
    let v = json(&chsh(&[
        "family",
        "double-tilted",
        "--alpha",
        "1.99",
        "--phi",
        "1.5707",
    ]));
    assert_eq!(v["admissible"], false);
}

#[test]
fn extremal_exit_codes() {
    let mut args = vec!["extremal"];
    args.extend(CHSH);
    let out = chsh(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["agreement"], true);

    let out = chsh(&[
        "extremal",
        "--theta",
        "0.1",
        "--a0",
        "0",
        "--a1",
        "1.5707963",
        "--b0",
        "0.7853982",
        "--b1",
        "5.4977871",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(
        chsh(&["extremal", "--theta", "0.1", "--method", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn value_maximize_expose_certify() {
    let v = json(&chsh(&["value"]));
    assert_eq!(v["beta_l"], 2.0);
    assert_eq!(v["beta_ns"], 4.0);
    assert!((v["beta_q"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-9);

    let v = json(&chsh(&["maximize", "--functional", "0,0,0,0,1,1,1,-1"]));
    assert!((v["beta_max"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-9);

    let mut args = vec!["expose"];
    args.extend(CHSH);
    let v = json(&chsh(&args));
    assert!((v["i_max"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-6);
    assert_eq!(v["status"], "exposed-candidate");

    let mut args = vec!["certify"];
    args.extend(CHSH);
    let v = json(&chsh(&args));
    assert_eq!(v["verdict"], "PROVEN-EXPOSED");
}

#[test]
fn realize_and_probabilities_from_components() {
    let comps = "0.25,0.5,0.5,0.5,0.6875,0.6875,0.8125,0.8125";
    let v = json(&chsh(&["realize", "--components", comps]));
    assert_eq!(v["realizations"].as_array().unwrap().len(), 2);
    let v = json(&chsh(&["probabilities", "--components", comps]));
    assert_eq!(v.as_array().unwrap().len(), 16);
}

#[test]
fn scans_are_complete_and_reproducible() {
    let out = chsh(&["scan", "double-tilted", "--steps", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,phi,beta_l,beta_q,admissible,c1_extremal,c2_extremal");
    assert_eq!(lines.len(), 5);

    let a = scratch("wy-a.csv");
    let b = scratch("wy-b.csv");
    for (p, threads) in [(&a, "1"), (&b, "3")] {
        let out = Command::new(env!("CARGO_BIN_EXE_chsh"))
            .args(["scan", "wolfe-yelin", "--steps", "7", "--output", p.to_str().unwrap()])
            .env("CHSH_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("alpha0,alpha1,beta_l,beta_q,admissible,c1_extremal,c2_extremal,extended_extremal\n"));
    assert_eq!(text.lines().count(), 50);
}

#[test]
fn unwritable_output_exits_5() {
    let out = chsh(&[
        "scan",
        "double-tilted",
        "--steps",
        "2",
        "--output",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(5));
    let out = chsh(&["compare", "--samples", "3", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn compare_is_deterministic() {
    let a = chsh(&["compare", "--samples", "50", "--seed", "9"]);
    let b = chsh(&["compare", "--samples", "50", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 51);
    let summary: serde_json::Value = serde_json::from_slice(&a.stderr).unwrap();
    assert_eq!(summary["disagreements"], 0);
    assert_eq!(summary["agreement_fraction"], 1.0);

    let empty = chsh(&["compare", "--samples", "0"]);
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);
}
