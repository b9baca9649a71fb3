//! End-to-end tests of the binary: exit-code contract (0 pass, 1
//! verified-false, 2 error), golden outputs, and byte determinism of the
//! form files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heckecm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn workfile(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("heckecm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn weight_prints_companion_weights() {
    for (m, expect) in [("33", "19"), ("51", "31"), ("99", "59")] {
        let out = run(&["weight", "--k", "3", "--modulus", m]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out).trim(), expect);
    }
    let out = run(&["weight", "--k", "3", "--modulus", "8"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn classgroup_examples() {
    let out = run(&["classgroup", "--disc", "-8"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("class number: 1"));
    let out = run(&["classgroup", "--disc", "-20"]);
    let text = stdout(&out);
    assert!(text.contains("class number: 2"));
    assert!(text.contains("(1, 0, 5), (2, 2, 3)"));
    let out = run(&["classgroup", "--disc", "-7"]);
    assert!(stdout(&out).contains("class number: 1"));
    // non-fundamental discriminant is a usage error
    let out = run(&["classgroup", "--disc", "-12"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn synth_writes_golden_form_deterministically() {
    let f1 = workfile("det-f1.json");
    let f2 = workfile("det-f2.json");
    for f in [&f1, &f2] {
        let out = run(&[
            "synth", "--disc", "-8", "--u", "2", "--bound", "25", "--out",
            f.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let text = stdout(&out);
        assert!(text.contains("weight: 3"));
        assert!(text.contains("level: 8"));
        assert!(text.contains("nebentypus conductor: 8"));
    }
    let b1 = std::fs::read(&f1).unwrap();
    let b2 = std::fs::read(&f2).unwrap();
    assert_eq!(b1, b2, "identical invocations must be byte-identical");
    let parsed: serde_json::Value = serde_json::from_slice(&b1).unwrap();
    assert_eq!(parsed["schema_version"], 1);
    assert_eq!(parsed["coeffs"][1][1], "-2");
    assert_eq!(parsed["coeffs"][24][1], "25");
}

#[test]
fn synth_rejects_parity_violation() {
    let out = run(&[
        "synth", "--disc", "-8", "--u", "3", "--bound", "10", "--out",
        workfile("parity.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unit compatibility"), "stderr: {err}");
}

#[test]
fn companion_and_verify_flow() {
    let f = workfile("flow-f.json");
    let h = workfile("flow-h19.json");
    let out = run(&[
        "synth", "--disc", "-8", "--u", "2", "--bound", "25", "--out", f.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = workfile("flow-report.json");
    let out = run(&[
        "companion", "--form", f.to_str().unwrap(), "--modulus", "33", "--bound", "25",
        "--out", h.to_str().unwrap(), "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("companion weight: 19"));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["congruence"]["pass"], true);
    assert_eq!(rep["k_prime"], 19);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&h).unwrap()).unwrap();
    assert_eq!(parsed["weight"], 19);
    assert_eq!(parsed["coeffs"][1][1], "-512");
    assert_eq!(parsed["coeffs"][2][1], "-3266");

    let out = run(&[
        "verify", "--form", f.to_str().unwrap(), "--companion", h.to_str().unwrap(),
        "--k", "3", "--modulus", "33", "--bound", "25",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("pass"));

    // tampering flips the verdict to exit 1 with the witness index printed
    let tampered = workfile("flow-h19-tampered.json");
    let text = std::fs::read_to_string(&h).unwrap().replace("119842447106", "119842447107");
    std::fs::write(&tampered, text).unwrap();
    let out = run(&[
        "verify", "--form", f.to_str().unwrap(), "--companion", tampered.to_str().unwrap(),
        "--k", "3", "--modulus", "33", "--bound", "25",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("n = 17"));

    // missing file is a usage error
    let out = run(&[
        "verify", "--form", "no-such-file.json", "--companion", h.to_str().unwrap(),
        "--k", "3", "--modulus", "33", "--bound", "25",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn companion_mod_99_matches_paper_tail() {
    let f = workfile("m99-f.json");
    let h = workfile("m99-h59.json");
    run(&["synth", "--disc", "-8", "--u", "2", "--bound", "25", "--out", f.to_str().unwrap()]);
    let out = run(&[
        "companion", "--form", f.to_str().unwrap(), "--modulus", "99", "--bound", "25",
        "--out", h.to_str().unwrap(), "--json",
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["k_prime"], 59);
    assert_eq!(report["congruence"]["pass"], true);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&h).unwrap()).unwrap();
    assert_eq!(parsed["coeffs"][24][1], "34694469519536141888238489627838134765625");
}

#[test]
fn companion_rejects_inert_modulus() {
    let f = workfile("inert-f.json");
    run(&["synth", "--disc", "-8", "--u", "2", "--bound", "10", "--out", f.to_str().unwrap()]);
    let out = run(&[
        "companion", "--form", f.to_str().unwrap(), "--modulus", "25", "--bound", "10",
        "--out", workfile("inert-h.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("inert"));
}

#[test]
fn ordinary_and_detect_cm_wrappers() {
    let f = workfile("wrap-f.json");
    run(&["synth", "--disc", "-8", "--u", "2", "--bound", "25", "--out", f.to_str().unwrap()]);
    let out = run(&["ordinary", "--form", f.to_str().unwrap(), "--p", "17"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "true");
    let out = run(&["ordinary", "--form", f.to_str().unwrap(), "--p", "5"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out).trim(), "false");
    let out = run(&["detect-cm", "--form", f.to_str().unwrap(), "--disc", "-8", "--bound", "25"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "true");
    let out = run(&["detect-cm", "--form", f.to_str().unwrap(), "--disc", "-4", "--bound", "25"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("witness prime 3"));
    // deeper scan at the default-exceeding bound
    let f500 = workfile("wrap-f500.json");
    run(&["synth", "--disc", "-8", "--u", "2", "--bound", "500", "--out", f500.to_str().unwrap()]);
    let out =
        run(&["detect-cm", "--form", f500.to_str().unwrap(), "--disc", "-8", "--bound", "500"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "true");
}

#[test]
fn synth_high_weight_directly() {
    let h = workfile("direct-h19.json");
    let out = run(&[
        "synth", "--disc", "-8", "--u", "18", "--bound", "25", "--out", h.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("weight: 19"));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&h).unwrap()).unwrap();
    assert_eq!(parsed["coeffs"][1][1], "-512");
    assert_eq!(parsed["coeffs"][2][1], "-3266");
    assert_eq!(parsed["coeffs"][24][1], "3814697265625");
}

#[test]
fn synth_with_finite_type_options() {
    // order-2 character on the prime above 3 in Q(sqrt(-2)); weight 4
    let g = workfile("ft-g.json");
    let out = run(&[
        "synth", "--disc", "-8", "--u", "3", "--bound", "20", "--modulus", "3:1",
        "--assign", "2,0=1", "--root-order", "2", "--out", g.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("weight: 4"));
    assert!(text.contains("level: 24"));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(parsed["modulus_norm"], 3);
    assert_eq!(parsed["finite_type"]["root_order"], 2);
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["synth", "--disc", "-8"]); // missing required args
    assert_eq!(code(&out), 2);
    let out = run(&["no-such-command"]);
    assert_eq!(code(&out), 2);
}
