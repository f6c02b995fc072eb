use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nilcert::gogiso::parse_gog;
use nilcert::pcp;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn nilcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilcert")).args(args).env_remove("NILCERT_QUOTIENT_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn p(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn elusive_heisenberg_json() {
    let o = nilcert(&["elusive", &p("heisenberg.pcp"), "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), r#"{"elusive":[]}"#);
    let o = nilcert(&["elusive", &p("h2.pcp"), "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let classes = v["elusive"].as_array().unwrap();
    assert!(classes.iter().any(|c| c["outer_order"] == 2));
}

#[test]
fn separate_torsion_free_abelian() {
    let o = nilcert(&["separate-torsion", &p("z2.pcp")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("subgroup generators [(3,0),(0,3)]"), "{}", stdout(&o));
    let o = nilcert(&["separate-torsion", &p("z1.pcp")]);
    assert!(stdout(&o).contains("subgroup generators [(3)]"));
}

#[test]
fn matrix_commands() {
    let o = nilcert(&["expm", "--dim", "2", "--entries", "0 1; 0 0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("1 1; 0 1"));
    let o = nilcert(&["logm", "--dim", "3", "--entries", "1 1 0; 0 1 1; 0 0 1"]);
    assert_eq!(stdout(&o).lines().next(), Some("0 1 -1/2; 0 0 1; 0 0 0"));
    let o = nilcert(&["expm", "--dim", "2", "--entries", "0 1; 1 0"]);
    assert_eq!(code(&o), 1);
    let o = nilcert(&["expm", "--dim", "3", "--entries", "0 1; 0 0"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn normal_forms_and_series() {
    let o = nilcert(&["nf", &p("heisenberg.pcp"), "y x", "x^2 z^-1", "", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let forms: Vec<&Value> = v["normal_forms"].as_array().unwrap().iter().map(|f| &f["exponents"]).collect();
    assert_eq!(forms, vec![&serde_json::json!([1, 1, -1]), &serde_json::json!([2, 0, -1]), &serde_json::json!([0, 0, 0])]);
    let o = nilcert(&["ucs", &p("h2.pcp"), "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], 2);
    assert_eq!(v["terms"][1], serde_json::json!([[0, 0, 1]]));
    let o = nilcert(&["torsion", &p("heisenberg.pcp"), "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["order"].as_u64(), v["m"].as_i64()), (Some(1), Some(1)));
}

#[test]
fn exit_codes() {
    let o = nilcert(&["ucs", &p("missing.pcp")]);
    assert_eq!(code(&o), 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pcp");
    std::fs::write(&bad, "group g\ngen x order inf\nconj x ^ q = x\n").unwrap();
    let o = nilcert(&["ucs", bad.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["code"], "parse-error");
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3, column 10"));
    assert_eq!(code(&nilcert(&["no-such-command"])), 1);
    assert_eq!(code(&nilcert(&["--help"])), 0);

    let tuples = p("heisenberg_inequivalent.tuples");
    let o = nilcert(&["whitehead", &p("heisenberg.pcp"), &tuples, "--budget", "0", "--quotient-cap", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("unknown"));
    let o = nilcert(&["separate-torsion", &p("h2.pcp"), "--budget", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn quotient_cap_environment_variable() {
    let run = |cap: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_nilcert"));
        c.args(["separate-torsion", &p("h2.pcp")]);
        match cap {
            Some(v) => c.env("NILCERT_QUOTIENT_CAP", v),
            None => c.env_remove("NILCERT_QUOTIENT_CAP"),
        };
        c.output().unwrap()
    };
    let o = run(Some("1"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap-exceeded"));
    assert_eq!(code(&run(Some("many"))), 1);
    assert_eq!(code(&run(None)), 0);
}

fn report_round_trip(args: &[&str], expected_code: i32) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut full: Vec<&str> = args.to_vec();
    let ps = path.to_string_lossy().into_owned();
    full.extend(["--report", &ps]);
    let o = nilcert(&full);
    assert_eq!(code(&o), expected_code, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let required = schema("run-report.schema.json")["required"].as_array().unwrap().clone();
    for key in required {
        assert!(report.get(key.as_str().unwrap()).is_some(), "missing {key}");
    }
    let v = nilcert(&["verify", &ps]);
    assert_eq!(code(&v), 0, "{args:?}: {}", String::from_utf8_lossy(&v.stderr));
    assert!(stdout(&v).trim_end().ends_with("verified"));
    report
}

#[test]
fn every_report_verifies() {
    let h = p("heisenberg.pcp");
    let h2 = p("h2.pcp");
    report_round_trip(&["nf", &h, "y x", "z^3"], 0);
    report_round_trip(&["ucs", &h2], 0);
    report_round_trip(&["torsion", &h2], 0);
    report_round_trip(&["elusive", &h2], 0);
    report_round_trip(&["separate-torsion", &h2], 0);
    report_round_trip(&["whitehead", &h, &p("heisenberg_equivalent.tuples")], 0);
    report_round_trip(&["whitehead", &h, &p("heisenberg_inequivalent.tuples")], 0);
    report_round_trip(&["whitehead", &p("z2.pcp"), &p("z2.tuples")], 0);
    report_round_trip(&["gog-iso", &p("rotation_source.gog"), &p("rotation_target.gog")], 0);
    report_round_trip(&["gog-iso", &p("heisenberg_amalgam.gog"), &p("heisenberg_amalgam.gog")], 0);
    report_round_trip(&["embed", &h2, "--seed", "7"], 0);
    report_round_trip(&["expm", "--dim", "3", "--entries", "0 1 2/3; 0 0 -1; 0 0 0"], 0);
    report_round_trip(&["logm", "--dim", "2", "--entries", "1 5; 0 1"], 0);
    let r = report_round_trip(&["whitehead", &h, &p("heisenberg_inequivalent.tuples"), "--budget", "0", "--quotient-cap", "1"], 2);
    assert_eq!(r["status"], "unknown");
}

#[test]
fn tampered_reports_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let ps = path.to_string_lossy().into_owned();
    assert_eq!(code(&nilcert(&["elusive", &p("h2.pcp"), "--report", &ps])), 0);
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();

    let mut r = original.clone();
    r["result"]["elusive"][0]["outer_order"] = 3.into();
    std::fs::write(&path, r.to_string()).unwrap();
    assert_eq!(code(&nilcert(&["verify", &ps])), 1);

    let mut r = original.clone();
    r["result"]["elusive"] = serde_json::json!([]);
    std::fs::write(&path, r.to_string()).unwrap();
    assert_eq!(code(&nilcert(&["verify", &ps])), 1);

    let mut r = original;
    let content = r["inputs"][0]["content"].as_str().unwrap().replace("z^-2", "z^-1");
    r["inputs"][0]["content"] = content.into();
    std::fs::write(&path, r.to_string()).unwrap();
    let o = nilcert(&["verify", &ps]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hash"));
}

#[test]
fn bare_certificate_verifies() {
    let o = nilcert(&["separate-torsion", &p("h2.pcp"), "--json"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    std::fs::write(&path, stdout(&o)).unwrap();
    assert_eq!(code(&nilcert(&["verify", path.to_str().unwrap()])), 0);
    let mut cert: Value = serde_json::from_str(&stdout(&o)).unwrap();
    cert["index"] = 7.into();
    std::fs::write(&path, cert.to_string()).unwrap();
    assert_eq!(code(&nilcert(&["verify", path.to_str().unwrap()])), 1);
}

#[test]
fn pcp_files_round_trip() {
    for name in ["heisenberg.pcp", "h2.pcp", "z2.pcp", "z1.pcp"] {
        let p1 = pcp::parse(&std::fs::read_to_string(data(name)).unwrap()).unwrap();
        let text = pcp::to_string(&p1);
        let p2 = pcp::parse(&text).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(pcp::to_string(&p2), text);
    }
}

#[test]
fn gog_files_round_trip() {
    for name in ["rotation_source.gog", "rotation_target.gog", "heisenberg_amalgam.gog"] {
        let path = data(name);
        let resolve = |f: &str| Ok(std::fs::read_to_string(path.parent().unwrap().join(f)).unwrap());
        let d1 = parse_gog(&std::fs::read_to_string(&path).unwrap(), &resolve).unwrap();
        let text = d1.to_json().unwrap();
        let d2 = parse_gog(&text, &resolve).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(d2.to_json().unwrap(), text);
    }
}

#[test]
fn gog_iso_refutes_different_abelianizations() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::fs::read_to_string(data("rotation_source.gog")).unwrap();
    let other = dir.path().join("scaled.gog");
    std::fs::write(&other, src.replace("[[1, 0]]", "[[2, 0]]")).unwrap();
    let o = nilcert(&["gog-iso", &p("rotation_source.gog"), other.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "not-equivalent");
    assert_eq!(v["refutation"]["kind"], "abelianization");
}

#[test]
fn schemas_are_json() {
    for name in ["run-report.schema.json", "gog.schema.json", "certificate.schema.json"] {
        assert!(schema(name)["$schema"].is_string());
    }
}
