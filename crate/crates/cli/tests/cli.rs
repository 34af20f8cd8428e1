use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_crystalline"));
    c.env_remove("CRYSTALLINE_PRECISION");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap().trim_end().to_string()
}

fn examples_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

#[test]
fn census_mass_at_13() {
    let out = stdout(&run(&["census", "--p", "13", "--json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "census");
    assert_eq!(v["payload"]["mass"], "1/2");
}

#[test]
fn standard_crystal_pipes_into_hodge() {
    let doc = run(&["crystal", "standard", "--kind", "N", "--r", "2", "--s", "3", "--p", "5", "--n", "6"]);
    let hodge = run_stdin(&["crystal", "hodge", "-"], &doc.stdout);
    assert_eq!(stdout(&hodge), "[1,2]");
}

#[test]
fn gm_height_over_f3() {
    assert_eq!(stdout(&run(&["fgl", "height", "--gm", "--p", "3"])), "Finite(1)");
    assert_eq!(stdout(&run(&["fgl", "height", "--ga", "--p", "3"])), "ExceedsBound(4)");
}

#[test]
fn newton_and_hodge_compose_into_compare() {
    let m = run(&["crystal", "standard", "--kind", "M", "--r", "2", "--s", "3", "--p", "3", "--n", "6"]);
    let newton = run_stdin(&["crystal", "newton", "-", "--json"], &m.stdout);
    let hodge = run_stdin(&["crystal", "hodge", "-", "--json"], &m.stdout);
    let (n, h) = (stdout(&newton), stdout(&hodge));
    assert_eq!(stdout(&run(&["polygon", "compare", &n, &h])), "upper lies on or above lower; endpoints agree");
    assert!(stdout(&run(&["polygon", "compare", &h, &n])).starts_with("upper lies below lower"));
}

#[test]
fn precision_comes_from_the_environment() {
    let out = bin()
        .args(["crystal", "standard", "--kind", "M", "--r", "1", "--s", "2", "--p", "3"])
        .env("CRYSTALLINE_PRECISION", "5")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["payload"]["precision"], "5");
}

#[test]
fn seed_controls_randomness() {
    let a = stdout(&run(&["witt", "random", "--p", "5", "--n", "3", "--degree", "2", "--seed", "7"]));
    let b = stdout(&run(&["witt", "random", "--p", "5", "--n", "3", "--degree", "2", "--seed", "7"]));
    let c = stdout(&run(&["witt", "random", "--p", "5", "--n", "3", "--degree", "2"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn witt_arithmetic_matches_integers() {
    let seven = stdout(&run(&["witt", "fromint", "--m", "7", "--p", "3", "--n", "3"]));
    let five = stdout(&run(&["witt", "fromint", "--m", "5", "--p", "3", "--n", "3"]));
    let product = stdout(&run(&["witt", "mul", &seven, &five]));
    assert_eq!(product, stdout(&run(&["witt", "fromint", "--m", "35", "--p", "3", "--n", "3"])));
    let sum = stdout(&run(&["witt", "add", &seven, &five]));
    assert_eq!(sum, stdout(&run(&["witt", "fromint", "--m", "12", "--p", "3", "--n", "3"])));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["census"]).status.code(), Some(2));
    assert_eq!(run(&["crystal", "hodge", "/no/such/file.json"]).status.code(), Some(2));
    let domain = run(&["crystal", "standard", "--kind", "M", "--r", "2", "--s", "4", "--p", "3"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).contains("gcd"));
    assert_eq!(run(&["census", "--p", "12"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn bundled_examples_round_trip() {
    let mut files: Vec<PathBuf> = std::fs::read_dir(examples_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    assert!(files.len() >= 12);
    let kinds: std::collections::BTreeSet<String> = files
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(f).unwrap();
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            v["kind"].as_str().unwrap().to_string()
        })
        .collect();
    assert_eq!(kinds.len(), 12, "{kinds:?}");
    let args: Vec<String> = std::iter::once("validate".to_string()).chain(files.iter().map(|f| f.display().to_string())).collect();
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = stdout(&run(&refs));
    assert_eq!(out.lines().count(), files.len());
}

#[test]
fn k3_example_is_supersingular_with_artin_one() {
    let k3 = examples_dir().join("k3crystal_sigma1.json");
    let k3 = k3.to_str().unwrap();
    assert_eq!(stdout(&run(&["k3", "ss", k3])), "true");
    assert_eq!(stdout(&run(&["k3", "artin", k3])), "1");
    assert!(stdout(&run(&["k3", "axioms", k3])).lines().all(|l| l.ends_with("ok")));
}

#[test]
fn quartic_and_strata_verbs() {
    let h = run_stdin(&["quartic", "h2", "--p", "5", "--poly", "-"], b"x0^4 + x1^4 + x2^4 + x3^4\n");
    assert_eq!(stdout(&h), "4 (ordinary)");
    let h = run_stdin(&["quartic", "h2", "--p", "7", "--poly", "-"], b"x0^4 + x1^4 + x2^4 + x3^4\n");
    assert_eq!(stdout(&h), "0 (not ordinary)");
    assert_eq!(stdout(&run(&["strata", "class", "--i", "2", "--p", "5"])), "4 · λ1^1");
    assert!(stdout(&run(&["strata", "cosets"])).starts_with("20 cosets"));
    assert!(stdout(&run(&["check", "iam", "--rho", "22", "--height", "inf"])) == "consistent");
}

#[test]
fn acceptance_suite_and_tamper_smoke_test() {
    let ok = run(&["acceptance", "census"]);
    let text = stdout(&ok);
    assert!(text.contains("[PASS] criterion 10"), "{text}");
    let tampered = run(&["acceptance", "witt", "--tamper"]);
    assert_eq!(tampered.status.code(), Some(1));
    let text = String::from_utf8_lossy(&tampered.stdout);
    assert!(text.contains("[FAIL] criterion  1") && text.contains("fails for p = 3"), "{text}");
    assert_eq!(run(&["acceptance", "nosuch"]).status.code(), Some(2));
}

#[test]
fn schemas_cover_every_example() {
    let schema_dir = examples_dir().join("../schema");
    for entry in std::fs::read_dir(examples_dir()).unwrap() {
        let path = entry.unwrap().path();
        let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let kind = doc["kind"].as_str().unwrap();
        let schema: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(schema_dir.join(format!("{kind}.json"))).unwrap()).unwrap();
        assert_eq!(schema["properties"]["kind"]["const"], kind);
        let payload = &schema["properties"]["payload"];
        let Some(required) = payload["required"].as_array() else { continue };
        for key in required {
            let key = key.as_str().unwrap();
            assert!(doc["payload"].get(key).is_some(), "{} lacks {key}", path.display());
        }
    }
}
