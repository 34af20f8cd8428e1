//! The acceptance criteria as a standalone test binary: one line per criterion,
//! followed by the tamper check. Exits nonzero if anything fails.

use std::process::ExitCode;

use crystalline::acceptance::{genuine_polys, run_criterion, run_suite, tampered_polys};

const LAWS: [&str; 5] = [
    "associativity of addition",
    "commutativity of addition",
    "associativity of multiplication",
    "commutativity of multiplication",
    "distributivity",
];

fn main() -> ExitCode {
    let outcomes = run_suite("all", &genuine_polys).expect("suite \"all\" exists");
    for o in &outcomes {
        println!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    let mut ok = outcomes.len() == 13 && passed == outcomes.len();

    // The witt criterion must catch a corrupted structure polynomial by name.
    let tampered = run_criterion(1, &tampered_polys).expect("criterion 1 exists");
    let named = LAWS.iter().any(|l| tampered.detail.contains(&format!("{l} fails for p = 3")));
    let caught = !tampered.passed && named;
    println!("[{}] tamper check: {}", if caught { "PASS" } else { "FAIL" }, tampered.detail);
    ok &= caught;

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
