//! Acceptance gate: runs every registered check and prints one line each.

use regulus::selftest;

#[test]
fn acceptance() {
    let outcomes = selftest::run_all(0xD1CE);
    for o in &outcomes {
        println!("{}", selftest::render_line(o, false));
    }
    assert!(
        selftest::all_passed(&outcomes),
        "acceptance checks failed:\n{}",
        outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| selftest::render_line(o, false))
            .collect::<Vec<_>>()
            .join("\n")
    );
}
