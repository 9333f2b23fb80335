//! Runs the full property suite and prints one status line per check.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use iwahori::verify;

#[test]
fn all_checks_pass() {
    let reports = verify::run_all(0x1209_1961);
    let mut failed = 0;
    for r in &reports {
        println!("{}", r.status_line());
        if !r.passed {
            failed += 1;
        }
    }
    assert_eq!(failed, 0, "{failed} checks failed");
}
