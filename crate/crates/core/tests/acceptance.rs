//! Acceptance gate: runs every reproduction criterion and prints one
//! pass/fail line per criterion. Run with `--nocapture` to see the lines
//! as they are produced; on failure the collected lines are part of the
//! panic message.

use quartic_pell::acceptance;

#[test]
fn acceptance_criteria() {
    let mut lines = Vec::new();
    let ok = acceptance::run_all(false, &mut |c| {
        let line = c.line();
        println!("{line}");
        lines.push((c.pass, line));
    });
    assert_eq!(lines.len(), 8, "expected all eight criteria to report");
    assert!(
        ok,
        "acceptance criteria failed:\n{}",
        lines
            .iter()
            .filter(|(pass, _)| !pass)
            .map(|(_, l)| l.as_str())
            .collect::<Vec<_>>()
            .join("\n")
    );
}
