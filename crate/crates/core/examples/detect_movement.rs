//! Find lines that a diff reports as deleted but that reappear verbatim or
//! re-indented elsewhere.
//!
//! Run with `cargo run --example detect_movement`.

use codemapper::candidates::TargetSide;
use codemapper::movement::detect_movement_kinds;
use codemapper::parse::parse_line_diff;
use codemapper::region::{CharacterRange, FileText};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = FileText::new("a = 1\nb = 2\nc = 3\nlog(a)\n");
    let target = FileText::new("b = 2\nc = 3\nif a:\n    a = 1\nlog(a)\n");
    // what `git diff -U0` reports for this change
    let hunks = parse_line_diff("@@ -1 +0,0 @@\n-a = 1\n@@ -3,0 +3,2 @@\n+if a:\n+    a = 1\n")?;
    let side = TargetSide {
        commit: "target",
        file: "demo.py",
        text: &target,
    };
    let region = CharacterRange::new(1, 1, 1, 5)?;
    for (candidate, kind) in detect_movement_kinds(&hunks, &region, &source, side)? {
        let range = candidate.range().expect("movement candidates are located");
        println!("{kind:?} movement to {range}: {:?}", target.extract(&range)?);
    }
    Ok(())
}
