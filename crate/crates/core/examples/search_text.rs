//! Locate every exact occurrence of a region's text in the target file.
//!
//! Run with `cargo run --example search_text`.

use codemapper::candidates::TargetSide;
use codemapper::region::FileText;
use codemapper::search::search_candidates;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let target = FileText::new("conn = connect(host, port, timeout=30, retries=3)\nretry(timeout=30)\n");
    let side = TargetSide {
        commit: "target",
        file: "session.py",
        text: &target,
    };
    for candidate in search_candidates("timeout=30", side)? {
        let range = candidate.range().expect("search candidates are located");
        println!("{range} {:?}", target.extract(&range)?);
    }
    Ok(())
}
