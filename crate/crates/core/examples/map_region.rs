//! Map a region across two commits of a scripted repository.
//!
//! Run with `cargo run --example map_region`.

use codemapper::fixtures::{find_range, ScriptedRepo};
use codemapper::mapper::{CodeMapper, MapRequest};
use codemapper::select::MapperConfig;

const BEFORE: &str = "def area(w, h):\n    return w * h\n\n\ndef perimeter(w, h):\n    return 2 * (w + h)\n";
const AFTER: &str = "import math\n\n\ndef area(w, h):\n    return abs(w * h)\n\n\ndef perimeter(w, h):\n    return 2 * (w + h)\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut repo = ScriptedRepo::init(dir.path())?;
    let before = repo.commit(&[("shapes.py", Some(BEFORE))], "add shapes")?;
    let after = repo.commit(&[("shapes.py", Some(AFTER))], "guard against negative sizes")?;

    let mapper = CodeMapper::open(dir.path(), MapperConfig::default())?;
    for needle in ["return 2 * (w + h)", "w * h"] {
        let range = find_range(BEFORE, needle, 0).expect("needle present");
        let result = mapper.map(&MapRequest {
            source_commit: before.clone(),
            file: "shapes.py".into(),
            range,
            target_commit: after.clone(),
        })?;
        println!("{range} -> {}", result.to_json(false, false));
    }
    Ok(())
}
