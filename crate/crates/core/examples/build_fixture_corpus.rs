//! Write the scripted fixture repositories, `dataset.jsonl` and
//! `manifest.json` to a directory.
//!
//! Run with `cargo run --example build_fixture_corpus -- /tmp/fixtures`, then
//! `codemapper eval --dataset /tmp/fixtures/dataset.jsonl`.

use std::path::PathBuf;

use codemapper::fixtures::build_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("codemapper-fixtures"));
    let (dataset, records) = build_corpus(&root)?;
    for r in &records {
        println!("{:<14} {} -> {}", r.id.as_deref().unwrap_or("-"), r.repo, &r.target_commit[..10]);
    }
    println!("dataset: {}", dataset.display());
    Ok(())
}
