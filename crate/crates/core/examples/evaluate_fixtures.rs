//! Build the scripted fixture corpus and evaluate the full pipeline on it.
//!
//! Run with `cargo run --example evaluate_fixtures`.

use codemapper::eval::Evaluator;
use codemapper::fixtures::build_corpus;
use codemapper::select::MapperConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = tempfile::tempdir()?;
    let (dataset, records) = build_corpus(root.path())?;
    let report = Evaluator::for_dataset(&dataset).evaluate(&records, MapperConfig::default())?;
    for r in &report.records {
        let kind = r.outcome.map(|o| o.kind.as_str()).unwrap_or("error");
        println!("{:<14} {:<16} {}", r.id, kind, r.error.as_deref().unwrap_or(""));
    }
    let a = &report.aggregate;
    println!(
        "exact {}/{}  overlapping {}  mean F1 {:.3}",
        a.exact, a.records, a.overlapping, a.mean_f1
    );
    Ok(())
}
