//! Run the fixture corpus with each component disabled, then across
//! context sizes.
//!
//! Run with `cargo run --example ablation_sweep`.

use codemapper::eval::{Aggregate, Evaluator};
use codemapper::fixtures::build_corpus;
use codemapper::select::MapperConfig;

fn row(label: &str, a: &Aggregate) {
    let dist = a.mean_char_distance.map_or("-".to_owned(), |d| format!("{d:.1}"));
    println!("{label:<12} exact {:.3}  f1 {:.3}  char dist {dist}", a.exact_rate, a.mean_f1);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = tempfile::tempdir()?;
    let (dataset, records) = build_corpus(root.path())?;
    let mut evaluator = Evaluator::for_dataset(&dataset);
    let base = MapperConfig::default();
    for (variant, report) in evaluator.ablation(&records, base)? {
        row(variant.as_str(), &report.aggregate);
    }
    for (n, report) in evaluator.context_sweep(&records, base, &[0, 1, 3, 5, 10, 15, 20])? {
        row(&format!("context={n}"), &report.aggregate);
    }
    Ok(())
}
