//! Tighten a line-level candidate to the characters that replaced the
//! source region, using git's porcelain word diff.
//!
//! Run with `cargo run --example refine_word_diff`.

use codemapper::git::{Algorithm, DiffConfig, GitGateway, Granularity};
use codemapper::parse::{parse_line_diff, parse_word_diff};
use codemapper::refine::{refine_end, refine_start};
use codemapper::region::{CharacterRange, FileText};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let (old, new) = (dir.path().join("old.py"), dir.path().join("new.py"));
    std::fs::write(&old, "x = values.old\n")?;
    std::fs::write(&new, "x = values.updated\n")?;
    let (source, target) = (FileText::new("x = values.old\n"), FileText::new("x = values.updated\n"));

    let gateway = GitGateway::open(dir.path()).or_else(|_| {
        std::process::Command::new("git").arg("init").arg("-q").arg(dir.path()).status()?;
        GitGateway::open(dir.path())
    })?;
    let config = |granularity| DiffConfig {
        algorithm: Algorithm::Myers,
        granularity,
    };
    let line = gateway.diff_paths(config(Granularity::Line), &old, &new)?;
    let word = gateway.diff_paths(config(Granularity::Word), &old, &new)?;
    let mut hunk = parse_line_diff(&line.text)?.remove(0);
    hunk.fragments = parse_word_diff(&word.text, &source, &target)?.remove(0).fragments;
    println!("fragments: {:?}", hunk.fragments);

    let region = CharacterRange::new(1, 12, 1, 14)?; // "old"
    let coarse = CharacterRange::new(1, 1, 1, target.line_len(1).unwrap_or(1))?;
    let start = refine_start(&region, &hunk, coarse, &target).range();
    let refined = refine_end(&region, &hunk, start, &target).range();
    println!("coarse  {coarse} {:?}", target.extract(&coarse)?);
    println!("refined {refined} {:?}", target.extract(&refined)?);
    Ok(())
}
