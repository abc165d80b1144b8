//! Rank candidates by context-aware Levenshtein similarity.
//!
//! Run with `cargo run --example score_candidates`.

use codemapper::candidates::{Candidate, Origin};
use codemapper::region::{CharacterRange, FileText};
use codemapper::select::{levenshtein_similarity, select_target, Scorer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("sim(kitten, sitting) = {:.4}", levenshtein_similarity("kitten", "sitting"));

    let source = FileText::new("header\nlimit = 10\nfooter\n");
    let target = FileText::new("header\nlimit = 10\nfooter\nother\nlimit = 10\nend\n");
    let region = CharacterRange::new(2, 1, 2, 10)?;
    let scorer = Scorer::new(&source, region, &target, None, 1);
    let candidates = vec![
        Candidate::located("t", "f", CharacterRange::new(5, 1, 5, 10)?, Origin::Search)?,
        Candidate::located("t", "f", CharacterRange::new(2, 1, 2, 10)?, Origin::Search)?,
        Candidate::deleted(Origin::Diff, 2),
    ];
    let selection = select_target(&scorer, candidates);
    for c in &selection.ranked {
        let score = c.score.unwrap_or(0.0);
        match c.range() {
            Some(r) => println!("{score:.4} {:<8} {r}", c.origin.as_str()),
            None => println!("{score:.4} {:<8} deleted", c.origin.as_str()),
        }
    }
    Ok(())
}
