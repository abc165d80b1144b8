//! Phase 2: score candidates against the source region and pick one.
//!
//! Each candidate is compared with the source region using Levenshtein
//! similarity over the region text surrounded by up to `n` unchanged lines
//! above and below it. Movement candidates are compared without context.

use std::cmp::Ordering;

use crate::candidates::{Candidate, Origin};
use crate::parse::Hunk;
use crate::region::{CharacterRange, FileText, Region};

/// Pipeline switches and the context size. All components are on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MapperConfig {
    /// Unchanged lines added above and below a region for scoring.
    pub context_lines: usize,
    /// Diff-based candidate extraction.
    pub diff: bool,
    /// Character-level refinement of diff candidates.
    pub refinement: bool,
    /// Moved-code detection.
    pub movement: bool,
    /// Exact text search.
    pub search: bool,
    /// Context-aware scoring; when off, regions are compared bare.
    pub context: bool,
}

impl Default for MapperConfig {
    fn default() -> Self {
        Self {
            context_lines: 15,
            diff: true,
            refinement: true,
            movement: true,
            search: true,
            context: true,
        }
    }
}

impl MapperConfig {
    pub fn with_context_lines(mut self, n: usize) -> Self {
        self.context_lines = n;
        self
    }

    /// Context lines actually used for scoring.
    pub fn effective_context(&self) -> usize {
        if self.context {
            self.context_lines
        } else {
            0
        }
    }
}

/// Levenshtein similarity `1 - dist / max(len)` over Unicode scalar values;
/// 1 when both strings are empty.
pub fn levenshtein_similarity(a: &str, b: &str) -> f64 {
    // the shared prefix and suffix never contribute edits; trimming them
    // keeps the quadratic part small for long, mostly identical contexts
    let prefix: usize = a.chars().zip(b.chars()).take_while(|(x, y)| x == y).map(|(x, _)| x.len_utf8()).sum();
    let (ra, rb) = (&a[prefix..], &b[prefix..]);
    let suffix: usize = ra
        .chars()
        .rev()
        .zip(rb.chars().rev())
        .take_while(|(x, y)| x == y)
        .map(|(x, _)| x.len_utf8())
        .sum();
    let (ma, mb) = (&ra[..ra.len() - suffix], &rb[..rb.len() - suffix]);
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    let dist = strsim::levenshtein(ma, mb);
    1.0 - dist as f64 / longest as f64
}

/// Which lines of one file version lie outside every hunk block.
#[derive(Debug, Clone)]
pub struct UnchangedLines {
    changed: Vec<bool>,
}

impl UnchangedLines {
    /// Source-side view: lines inside hunk source blocks are changed.
    pub fn source(hunks: &[Hunk], line_count: usize) -> Self {
        Self::build(hunks.iter().map(|h| h.source.lines()), line_count)
    }

    /// Target-side view: lines inside hunk target blocks are changed.
    pub fn target(hunks: &[Hunk], line_count: usize) -> Self {
        Self::build(hunks.iter().map(|h| h.target.lines()), line_count)
    }

    pub fn all(line_count: usize) -> Self {
        Self {
            changed: vec![false; line_count + 1],
        }
    }

    fn build(blocks: impl Iterator<Item = std::ops::RangeInclusive<usize>>, line_count: usize) -> Self {
        let mut changed = vec![false; line_count + 1];
        for block in blocks {
            for line in block {
                if let Some(slot) = changed.get_mut(line) {
                    *slot = true;
                }
            }
        }
        Self { changed }
    }

    pub fn is_unchanged(&self, line: usize) -> bool {
        line >= 1 && !self.changed.get(line).copied().unwrap_or(true)
    }
}

/// Up to `n` unchanged lines before line `above_before` and from line
/// `below_from` on, nearest first on each side.
fn context_lines<'t>(
    text: &'t FileText,
    unchanged: &UnchangedLines,
    above_before: usize,
    below_from: usize,
    n: usize,
) -> (Vec<&'t str>, Vec<&'t str>) {
    let mut above: Vec<&str> = (1..above_before)
        .rev()
        .filter(|&l| unchanged.is_unchanged(l))
        .take(n)
        .filter_map(|l| text.line(l))
        .collect();
    above.reverse();
    let below = (below_from..=text.line_count())
        .filter(|&l| unchanged.is_unchanged(l))
        .take(n)
        .filter_map(|l| text.line(l))
        .collect();
    (above, below)
}

fn join_context(above: &[&str], middle: Option<&str>, below: &[&str]) -> String {
    let mut parts: Vec<&str> = above.to_vec();
    parts.extend(middle);
    parts.extend_from_slice(below);
    parts.join("\n")
}

/// The region's text with up to `n` unchanged lines above and below it.
pub fn add_context(text: &FileText, range: &CharacterRange, unchanged: &UnchangedLines, n: usize) -> String {
    let region = text.extract(range).unwrap_or("");
    if n == 0 {
        return region.to_owned();
    }
    let (above, below) = context_lines(text, unchanged, range.l1(), range.l2() + 1, n);
    join_context(&above, Some(region), &below)
}

/// Context around an empty region sitting just before line `site`.
pub fn add_context_at_deletion(text: &FileText, site: usize, unchanged: &UnchangedLines, n: usize) -> String {
    if n == 0 {
        return String::new();
    }
    let (above, below) = context_lines(text, unchanged, site, site, n);
    join_context(&above, None, &below)
}

/// Everything the selector needs to score candidates for one mapping.
#[derive(Debug, Clone)]
pub struct Scorer<'a> {
    pub source_text: &'a FileText,
    pub source_range: CharacterRange,
    pub target_text: &'a FileText,
    pub source_unchanged: UnchangedLines,
    pub target_unchanged: UnchangedLines,
    pub context_lines: usize,
}

impl<'a> Scorer<'a> {
    /// Build a scorer; unchanged lines come from the first non-empty line
    /// report (`hunks`), or every line is unchanged when there is none.
    pub fn new(
        source_text: &'a FileText,
        source_range: CharacterRange,
        target_text: &'a FileText,
        hunks: Option<&[Hunk]>,
        context_lines: usize,
    ) -> Self {
        let (source_unchanged, target_unchanged) = match hunks {
            Some(h) => (
                UnchangedLines::source(h, source_text.line_count()),
                UnchangedLines::target(h, target_text.line_count()),
            ),
            None => (
                UnchangedLines::all(source_text.line_count()),
                UnchangedLines::all(target_text.line_count()),
            ),
        };
        Self {
            source_text,
            source_range,
            target_text,
            source_unchanged,
            target_unchanged,
            context_lines,
        }
    }

    fn source_with_context(&self, n: usize) -> String {
        add_context(self.source_text, &self.source_range, &self.source_unchanged, n)
    }

    /// Similarity of `candidate` to the source region, in `[0, 1]`.
    pub fn score(&self, candidate: &Candidate) -> f64 {
        match &candidate.region {
            Region::Located(loc) => {
                let n = if candidate.origin == Origin::Movement { 0 } else { self.context_lines };
                let source = self.source_with_context(n);
                let target = add_context(self.target_text, &loc.range, &self.target_unchanged, n);
                levenshtein_similarity(&source, &target)
            }
            Region::Deleted => {
                let site = candidate.deletion_site.unwrap_or(1);
                let source = self.source_with_context(self.context_lines);
                let target = add_context_at_deletion(self.target_text, site, &self.target_unchanged, self.context_lines);
                levenshtein_similarity(&source, &target)
            }
        }
    }
}

/// The selected region and every candidate, best first.
#[derive(Debug, Clone)]
pub struct Selection {
    pub region: Region,
    pub ranked: Vec<Candidate>,
}

fn rank(a: &Candidate, b: &Candidate) -> Ordering {
    let sa = a.score.unwrap_or(0.0);
    let sb = b.score.unwrap_or(0.0);
    sb.total_cmp(&sa)
        .then(a.origin.cmp(&b.origin))
        .then_with(|| match (a.range(), b.range()) {
            (Some(x), Some(y)) => x.tuple().cmp(&y.tuple()),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => a.deletion_site.cmp(&b.deletion_site),
        })
}

/// Score every candidate and pick the best. Candidates proposing the same
/// region are merged first, keeping the highest-priority origin. An empty
/// candidate list selects `Deleted`.
pub fn select_target(scorer: &Scorer<'_>, candidates: Vec<Candidate>) -> Selection {
    let mut scored: Vec<Candidate> = candidates
        .into_iter()
        .map(|mut c| {
            c.score = Some(scorer.score(&c));
            c
        })
        .collect();
    scored.sort_by(rank);
    let mut ranked: Vec<Candidate> = Vec::new();
    for c in scored {
        if !ranked.iter().any(|r| r.region == c.region) {
            ranked.push(c);
        }
    }
    let region = ranked.first().map(|c| c.region.clone()).unwrap_or(Region::Deleted);
    Selection { region, ranked }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::LineBlock;

    fn r(l1: usize, c1: usize, l2: usize, c2: usize) -> CharacterRange {
        CharacterRange::new(l1, c1, l2, c2).unwrap()
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(levenshtein_similarity("abc", "abc"), 1.0);
        assert_eq!(levenshtein_similarity("", "abc"), 0.0);
        assert_eq!(levenshtein_similarity("", ""), 1.0);
        assert!((levenshtein_similarity("kitten", "sitting") - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
        assert!((levenshtein_similarity("xxkittenyy", "xxsittingyy") - (1.0 - 3.0 / 11.0)).abs() < 1e-12);
    }

    #[test]
    fn context_skips_changed_lines() {
        let text = FileText::new("a\nb\nc\nd\nregion\ne\n");
        let hunk = Hunk {
            source: LineBlock::new(3, 4),
            target: LineBlock::new(3, 4),
            ops: vec![],
            fragments: None,
        };
        let unchanged = UnchangedLines::source(&[hunk], text.line_count());
        assert_eq!(add_context(&text, &r(5, 1, 5, 6), &unchanged, 2), "a\nb\nregion\ne");
        assert_eq!(add_context(&text, &r(5, 1, 5, 6), &unchanged, 0), "region");
        assert_eq!(add_context(&text, &r(1, 1, 1, 1), &UnchangedLines::all(6), 15), "a\nb\nc\nd\nregion\ne");
    }

    #[test]
    fn ties_prefer_diff_then_position() {
        let text = FileText::new("x\nx\n");
        let scorer = Scorer::new(&text, r(1, 1, 1, 1), &text, None, 0);
        let search = Candidate::located("t", "f", r(1, 1, 1, 1), Origin::Search).unwrap();
        let later = Candidate::located("t", "f", r(2, 1, 2, 1), Origin::Diff).unwrap();
        let diff = Candidate::located("t", "f", r(1, 1, 1, 1), Origin::Diff).unwrap();
        let a = select_target(&scorer, vec![search.clone(), later.clone(), diff.clone()]);
        let b = select_target(&scorer, vec![diff, later, search]);
        assert_eq!(a.region, b.region);
        assert_eq!(a.ranked[0].origin, Origin::Diff);
        assert_eq!(a.ranked[0].range(), Some(r(1, 1, 1, 1)));
        assert_eq!(a.ranked.len(), 2);
    }

    #[test]
    fn empty_candidates_select_deleted() {
        let text = FileText::new("x\n");
        let scorer = Scorer::new(&text, r(1, 1, 1, 1), &text, None, 15);
        assert!(select_target(&scorer, vec![]).region.is_deleted());
    }
}
