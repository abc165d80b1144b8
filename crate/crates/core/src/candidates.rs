//! Candidate regions derived from line-level diff hunks.
//!
//! Every hunk is classified by how its source block relates to the lines of
//! the source region. Hunks entirely above the region shift it; hunks that
//! touch it decide where the candidate starts and ends. Boundaries that fall
//! inside a modified hunk are tightened with [`crate::refine`].

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::parse::Hunk;
use crate::refine::{refine_end, refine_start, settle_end, settle_start};
use crate::region::{CharacterRange, FileText, Position, Region};

/// How a hunk's source block relates to the source region's lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlapRelation {
    /// The hunk replaces every line of the region.
    FullyCovered,
    /// The hunk covers the region's first line and stops inside it.
    Top,
    /// The hunk lies strictly inside the region.
    Middle,
    /// The hunk starts inside the region and covers its last line.
    Bottom,
    /// The hunk does not touch the region's lines.
    Disjoint,
}

/// Classify a hunk against the region lines `l1..=l2`.
///
/// A pure insertion (empty source block `-a,0`, stored as `start = a + 1`,
/// `end = a`) sits between lines `a` and `a + 1`: it is `Middle` when both
/// of those lines belong to the region and `Disjoint` otherwise.
pub fn classify_overlap(hunk: &Hunk, range: &CharacterRange) -> OverlapRelation {
    let (hs, he) = (hunk.source.start, hunk.source.end);
    let (r1, r2) = (range.l1(), range.l2());
    if hunk.source.is_empty() {
        return if r1 < hs && hs <= r2 {
            OverlapRelation::Middle
        } else {
            OverlapRelation::Disjoint
        };
    }
    if he < r1 || hs > r2 {
        OverlapRelation::Disjoint
    } else if hs <= r1 && he >= r2 {
        OverlapRelation::FullyCovered
    } else if hs <= r1 {
        OverlapRelation::Top
    } else if he >= r2 {
        OverlapRelation::Bottom
    } else {
        OverlapRelation::Middle
    }
}

/// Which detector proposed a candidate. The declaration order is the
/// tie-breaking priority: diff before movement before search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Diff,
    Movement,
    Search,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Diff => "diff",
            Origin::Movement => "movement",
            Origin::Search => "search",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub region: Region,
    pub origin: Origin,
    /// Filled in by the selector.
    pub score: Option<f64>,
    /// For `Deleted` candidates: the candidate-side line the region would
    /// have occupied (lines before it precede the deletion point).
    pub deletion_site: Option<usize>,
}

impl Candidate {
    pub fn located(commit: &str, file: &str, range: CharacterRange, origin: Origin) -> Result<Self> {
        Ok(Self {
            region: Region::new(commit, file, range)?,
            origin,
            score: None,
            deletion_site: None,
        })
    }

    pub fn deleted(origin: Origin, deletion_site: usize) -> Self {
        Self {
            region: Region::Deleted,
            origin,
            score: None,
            deletion_site: Some(deletion_site),
        }
    }

    pub fn range(&self) -> Option<CharacterRange> {
        self.region.location().map(|l| l.range)
    }
}

/// Where candidates live: the target commit and the resolved target path.
#[derive(Debug, Clone, Copy)]
pub struct TargetSide<'a> {
    pub commit: &'a str,
    pub file: &'a str,
    pub text: &'a FileText,
}

/// Candidate-side line of an unchanged source line `line`, given the hunks
/// of one report: the line moves by the net delta of every hunk above it.
pub fn map_unchanged_line(hunks: &[Hunk], line: usize) -> i64 {
    let delta: i64 = hunks.iter().filter(|h| h.source.end < line).map(Hunk::line_delta).sum();
    line as i64 + delta
}

fn position_in(text: &FileText, line: i64, col: usize) -> Option<Position> {
    let line = usize::try_from(line).ok().filter(|l| *l >= 1)?;
    text.line_len(line)?;
    Some(Position::new(line, col))
}

fn out_of_bounds(range: &CharacterRange, text: &FileText) -> Error {
    Error::OutOfBounds {
        range: *range,
        lines: text.line_count(),
    }
}

/// Settle both ends onto real characters and build a range, or `None` if the
/// span holds no characters at all on the candidate side.
fn settle(text: &FileText, start: Position, end: Position) -> Option<CharacterRange> {
    let start = settle_start(text, start)?;
    let end = settle_end(text, end)?;
    if start > end {
        return None;
    }
    CharacterRange::from_positions(start, end).ok()
}

fn full_line_end(text: &FileText, line: usize) -> Position {
    Position::new(line, text.line_len(line).unwrap_or(0))
}

/// Candidates for `source` proposed by one parsed diff report.
///
/// `hunks` must be sorted by source line; word fragments, when attached,
/// are used for refinement if `refine` is set.
pub fn extract_diff_candidates(
    hunks: &[Hunk],
    source: &CharacterRange,
    target: TargetSide<'_>,
    refine: bool,
) -> Result<Vec<Candidate>> {
    let (r1, r2) = (source.l1(), source.l2());
    let mut offset: i64 = 0;
    let mut related: Vec<(OverlapRelation, &Hunk)> = Vec::new();
    let mut covered: BTreeSet<usize> = BTreeSet::new();
    for hunk in hunks {
        let relation = classify_overlap(hunk, source);
        if relation == OverlapRelation::Disjoint {
            if hunk.source.end < r1 {
                offset += hunk.line_delta();
            }
            if hunk.source.start > r2 {
                break;
            }
            continue;
        }
        related.push((relation, hunk));
        covered.extend(hunk.source.lines().filter(|l| (r1..=r2).contains(l)));
        if covered.len() == r2 - r1 + 1 {
            break;
        }
    }

    let mut out: Vec<Candidate> = Vec::new();
    let mut push = |c: Candidate| {
        if !out.iter().any(|o| o.region == c.region) {
            out.push(c);
        }
    };
    let text = target.text;

    if related.is_empty() {
        let shifted = source.shift_lines(offset).ok_or_else(|| out_of_bounds(source, text))?;
        text.check_range(&shifted)?;
        push(Candidate::located(target.commit, target.file, shifted, Origin::Diff)?);
        return Ok(out);
    }

    if let Some((_, hunk)) = related.iter().find(|(r, _)| *r == OverlapRelation::FullyCovered) {
        if hunk.target.is_empty() {
            push(Candidate::deleted(Origin::Diff, hunk.target.start));
            return Ok(out);
        }
        let (ts, te) = (hunk.target.start, hunk.target.end);
        // a replacement made only of blank lines holds no character to map to
        let Some(mut range) = settle(text, Position::new(ts, 1), full_line_end(text, te)) else {
            return Ok(out);
        };
        if refine {
            range = refine_start(source, hunk, range, text).range();
            range = refine_end(source, hunk, range, text).range();
        }
        push(Candidate::located(target.commit, target.file, range, Origin::Diff)?);
        return Ok(out);
    }

    let top = related.iter().find(|(r, _)| *r == OverlapRelation::Top).map(|(_, h)| *h);
    let bottom = related.iter().find(|(r, _)| *r == OverlapRelation::Bottom).map(|(_, h)| *h);

    let mapped_start = |line: usize, col: usize| position_in(text, map_unchanged_line(hunks, line), col);
    let start_of = |top: Option<&Hunk>| -> Option<Position> {
        match top {
            Some(h) => Some(Position::new(h.target.start, 1)),
            None => mapped_start(r1, source.c1()),
        }
    };
    let end_of = |bottom: Option<&Hunk>| -> Option<Position> {
        match bottom {
            Some(h) if h.target.is_empty() => Some(Position::new(h.target.end, usize::MAX)),
            Some(h) => Some(full_line_end(text, h.target.end)),
            None => mapped_start(r2, source.c2()),
        }
    };
    let finish = |start: Position, end: Position, top: Option<&Hunk>, bottom: Option<&Hunk>| -> Option<CharacterRange> {
        let mut range = settle(text, start, end)?;
        if refine {
            if let Some(h) = top {
                range = refine_start(source, h, range, text).range();
            }
            if let Some(h) = bottom {
                range = refine_end(source, h, range, text).range();
            }
        }
        Some(range)
    };

    let start = start_of(top).ok_or_else(|| out_of_bounds(source, text))?;
    let end = end_of(bottom).ok_or_else(|| out_of_bounds(source, text))?;
    if let Some(range) = finish(start, end, top, bottom) {
        push(Candidate::located(target.commit, target.file, range, Origin::Diff)?);
    }

    // With changes at both ends the code may have been split apart; also
    // offer each end on its own, bounded by the nearest other related hunk.
    if let (Some(top_h), Some(bottom_h)) = (top, bottom) {
        let after_top = related
            .iter()
            .map(|(_, h)| *h)
            .find(|h| h.source.start > top_h.source.end)
            .map(|h| h.source.start)
            .unwrap_or(bottom_h.source.start);
        let top_end_line = after_top - 1;
        if let Some(end) = mapped_start(top_end_line, usize::MAX) {
            if let Some(range) = finish(start, end, Some(top_h), None) {
                push(Candidate::located(target.commit, target.file, range, Origin::Diff)?);
            }
        }
        let before_bottom = related
            .iter()
            .rev()
            .map(|(_, h)| *h)
            .find(|h| h.source.end < bottom_h.source.start && !h.source.is_empty())
            .map(|h| h.source.end)
            .unwrap_or(top_h.source.end);
        if let Some(begin) = mapped_start(before_bottom + 1, 1) {
            if let Some(range) = finish(begin, end, None, Some(bottom_h)) {
                push(Candidate::located(target.commit, target.file, range, Origin::Diff)?);
            }
        }
    }
    Ok(out)
}

/// Candidates from every report, de-duplicated by region.
pub fn extract_all(
    reports: &[Vec<Hunk>],
    source: &CharacterRange,
    target: TargetSide<'_>,
    refine: bool,
) -> Result<Vec<Candidate>> {
    let mut all: Vec<Candidate> = Vec::new();
    for hunks in reports {
        for c in extract_diff_candidates(hunks, source, target, refine)? {
            if !all.iter().any(|o| o.region == c.region) {
                all.push(c);
            }
        }
    }
    Ok(all)
}
