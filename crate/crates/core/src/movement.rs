//! Detection of code that was deleted in one place and re-added elsewhere.
//!
//! Only regions whose every line is removed by the diff are considered. The
//! region's lines are looked up among the consecutive added lines of each
//! hunk: verbatim (vertical movement) or with different indentation
//! (horizontal movement, columns shifted by the indentation change).

use crate::candidates::{Candidate, Origin, TargetSide};
use crate::error::Result;
use crate::parse::{Hunk, OpKind};
use crate::region::{CharacterRange, FileText, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MovementKind {
    Vertical,
    Horizontal,
}

/// True when every line of the region lies in the non-empty source block of
/// some hunk.
pub fn region_fully_deleted(hunks: &[Hunk], source: &CharacterRange) -> bool {
    (source.l1()..=source.l2())
        .all(|line| hunks.iter().any(|h| !h.source.is_empty() && h.source.contains(line)))
}

fn indent(line: &str) -> usize {
    line.chars().take_while(|c| c.is_whitespace()).count()
}

fn shift_col(col: usize, from: &str, to: &str, to_len: usize) -> usize {
    let shifted = col as i64 + indent(to) as i64 - indent(from) as i64;
    shifted.clamp(1, to_len.max(1) as i64) as usize
}

/// Moved-code candidates in one parsed report, with the kind of movement.
pub fn detect_movement_kinds(
    hunks: &[Hunk],
    source: &CharacterRange,
    source_text: &FileText,
    target: TargetSide<'_>,
) -> Result<Vec<(Candidate, MovementKind)>> {
    let mut out: Vec<(Candidate, MovementKind)> = Vec::new();
    if !region_fully_deleted(hunks, source) {
        return Ok(out);
    }
    let lines: Vec<&str> = (source.l1()..=source.l2())
        .map(|l| source_text.line(l).unwrap_or(""))
        .collect();
    if lines.iter().all(|l| l.trim().is_empty()) {
        return Ok(out);
    }
    let n = lines.len();
    for hunk in hunks {
        let added: Vec<(usize, &str)> = hunk
            .ops
            .iter()
            .filter(|op| op.kind == OpKind::Add)
            .filter_map(|op| Some((op.target_line?, op.text.as_str())))
            .collect();
        if added.len() < n {
            continue;
        }
        for window in added.windows(n) {
            // the added lines must be consecutive in the target
            if window.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
                continue;
            }
            let (first, last) = (window[0].0, window[n - 1].0);
            let kind = if window.iter().zip(&lines).all(|((_, t), s)| t == s) {
                MovementKind::Vertical
            } else if window.iter().zip(&lines).all(|((_, t), s)| t.trim() == s.trim()) {
                MovementKind::Horizontal
            } else {
                continue;
            };
            let (c1, c2) = match kind {
                MovementKind::Vertical => (source.c1(), source.c2()),
                MovementKind::Horizontal => {
                    let first_len = target.text.line_len(first).unwrap_or(0);
                    let last_len = target.text.line_len(last).unwrap_or(0);
                    (
                        shift_col(source.c1(), lines[0], window[0].1, first_len + usize::from(n > 1)),
                        shift_col(source.c2(), lines[n - 1], window[n - 1].1, last_len),
                    )
                }
            };
            let Ok(range) = CharacterRange::from_positions(Position::new(first, c1), Position::new(last, c2)) else {
                continue;
            };
            if target.text.check_range(&range).is_err() {
                continue;
            }
            let candidate = Candidate::located(target.commit, target.file, range, Origin::Movement)?;
            if !out.iter().any(|(c, _)| c.region == candidate.region) {
                out.push((candidate, kind));
            }
        }
    }
    Ok(out)
}

/// Moved-code candidates in one parsed report.
pub fn detect_movement(
    hunks: &[Hunk],
    source: &CharacterRange,
    source_text: &FileText,
    target: TargetSide<'_>,
) -> Result<Vec<Candidate>> {
    Ok(detect_movement_kinds(hunks, source, source_text, target)?
        .into_iter()
        .map(|(c, _)| c)
        .collect())
}
