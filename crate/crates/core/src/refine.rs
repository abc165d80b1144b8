//! Character-level refinement of coarse, line-granular candidate ranges.
//!
//! The walk runs over a hunk's word fragments, advancing a source-side and
//! a candidate-side cursor together. Once the source cursor reaches the
//! region boundary, the boundary is carried over to the candidate side: an
//! unchanged character maps to itself, and a character inside a deleted
//! fragment maps into the added fragment that replaced it, skipping the part
//! both fragments share before (for the start) or after (for the end) the
//! boundary.

use crate::parse::{Fragment, FragmentKind, Hunk};
use crate::region::{CharacterRange, FileText, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    Refined(CharacterRange),
    /// No usable modified line in the reference hunk, or the boundary could
    /// not be carried over; the coarse range is returned unchanged.
    Skipped(CharacterRange),
}

impl Refinement {
    pub fn range(&self) -> CharacterRange {
        match self {
            Refinement::Refined(r) | Refinement::Skipped(r) => *r,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct AlignedChar {
    frag: usize,
    offset: usize,
    source: Option<Position>,
    target: Option<Position>,
}

fn align(frags: &[Fragment], source_start: usize, target_start: usize) -> Vec<AlignedChar> {
    let mut out = Vec::new();
    let mut src = Position::new(source_start, 1);
    let mut tgt = Position::new(target_start, 1);
    let step = |pos: &mut Position, ch: char| {
        if ch == '\n' {
            *pos = Position::new(pos.line + 1, 1);
        } else {
            pos.col += 1;
        }
    };
    for (frag_idx, frag) in frags.iter().enumerate() {
        for (offset, ch) in frag.text.chars().enumerate() {
            let source = frag.on_source().then_some(src);
            let target = frag.on_target().then_some(tgt);
            if frag.on_source() {
                step(&mut src, ch);
            }
            if frag.on_target() {
                step(&mut tgt, ch);
            }
            out.push(AlignedChar {

                frag: frag_idx,
                offset,
                source,
                target,
            });
        }
    }
    out
}

/// Common prefix and suffix lengths, not overlapping. When they would
/// overlap (`ab` -> `abb`), `suffix_first` decides which one gets the shared
/// characters: the suffix for region starts, the prefix for region ends, so
/// an ambiguous boundary lands where the region is tightest.
fn common_affixes(a: &[char], b: &[char], suffix_first: bool) -> (usize, usize) {
    let limit = a.len().min(b.len());
    let head = |limit: usize| a.iter().zip(b).take(limit).take_while(|(x, y)| x == y).count();
    let tail = |limit: usize| a.iter().rev().zip(b.iter().rev()).take(limit).take_while(|(x, y)| x == y).count();
    if suffix_first {
        let suffix = tail(limit);
        (head(limit - suffix), suffix)
    } else {
        let prefix = head(limit);
        (prefix, tail(limit - prefix))
    }
}

/// Largest `deleted.len() * added.len()` aligned character by character;
/// longer replacements fall back to the whole-replacement rule.
const MAX_ALIGNMENT_CELLS: usize = 1 << 20;

/// For each character of `d`, the character of `a` it is matched or
/// substituted with in a minimal edit script (`None` when deleted). The
/// backtrace, walking from the end, prefers insertions, then matches, then
/// deletions, which aligns each character with its earliest optimal partner.
fn align_chars(d: &[char], a: &[char]) -> Option<Vec<Option<usize>>> {
    let (n, m) = (d.len(), a.len());
    if n.saturating_mul(m) > MAX_ALIGNMENT_CELLS {
        return None;
    }
    let w = m + 1;
    let mut dp = vec![0u32; (n + 1) * w];
    for i in 0..=n {
        for j in 0..=m {
            dp[i * w + j] = if i == 0 {
                j as u32
            } else if j == 0 {
                i as u32
            } else {
                let sub = dp[(i - 1) * w + j - 1] + u32::from(d[i - 1] != a[j - 1]);
                sub.min(dp[(i - 1) * w + j] + 1).min(dp[i * w + j - 1] + 1)
            };
        }
    }
    let mut out = vec![None; n];
    let (mut i, mut j) = (n, m);
    while i > 0 && j > 0 {
        let here = dp[i * w + j];
        if here == dp[i * w + j - 1] + 1 {
            j -= 1;
        } else if d[i - 1] == a[j - 1] && here == dp[(i - 1) * w + j - 1] {
            out[i - 1] = Some(j - 1);
            i -= 1;
            j -= 1;
        } else if here == dp[(i - 1) * w + j] + 1 {
            i -= 1;
        } else {
            out[i - 1] = Some(j - 1);
            i -= 1;
            j -= 1;
        }
    }
    Some(out)
}

/// The parts of a deleted/added pair outside their common prefix and suffix.
struct Replacement<'c> {
    prefix: usize,
    suffix: usize,
    deleted: &'c [char],
    added: &'c [char],
}

impl<'c> Replacement<'c> {
    fn new(deleted: &'c [char], added: &'c [char], suffix_first: bool) -> Self {
        let (prefix, suffix) = common_affixes(deleted, added, suffix_first);
        Self {
            prefix,
            suffix,
            deleted: &deleted[prefix..deleted.len() - suffix],
            added: &added[prefix..added.len() - suffix],
        }
    }
}

/// Offset in `added` where a region starting at `offset` of `deleted` begins.
/// May equal `added.len()`, meaning "right after the added text".
///
/// Offsets in the common prefix or suffix map to the same character. A
/// region starting where the replaced middle starts takes the whole
/// replaced middle; one starting inside it follows a character alignment.
fn carry_start(deleted: &[char], added: &[char], offset: usize) -> usize {
    let r = Replacement::new(deleted, added, true);
    if offset < r.prefix {
        return offset;
    }
    if deleted.len() - offset <= r.suffix {
        return added.len() - (deleted.len() - offset);
    }
    let inner = offset - r.prefix;
    if inner == 0 {
        return r.prefix;
    }
    match align_chars(r.deleted, r.added) {
        Some(map) => r.prefix + map[inner..].iter().find_map(|j| *j).unwrap_or(r.added.len()),
        None => r.prefix,
    }
}

/// Offset in `added` where a region ending at `offset` of `deleted` ends.
/// `None` means "right before the added text". Mirror of [`carry_start`].
fn carry_end(deleted: &[char], added: &[char], offset: usize) -> Option<usize> {
    let r = Replacement::new(deleted, added, false);
    if deleted.len() - 1 - offset < r.suffix {
        return Some(added.len() - (deleted.len() - offset));
    }
    if offset < r.prefix {
        return Some(offset);
    }
    let inner = offset - r.prefix;
    let whole = (r.prefix + r.added.len()).checked_sub(1);
    if inner + 1 == r.deleted.len() {
        return whole;
    }
    match align_chars(r.deleted, r.added) {
        Some(map) => match map[..=inner].iter().rev().find_map(|j| *j) {
            Some(j) => Some(r.prefix + j),
            None => r.prefix.checked_sub(1),
        },
        None => whole,
    }
}

fn has_modified_line(hunk: &Hunk) -> Option<&[Fragment]> {
    let frags = hunk.fragments.as_deref()?;
    frags.iter().any(|f| f.kind == FragmentKind::Deleted).then_some(frags)
}

/// Index of the first character of fragment `frag` in the aligned list.
fn frag_start(chars: &[AlignedChar], frag: usize) -> Option<usize> {
    chars.iter().position(|c| c.frag == frag)
}

/// Candidate-side position of the region start, before settling onto line content.
fn start_target(chars: &[AlignedChar], frags: &[Fragment], region_start: Position) -> Option<Position> {
    let i = chars.iter().position(|c| c.source == Some(region_start))?;
    let here = chars[i];
    let next_target = |from: usize| chars[from..].iter().find_map(|c| c.target);
    match frags[here.frag].kind {
        FragmentKind::Unchanged => here.target,
        FragmentKind::Deleted => match frags.get(here.frag + 1) {
            Some(next) if next.kind == FragmentKind::Added => {
                let deleted: Vec<char> = frags[here.frag].text.chars().collect();
                let added: Vec<char> = next.text.chars().collect();
                let at = carry_start(&deleted, &added, here.offset);
                let base = frag_start(chars, here.frag + 1)?;
                next_target(base + at)
            }
            _ => next_target(i),
        },
        FragmentKind::Added => None,
    }
}

fn end_target(chars: &[AlignedChar], frags: &[Fragment], region_end: Position) -> Option<Position> {
    let i = chars.iter().position(|c| c.source == Some(region_end))?;
    let here = chars[i];
    let prev_target = |upto: usize| chars[..upto].iter().rev().find_map(|c| c.target);
    match frags[here.frag].kind {
        FragmentKind::Unchanged => here.target,
        FragmentKind::Deleted => match frags.get(here.frag + 1) {
            Some(next) if next.kind == FragmentKind::Added => {
                let deleted: Vec<char> = frags[here.frag].text.chars().collect();
                let added: Vec<char> = next.text.chars().collect();
                let base = frag_start(chars, here.frag + 1)?;
                match carry_end(&deleted, &added, here.offset) {
                    Some(at) => prev_target(base + at + 1),
                    None => prev_target(base),
                }
            }
            _ => prev_target(i),
        },
        FragmentKind::Added => None,
    }
}

/// Move a start position forward onto a real character.
pub(crate) fn settle_start(text: &FileText, mut pos: Position) -> Option<Position> {
    loop {
        let len = text.line_len(pos.line)?;
        if pos.col >= 1 && pos.col <= len {
            return Some(pos);
        }
        pos = Position::new(pos.line + 1, 1);
    }
}

/// Move an end position backward onto a real character.
pub(crate) fn settle_end(text: &FileText, mut pos: Position) -> Option<Position> {
    loop {
        let len = text.line_len(pos.line)?;
        if len > 0 && pos.col >= 1 {
            return Some(Position::new(pos.line, pos.col.min(len)));
        }
        let prev = pos.line.checked_sub(1).filter(|l| *l >= 1)?;
        pos = Position::new(prev, usize::MAX);
    }
}

/// Tighten the start of `coarse` using the word fragments of `reference`.
pub fn refine_start(source: &CharacterRange, reference: &Hunk, coarse: CharacterRange, target: &FileText) -> Refinement {
    let refined = (|| {
        let frags = has_modified_line(reference)?;
        let chars = align(frags, reference.source.start, reference.target.start);
        let start = start_target(&chars, frags, source.start())?;
        let start = settle_start(target, start)?;
        if start < coarse.start() || start > coarse.end() {
            return None;
        }
        CharacterRange::from_positions(start, coarse.end()).ok()
    })();
    match refined {
        Some(r) => Refinement::Refined(r),
        None => Refinement::Skipped(coarse),
    }
}

/// Tighten the end of `coarse`, walking the reference hunk from the back.
pub fn refine_end(source: &CharacterRange, reference: &Hunk, coarse: CharacterRange, target: &FileText) -> Refinement {
    let refined = (|| {
        let frags = has_modified_line(reference)?;
        let chars = align(frags, reference.source.start, reference.target.start);
        let end = end_target(&chars, frags, source.end())?;
        let end = settle_end(target, end)?;
        if end > coarse.end() || end < coarse.start() {
            return None;
        }
        CharacterRange::from_positions(coarse.start(), end).ok()
    })();
    match refined {
        Some(r) => Refinement::Refined(r),
        None => Refinement::Skipped(coarse),
    }
}
