//! Character ranges, regions and the line/column arithmetic behind them.
//!
//! Lines and columns are 1-based and a range includes both of its endpoint
//! characters. Columns count Unicode scalar values. File contents are
//! newline-normalized with [`normalize_newlines`] before any of this applies,
//! so a line break is always exactly one character.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A (line, column) pair. Ordering is reading order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl Position {
    pub const fn new(line: usize, col: usize) -> Self {
        Self { line, col }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A validated `(l1, c1, l2, c2)` span within one file version.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRange", into = "RawRange")]
pub struct CharacterRange {
    start: Position,
    end: Position,
}

#[derive(Serialize, Deserialize)]
struct RawRange {
    l1: usize,
    c1: usize,
    l2: usize,
    c2: usize,
}

impl TryFrom<RawRange> for CharacterRange {
    type Error = Error;

    fn try_from(raw: RawRange) -> Result<Self> {
        CharacterRange::new(raw.l1, raw.c1, raw.l2, raw.c2)
    }
}

impl From<CharacterRange> for RawRange {
    fn from(r: CharacterRange) -> Self {
        RawRange {
            l1: r.start.line,
            c1: r.start.col,
            l2: r.end.line,
            c2: r.end.col,
        }
    }
}

impl CharacterRange {
    pub fn new(l1: usize, c1: usize, l2: usize, c2: usize) -> Result<Self> {
        let ordered = l1 < l2 || (l1 == l2 && c1 <= c2);
        if l1 == 0 || c1 == 0 || l2 == 0 || c2 == 0 || !ordered {
            return Err(Error::InvalidRange { l1, c1, l2, c2 });
        }
        Ok(Self {
            start: Position::new(l1, c1),
            end: Position::new(l2, c2),
        })
    }

    pub fn from_positions(start: Position, end: Position) -> Result<Self> {
        Self::new(start.line, start.col, end.line, end.col)
    }

    pub fn start(&self) -> Position {
        self.start
    }

    pub fn end(&self) -> Position {
        self.end
    }

    pub fn l1(&self) -> usize {
        self.start.line
    }

    pub fn c1(&self) -> usize {
        self.start.col
    }

    pub fn l2(&self) -> usize {
        self.end.line
    }

    pub fn c2(&self) -> usize {
        self.end.col
    }

    pub fn tuple(&self) -> (usize, usize, usize, usize) {
        (self.l1(), self.c1(), self.l2(), self.c2())
    }

    /// Same columns, lines moved by `delta`. `None` if a line would drop below 1.
    pub fn shift_lines(&self, delta: i64) -> Option<Self> {
        let shift = |line: usize| usize::try_from(line as i64 + delta).ok().filter(|l| *l >= 1);
        Some(Self {
            start: Position::new(shift(self.start.line)?, self.start.col),
            end: Position::new(shift(self.end.line)?, self.end.col),
        })
    }

    pub fn contains(&self, other: &CharacterRange) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl fmt::Display for CharacterRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.l1(), self.c1(), self.l2(), self.c2())
    }
}

/// A range pinned to a commit and a repository-relative path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Location {
    pub commit: String,
    pub file: String,
    pub range: CharacterRange,
}

/// The unit being mapped: a located range, or the distinguished `Deleted` value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Region {
    Located(Location),
    Deleted,
}

impl Region {
    pub fn new(commit: impl Into<String>, file: impl Into<String>, range: CharacterRange) -> Result<Self> {
        let (commit, file) = (commit.into(), file.into());
        if commit.is_empty() || file.is_empty() {
            return Err(Error::Repo("a region needs a commit and a file path".into()));
        }
        Ok(Region::Located(Location { commit, file, range }))
    }

    pub fn location(&self) -> Option<&Location> {
        match self {
            Region::Located(loc) => Some(loc),
            Region::Deleted => None,
        }
    }

    pub fn is_deleted(&self) -> bool {
        matches!(self, Region::Deleted)
    }
}

/// A half-open `[start, end)` interval of character offsets in a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AbsInterval {
    pub start: usize,
    pub end: usize,
}

impl AbsInterval {
    pub fn new(start: usize, end: usize) -> Option<Self> {
        (start < end).then_some(Self { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn intersection_len(&self, other: &AbsInterval) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        hi.saturating_sub(lo)
    }
}

/// Replace CRLF line endings with LF.
pub fn normalize_newlines(text: &str) -> String {
    if text.contains("\r\n") {
        text.replace("\r\n", "\n")
    } else {
        text.to_owned()
    }
}

/// A newline-normalized file with a line index.
#[derive(Debug, Clone)]
pub struct FileText {
    text: String,
    // Per line: byte offset, char offset and char length (newline excluded).
    byte_starts: Vec<usize>,
    char_starts: Vec<usize>,
    char_lens: Vec<usize>,
    total_chars: usize,
}

impl FileText {
    pub fn new(text: &str) -> Self {
        let text = normalize_newlines(text);
        let mut byte_starts = Vec::new();
        let mut char_starts = Vec::new();
        let mut char_lens = Vec::new();
        let mut chars = 0usize;
        let mut line_byte = 0usize;
        let mut line_char = 0usize;
        for (idx, ch) in text.char_indices() {
            if ch == '\n' {
                byte_starts.push(line_byte);
                char_starts.push(line_char);
                char_lens.push(chars - line_char);
                line_byte = idx + 1;
                line_char = chars + 1;
            }
            chars += 1;
        }
        if line_byte < text.len() {
            byte_starts.push(line_byte);
            char_starts.push(line_char);
            char_lens.push(chars - line_char);
        }
        Self {
            text,
            byte_starts,
            char_starts,
            char_lens,
            total_chars: chars,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn line_count(&self) -> usize {
        self.byte_starts.len()
    }

    pub fn char_len(&self) -> usize {
        self.total_chars
    }

    /// Line `n` (1-based) without its newline.
    pub fn line(&self, n: usize) -> Option<&str> {
        let idx = n.checked_sub(1)?;
        let start = *self.byte_starts.get(idx)?;
        let end = match self.text[start..].find('\n') {
            Some(off) => start + off,
            None => self.text.len(),
        };
        Some(&self.text[start..end])
    }

    /// Length of line `n` in characters, newline excluded.
    pub fn line_len(&self, n: usize) -> Option<usize> {
        self.char_lens.get(n.checked_sub(1)?).copied()
    }

    pub fn lines(&self) -> impl Iterator<Item = &str> + '_ {
        (1..=self.line_count()).map(move |n| self.line(n).unwrap_or(""))
    }

    fn has_newline(&self, n: usize) -> bool {
        n < self.line_count() || (n == self.line_count() && self.text.ends_with('\n'))
    }

    /// Character offset of a position. The column may address the line's
    /// newline (`len + 1`) when the line has one.
    pub fn offset_of(&self, pos: Position) -> Option<usize> {
        let len = self.line_len(pos.line)?;
        let max_col = if self.has_newline(pos.line) { len + 1 } else { len };
        if pos.col == 0 || pos.col > max_col {
            return None;
        }
        Some(self.char_starts[pos.line - 1] + pos.col - 1)
    }

    /// Inverse of [`FileText::offset_of`]. A newline maps to `(line, len + 1)`.
    pub fn position_of(&self, offset: usize) -> Option<Position> {
        if offset >= self.total_chars {
            return None;
        }
        let idx = match self.char_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Some(Position::new(idx + 1, offset - self.char_starts[idx] + 1))
    }

    pub fn check_range(&self, range: &CharacterRange) -> Result<()> {
        self.to_abs_interval(range).map(|_| ())
    }

    /// Convert a range to the half-open interval of character offsets it covers.
    ///
    /// The end column must address real line content; the start column may
    /// address the newline of its line when the range spans several lines.
    pub fn to_abs_interval(&self, range: &CharacterRange) -> Result<AbsInterval> {
        let oob = || Error::OutOfBounds {
            range: *range,
            lines: self.line_count(),
        };
        let end_len = self.line_len(range.l2()).ok_or_else(oob)?;
        if range.c2() > end_len {
            return Err(oob());
        }
        let start_len = self.line_len(range.l1()).ok_or_else(oob)?;
        let start_max = if range.l1() < range.l2() { start_len + 1 } else { start_len };
        if range.c1() > start_max {
            return Err(oob());
        }
        let start = self.offset_of(range.start()).ok_or_else(oob)?;
        let end = self.offset_of(range.end()).ok_or_else(oob)? + 1;
        AbsInterval::new(start, end).ok_or_else(oob)
    }

    /// Inverse of [`FileText::to_abs_interval`].
    pub fn range_of(&self, interval: AbsInterval) -> Option<CharacterRange> {
        let start = self.position_of(interval.start)?;
        let end = self.position_of(interval.end.checked_sub(1)?)?;
        let range = CharacterRange::from_positions(start, end).ok()?;
        self.check_range(&range).ok()?;
        Some(range)
    }

    /// The exact text covered by `range`.
    pub fn extract(&self, range: &CharacterRange) -> Result<&str> {
        let interval = self.to_abs_interval(range)?;
        Ok(self.slice(interval))
    }

    pub fn slice(&self, interval: AbsInterval) -> &str {
        let from = self.byte_offset(interval.start);
        let to = self.byte_offset(interval.end);
        &self.text[from..to]
    }

    fn byte_offset(&self, char_offset: usize) -> usize {
        if char_offset >= self.total_chars {
            return self.text.len();
        }
        let idx = match self.char_starts.binary_search(&char_offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let within = char_offset - self.char_starts[idx];
        let line_start = self.byte_starts[idx];
        self.text[line_start..]
            .char_indices()
            .nth(within)
            .map(|(b, _)| line_start + b)
            .unwrap_or(self.text.len())
    }

    /// Whole-file range, or `None` for a file without any non-newline character.
    pub fn full_range(&self) -> Option<CharacterRange> {
        let first = (1..=self.line_count()).find(|&n| self.line_len(n) != Some(0))?;
        let last = (1..=self.line_count()).rev().find(|&n| self.line_len(n) != Some(0))?;
        CharacterRange::new(first, 1, last, self.line_len(last)?).ok()
    }
}

/// Convenience wrapper around [`FileText::to_abs_interval`].
pub fn to_abs_interval(file_text: &str, range: &CharacterRange) -> Result<AbsInterval> {
    FileText::new(file_text).to_abs_interval(range)
}

/// Convenience wrapper around [`FileText::extract`].
pub fn extract_text(file_text: &str, range: &CharacterRange) -> Result<String> {
    FileText::new(file_text).extract(range).map(str::to_owned)
}
