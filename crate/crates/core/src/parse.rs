//! Parsing of `git diff -U0` output into hunks, and of
//! `--word-diff=porcelain` output into intra-hunk fragments.
//!
//! Porcelain word diffs only say which whitespace-separated words were kept,
//! deleted or added; the whitespace between words and the attribution of line
//! breaks are lost. The word parser therefore takes both file versions and
//! projects the word alignment back onto the exact hunk text, so fragment
//! text is always a faithful slice of the source or target file.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::region::FileText;

/// A contiguous block of lines. An empty block sits between lines
/// `end` and `start` (`end == start - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LineBlock {
    pub start: usize,
    pub end: usize,
}

impl LineBlock {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start >= 1 && start <= end + 1);
        Self { start, end }
    }

    /// Block from a unified diff header pair such as `-7,0` or `+3,2`.
    fn from_header(first: usize, count: usize) -> Self {
        if count == 0 {
            Self::new(first + 1, first)
        } else {
            Self::new(first, first + count - 1)
        }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn contains(&self, line: usize) -> bool {
        self.start <= line && line <= self.end
    }

    pub fn lines(&self) -> RangeInclusive<usize> {
        self.start..=self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Delete,
    Add,
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineOp {
    pub kind: OpKind,
    pub text: String,
    pub source_line: Option<usize>,
    pub target_line: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FragmentKind {
    Deleted,
    Added,
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fragment {
    pub kind: FragmentKind,
    pub text: String,
}

impl Fragment {
    pub fn new(kind: FragmentKind, text: impl Into<String>) -> Self {
        Self { kind, text: text.into() }
    }

    pub fn on_source(&self) -> bool {
        self.kind != FragmentKind::Added
    }

    pub fn on_target(&self) -> bool {
        self.kind != FragmentKind::Deleted
    }
}

/// Fragments of one line pair. Deleted plus unchanged text is the source
/// line, added plus unchanged text is the target line. When git joins or
/// splits lines the group spans several lines and its text holds the
/// interior line breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentLine {
    pub source_line: Option<usize>,
    pub target_line: Option<usize>,
    pub fragments: Vec<Fragment>,
}

impl FragmentLine {
    pub fn source_text(&self) -> String {
        self.fragments.iter().filter(|f| f.on_source()).map(|f| f.text.as_str()).collect()
    }

    pub fn target_text(&self) -> String {
        self.fragments.iter().filter(|f| f.on_target()).map(|f| f.text.as_str()).collect()
    }

    pub fn has_deletion(&self) -> bool {
        self.fragments.iter().any(|f| f.kind == FragmentKind::Deleted)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hunk {
    pub source: LineBlock,
    pub target: LineBlock,
    pub ops: Vec<LineOp>,
    /// Word-level alignment of the whole hunk, line breaks included.
    /// Present only for hunks parsed from a word diff.
    pub fragments: Option<Vec<Fragment>>,
}

impl Hunk {
    /// Net change in line count this hunk causes below it.
    pub fn line_delta(&self) -> i64 {
        self.target.len() as i64 - self.source.len() as i64
    }

    pub fn same_blocks(&self, other: &Hunk) -> bool {
        self.source == other.source && self.target == other.target
    }

    /// Per-line view of [`Hunk::fragments`].
    pub fn fragment_lines(&self) -> Option<Vec<FragmentLine>> {
        self.fragments
            .as_ref()
            .map(|frags| group_fragment_lines(frags, self.source.start, self.target.start))
    }
}

fn parse_header(line: &str) -> Result<(LineBlock, LineBlock)> {
    let malformed = || Error::MalformedDiff(format!("bad hunk header `{line}`"));
    let inner = line
        .strip_prefix("@@ ")
        .and_then(|rest| rest.split(" @@").next())
        .ok_or_else(malformed)?;
    let mut parts = inner.split_whitespace();
    let mut side = |prefix: char| -> Result<LineBlock> {
        let spec = parts.next().and_then(|p| p.strip_prefix(prefix)).ok_or_else(malformed)?;
        let (first, count) = match spec.split_once(',') {
            Some((f, c)) => (f, c),
            None => (spec, "1"),
        };
        let first: usize = first.parse().map_err(|_| malformed())?;
        let count: usize = count.parse().map_err(|_| malformed())?;
        Ok(LineBlock::from_header(first, count))
    };
    let source = side('-')?;
    let target = side('+')?;
    Ok((source, target))
}

/// Split a diff into per-hunk chunks: `(header blocks, body lines)`.
fn hunk_chunks(report: &str) -> Result<Vec<(LineBlock, LineBlock, Vec<&str>)>> {
    let mut chunks = Vec::new();
    let mut current: Option<(LineBlock, LineBlock, Vec<&str>)> = None;
    for line in report.split('\n') {
        if line.starts_with("@@ ") {
            if let Some(chunk) = current.take() {
                chunks.push(chunk);
            }
            let (s, t) = parse_header(line)?;
            current = Some((s, t, Vec::new()));
        } else if line.starts_with("diff ") {
            if let Some(chunk) = current.take() {
                chunks.push(chunk);
            }
        } else if let Some((_, _, body)) = current.as_mut() {
            body.push(line);
        } else if !(line.is_empty()
            || line.starts_with("index ")
            || line.starts_with("--- ")
            || line.starts_with("+++ ")
            || line.starts_with("new file mode")
            || line.starts_with("deleted file mode")
            || line.starts_with("old mode")
            || line.starts_with("new mode")
            || line.starts_with("similarity index")
            || line.starts_with("Binary files"))
        {
            return Err(Error::MalformedDiff(format!("unexpected line outside a hunk: `{line}`")));
        }
    }
    chunks.extend(current);
    Ok(chunks)
}

fn strip_cr(s: &str) -> &str {
    s.strip_suffix('\r').unwrap_or(s)
}

/// Parse a line-level diff report into hunks, in ascending source order.
pub fn parse_line_diff(report: &str) -> Result<Vec<Hunk>> {
    let mut hunks = Vec::new();
    for (source, target, body) in hunk_chunks(report)? {
        let mut ops = Vec::new();
        let (mut s, mut t) = (source.start, target.start);
        for line in body {
            let Some(marker) = line.chars().next() else { continue };
            let text = strip_cr(&line[1..]).to_owned();
            match marker {
                '-' => {
                    ops.push(LineOp { kind: OpKind::Delete, text, source_line: Some(s), target_line: None });
                    s += 1;
                }
                '+' => {
                    ops.push(LineOp { kind: OpKind::Add, text, source_line: None, target_line: Some(t) });
                    t += 1;
                }
                ' ' => {
                    ops.push(LineOp { kind: OpKind::Unchanged, text, source_line: Some(s), target_line: Some(t) });
                    s += 1;
                    t += 1;
                }
                '\\' => {}
                _ => return Err(Error::MalformedDiff(format!("unexpected hunk line `{line}`"))),
            }
        }
        if s != source.end + 1 || t != target.end + 1 {
            return Err(Error::MalformedDiff(format!(
                "hunk -{},{} +{},{} has a body of the wrong length",
                source.start,
                source.len(),
                target.start,
                target.len()
            )));
        }
        hunks.push(Hunk { source, target, ops, fragments: None });
    }
    hunks.sort_by_key(|h| (h.source.start, h.source.end));
    Ok(hunks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WordOp {
    Keep,
    Delete,
    Insert,
}

/// Text of a line block, including the newline after each line when the
/// file has one.
fn block_text(file: &FileText, block: LineBlock) -> Result<&str> {
    if block.is_empty() {
        return Ok("");
    }
    if block.end > file.line_count() {
        return Err(Error::MalformedDiff(format!(
            "hunk lines {}..={} exceed the file ({} lines)",
            block.start,
            block.end,
            file.line_count()
        )));
    }
    let text = file.as_str();
    // `line` returns subslices of `text`, so pointer offsets are byte offsets
    let first = file.line(block.start).unwrap_or("");
    let first_byte = first.as_ptr() as usize - text.as_ptr() as usize;
    let last = file.line(block.end).unwrap_or("");
    let mut last_byte = last.as_ptr() as usize - text.as_ptr() as usize + last.len();
    if text[last_byte..].starts_with('\n') {
        last_byte += 1;
    }
    Ok(&text[first_byte..last_byte])
}

fn tokens(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, text.len()));
    }
    out
}

fn push_fragment(out: &mut Vec<Fragment>, kind: FragmentKind, text: &str) {
    if text.is_empty() {
        return;
    }
    match out.last_mut() {
        Some(last) if last.kind == kind => last.text.push_str(text),
        _ => out.push(Fragment::new(kind, text)),
    }
}

/// Emit the stretch between two kept words: shared leading and trailing
/// whitespace is unchanged, the rest is deleted then added.
fn emit_region(out: &mut Vec<Fragment>, src: &str, tgt: &str) {
    let prefix: usize = src
        .chars()
        .zip(tgt.chars())
        .take_while(|(a, b)| a == b && a.is_whitespace())
        .map(|(a, _)| a.len_utf8())
        .sum();
    let (src_rest, tgt_rest) = (&src[prefix..], &tgt[prefix..]);
    let suffix: usize = src_rest
        .chars()
        .rev()
        .zip(tgt_rest.chars().rev())
        .take_while(|(a, b)| a == b && a.is_whitespace())
        .map(|(a, _)| a.len_utf8())
        .sum();
    push_fragment(out, FragmentKind::Unchanged, &src[..prefix]);
    push_fragment(out, FragmentKind::Deleted, &src_rest[..src_rest.len() - suffix]);
    push_fragment(out, FragmentKind::Added, &tgt_rest[..tgt_rest.len() - suffix]);
    push_fragment(out, FragmentKind::Unchanged, &src_rest[src_rest.len() - suffix..]);
}

/// Project a word-level edit script onto the exact block texts.
fn project_words(ops: &[(WordOp, String)], src: &str, tgt: &str) -> Result<Vec<Fragment>> {
    let src_tokens = tokens(src);
    let tgt_tokens = tokens(tgt);
    let (mut si, mut ti) = (0usize, 0usize);
    let (mut src_cursor, mut tgt_cursor) = (0usize, 0usize);
    let mut out = Vec::new();
    let mismatch = |side: &str, word: &str| Error::MalformedDiff(format!("word `{word}` does not match the {side} text"));

    for (op, word) in ops {
        match op {
            WordOp::Delete => {
                let &(s, e) = src_tokens.get(si).ok_or_else(|| mismatch("source", word))?;
                if &src[s..e] != word {
                    return Err(mismatch("source", word));
                }
                si += 1;
            }
            WordOp::Insert => {
                let &(s, e) = tgt_tokens.get(ti).ok_or_else(|| mismatch("target", word))?;
                if &tgt[s..e] != word {
                    return Err(mismatch("target", word));
                }
                ti += 1;
            }
            WordOp::Keep => {
                let &(ss, se) = src_tokens.get(si).ok_or_else(|| mismatch("source", word))?;
                let &(ts, te) = tgt_tokens.get(ti).ok_or_else(|| mismatch("target", word))?;
                if &src[ss..se] != word || &tgt[ts..te] != word {
                    return Err(mismatch("source", word));
                }
                emit_region(&mut out, &src[src_cursor..ss], &tgt[tgt_cursor..ts]);
                push_fragment(&mut out, FragmentKind::Unchanged, word);
                src_cursor = se;
                tgt_cursor = te;
                si += 1;
                ti += 1;
            }
        }
    }
    if si != src_tokens.len() || ti != tgt_tokens.len() {
        return Err(Error::MalformedDiff("word diff does not cover the whole hunk".into()));
    }
    emit_region(&mut out, &src[src_cursor..], &tgt[tgt_cursor..]);
    Ok(out)
}

/// Parse a `--word-diff=porcelain` report. Line numbers come from the `@@`
/// headers; `source` and `target` are the two file versions the report was
/// computed from.
pub fn parse_word_diff(report: &str, source: &FileText, target: &FileText) -> Result<Vec<Hunk>> {
    let mut hunks = Vec::new();
    for (source_block, target_block, body) in hunk_chunks(report)? {
        let mut words = Vec::new();
        for line in body {
            let Some(marker) = line.chars().next() else { continue };
            let op = match marker {
                ' ' => WordOp::Keep,
                '-' => WordOp::Delete,
                '+' => WordOp::Insert,
                '~' | '\\' => continue,
                _ => return Err(Error::MalformedDiff(format!("unexpected word-diff line `{line}`"))),
            };
            words.extend(line[1..].split_whitespace().map(|w| (op, w.to_owned())));
        }
        let src = block_text(source, source_block)?;
        let tgt = block_text(target, target_block)?;
        let fragments = project_words(&words, src, tgt)?;

        let mut ops = Vec::new();
        for n in source_block.lines() {
            ops.push(LineOp {
                kind: OpKind::Delete,
                text: source.line(n).unwrap_or("").to_owned(),
                source_line: Some(n),
                target_line: None,
            });
        }
        for n in target_block.lines() {
            ops.push(LineOp {
                kind: OpKind::Add,
                text: target.line(n).unwrap_or("").to_owned(),
                source_line: None,
                target_line: Some(n),
            });
        }
        hunks.push(Hunk {
            source: source_block,
            target: target_block,
            ops,
            fragments: Some(fragments),
        });
    }
    hunks.sort_by_key(|h| (h.source.start, h.source.end));
    Ok(hunks)
}

fn group_fragment_lines(frags: &[Fragment], source_start: usize, target_start: usize) -> Vec<FragmentLine> {
    #[derive(Default)]
    struct Group {
        source_line: Option<usize>,
        target_line: Option<usize>,
        fragments: Vec<Fragment>,
        has: [bool; 3],
    }
    let idx = |k: FragmentKind| match k {
        FragmentKind::Deleted => 0,
        FragmentKind::Added => 1,
        FragmentKind::Unchanged => 2,
    };

    let mut out = Vec::new();
    let (mut sline, mut tline) = (source_start, target_start);
    let mut group = Group::default();
    let flush = |group: &mut Group, out: &mut Vec<FragmentLine>| {
        let g = std::mem::take(group);
        if g.source_line.is_some() || g.target_line.is_some() {
            out.push(FragmentLine {
                source_line: g.source_line,
                target_line: g.target_line,
                fragments: g.fragments,
            });
        }
    };

    for frag in frags {
        for ch in frag.text.chars() {
            if frag.on_source() && group.source_line.is_none() {
                group.source_line = Some(sline);
            }
            if frag.on_target() && group.target_line.is_none() {
                group.target_line = Some(tline);
            }
            if ch == '\n' {
                let cut = match frag.kind {
                    FragmentKind::Unchanged => true,
                    FragmentKind::Deleted => !group.has[1] && !group.has[2],
                    FragmentKind::Added => !group.has[0] && !group.has[2],
                };
                if frag.on_source() {
                    sline += 1;
                }
                if frag.on_target() {
                    tline += 1;
                }
                if cut {
                    flush(&mut group, &mut out);
                    continue;
                }
            }
            group.has[idx(frag.kind)] = true;
            let mut buf = [0u8; 4];
            push_fragment(&mut group.fragments, frag.kind, ch.encode_utf8(&mut buf));
        }
    }
    flush(&mut group, &mut out);
    out
}
