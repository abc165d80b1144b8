//! Exact text search for the region's content in the target file.

use crate::candidates::{Candidate, Origin, TargetSide};
use crate::error::Result;
use crate::region::AbsInterval;

/// Character offsets of every occurrence of `needle` in `haystack`,
/// overlapping occurrences included.
pub fn find_all(haystack: &str, needle: &str) -> Vec<usize> {
    let mut found = Vec::new();
    let Some(first) = needle.chars().next() else {
        return found;
    };
    let mut byte = 0;
    let mut chars = 0;
    while let Some(rel) = haystack[byte..].find(needle) {
        chars += haystack[byte..byte + rel].chars().count();
        found.push(chars);
        byte += rel + first.len_utf8();
        chars += 1;
    }
    found
}

/// One candidate per occurrence of `region_text` in the target file.
pub fn search_candidates(region_text: &str, target: TargetSide<'_>) -> Result<Vec<Candidate>> {
    let len = region_text.chars().count();
    let mut out = Vec::new();
    for start in find_all(target.text.as_str(), region_text) {
        let Some(range) = AbsInterval::new(start, start + len).and_then(|iv| target.text.range_of(iv)) else {
            continue;
        };
        out.push(Candidate::located(target.commit, target.file, range, Origin::Search)?);
    }
    Ok(out)
}
