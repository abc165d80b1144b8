//! Map a code region from one git commit to another.
//!
//! A region is a file path and a 1-based, inclusive character range
//! `(l1, c1, l2, c2)` at some commit. [`mapper::CodeMapper`] finds the
//! corresponding region at another commit, earlier or later, or reports
//! that the code was deleted. It works in two phases:
//!
//! 1. **Candidates.** `git diff` runs with four algorithms at line and word
//!    granularity ([`git`], [`parse`]). Each hunk is classified against the
//!    region and turned into candidates, whose boundaries are tightened to
//!    the character with the word-level fragments ([`candidates`],
//!    [`refine`]). Fully deleted regions are looked up among added lines
//!    ([`movement`]), and the region's text is searched verbatim ([`search`]).
//! 2. **Selection.** Every candidate is scored by Levenshtein similarity
//!    to the source region, both extended by unchanged context lines, and
//!    the best one wins ([`select`]).
//!
//! [`eval`] scores predictions against ground truth with exact-match,
//! overlap, character-distance, recall, precision and F1 metrics, and runs
//! ablations and context-size sweeps; [`fixtures`] builds a small corpus of
//! scripted repositories to run it on.
//!
//! ```no_run
//! use codemapper::mapper::{CodeMapper, MapRequest};
//! use codemapper::region::CharacterRange;
//! use codemapper::select::MapperConfig;
//!
//! let mapper = CodeMapper::open("path/to/repo", MapperConfig::default())?;
//! let result = mapper.map(&MapRequest {
//!     source_commit: "HEAD~3".into(),
//!     file: "src/lib.rs".into(),
//!     range: CharacterRange::new(10, 5, 12, 1)?,
//!     target_commit: "HEAD".into(),
//! })?;
//! println!("{}", result.to_json(false, false));
//! # Ok::<(), codemapper::error::Error>(())
//! ```

pub mod candidates;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod git;
pub mod mapper;
pub mod movement;
pub mod parse;
pub mod refine;
pub mod region;
pub mod search;
pub mod select;
