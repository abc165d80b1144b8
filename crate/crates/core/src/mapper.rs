//! The end-to-end mapping pipeline: candidates from diffs, movement and
//! search, then context-aware selection.

use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::candidates::{extract_all, Candidate, TargetSide};
use crate::error::Result;
use crate::git::{Algorithm, DiffConfig, FileResolution, GitGateway, Granularity, RawDiffReport};
use crate::movement::detect_movement;
use crate::parse::{parse_line_diff, parse_word_diff, Hunk};
use crate::region::{CharacterRange, FileText, Region};
use crate::search::search_candidates;
use crate::select::{select_target, MapperConfig, Scorer};

/// A region to map and the commit to map it to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapRequest {
    pub source_commit: String,
    pub file: String,
    pub range: CharacterRange,
    pub target_commit: String,
}

/// Why the result is `Deleted`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeletionReason {
    /// The file no longer exists at the target commit.
    FileDeleted,
    /// The diff removed every line of the region and the `Deleted`
    /// candidate scored best.
    RegionDeleted,
    /// No technique produced any candidate.
    NoCandidates,
}

impl DeletionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DeletionReason::FileDeleted => "file_deleted",
            DeletionReason::RegionDeleted => "region_deleted",
            DeletionReason::NoCandidates => "no_candidates",
        }
    }
}

/// Wall time of the two phases.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timing {
    /// Git invocations, parsing and candidate extraction.
    pub candidates: Duration,
    /// Scoring and selection.
    pub selection: Duration,
}

#[derive(Debug, Clone)]
pub struct MapResult {
    pub target: Region,
    pub reason: Option<DeletionReason>,
    /// All candidates, best first, with scores.
    pub ranked: Vec<Candidate>,
    /// Target-side path after rename resolution, if the file exists there.
    pub target_file: Option<String>,
    pub timing: Timing,
}

impl MapResult {
    /// The selected candidate, when the result is a located region.
    pub fn selected(&self) -> Option<&Candidate> {
        self.ranked.first().filter(|c| c.region == self.target)
    }

    /// The JSON document printed by `codemapper map --format json`.
    pub fn to_json(&self, verbose: bool, timing: bool) -> Value {
        let mut doc = match &self.target {
            Region::Located(loc) => {
                let selected = self.selected();
                json!({
                    "target": region_json(&self.target),
                    "origin": selected.map(|c| c.origin.as_str()),
                    "score": selected.and_then(|c| c.score),
                    "file": loc.file,
                })
            }
            Region::Deleted => json!({
                "target": "deleted",
                "reason": self.reason.unwrap_or(DeletionReason::NoCandidates).as_str(),
            }),
        };
        if verbose {
            doc["candidates"] = self
                .ranked
                .iter()
                .map(|c| {
                    json!({
                        "region": region_json(&c.region),
                        "origin": c.origin.as_str(),
                        "score": c.score,
                    })
                })
                .collect();
        }
        if timing {
            doc["timing_ms"] = json!({
                "candidates": self.timing.candidates.as_secs_f64() * 1e3,
                "selection": self.timing.selection.as_secs_f64() * 1e3,
            });
        }
        doc
    }
}

/// `{"commit", "file", "l1", "c1", "l2", "c2"}`, or `"deleted"`.
pub fn region_json(region: &Region) -> Value {
    match region {
        Region::Located(loc) => json!({
            "commit": loc.commit,
            "file": loc.file,
            "l1": loc.range.l1(),
            "c1": loc.range.c1(),
            "l2": loc.range.l2(),
            "c2": loc.range.c2(),
        }),
        Region::Deleted => Value::String("deleted".into()),
    }
}

/// Parse deduplicated reports into line hunks with word fragments attached.
///
/// One entry per distinct line-level report, in configuration order. Each
/// line hunk takes the fragments of the word-level hunk with the same
/// blocks from the word report of the same algorithm.
pub fn parse_reports(reports: &[RawDiffReport], source: &FileText, target: &FileText) -> Result<Vec<Vec<Hunk>>> {
    let word_report = |algorithm: Algorithm| {
        let config = DiffConfig {
            algorithm,
            granularity: Granularity::Word,
        };
        reports.iter().find(|r| r.produced_by(config))
    };
    let mut out = Vec::new();
    for report in reports.iter().filter(|r| r.config.granularity == Granularity::Line) {
        let mut hunks = parse_line_diff(&report.text)?;
        let algorithms = std::iter::once(report.config).chain(report.aliases.iter().copied()).map(|c| c.algorithm);
        let word = algorithms.filter_map(word_report).next();
        if let Some(word) = word {
            let word_hunks = parse_word_diff(&word.text, source, target)?;
            for hunk in &mut hunks {
                if let Some(w) = word_hunks.iter().find(|w| w.same_blocks(hunk)) {
                    hunk.fragments.clone_from(&w.fragments);
                }
            }
        }
        out.push(hunks);
    }
    Ok(out)
}

/// Candidates from every enabled technique, in priority order.
pub fn collect_candidates(
    reports: &[Vec<Hunk>],
    source_text: &FileText,
    source: &CharacterRange,
    target: TargetSide<'_>,
    config: &MapperConfig,
) -> Result<Vec<Candidate>> {
    let mut candidates = Vec::new();
    if config.diff {
        if reports.is_empty() {
            // identical contents: the region stays where it is
            if target.text.check_range(source).is_ok() {
                candidates.push(Candidate::located(target.commit, target.file, *source, crate::candidates::Origin::Diff)?);
            }
        } else {
            candidates.extend(extract_all(reports, source, target, config.refinement)?);
        }
    }
    if config.movement {
        for hunks in reports {
            candidates.extend(detect_movement(hunks, source, source_text, target)?);
        }
    }
    if config.search {
        let text = source_text.extract(source)?;
        candidates.extend(search_candidates(text, target)?);
    }
    Ok(candidates)
}

/// Maps regions between commits of one repository.
#[derive(Debug, Clone)]
pub struct CodeMapper {
    gateway: GitGateway,
    config: MapperConfig,
}

impl CodeMapper {
    pub fn new(gateway: GitGateway, config: MapperConfig) -> Self {
        Self { gateway, config }
    }

    pub fn open(repo: impl AsRef<std::path::Path>, config: MapperConfig) -> Result<Self> {
        Ok(Self::new(GitGateway::open(repo)?, config))
    }

    pub fn gateway(&self) -> &GitGateway {
        &self.gateway
    }

    pub fn config(&self) -> &MapperConfig {
        &self.config
    }

    pub fn map(&self, request: &MapRequest) -> Result<MapResult> {
        let started = Instant::now();
        let gw = &self.gateway;
        let source_commit = gw.resolve_commit(&request.source_commit)?;
        let target_commit = gw.resolve_commit(&request.target_commit)?;
        let source_text = FileText::new(&gw.file_content(&source_commit, &request.file)?);
        source_text.check_range(&request.range)?;

        let target_file = match gw.resolve_target_file(&source_commit, &request.file, &target_commit)? {
            FileResolution::Found(path) => path,
            FileResolution::FileDeleted => {
                return Ok(MapResult {
                    target: Region::Deleted,
                    reason: Some(DeletionReason::FileDeleted),
                    ranked: Vec::new(),
                    target_file: None,
                    timing: Timing {
                        candidates: started.elapsed(),
                        selection: Duration::ZERO,
                    },
                })
            }
        };
        let target_text = FileText::new(&gw.file_content(&target_commit, &target_file)?);
        let raw = gw.compute_diff_reports(&source_commit, &target_commit, &request.file, &target_file)?;
        let reports = parse_reports(&raw, &source_text, &target_text)?;
        let side = TargetSide {
            commit: &request.target_commit,
            file: &target_file,
            text: &target_text,
        };
        let candidates = collect_candidates(&reports, &source_text, &request.range, side, &self.config)?;
        let candidates_time = started.elapsed();

        let selecting = Instant::now();
        let first = reports.iter().find(|h| !h.is_empty()).map(Vec::as_slice);
        let scorer = Scorer::new(
            &source_text,
            request.range,
            &target_text,
            first,
            self.config.effective_context(),
        );
        let empty = candidates.is_empty();
        let selection = select_target(&scorer, candidates);
        let reason = match (&selection.region, empty) {
            (Region::Deleted, true) => Some(DeletionReason::NoCandidates),
            (Region::Deleted, false) => Some(DeletionReason::RegionDeleted),
            _ => None,
        };
        Ok(MapResult {
            target: selection.region,
            reason,
            ranked: selection.ranked,
            target_file: Some(target_file),
            timing: Timing {
                candidates: candidates_time,
                selection: selecting.elapsed(),
            },
        })
    }
}
