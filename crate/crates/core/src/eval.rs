//! Evaluation against ground-truth mappings: dataset loading, per-record
//! metrics, aggregate reports, ablations and context-size sweeps.
//!
//! # Dataset format (JSON Lines, version 1)
//!
//! One JSON object per line; blank lines are ignored.
//!
//! ```json
//! {"version": 1, "id": "fig4", "repo": "fig4",
//!  "source": {"commit": "<sha>", "file": "load.py", "l1": 5, "c1": 16, "l2": 5, "c2": 18},
//!  "target_commit": "<sha>",
//!  "expected": {"file": "load.py", "l1": 5, "c1": 16, "l2": 5, "c2": 22},
//!  "tags": ["figure", "refinement"]}
//! ```
//!
//! * `version` — optional, must be `1` when present.
//! * `id` — optional free-form name.
//! * `repo` — a path (relative paths are resolved against the dataset
//!   file's directory) or a clone URL.
//! * `source` — `commit`, `file` and the 1-based inclusive range.
//! * `expected` — `"deleted"` or an object with `file` and the range;
//!   an optional `commit` defaults to `target_commit`.
//! * `tags` — optional list of labels used to group the report.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mapper::{CodeMapper, MapRequest};
use crate::region::{AbsInterval, CharacterRange, FileText, Region};
use crate::select::MapperConfig;

/// A file and range, with the commit where it applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commit: Option<String>,
    pub file: String,
    pub l1: usize,
    pub c1: usize,
    pub l2: usize,
    pub c2: usize,
}

impl RegionSpec {
    pub fn new(commit: Option<&str>, file: &str, range: CharacterRange) -> Self {
        let (l1, c1, l2, c2) = range.tuple();
        Self {
            commit: commit.map(str::to_owned),
            file: file.to_owned(),
            l1,
            c1,
            l2,
            c2,
        }
    }

    pub fn range(&self) -> Result<CharacterRange> {
        CharacterRange::new(self.l1, self.c1, self.l2, self.c2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Deleted,
    Region(RegionSpec),
}

/// One ground-truth mapping task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalRecord {
    pub id: Option<String>,
    pub repo: String,
    pub source: RegionSpec,
    pub target_commit: String,
    pub expected: Expected,
    pub tags: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    #[serde(default)]
    version: Option<u32>,
    #[serde(default)]
    id: Option<String>,
    repo: String,
    source: RegionSpec,
    target_commit: String,
    expected: Value,
    #[serde(default)]
    tags: Vec<String>,
}

impl EvalRecord {
    /// Parse one dataset line.
    pub fn from_json(line: &str) -> std::result::Result<Self, String> {
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
        if let Some(v) = raw.version {
            if v != 1 {
                return Err(format!("unsupported dataset version {v}"));
            }
        }
        if raw.source.commit.as_deref().is_none_or(str::is_empty) {
            return Err("source.commit is required".into());
        }
        raw.source.range().map_err(|e| format!("source: {e}"))?;
        let expected = match raw.expected {
            Value::String(s) if s == "deleted" => Expected::Deleted,
            Value::Object(_) => {
                let spec: RegionSpec = serde_json::from_value(raw.expected).map_err(|e| format!("expected: {e}"))?;
                spec.range().map_err(|e| format!("expected: {e}"))?;
                Expected::Region(spec)
            }
            other => return Err(format!("expected must be \"deleted\" or an object, got {other}")),
        };
        Ok(Self {
            id: raw.id,
            repo: raw.repo,
            source: raw.source,
            target_commit: raw.target_commit,
            expected,
            tags: raw.tags,
        })
    }

    /// The record as one dataset line.
    pub fn to_json(&self) -> Value {
        let mut doc = json!({
            "version": 1,
            "repo": self.repo,
            "source": self.source,
            "target_commit": self.target_commit,
            "expected": match &self.expected {
                Expected::Deleted => Value::String("deleted".into()),
                Expected::Region(spec) => serde_json::to_value(spec).unwrap_or(Value::Null),
            },
            "tags": self.tags,
        });
        if let Some(id) = &self.id {
            doc["id"] = Value::String(id.clone());
        }
        doc
    }

    pub fn name(&self, index: usize) -> String {
        self.id.clone().unwrap_or_else(|| format!("#{}", index + 1))
    }
}

/// Parse a JSON Lines dataset. Any malformed line is an error naming its
/// line number.
pub fn parse_dataset(text: &str, path: &Path) -> Result<Vec<EvalRecord>> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = EvalRecord::from_json(line).map_err(|message| Error::Dataset {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn load_dataset(path: &Path) -> Result<Vec<EvalRecord>> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset(&text, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Exact,
    PartialOverlap,
    NoOverlap,
    CorrectDeletion,
    /// Predicted `Deleted` although the region still exists.
    WrongDeletion,
    /// Predicted a region although it was deleted.
    MissedDeletion,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::Exact => "exact",
            OutcomeKind::PartialOverlap => "partial_overlap",
            OutcomeKind::NoOverlap => "no_overlap",
            OutcomeKind::CorrectDeletion => "correct_deletion",
            OutcomeKind::WrongDeletion => "wrong_deletion",
            OutcomeKind::MissedDeletion => "missed_deletion",
        }
    }

    /// Exact matches and correct deletions.
    pub fn is_exact(self) -> bool {
        matches!(self, OutcomeKind::Exact | OutcomeKind::CorrectDeletion)
    }

    pub fn is_overlapping(self) -> bool {
        self.is_exact() || self == OutcomeKind::PartialOverlap
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub kind: OutcomeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub char_distance: Option<usize>,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

impl EvalOutcome {
    fn flat(kind: OutcomeKind, score: f64) -> Self {
        Self {
            kind,
            char_distance: None,
            recall: score,
            precision: score,
            f1: score,
        }
    }
}

/// Recall, precision and F1 of `predicted` against `expected`.
pub fn overlap_metrics(predicted: &AbsInterval, expected: &AbsInterval) -> (f64, f64, f64) {
    let common = predicted.intersection_len(expected) as f64;
    if common == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let recall = common / expected.len() as f64;
    let precision = common / predicted.len() as f64;
    let f1 = 2.0 * recall * precision / (recall + precision);
    (recall, precision, f1)
}

/// `|i - i'| + |j - j'|` over the interval bounds.
pub fn char_distance(predicted: &AbsInterval, expected: &AbsInterval) -> usize {
    predicted.start.abs_diff(expected.start) + predicted.end.abs_diff(expected.end)
}

/// Compare a prediction with the ground truth. `target_text` is the content
/// of the expected file at the target commit; it is needed only when both
/// sides are located in that file.
pub fn score_prediction(predicted: &Region, expected: &Region, target_text: Option<&FileText>) -> Result<EvalOutcome> {
    let (pred, exp) = match (predicted, expected) {
        (Region::Deleted, Region::Deleted) => return Ok(EvalOutcome::flat(OutcomeKind::CorrectDeletion, 1.0)),
        (Region::Deleted, Region::Located(_)) => return Ok(EvalOutcome::flat(OutcomeKind::WrongDeletion, 0.0)),
        (Region::Located(_), Region::Deleted) => return Ok(EvalOutcome::flat(OutcomeKind::MissedDeletion, 0.0)),
        (Region::Located(p), Region::Located(e)) => (p, e),
    };
    if pred.file != exp.file {
        return Ok(EvalOutcome::flat(OutcomeKind::NoOverlap, 0.0));
    }
    if pred.range == exp.range {
        return Ok(EvalOutcome::flat(OutcomeKind::Exact, 1.0));
    }
    let text = target_text.ok_or_else(|| Error::Repo("target text needed to score a located prediction".into()))?;
    let p = text.to_abs_interval(&pred.range)?;
    let e = text.to_abs_interval(&exp.range)?;
    let (recall, precision, f1) = overlap_metrics(&p, &e);
    if f1 == 0.0 {
        return Ok(EvalOutcome::flat(OutcomeKind::NoOverlap, 0.0));
    }
    Ok(EvalOutcome {
        kind: OutcomeKind::PartialOverlap,
        char_distance: Some(char_distance(&p, &e)),
        recall,
        precision,
        f1,
    })
}

/// The result of one record.
#[derive(Debug, Clone, Serialize)]
pub struct RecordResult {
    pub index: usize,
    pub id: String,
    pub tags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<EvalOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub millis: f64,
}

/// Aggregate metrics. Rates and means are over records that evaluated
/// without error; `errors` counts the others.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub records: usize,
    pub errors: usize,
    pub evaluated: usize,
    pub exact: usize,
    pub exact_rate: f64,
    pub overlapping: usize,
    pub overlap_rate: f64,
    pub partial: usize,
    /// Mean char distance over partial overlaps; `None` when there are none.
    pub mean_char_distance: Option<f64>,
    pub mean_recall: f64,
    pub mean_precision: f64,
    pub mean_f1: f64,
    pub outcomes: BTreeMap<String, usize>,
}

impl Aggregate {
    pub fn from_results<'a>(results: impl IntoIterator<Item = &'a RecordResult>) -> Self {
        let mut agg = Aggregate {
            records: 0,
            errors: 0,
            evaluated: 0,
            exact: 0,
            exact_rate: 0.0,
            overlapping: 0,
            overlap_rate: 0.0,
            partial: 0,
            mean_char_distance: None,
            mean_recall: 0.0,
            mean_precision: 0.0,
            mean_f1: 0.0,
            outcomes: BTreeMap::new(),
        };
        let (mut dist, mut r, mut p, mut f) = (0usize, 0.0, 0.0, 0.0);
        for result in results {
            agg.records += 1;
            let Some(o) = &result.outcome else {
                agg.errors += 1;
                continue;
            };
            agg.evaluated += 1;
            *agg.outcomes.entry(o.kind.as_str().to_owned()).or_default() += 1;
            agg.exact += usize::from(o.kind.is_exact());
            agg.overlapping += usize::from(o.kind.is_overlapping());
            if let Some(d) = o.char_distance {
                agg.partial += 1;
                dist += d;
            }
            r += o.recall;
            p += o.precision;
            f += o.f1;
        }
        if agg.evaluated > 0 {
            let n = agg.evaluated as f64;
            agg.exact_rate = agg.exact as f64 / n;
            agg.overlap_rate = agg.overlapping as f64 / n;
            agg.mean_recall = r / n;
            agg.mean_precision = p / n;
            agg.mean_f1 = f / n;
        }
        if agg.partial > 0 {
            agg.mean_char_distance = Some(dist as f64 / agg.partial as f64);
        }
        agg
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub config: MapperConfig,
    pub aggregate: Aggregate,
    pub by_tag: BTreeMap<String, Aggregate>,
    pub records: Vec<RecordResult>,
}

impl EvalReport {
    fn build(config: MapperConfig, records: Vec<RecordResult>) -> Self {
        let aggregate = Aggregate::from_results(&records);
        let mut tags: BTreeMap<String, Vec<&RecordResult>> = BTreeMap::new();
        for r in &records {
            for t in &r.tags {
                tags.entry(t.clone()).or_default().push(r);
            }
        }
        let by_tag = tags
            .into_iter()
            .map(|(t, rs)| (t, Aggregate::from_results(rs)))
            .collect();
        Self {
            config,
            aggregate,
            by_tag,
            records,
        }
    }

    pub fn has_errors(&self) -> bool {
        self.aggregate.errors > 0
    }
}

/// A component switched off for an ablation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ablation {
    Full,
    NoDiff,
    NoRefine,
    NoMove,
    NoSearch,
    NoContext,
}

impl Ablation {
    pub const ALL: [Ablation; 6] = [
        Ablation::Full,
        Ablation::NoDiff,
        Ablation::NoRefine,
        Ablation::NoMove,
        Ablation::NoSearch,
        Ablation::NoContext,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Ablation::Full => "full",
            Ablation::NoDiff => "no-diff",
            Ablation::NoRefine => "no-refine",
            Ablation::NoMove => "no-move",
            Ablation::NoSearch => "no-search",
            Ablation::NoContext => "no-context",
        }
    }

    pub fn apply(self, base: MapperConfig) -> MapperConfig {
        let mut c = base;
        match self {
            Ablation::Full => {}
            Ablation::NoDiff => c.diff = false,
            Ablation::NoRefine => c.refinement = false,
            Ablation::NoMove => c.movement = false,
            Ablation::NoSearch => c.search = false,
            Ablation::NoContext => c.context = false,
        }
        c
    }
}

/// Runs datasets: resolves repositories, maps every record in parallel and
/// scores the predictions.
#[derive(Debug, Clone)]
pub struct Evaluator {
    base_dir: PathBuf,
    cache_dir: PathBuf,
    jobs: usize,
    repos: HashMap<String, PathBuf>,
}

impl Evaluator {
    /// `base_dir` anchors relative repository paths (usually the dataset's
    /// directory). Cloned repositories go to `base_dir/.codemapper-repos`.
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        let base_dir = base_dir.into();
        Self {
            cache_dir: base_dir.join(".codemapper-repos"),
            base_dir,
            jobs: 0,
            repos: HashMap::new(),
        }
    }

    pub fn for_dataset(path: &Path) -> Self {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        Self::new(dir)
    }

    /// Worker threads; 0 uses one per CPU.
    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = dir.into();
        self
    }

    fn is_url(repo: &str) -> bool {
        repo.contains("://") || repo.starts_with("git@")
    }

    /// Local path of a record's repository, cloning URLs on first use.
    fn resolve_repo(&mut self, repo: &str) -> Result<PathBuf> {
        if let Some(p) = self.repos.get(repo) {
            return Ok(p.clone());
        }
        let path = if Self::is_url(repo) {
            let name: String = repo
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
                .collect();
            let dest = self.cache_dir.join(name);
            if !dest.exists() {
                std::fs::create_dir_all(&self.cache_dir)?;
                let git = std::env::var_os("CODEMAPPER_GIT").unwrap_or_else(|| "git".into());
                let status = Command::new(git)
                    .args(["clone", "--quiet", repo])
                    .arg(&dest)
                    .status()?;
                if !status.success() {
                    return Err(Error::Repo(format!("cannot clone {repo}")));
                }
            }
            dest
        } else {
            let p = Path::new(repo);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                self.base_dir.join(p)
            }
        };
        self.repos.insert(repo.to_owned(), path.clone());
        Ok(path)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::Repo(format!("cannot start worker threads: {e}")))
    }

    /// Evaluate every record under one configuration.
    pub fn evaluate(&mut self, records: &[EvalRecord], config: MapperConfig) -> Result<EvalReport> {
        let repos: Vec<std::result::Result<PathBuf, String>> = records
            .iter()
            .map(|r| self.resolve_repo(&r.repo).map_err(|e| e.to_string()))
            .collect();
        let results = self.pool()?.install(|| {
            records
                .par_iter()
                .zip(repos.par_iter())
                .enumerate()
                .map(|(index, (record, repo))| {
                    let started = Instant::now();
                    let outcome = repo.clone().and_then(|repo| evaluate_record(&repo, record, config).map_err(|e| e.to_string()));
                    let (predicted, outcome, error) = match outcome {
                        Ok((pred, outcome)) => (Some(crate::mapper::region_json(&pred)), Some(outcome), None),
                        Err(e) => (None, None, Some(e)),
                    };
                    RecordResult {
                        index,
                        id: record.name(index),
                        tags: record.tags.clone(),
                        predicted,
                        outcome,
                        error,
                        millis: started.elapsed().as_secs_f64() * 1e3,
                    }
                })
                .collect::<Vec<_>>()
        });
        Ok(EvalReport::build(config, results))
    }

    /// One run per [`Ablation`] variant.
    pub fn ablation(&mut self, records: &[EvalRecord], base: MapperConfig) -> Result<Vec<(Ablation, EvalReport)>> {
        Ablation::ALL
            .iter()
            .map(|&a| Ok((a, self.evaluate(records, a.apply(base))?)))
            .collect()
    }

    /// One run per context size.
    pub fn context_sweep(
        &mut self,
        records: &[EvalRecord],
        base: MapperConfig,
        sizes: &[usize],
    ) -> Result<Vec<(usize, EvalReport)>> {
        sizes
            .iter()
            .map(|&n| Ok((n, self.evaluate(records, base.with_context_lines(n))?)))
            .collect()
    }
}

/// Map one record and score the prediction.
pub fn evaluate_record(repo: &Path, record: &EvalRecord, config: MapperConfig) -> Result<(Region, EvalOutcome)> {
    let mapper = CodeMapper::open(repo, config)?;
    let source_commit = record.source.commit.clone().unwrap_or_default();
    let request = MapRequest {
        source_commit,
        file: record.source.file.clone(),
        range: record.source.range()?,
        target_commit: record.target_commit.clone(),
    };
    let result = mapper.map(&request)?;
    let (expected, text) = match &record.expected {
        Expected::Deleted => (Region::Deleted, None),
        Expected::Region(spec) => {
            let commit = spec.commit.clone().unwrap_or_else(|| record.target_commit.clone());
            let region = Region::new(commit.clone(), spec.file.clone(), spec.range()?)?;
            let needs_text = matches!(&result.target, Region::Located(l) if l.file == spec.file);
            let text = if needs_text {
                let commit = mapper.gateway().resolve_commit(&commit)?;
                Some(FileText::new(&mapper.gateway().file_content(&commit, &spec.file)?))
            } else {
                None
            };
            (region, text)
        }
    };
    let outcome = score_prediction(&result.target, &expected, text.as_ref())?;
    Ok((result.target, outcome))
}
