//! Everything that talks to `git`: file contents, diff reports and
//! rename tracking of the file that contains a region.
//!
//! The gateway shells out to the `git` executable (override with the
//! `CODEMAPPER_GIT` environment variable) and never writes to the repository.

use std::ffi::OsStr;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::region::normalize_newlines;

pub const GIT_ENV: &str = "CODEMAPPER_GIT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Myers,
    Minimal,
    Patience,
    Histogram,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Myers, Algorithm::Minimal, Algorithm::Patience, Algorithm::Histogram];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Myers => "myers",
            Algorithm::Minimal => "minimal",
            Algorithm::Patience => "patience",
            Algorithm::Histogram => "histogram",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Line,
    Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiffConfig {
    pub algorithm: Algorithm,
    pub granularity: Granularity,
}

impl DiffConfig {
    /// All eight configurations, line-level first.
    pub fn all() -> Vec<DiffConfig> {
        [Granularity::Line, Granularity::Word]
            .into_iter()
            .flat_map(|granularity| Algorithm::ALL.into_iter().map(move |algorithm| DiffConfig { algorithm, granularity }))
            .collect()
    }

    fn args(&self, context: usize) -> Vec<String> {
        let mut args = vec![
            "diff".to_owned(),
            "--no-color".to_owned(),
            "--no-ext-diff".to_owned(),
            "--no-textconv".to_owned(),
            "--no-renames".to_owned(),
            format!("-U{context}"),
            format!("--diff-algorithm={}", self.algorithm.as_str()),
        ];
        if self.granularity == Granularity::Word {
            args.push("--word-diff=porcelain".to_owned());
        }
        args
    }
}

impl fmt::Display for DiffConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.granularity {
            Granularity::Line => "line",
            Granularity::Word => "word",
        };
        write!(f, "{}/{}", self.algorithm.as_str(), g)
    }
}

/// Raw `git diff` output for one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDiffReport {
    pub config: DiffConfig,
    /// Other configurations that produced byte-identical text.
    pub aliases: Vec<DiffConfig>,
    pub text: String,
    pub source_file: String,
    pub target_file: String,
}

impl RawDiffReport {
    pub fn produced_by(&self, config: DiffConfig) -> bool {
        self.config == config || self.aliases.contains(&config)
    }
}

/// Where the file containing a region lives at the target commit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FileResolution {
    Found(String),
    FileDeleted,
}

#[derive(Debug, Clone)]
pub struct GitGateway {
    git: PathBuf,
    repo: PathBuf,
    context_lines: usize,
}

impl GitGateway {
    pub fn open(repo: impl AsRef<Path>) -> Result<Self> {
        let git = std::env::var_os(GIT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("git"));
        let gateway = Self {
            git,
            repo: repo.as_ref().to_path_buf(),
            context_lines: 0,
        };
        gateway.run(["rev-parse", "--git-dir"])?;
        Ok(gateway)
    }

    pub fn repo(&self) -> &Path {
        &self.repo
    }

    /// Context lines passed to `git diff` (`-U`). Zero by default.
    pub fn with_context_lines(mut self, lines: usize) -> Self {
        self.context_lines = lines;
        self
    }

    fn command(&self) -> Command {
        let mut cmd = Command::new(&self.git);
        cmd.arg("-C")
            .arg(&self.repo)
            .args(["-c", "core.quotepath=false", "-c", "diff.noprefix=false"])
            .env("GIT_CONFIG_NOSYSTEM", "1")
            .env("GIT_CONFIG_GLOBAL", "/dev/null")
            .env("LC_ALL", "C");
        cmd
    }

    fn run_raw<I, S>(&self, args: I) -> Result<std::process::Output>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<OsStr>,
    {
        let mut cmd = self.command();
        cmd.args(args);
        cmd.output()
            .map_err(|e| Error::Repo(format!("cannot run {}: {e}", self.git.display())))
    }

    fn run<I, S>(&self, args: I) -> Result<Vec<u8>>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<OsStr>,
    {
        let args: Vec<S> = args.into_iter().collect();
        let out = self.run_raw(&args)?;
        if !out.status.success() {
            return Err(Error::Repo(format!(
                "`git {}` failed: {}",
                join_args(&args),
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        Ok(out.stdout)
    }

    /// Full hash of `rev`, which must name a commit.
    pub fn resolve_commit(&self, rev: &str) -> Result<String> {
        let out = self
            .run(["rev-parse", "--verify", "--quiet", &format!("{rev}^{{commit}}")])
            .map_err(|_| Error::Repo(format!("`{rev}` does not name a commit in {}", self.repo.display())))?;
        Ok(String::from_utf8_lossy(&out).trim().to_owned())
    }

    pub fn path_exists(&self, commit: &str, path: &str) -> Result<bool> {
        let out = self.run_raw(["cat-file", "-e", &format!("{commit}:{path}")])?;
        Ok(out.status.success())
    }

    pub fn is_ancestor(&self, ancestor: &str, descendant: &str) -> Result<bool> {
        let out = self.run_raw(["merge-base", "--is-ancestor", ancestor, descendant])?;
        match out.status.code() {
            Some(0) => Ok(true),
            Some(1) => Ok(false),
            _ => Err(Error::Repo(String::from_utf8_lossy(&out.stderr).trim().to_owned())),
        }
    }

    /// Newline-normalized content of `path` at `commit`.
    pub fn file_content(&self, commit: &str, path: &str) -> Result<String> {
        let commit = self.resolve_commit(commit)?;
        if !self.path_exists(&commit, path)? {
            return Err(Error::NotFound {
                commit,
                path: path.to_owned(),
            });
        }
        let bytes = self.run(["cat-file", "blob", &format!("{commit}:{path}")])?;
        if bytes.contains(&0) {
            return Err(Error::BinaryFile {
                commit,
                path: path.to_owned(),
            });
        }
        let text = String::from_utf8(bytes).map_err(|_| Error::BinaryFile {
            commit: commit.clone(),
            path: path.to_owned(),
        })?;
        Ok(normalize_newlines(&text))
    }

    /// Follow `source_file` from `source_commit` to `target_commit`, through
    /// renames in either direction of history.
    pub fn resolve_target_file(&self, source_commit: &str, source_file: &str, target_commit: &str) -> Result<FileResolution> {
        let source = self.resolve_commit(source_commit)?;
        let target = self.resolve_commit(target_commit)?;
        if !self.path_exists(&source, source_file)? {
            return Err(Error::NotFound {
                commit: source,
                path: source_file.to_owned(),
            });
        }
        if source == target {
            return Ok(FileResolution::Found(source_file.to_owned()));
        }

        let walked = if self.is_ancestor(&source, &target)? {
            Some(self.walk_renames(&source, &target, source_file, true)?)
        } else if self.is_ancestor(&target, &source)? {
            Some(self.walk_renames(&target, &source, source_file, false)?)
        } else {
            None
        };
        match walked {
            Some(Some(path)) if self.path_exists(&target, &path)? => Ok(FileResolution::Found(path)),
            Some(None) => Ok(FileResolution::FileDeleted),
            // divergent histories, or a walk that ended on a path git does not know
            _ => self.direct_rename(&source, &target, source_file),
        }
    }

    /// Replay name-status changes between `older` and `newer` along the
    /// first-parent chain. `forward` tracks a path from `older` to `newer`.
    fn walk_renames(&self, older: &str, newer: &str, path: &str, forward: bool) -> Result<Option<String>> {
        let range = format!("{older}..{newer}");
        let mut args = vec!["log", "-z", "--first-parent", "--format=%x01%H", "--name-status", "-M"];
        if forward {
            args.push("--reverse");
        }
        args.push(&range);
        let out = self.run(args)?;
        let commits = parse_name_status_log(&String::from_utf8_lossy(&out));

        let mut current = path.to_owned();
        let mut exists = true;
        for changes in commits {
            for change in changes {
                match (forward, change) {
                    (true, NameStatus::Renamed { from, to }) if exists && from == current => current = to,
                    (true, NameStatus::Deleted(p)) if exists && p == current => exists = false,
                    (true, NameStatus::Added(p)) if !exists && p == current => exists = true,
                    (false, NameStatus::Renamed { from, to }) if exists && to == current => current = from,
                    (false, NameStatus::Added(p)) if exists && p == current => exists = false,
                    (false, NameStatus::Deleted(p)) if !exists && p == current => exists = true,
                    _ => {}
                }
            }
        }
        Ok(exists.then_some(current))
    }

    fn direct_rename(&self, source: &str, target: &str, path: &str) -> Result<FileResolution> {
        let out = self.run(["diff", "-z", "--name-status", "-M", source, target])?;
        let text = String::from_utf8_lossy(&out);
        let mut changes = parse_name_status_tokens(text.split('\0'));
        let resolution = changes.find_map(|c| match c {
            NameStatus::Renamed { from, to } if from == path => Some(FileResolution::Found(to)),
            NameStatus::Deleted(p) if p == path => Some(FileResolution::FileDeleted),
            _ => None,
        });
        match resolution {
            Some(r) => Ok(r),
            None if self.path_exists(target, path)? => Ok(FileResolution::Found(path.to_owned())),
            None => Ok(FileResolution::FileDeleted),
        }
    }

    /// Run one diff configuration between two blobs (`commit:path` specs).
    pub fn diff_report(
        &self,
        config: DiffConfig,
        source_commit: &str,
        source_file: &str,
        target_commit: &str,
        target_file: &str,
    ) -> Result<RawDiffReport> {
        let mut args = config.args(self.context_lines);
        args.push(format!("{source_commit}:{source_file}"));
        args.push(format!("{target_commit}:{target_file}"));
        let text = self.diff_with(&args)?;
        Ok(RawDiffReport {
            config,
            aliases: Vec::new(),
            text,
            source_file: source_file.to_owned(),
            target_file: target_file.to_owned(),
        })
    }

    /// Diff two files on disk with `--no-index`. Useful for content that is
    /// not committed anywhere.
    pub fn diff_paths(&self, config: DiffConfig, source: &Path, target: &Path) -> Result<RawDiffReport> {
        let mut args = config.args(self.context_lines);
        args.insert(1, "--no-index".to_owned());
        args.push(source.display().to_string());
        args.push(target.display().to_string());
        let text = self.diff_with(&args)?;
        Ok(RawDiffReport {
            config,
            aliases: Vec::new(),
            text,
            source_file: source.display().to_string(),
            target_file: target.display().to_string(),
        })
    }

    fn diff_with(&self, args: &[String]) -> Result<String> {
        let out = self.run_raw(args)?;
        // --no-index exits with 1 when the files differ
        let ok = matches!(out.status.code(), Some(0) | Some(1));
        if !ok {
            return Err(Error::DiffToolFailure {
                args: join_args(args),
                status: out.status.to_string(),
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_owned(),
            });
        }
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    }

    /// All eight diff reports between the two file versions, with
    /// byte-identical and empty reports removed. Order follows
    /// [`DiffConfig::all`].
    pub fn compute_diff_reports(
        &self,
        source_commit: &str,
        target_commit: &str,
        source_file: &str,
        target_file: &str,
    ) -> Result<Vec<RawDiffReport>> {
        let source = self.resolve_commit(source_commit)?;
        let target = self.resolve_commit(target_commit)?;
        let mut reports = Vec::new();
        for config in DiffConfig::all() {
            let report = self.diff_report(config, &source, source_file, &target, target_file)?;
            reports.push(report);
        }
        Ok(dedup_reports(reports))
    }
}

/// Drop empty reports and merge byte-identical ones, keeping first-seen order.
pub fn dedup_reports(reports: Vec<RawDiffReport>) -> Vec<RawDiffReport> {
    let mut unique: Vec<RawDiffReport> = Vec::new();
    for report in reports {
        if report.text.is_empty() {
            continue;
        }
        match unique.iter_mut().find(|u| u.text == report.text) {
            Some(existing) => existing.aliases.push(report.config),
            None => unique.push(report),
        }
    }
    unique
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum NameStatus {
    Added(String),
    Deleted(String),
    Modified(String),
    Renamed { from: String, to: String },
    Copied,
}

fn parse_name_status_log(out: &str) -> Vec<Vec<NameStatus>> {
    out.split('\u{1}')
        .filter(|chunk| !chunk.trim().is_empty())
        .map(|chunk| {
            // first token is the commit hash
            let mut tokens = chunk.split('\0');
            tokens.next();
            parse_name_status_tokens(tokens).collect()
        })
        .collect()
}

fn parse_name_status_tokens<'a>(tokens: impl Iterator<Item = &'a str> + 'a) -> impl Iterator<Item = NameStatus> + 'a {
    let mut tokens = tokens.map(|t| t.trim_start_matches('\n')).filter(|t| !t.is_empty());
    std::iter::from_fn(move || {
        let status = tokens.next()?;
        let change = match status.chars().next()? {
            'A' => NameStatus::Added(tokens.next()?.to_owned()),
            'D' => NameStatus::Deleted(tokens.next()?.to_owned()),
            'R' => NameStatus::Renamed {
                from: tokens.next()?.to_owned(),
                to: tokens.next()?.to_owned(),
            },
            'C' => {
                tokens.next()?;
                tokens.next()?;
                NameStatus::Copied
            }
            _ => NameStatus::Modified(tokens.next()?.to_owned()),
        };
        Some(change)
    })
}

fn join_args<S: AsRef<OsStr>>(args: &[S]) -> String {
    args.iter()
        .map(|a| a.as_ref().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_distinct_configs() {
        let all = DiffConfig::all();
        assert_eq!(all.len(), 8);
        let unique: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(unique.len(), 8);
    }

    #[test]
    fn dedup_keeps_distinct_text_and_drops_empty() {
        let mk = |algorithm, text: &str| RawDiffReport {
            config: DiffConfig {
                algorithm,
                granularity: Granularity::Line,
            },
            aliases: vec![],
            text: text.to_owned(),
            source_file: "a".into(),
            target_file: "a".into(),
        };
        let out = dedup_reports(vec![
            mk(Algorithm::Myers, "x"),
            mk(Algorithm::Minimal, "x"),
            mk(Algorithm::Patience, "y"),
            mk(Algorithm::Histogram, ""),
        ]);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].aliases, vec![DiffConfig {
            algorithm: Algorithm::Minimal,
            granularity: Granularity::Line
        }]);
        assert_eq!(out[1].text, "y");
    }

    #[test]
    fn parses_z_name_status_log() {
        let out = "\u{1}aaa\0\nD\0h.py\0\u{1}bbb\0\nR100\0f.py\0g.py\0\u{1}ccc\0\nM\0f.py\0";
        let commits = parse_name_status_log(out);
        assert_eq!(commits, vec![
            vec![NameStatus::Deleted("h.py".into())],
            vec![NameStatus::Renamed {
                from: "f.py".into(),
                to: "g.py".into()
            }],
            vec![NameStatus::Modified("f.py".into())],
        ]);
    }
}
