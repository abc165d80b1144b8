//! A small corpus of scripted git repositories, one per mapping scenario,
//! with a JSON Lines dataset describing the expected mappings.
//!
//! The figure fixtures reconstruct the worked examples of the method: a
//! moved and modified class (`fig1-*`), a refined word substitution
//! (`fig4`), an unchanged token inside a rewritten line (`fig5`), swapped
//! lines (`fig6`) and a deleted suppression comment (`fig7`). The remaining
//! fixtures cover offsets, renames, backward mapping, re-indentation,
//! multi-line edits and file deletion.

use std::path::{Path, PathBuf};
use std::process::Command;

use crate::error::{Error, Result};
use crate::eval::{EvalRecord, Expected, OutcomeKind, RegionSpec};
use crate::region::{AbsInterval, CharacterRange, FileText};
use crate::search::find_all;

/// A git repository built commit by commit with fixed identities and dates,
/// so that every build yields the same hashes.
#[derive(Debug, Clone)]
pub struct ScriptedRepo {
    dir: PathBuf,
    commits: usize,
}

impl ScriptedRepo {
    pub fn init(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        let repo = Self { dir, commits: 0 };
        repo.git(&["init", "--quiet", "--initial-branch=main"])?;
        Ok(repo)
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    fn git(&self, args: &[&str]) -> Result<String> {
        let git = std::env::var_os("CODEMAPPER_GIT").unwrap_or_else(|| "git".into());
        let date = format!("2024-01-01T00:00:{:02}Z", self.commits % 60);
        let out = Command::new(git)
            .arg("-C")
            .arg(&self.dir)
            .args(["-c", "user.name=Fixture", "-c", "user.email=fixture@example.com", "-c", "commit.gpgsign=false"])
            .args(args)
            .env("GIT_CONFIG_NOSYSTEM", "1")
            .env("GIT_CONFIG_GLOBAL", "/dev/null")
            .env("GIT_AUTHOR_DATE", &date)
            .env("GIT_COMMITTER_DATE", &date)
            .env("LC_ALL", "C")
            .output()?;
        if !out.status.success() {
            return Err(Error::Repo(format!(
                "`git {}` failed: {}",
                args.join(" "),
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        Ok(String::from_utf8_lossy(&out.stdout).trim().to_owned())
    }

    /// Write (`Some`) or delete (`None`) files and commit; returns the hash.
    pub fn commit(&mut self, changes: &[(&str, Option<&str>)], message: &str) -> Result<String> {
        for (path, content) in changes {
            let full = self.dir.join(path);
            match content {
                Some(text) => {
                    if let Some(parent) = full.parent() {
                        std::fs::create_dir_all(parent)?;
                    }
                    std::fs::write(&full, text)?;
                }
                None => {
                    if full.exists() {
                        std::fs::remove_file(&full)?;
                    }
                }
            }
        }
        self.git(&["add", "--all"])?;
        self.git(&["commit", "--quiet", "--allow-empty", "-m", message])?;
        self.commits += 1;
        self.git(&["rev-parse", "HEAD"])
    }
}

/// The `nth` (0-based) occurrence of `needle` in `text`, as a range.
pub fn find_range(text: &str, needle: &str, nth: usize) -> Option<CharacterRange> {
    let file = FileText::new(text);
    let start = *find_all(file.as_str(), needle).get(nth)?;
    file.range_of(AbsInterval::new(start, start + needle.chars().count())?)
}

/// Where a region sits: a file version, and an occurrence of some text in it.
#[derive(Debug, Clone, Copy)]
pub struct Spot {
    pub version: usize,
    pub file: &'static str,
    pub needle: &'static str,
    pub nth: usize,
}

/// One scripted scenario.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: &'static str,
    pub tags: &'static [&'static str],
    /// Each version is a commit: files written (`Some`) or deleted (`None`).
    pub versions: Vec<Vec<(&'static str, Option<&'static str>)>>,
    pub source: Spot,
    pub target_version: usize,
    /// `None` when the region is deleted.
    pub expected: Option<Spot>,
}

impl Fixture {
    /// The outcome the full pipeline is expected to reach.
    pub fn expected_outcome(&self) -> OutcomeKind {
        if self.expected.is_some() {
            OutcomeKind::Exact
        } else {
            OutcomeKind::CorrectDeletion
        }
    }

    /// Content of `file` at `version`, replaying the versions in order.
    pub fn content(&self, version: usize, file: &str) -> Option<&'static str> {
        self.versions[..=version]
            .iter()
            .rev()
            .find_map(|changes| changes.iter().find(|(p, _)| *p == file).map(|(_, c)| *c))
            .flatten()
    }

    fn spot_range(&self, spot: &Spot) -> Result<CharacterRange> {
        let text = self
            .content(spot.version, spot.file)
            .ok_or_else(|| Error::Repo(format!("{}: no {} at version {}", self.id, spot.file, spot.version)))?;
        find_range(text, spot.needle, spot.nth)
            .ok_or_else(|| Error::Repo(format!("{}: `{}` #{} not found", self.id, spot.needle, spot.nth)))
    }

    /// Create the repository under `root/<id>` and describe the mapping task.
    pub fn build(&self, root: &Path) -> Result<EvalRecord> {
        let dir = root.join(self.id);
        if dir.exists() {
            std::fs::remove_dir_all(&dir)?;
        }
        let mut repo = ScriptedRepo::init(&dir)?;
        let mut hashes = Vec::new();
        for (i, changes) in self.versions.iter().enumerate() {
            hashes.push(repo.commit(changes, &format!("{} v{i}", self.id))?);
        }
        let source_range = self.spot_range(&self.source)?;
        let target_commit = hashes[self.target_version].clone();
        let expected = match &self.expected {
            None => Expected::Deleted,
            Some(spot) => Expected::Region(RegionSpec::new(None, spot.file, self.spot_range(spot)?)),
        };
        Ok(EvalRecord {
            id: Some(self.id.to_owned()),
            repo: self.id.to_owned(),
            source: RegionSpec::new(Some(&hashes[self.source.version]), self.source.file, source_range),
            target_commit,
            expected,
            tags: self.tags.iter().map(|t| (*t).to_owned()).collect(),
        })
    }
}

const FIG1_V0: &str = r#"class Calculator:
    def __init__(self, x, y):
        self.x = x
        self.y = y

    def print_values(self):
        print("x =", self.x)
        print("y =", self.y)

    def compute(self):
        if self.x is None:
            raise ValueError("x is missing")
        if self.y is None:
            raise ValueError("y is missing")
        total = self.x + self.y
        return total
"#;

const FIG1_V1: &str = r#"class Calculator:
    def __init__(self, x, y):
        self.x = x
        self.y = y

    def compute(self, scale=1):
        if self.x is None:
            raise ValueError("x is missing")
        if self.y is None:
            raise ValueError("y is missing")
        total = (self.x + self.y) * scale
        return total

    def print_values(self):
        print("x =", self.x)
        print("y =", self.y)
"#;

const FIG1_PRINT: &str = "def print_values(self):\n        print(\"x =\", self.x)\n        print(\"y =\", self.y)";

const FIG4_V0: &str = r#"import data


def load(values):
    x = values.old
    return x


def size(values):
    return len(values)
"#;

const FIG4_V1: &str = r#"import data


def load(values):
    x = values.updated
    return x


def size(values):
    return len(values)
"#;

const FIG5_V0: &str = r#"from net import connect


def open_session(host):
    conn = connect(host, timeout=30)
    conn.login()
    return conn
"#;

const FIG5_V1: &str = r#"from net import connect


def open_session(host, port):
    conn = connect(host, port, timeout=30, retries=3)
    conn.login()
    return conn
"#;

const FIG6_V0: &str = r#"def configure(app):
    app.name = "demo"
    app.debug = False
    app.workers = 4
    app.timeout = 60
    app.cache = None
    app.log_level = "info"
    app.first = register("alpha")
    app.middle = load_settings("middle")
    app.second = register_handler_chain("omega", retries=3, backoff=2.5)
    app.ready = True
    return app
"#;

const FIG6_V1: &str = r#"def configure(app):
    app.name = "demo"
    app.debug = False
    app.workers = 4
    app.timeout = 60
    app.cache = None
    app.log_level = "info"
    app.second = register_handler_chain("omega", retries=3, backoff=2.5)
    app.middle = load_settings("middle")
    app.first = register("alpha")
    app.ready = True
    return app
"#;

const FIG7_V0: &str = r#"import logging


def fetch(url):
    try:
        return download(url)
    # pylint: disable=broad-except
    except Exception:
        logging.warning("fetch failed")
        return None

class DocumentCache:
    """Keeps parsed documents in memory between requests."""

    def __init__(self, capacity=128):
        self.capacity = capacity
        self.entries = {}

    def get(self, key):
        # pylint: disable=broad-except
        return self.entries.get(key)
"#;

const FIG7_V1: &str = r#"import logging


def fetch(url):
    try:
        return download(url)
    except Exception:
        logging.warning("fetch failed")
        return None

class DocumentCache:
    """Keeps parsed documents in memory between requests."""

    def __init__(self, capacity=128):
        self.capacity = capacity
        self.entries = {}

    def get(self, key):
        # pylint: disable=broad-except
        return self.entries.get(key)
"#;

const SHIFT_V0: &str = r#"fn main() {
    let total = sum(&[1, 2, 3]);
    println!("{total}");
}

fn sum(values: &[i32]) -> i32 {
    values.iter().sum()
}
"#;

const SHIFT_V1: &str = r#"use std::io;

/// Entry point.
fn main() {
    let total = sum(&[1, 2, 3]);
    println!("{total}");
}

fn sum(values: &[i32]) -> i32 {
    values.iter().sum()
}

fn unused() {}
"#;

const RENAME_V0: &str = r#"package util;

public class Strings {
    public static String pad(String s, int width) {
        StringBuilder out = new StringBuilder(s);
        while (out.length() < width) {
            out.append(' ');
        }
        return out.toString();
    }
}
"#;

const RENAME_V1: &str = r#"package util;

public class Strings {
    public static String pad(String s, int width) {
        StringBuilder out = new StringBuilder(s);
        while (out.length() < width) {
            out.append('.');
        }
        return out.toString();
    }
}
"#;

const INDENT_V0: &str = r#"def report(items):
    header = "Items"
    print(header)
    for item in items:
        print(item)
    return len(items)
"#;

const INDENT_V1: &str = r#"def report(items, verbose=False):
    header = "Items"
    print(header)
    if verbose:
        for item in items:
            print(item)
    return len(items)
"#;

const BLOCK_V0: &str = r#"function render(user) {
  const name = user.first + " " + user.last;
  const title = user.title;
  const greeting = "Hello, " + name;
  return "<p>" + greeting + "</p>";
}
"#;

const BLOCK_V1: &str = r#"function render(user) {
  const name = `${user.first} ${user.last}`;
  const title = user.title;
  const greeting = "Hello, " + name;
  return `<p>${greeting}</p>`;
}
"#;

const HELPER: &str = "def helper():\n    return 42\n";

/// All fixtures, figure scenarios first.
pub fn fixtures() -> Vec<Fixture> {
    let spot = |version, file, needle, nth| Spot {
        version,
        file,
        needle,
        nth,
    };
    vec![
        Fixture {
            id: "fig1-orange",
            tags: &["figure", "fig1", "modified"],
            versions: vec![vec![("calc.py", Some(FIG1_V0))], vec![("calc.py", Some(FIG1_V1))]],
            source: spot(0, "calc.py", "self.y", 3),
            target_version: 1,
            expected: Some(spot(1, "calc.py", "self.y", 2)),
        },
        Fixture {
            id: "fig1-yellow",
            tags: &["figure", "fig1", "moved"],
            versions: vec![vec![("calc.py", Some(FIG1_V0))], vec![("calc.py", Some(FIG1_V1))]],
            source: spot(0, "calc.py", FIG1_PRINT, 0),
            target_version: 1,
            expected: Some(spot(1, "calc.py", FIG1_PRINT, 0)),
        },
        Fixture {
            id: "fig4",
            tags: &["figure", "fig4", "modified", "refinement"],
            versions: vec![vec![("load.py", Some(FIG4_V0))], vec![("load.py", Some(FIG4_V1))]],
            source: spot(0, "load.py", "old", 0),
            target_version: 1,
            expected: Some(spot(1, "load.py", "updated", 0)),
        },
        Fixture {
            id: "fig5",
            tags: &["figure", "fig5", "search"],
            versions: vec![vec![("session.py", Some(FIG5_V0))], vec![("session.py", Some(FIG5_V1))]],
            source: spot(0, "session.py", "timeout=30", 0),
            target_version: 1,
            expected: Some(spot(1, "session.py", "timeout=30", 0)),
        },
        Fixture {
            id: "fig6",
            tags: &["figure", "fig6", "moved"],
            versions: vec![vec![("config.py", Some(FIG6_V0))], vec![("config.py", Some(FIG6_V1))]],
            source: spot(0, "config.py", "app.first = register(\"alpha\")", 0),
            target_version: 1,
            expected: Some(spot(1, "config.py", "app.first = register(\"alpha\")", 0)),
        },
        Fixture {
            id: "fig7",
            tags: &["figure", "fig7", "deleted"],
            versions: vec![vec![("fetch.py", Some(FIG7_V0))], vec![("fetch.py", Some(FIG7_V1))]],
            source: spot(0, "fetch.py", "# pylint: disable=broad-except", 0),
            target_version: 1,
            expected: None,
        },
        Fixture {
            id: "shifted",
            tags: &["unchanged"],
            versions: vec![vec![("main.rs", Some(SHIFT_V0))], vec![("main.rs", Some(SHIFT_V1))]],
            source: spot(0, "main.rs", "values.iter().sum()", 0),
            target_version: 1,
            expected: Some(spot(1, "main.rs", "values.iter().sum()", 0)),
        },
        Fixture {
            id: "renamed",
            tags: &["rename", "modified"],
            versions: vec![
                vec![("src/Strings.java", Some(RENAME_V0))],
                vec![("src/Strings.java", None), ("src/util/Strings.java", Some(RENAME_V0))],
                vec![("src/util/Strings.java", Some(RENAME_V1))],
            ],
            source: spot(0, "src/Strings.java", "out.append(' ');", 0),
            target_version: 2,
            expected: Some(spot(2, "src/util/Strings.java", "out.append('.');", 0)),
        },
        Fixture {
            id: "backward",
            tags: &["backward", "modified", "refinement"],
            versions: vec![vec![("load.py", Some(FIG4_V0))], vec![("load.py", Some(FIG4_V1))]],
            source: spot(1, "load.py", "updated", 0),
            target_version: 0,
            expected: Some(spot(0, "load.py", "old", 0)),
        },
        Fixture {
            id: "reindented",
            tags: &["moved", "horizontal"],
            versions: vec![vec![("report.py", Some(INDENT_V0))], vec![("report.py", Some(INDENT_V1))]],
            source: spot(0, "report.py", "for item in items:\n        print(item)", 0),
            target_version: 1,
            expected: Some(spot(1, "report.py", "for item in items:\n            print(item)", 0)),
        },
        Fixture {
            id: "block",
            tags: &["modified", "multiline"],
            versions: vec![vec![("render.js", Some(BLOCK_V0))], vec![("render.js", Some(BLOCK_V1))]],
            source: spot(0, "render.js", BLOCK_SOURCE, 0),
            target_version: 1,
            expected: Some(spot(1, "render.js", BLOCK_TARGET, 0)),
        },
        Fixture {
            id: "file-deleted",
            tags: &["deleted"],
            versions: vec![
                vec![("helper.py", Some(HELPER)), ("keep.txt", Some("keep\n"))],
                vec![("helper.py", None)],
            ],
            source: spot(0, "helper.py", "return 42", 0),
            target_version: 1,
            expected: None,
        },
    ]
}

const BLOCK_SOURCE: &str = "const name = user.first + \" \" + user.last;\n  const title = user.title;\n  const greeting = \"Hello, \" + name;\n  return \"<p>\" + greeting + \"</p>\";";
const BLOCK_TARGET: &str = "const name = `${user.first} ${user.last}`;\n  const title = user.title;\n  const greeting = \"Hello, \" + name;\n  return `<p>${greeting}</p>`;";

/// Build every fixture under `root` and write `root/dataset.jsonl` and
/// `root/manifest.json` (fixture id → expected outcome kind).
pub fn build_corpus(root: &Path) -> Result<(PathBuf, Vec<EvalRecord>)> {
    std::fs::create_dir_all(root)?;
    let mut records = Vec::new();
    let mut manifest = serde_json::Map::new();
    for fixture in fixtures() {
        records.push(fixture.build(root)?);
        manifest.insert(fixture.id.into(), fixture.expected_outcome().as_str().into());
    }
    let dataset = root.join("dataset.jsonl");
    let lines: Vec<String> = records.iter().map(|r| r.to_json().to_string()).collect();
    std::fs::write(&dataset, lines.join("\n") + "\n")?;
    std::fs::write(root.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok((dataset, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spots_resolve() {
        for f in fixtures() {
            f.spot_range(&f.source).unwrap();
            if let Some(e) = &f.expected {
                f.spot_range(e).unwrap();
            }
        }
    }

    #[test]
    fn find_range_lines() {
        assert_eq!(find_range("ab\ncd ab\n", "ab", 1), Some(CharacterRange::new(2, 4, 2, 5).unwrap()));
        assert_eq!(find_range("ab\n", "zz", 0), None);
    }
}
