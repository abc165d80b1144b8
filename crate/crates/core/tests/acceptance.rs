//! Acceptance criteria. Prints one `PASS`/`FAIL` line per criterion and
//! exits non-zero when a hard criterion fails. Criterion 8 is a soft
//! performance report: it prints `PASS` or `SOFT-FAIL` and never fails the run.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use codemapper::candidates::{classify_overlap, extract_all, Origin, OverlapRelation, TargetSide};
use codemapper::eval::{char_distance, overlap_metrics, Ablation, EvalReport, Evaluator, OutcomeKind};
use codemapper::fixtures::{build_corpus, find_range, fixtures, ScriptedRepo};
use codemapper::git::{dedup_reports, DiffConfig, GitGateway};
use codemapper::mapper::{parse_reports, CodeMapper, MapRequest};
use codemapper::parse::{Hunk, LineBlock};
use codemapper::region::{AbsInterval, CharacterRange, FileText};
use codemapper::select::MapperConfig;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Name, whether failing it fails the run, and the check.
type Criterion = (&'static str, bool, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("figure fixtures", true, figure_fixtures),
        ("metrics oracle", true, metrics_oracle),
        ("classify_overlap totality", true, classify_totality),
        ("diff candidates under edits outside the region", true, edits_outside_region),
        ("single-line refinement oracle", true, refinement_oracle),
        ("ablations", true, ablations),
        ("context sweep", true, context_sweep),
        ("10k-line map under 3 s", false, large_file),
    ];
    let mut failed = 0;
    for (i, (name, hard, check)) in criteria.iter().enumerate() {
        let v = check();
        let status = match (v.pass, hard) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "SOFT-FAIL",
        };
        if !v.pass && *hard {
            failed += 1;
        }
        println!("{status} [{}] {name}: {}", i + 1, v.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// ---------------------------------------------------------------- helpers

/// Plain dynamic-programming Levenshtein distance over chars.
fn levenshtein(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn similarity(a: &[char], b: &[char]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

/// Diff-derived candidates for `range`, computed with every diff
/// configuration on two files outside any repository.
fn diff_candidates(
    gw: &GitGateway,
    dir: &Path,
    before: &str,
    after: &str,
    range: &CharacterRange,
) -> Result<Vec<CharacterRange>, String> {
    let (sp, tp) = (dir.join("before"), dir.join("after"));
    std::fs::write(&sp, before).map_err(|e| e.to_string())?;
    std::fs::write(&tp, after).map_err(|e| e.to_string())?;
    let reports = DiffConfig::all()
        .into_iter()
        .map(|c| gw.diff_paths(c, &sp, &tp))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let reports = dedup_reports(reports.into_iter().filter(|r| !r.text.is_empty()).collect());
    let (src, tgt) = (FileText::new(before), FileText::new(after));
    let hunks = parse_reports(&reports, &src, &tgt).map_err(|e| e.to_string())?;
    let side = TargetSide { commit: "t", file: "f", text: &tgt };
    let candidates = extract_all(&hunks, range, side, true).map_err(|e| e.to_string())?;
    Ok(candidates.iter().filter_map(|c| c.range()).collect())
}

fn scratch_gateway() -> (tempfile::TempDir, GitGateway) {
    let dir = tempfile::tempdir().unwrap();
    ScriptedRepo::init(dir.path()).unwrap();
    let gw = GitGateway::open(dir.path()).unwrap();
    (dir, gw)
}

/// Mean char distance over records whose prediction overlaps the expected
/// region (exact matches count as 0).
fn mean_overlap_distance(report: &EvalReport) -> f64 {
    let d: Vec<usize> = report
        .records
        .iter()
        .filter_map(|r| r.outcome)
        .filter_map(|o| match o.kind {
            OutcomeKind::Exact => Some(0),
            OutcomeKind::PartialOverlap => o.char_distance,
            _ => None,
        })
        .collect();
    d.iter().sum::<usize>() as f64 / d.len().max(1) as f64
}

fn record_kind(report: &EvalReport, id: &str) -> Option<OutcomeKind> {
    report.records.iter().find(|r| r.id == id).and_then(|r| r.outcome).map(|o| o.kind)
}

// ------------------------------------------------------------- criteria

fn figure_fixtures() -> Verdict {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let figures: Vec<_> = fixtures().into_iter().filter(|f| f.tags.contains(&"figure")).collect();
    let records = match figures.iter().map(|f| f.build(dir.path())).collect::<Result<Vec<_>, _>>() {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("building fixtures failed: {e}")),
    };
    let report = match Evaluator::new(dir.path()).evaluate(&records, MapperConfig::default()) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("evaluation failed: {e}")),
    };
    let elapsed = started.elapsed().as_secs_f64();
    let mut bad = Vec::new();
    for (f, r) in figures.iter().zip(&report.records) {
        let kind = r.outcome.map(|o| o.kind);
        if kind != Some(f.expected_outcome()) {
            bad.push(format!("{}={}", f.id, kind.map(|k| k.as_str()).unwrap_or("error")));
        }
    }
    let ids: Vec<&str> = figures.iter().map(|f| f.id).collect();
    verdict(
        bad.is_empty() && elapsed < 10.0,
        format!(
            "{}/{} as expected ({}) in {elapsed:.2} s{}",
            figures.len() - bad.len(),
            figures.len(),
            ids.join(", "),
            if bad.is_empty() { String::new() } else { format!("; wrong: {}", bad.join(", ")) }
        ),
    )
}

fn metrics_oracle() -> Verdict {
    let d = char_distance(&AbsInterval::new(20, 56).unwrap(), &AbsInterval::new(18, 64).unwrap());
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut distance_mismatches = 0;
    for _ in 0..1000 {
        let mut interval = || {
            let s = rng.gen_range(0..100);
            AbsInterval::new(s, s + rng.gen_range(1..50)).unwrap()
        };
        let (p, e) = (interval(), interval());
        let ps: BTreeSet<usize> = (p.start..p.end).collect();
        let es: BTreeSet<usize> = (e.start..e.end).collect();
        let common = ps.intersection(&es).count() as f64;
        let (recall, precision, f1) = overlap_metrics(&p, &e);
        let oracle = (common / es.len() as f64, common / ps.len() as f64, 2.0 * common / (ps.len() + es.len()) as f64);
        worst = worst
            .max((recall - oracle.0).abs())
            .max((precision - oracle.1).abs())
            .max((f1 - oracle.2).abs());
        let first = |s: &BTreeSet<usize>| *s.iter().next().unwrap();
        let last = |s: &BTreeSet<usize>| *s.iter().next_back().unwrap();
        let oracle_d = first(&ps).abs_diff(first(&es)) + last(&ps).abs_diff(last(&es));
        if char_distance(&p, &e) != oracle_d {
            distance_mismatches += 1;
        }
    }
    verdict(
        d == 10 && worst <= 1e-12 && distance_mismatches == 0,
        format!("char_distance([20,55],[18,63]) = {d}; max |error| over 1000 pairs = {worst:.1e}; distance mismatches = {distance_mismatches}"),
    )
}

fn classify_totality() -> Verdict {
    let mut cases = 0;
    let mut wrong = Vec::new();
    for hs in 1..=13usize {
        for he in hs - 1..=12 {
            for r1 in 1..=12usize {
                for r2 in r1..=12 {
                    cases += 1;
                    let hunk = Hunk {
                        source: LineBlock::new(hs, he),
                        target: LineBlock::new(1, 1),
                        ops: Vec::new(),
                        fragments: None,
                    };
                    let range = CharacterRange::new(r1, 1, r2, 1).unwrap();
                    let holding: Vec<OverlapRelation> = if he < hs {
                        vec![if r1 < hs && hs <= r2 { OverlapRelation::Middle } else { OverlapRelation::Disjoint }]
                    } else {
                        [
                            (hs <= r1 && he >= r2, OverlapRelation::FullyCovered),
                            (hs <= r1 && r1 <= he && he < r2, OverlapRelation::Top),
                            (r1 < hs && hs <= r2 && r2 <= he, OverlapRelation::Bottom),
                            (r1 < hs && he < r2, OverlapRelation::Middle),
                            (he < r1 || hs > r2, OverlapRelation::Disjoint),
                        ]
                        .into_iter()
                        .filter(|(holds, _)| *holds)
                        .map(|(_, rel)| rel)
                        .collect()
                    };
                    let got = classify_overlap(&hunk, &range);
                    if holding.len() != 1 || holding[0] != got {
                        wrong.push(format!("hunk {hs}..{he} region {r1}..{r2}: {got:?} vs {holding:?}"));
                    }
                }
            }
        }
    }
    verdict(
        wrong.is_empty(),
        format!("{cases} (hunk, region) pairs, {} misclassified{}", wrong.len(), wrong.first().map(|w| format!("; e.g. {w}")).unwrap_or_default()),
    )
}

fn random_statement(rng: &mut StdRng) -> String {
    const NAMES: [&str; 10] = ["total", "count", "items", "result", "offset", "buffer", "index", "value", "limit", "cache"];
    format!(
        "{} = {}({}, {}) + {}",
        NAMES.choose(rng).unwrap(),
        NAMES.choose(rng).unwrap(),
        NAMES.choose(rng).unwrap(),
        rng.gen_range(0..1000),
        rng.gen_range(0..1000)
    )
}

/// Apply 1-6 random whole-line edits (insert, delete, replace) to `lines`.
fn edit_lines(rng: &mut StdRng, lines: &mut Vec<String>) {
    for _ in 0..rng.gen_range(1..=6) {
        match rng.gen_range(0..3) {
            0 => {
                let at = rng.gen_range(0..=lines.len());
                lines.insert(at, random_statement(rng));
            }
            1 if !lines.is_empty() => {
                lines.remove(rng.gen_range(0..lines.len()));
            }
            _ if !lines.is_empty() => {
                let at = rng.gen_range(0..lines.len());
                lines[at] = random_statement(rng);
            }
            _ => lines.push(random_statement(rng)),
        }
    }
}

fn edits_outside_region() -> Verdict {
    let (_repo, gw) = scratch_gateway();
    let cases: Vec<u64> = (0..500).collect();
    let results: Vec<Result<bool, String>> = cases
        .par_iter()
        .map(|&seed| {
            let mut rng = StdRng::seed_from_u64(1000 + seed);
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let mut above: Vec<String> = (0..rng.gen_range(0..15)).map(|_| random_statement(&mut rng)).collect();
            let mut below: Vec<String> = (0..rng.gen_range(0..15)).map(|_| random_statement(&mut rng)).collect();
            let region: Vec<String> = (0..rng.gen_range(1..5))
                .map(|i| format!("    marked_{seed}_{i}(alpha, beta) + gamma_{i}"))
                .collect();
            let join = |parts: &[&Vec<String>]| parts.iter().flat_map(|p| p.iter()).map(|l| format!("{l}\n")).collect::<String>();
            let before = join(&[&above, &region, &below]);
            let l1 = above.len() + 1;
            let l2 = l1 + region.len() - 1;
            let c1 = rng.gen_range(1..=region[0].chars().count());
            let last_len = region[region.len() - 1].chars().count();
            let c2 = if l1 == l2 { rng.gen_range(c1..=last_len) } else { rng.gen_range(1..=last_len) };
            let range = CharacterRange::new(l1, c1, l2, c2).map_err(|e| e.to_string())?;
            let marked = FileText::new(&before).extract(&range).map_err(|e| e.to_string())?.to_owned();
            let (edit_above, edit_below) = match rng.gen_range(0..3) {
                0 => (true, false),
                1 => (false, true),
                _ => (true, true),
            };
            if edit_above {
                edit_lines(&mut rng, &mut above);
            }
            if edit_below {
                edit_lines(&mut rng, &mut below);
            }
            let after = join(&[&above, &region, &below]);
            if after == before {
                above.insert(0, "# changed".into());
            }
            let after = join(&[&above, &region, &below]);
            let found = diff_candidates(&gw, dir.path(), &before, &after, &range)?;
            let tgt = FileText::new(&after);
            Ok(!found.is_empty() && found.iter().all(|r| tgt.extract(r).map(|t| t == marked).unwrap_or(false)))
        })
        .collect();
    let errors: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let ok = results.iter().filter(|r| matches!(r, Ok(true))).count();
    verdict(
        ok == cases.len(),
        format!(
            "{ok}/{} edit scripts keep the marked text ({:.1}%){}",
            cases.len(),
            100.0 * ok as f64 / cases.len() as f64,
            errors.first().map(|e| format!("; first error: {e}")).unwrap_or_default()
        ),
    )
}

const IDENTS: [&str; 12] = [
    "width", "height", "area", "compute", "self", "values", "old_value", "result", "items", "count", "index", "parse",
];

/// A statement built from distinct identifiers, so every token occurs once
/// and the oracle cannot prefer a copy of the region elsewhere on the line.
fn random_line(rng: &mut StdRng) -> Vec<String> {
    let args = rng.gen_range(1..4);
    let plus = rng.gen_bool(0.5);
    let mut names = IDENTS.choose_multiple(rng, 2 + args + usize::from(plus)).map(|s| s.to_string());
    let mut tokens = vec!["    ".to_owned(), names.next().unwrap(), " = ".into(), names.next().unwrap(), "(".into()];
    for i in 0..args {
        if i > 0 {
            tokens.push(", ".into());
        }
        tokens.push(names.next().unwrap());
    }
    tokens.push(")".into());
    if plus {
        tokens.push(" + ".into());
        tokens.push(names.next().unwrap());
    }
    tokens
}

fn is_word(token: &str) -> bool {
    token.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// The kinds of single-line substitution the refinement oracle is run on.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Edit {
    /// One character of an identifier replaced by another letter.
    ReplaceChar,
    /// One letter inserted into an identifier.
    InsertChar,
    /// One character removed from an identifier.
    DeleteChar,
    /// An identifier swapped for another identifier not on the line.
    SwapToken,
}

/// Apply one `edit` to a random identifier of `tokens`.
fn substitute(rng: &mut StdRng, tokens: &[String], edit: Edit) -> Vec<String> {
    let mut out = tokens.to_vec();
    let words: Vec<usize> = (0..tokens.len())
        .filter(|&i| is_word(&tokens[i]) && (edit != Edit::DeleteChar || tokens[i].len() > 1))
        .collect();
    let at = *words.choose(rng).unwrap();
    loop {
        let mut chars: Vec<char> = tokens[at].chars().collect();
        let letter = (b'a' + rng.gen_range(0..26)) as char;
        match edit {
            Edit::ReplaceChar => {
                let pos = rng.gen_range(0..chars.len());
                chars[pos] = letter;
            }
            Edit::InsertChar => chars.insert(rng.gen_range(0..=chars.len()), letter),
            Edit::DeleteChar => {
                chars.remove(rng.gen_range(0..chars.len()));
            }
            Edit::SwapToken => {
                let unused: Vec<&str> = IDENTS.iter().copied().filter(|w| !tokens.iter().any(|t| t == w)).collect();
                chars = unused.choose(rng).unwrap().chars().collect();
            }
        }
        let replacement: String = chars.into_iter().collect();
        if !tokens.contains(&replacement) {
            out[at] = replacement;
            return out;
        }
    }
}

struct RefinementStats {
    cases: usize,
    optimal: usize,
    outside: usize,
    errors: Vec<String>,
}

/// Run `cases` single-line substitutions through the diff pipeline and
/// compare each refined candidate with a brute-force oracle: every
/// sub-range of the modified target line, scored by similarity to the
/// source sub-text.
fn refinement_cases(seed: u64, cases: u64, edits: &[Edit]) -> RefinementStats {
    let (_repo, gw) = scratch_gateway();
    let results: Vec<Result<(bool, bool), String>> = (0..cases)
        .into_par_iter()
        .map(|case| {
            let mut rng = StdRng::seed_from_u64(seed + case);
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let tokens = random_line(&mut rng);
            let edit = *edits.choose(&mut rng).unwrap();
            let changed = substitute(&mut rng, &tokens, edit);
            let (src_line, tgt_line) = (tokens.concat(), changed.concat());
            let before = format!("def f():\n    setup()\n{src_line}\n    return result\n");
            let after = format!("def f():\n    setup()\n{tgt_line}\n    return result\n");
            let range = if rng.gen_bool(0.5) {
                // a random span of whole non-blank tokens
                let starts: Vec<usize> = (0..tokens.len()).filter(|&i| !tokens[i].trim().is_empty()).collect();
                let a = *starts.choose(&mut rng).unwrap();
                let ends: Vec<usize> = starts.iter().copied().filter(|&j| j >= a).collect();
                let b = *ends.choose(&mut rng).unwrap();
                let col = |i: usize| tokens[..i].concat().chars().count();
                let lead = tokens[a].chars().take_while(|c| c.is_whitespace()).count();
                let trail = tokens[b].chars().rev().take_while(|c| c.is_whitespace()).count();
                CharacterRange::new(3, col(a) + lead + 1, 3, col(b + 1) - trail)
            } else {
                // any span of at least two characters after the indentation
                let len = src_line.chars().count();
                let c1 = rng.gen_range(5..len);
                CharacterRange::new(3, c1, 3, rng.gen_range(c1 + 1..=len))
            }
            .map_err(|e| e.to_string())?;
            let src_chars: Vec<char> = FileText::new(&before).extract(&range).map_err(|e| e.to_string())?.chars().collect();

            let tgt: Vec<char> = tgt_line.chars().collect();
            let mut best: f64 = 0.0;
            for i in 0..tgt.len() {
                for j in i..tgt.len() {
                    best = best.max(similarity(&src_chars, &tgt[i..=j]));
                }
            }
            let found = diff_candidates(&gw, dir.path(), &before, &after, &range)?;
            let coarse = CharacterRange::new(3, 1, 3, tgt.len()).unwrap();
            let inside = found.iter().all(|r| coarse.contains(r));
            let target = FileText::new(&after);
            let optimal = !found.is_empty()
                && found.iter().all(|r| {
                    let text: Vec<char> = target.extract(r).unwrap_or_default().chars().collect();
                    (similarity(&src_chars, &text) - best).abs() <= 1e-12
                });
            if !optimal && std::env::var_os("CODEMAPPER_ACCEPTANCE_DEBUG").is_some() {
                let got: Vec<String> = found.iter().map(|r| format!("{r} {:?}", target.extract(r).unwrap_or_default())).collect();
                eprintln!(
                    "case {case}: {src_line:?} -> {tgt_line:?}\n  region {range} {:?} best {best:.4}\n  got {got:?}",
                    src_chars.iter().collect::<String>()
                );
            }
            Ok((optimal, inside))
        })
        .collect();
    RefinementStats {
        cases: cases as usize,
        optimal: results.iter().filter(|r| matches!(r, Ok((true, _)))).count(),
        outside: results.iter().filter(|r| matches!(r, Ok((_, false)))).count(),
        errors: results.into_iter().filter_map(Result::err).collect(),
    }
}

/// Graded on single-character substitutions, where the character oracle
/// and the fragment-level refinement agree on what "the same text" is.
/// Whole-identifier swaps are reported alongside: there the oracle prefers
/// look-alike fragments (`count)` -> `s)` in `values)`), while refinement
/// follows the swap (`old` -> `updated`, as the Fig. 4 fixture requires).
fn refinement_oracle() -> Verdict {
    let graded = refinement_cases(5000, 200, &[Edit::ReplaceChar, Edit::InsertChar, Edit::DeleteChar]);
    let swaps = refinement_cases(9000, 200, &[Edit::SwapToken]);
    let rate = graded.optimal as f64 / graded.cases as f64;
    let outside = graded.outside + swaps.outside;
    verdict(
        graded.errors.is_empty() && swaps.errors.is_empty() && rate >= 0.95 && outside == 0,
        format!(
            "{}/{} single-character substitutions match the brute-force optimum ({:.1}%); \
             identifier swaps (informational): {}/{} ({:.1}%); outside the coarse range: {outside}/{}{}",
            graded.optimal,
            graded.cases,
            100.0 * rate,
            swaps.optimal,
            swaps.cases,
            100.0 * swaps.optimal as f64 / swaps.cases as f64,
            graded.cases + swaps.cases,
            graded.errors.iter().chain(&swaps.errors).next().map(|e| format!("; first error: {e}")).unwrap_or_default()
        ),
    )
}

fn ablations() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (_, records) = match build_corpus(dir.path()) {
        Ok(x) => x,
        Err(e) => return verdict(false, format!("building corpus failed: {e}")),
    };
    let runs = match Evaluator::new(dir.path()).ablation(&records, MapperConfig::default()) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("evaluation failed: {e}")),
    };
    let get = |a: Ablation| &runs.iter().find(|(v, _)| *v == a).unwrap().1;
    let full = get(Ablation::Full);
    let lost = |a: Ablation, id: &str| record_kind(get(a), id).is_none_or(|k| !k.is_exact());
    let no_move_loses_fig6 = lost(Ablation::NoMove, "fig6") && !lost(Ablation::Full, "fig6");
    let no_search_loses_fig5 = lost(Ablation::NoSearch, "fig5") && !lost(Ablation::Full, "fig5");
    let (full_d, no_refine_d) = (mean_overlap_distance(full), mean_overlap_distance(get(Ablation::NoRefine)));
    let drops: Vec<(Ablation, f64)> = Ablation::ALL
        .iter()
        .filter(|a| **a != Ablation::Full)
        .map(|&a| (a, full.aggregate.mean_f1 - get(a).aggregate.mean_f1))
        .collect();
    let no_diff_drop = drops.iter().find(|(a, _)| *a == Ablation::NoDiff).unwrap().1;
    let largest = drops.iter().all(|(a, d)| *a == Ablation::NoDiff || *d < no_diff_drop);
    let f1s: Vec<String> = drops.iter().map(|(a, d)| format!("{} -{d:.3}", a.as_str())).collect();
    verdict(
        no_move_loses_fig6 && no_search_loses_fig5 && no_refine_d > full_d && largest,
        format!(
            "no-move loses fig6: {no_move_loses_fig6}; no-search loses fig5: {no_search_loses_fig5}; \
             mean char distance {full_d:.2} -> {no_refine_d:.2} without refinement; F1 drops: {}",
            f1s.join(", ")
        ),
    )
}

fn context_sweep() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (_, records) = match build_corpus(dir.path()) {
        Ok(x) => x,
        Err(e) => return verdict(false, format!("building corpus failed: {e}")),
    };
    let sizes = [0, 5, 10, 15, 20];
    let runs = match Evaluator::new(dir.path()).context_sweep(&records, MapperConfig::default(), &sizes) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("evaluation failed: {e}")),
    };
    let f1: Vec<(usize, f64)> = runs.iter().map(|(n, r)| (*n, r.aggregate.mean_f1)).collect();
    let at0 = f1.iter().find(|(n, _)| *n == 0).unwrap().1;
    let rest: Vec<f64> = f1.iter().filter(|(n, _)| *n != 0).map(|(_, f)| *f).collect();
    let (lo, hi) = rest.iter().fold((f64::MAX, f64::MIN), |(lo, hi), f| (lo.min(*f), hi.max(*f)));
    let shown: Vec<String> = f1.iter().map(|(n, f)| format!("{n}:{f:.3}")).collect();
    verdict(
        rest.iter().all(|f| *f >= at0) && hi - lo < 0.05,
        format!("F1 by context size {}; spread over 5-20 = {:.3}", shown.join(" "), hi - lo),
    )
}

fn large_file() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut repo = ScriptedRepo::init(dir.path()).unwrap();
    let mut rng = StdRng::seed_from_u64(10_000);
    let mut lines: Vec<String> = (0..10_000)
        .map(|i| format!("    let value_{i} = compute_{}(input_{}, {});", i % 97, i % 13, i * 7 % 1000))
        .collect();
    let v0 = lines.join("\n") + "\n";
    // scattered edits: replacements, insertions and deletions
    for _ in 0..60 {
        let at = rng.gen_range(0..lines.len());
        match rng.gen_range(0..3) {
            0 => lines[at] = format!("    let changed_{at} = other({});", rng.gen_range(0..100)),
            1 => lines.insert(at, format!("    // note {}", rng.gen_range(0..100))),
            _ => {
                lines.remove(at);
            }
        }
    }
    let v1 = lines.join("\n") + "\n";
    let c0 = repo.commit(&[("big.rs", Some(&v0))], "v0").unwrap();
    let c1 = repo.commit(&[("big.rs", Some(&v1))], "v1").unwrap();
    let needle = "let value_5000 = compute_53(input_8, 0);";
    let range = find_range(&v0, needle, 0).unwrap();
    let mapper = CodeMapper::open(dir.path(), MapperConfig::default().with_context_lines(15)).unwrap();
    let started = Instant::now();
    let result = mapper.map(&MapRequest {
        source_commit: c0,
        file: "big.rs".into(),
        range,
        target_commit: c1,
    });
    let secs = started.elapsed().as_secs_f64();
    let found = match &result {
        Ok(r) => match r.target.location() {
            Some(loc) => FileText::new(&v1).extract(&loc.range).map(|t| t == needle).unwrap_or(false)
                || !v1.contains(needle),
            None => !v1.contains(needle),
        },
        Err(_) => false,
    };
    let origin = result.as_ref().ok().and_then(|r| r.selected()).map(|c| c.origin);
    verdict(
        secs < 3.0 && found,
        format!(
            "mapped line 5000 of 10000 in {secs:.2} s (origin {}), correct: {found}",
            origin.map(Origin::as_str).unwrap_or("-")
        ),
    )
}
