//! `codemapper map` maps one region; `codemapper eval` runs a dataset.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use codemapper::error::Error;
use codemapper::eval::{load_dataset, Aggregate, EvalReport, Evaluator};
use codemapper::mapper::{CodeMapper, MapRequest, MapResult};
use codemapper::region::{CharacterRange, Region};
use codemapper::select::MapperConfig;

const EXIT_REGION: u8 = 2;
const EXIT_REPO: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATASET: u8 = 65;

#[derive(Parser)]
#[command(name = "codemapper", version, about = "Map code regions between git commits")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Map one region to another commit. Lines and columns are 1-based and
    /// the end column is inclusive.
    Map(MapArgs),
    /// Evaluate a JSON Lines dataset of expected mappings.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Toggles {
    /// Unchanged lines of context used for scoring.
    #[arg(long, default_value_t = 15)]
    context: usize,
    /// Disable character-level refinement.
    #[arg(long)]
    no_refine: bool,
    /// Disable moved-code detection.
    #[arg(long)]
    no_move: bool,
    /// Disable exact text search.
    #[arg(long)]
    no_search: bool,
    /// Score without context lines.
    #[arg(long)]
    no_context: bool,
    /// Disable diff-based candidates.
    #[arg(long)]
    no_diff: bool,
}

impl Toggles {
    fn config(&self) -> MapperConfig {
        MapperConfig {
            context_lines: self.context,
            diff: !self.no_diff,
            refinement: !self.no_refine,
            movement: !self.no_move,
            search: !self.no_search,
            context: !self.no_context,
        }
    }
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    repo: PathBuf,
    #[arg(long)]
    source_commit: String,
    /// Path of the file at the source commit, relative to the repository root.
    #[arg(long)]
    file: String,
    #[arg(long)]
    start_line: usize,
    #[arg(long)]
    start_col: usize,
    #[arg(long)]
    end_line: usize,
    #[arg(long)]
    end_col: usize,
    #[arg(long)]
    target_commit: String,
    #[command(flatten)]
    toggles: Toggles,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Include every ranked candidate.
    #[arg(long)]
    verbose: bool,
    /// Report wall time per phase.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Also run once with each component disabled.
    #[arg(long)]
    ablation: bool,
    /// Comma-separated context sizes to sweep, e.g. 0,1,3,5,10,15,20.
    #[arg(long, value_delimiter = ',')]
    context_sweep: Option<Vec<usize>>,
    #[command(flatten)]
    toggles: Toggles,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per CPU).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Cmd::Map(args) => run_map(args),
        Cmd::Eval(args) => run_eval(args),
    }
}

fn error_exit(e: &Error) -> ExitCode {
    eprintln!("codemapper: {e}");
    ExitCode::from(if e.is_region_error() { EXIT_REGION } else { EXIT_REPO })
}

fn run_map(args: MapArgs) -> ExitCode {
    let range = match CharacterRange::new(args.start_line, args.start_col, args.end_line, args.end_col) {
        Ok(r) => r,
        Err(e) => return error_exit(&e),
    };
    let request = MapRequest {
        source_commit: args.source_commit,
        file: args.file,
        range,
        target_commit: args.target_commit,
    };
    let result = CodeMapper::open(&args.repo, args.toggles.config()).and_then(|m| m.map(&request));
    match result {
        Ok(result) => {
            match args.format {
                Format::Json => println!("{}", result.to_json(args.verbose, args.timing)),
                Format::Text => print!("{}", map_text(&result, args.verbose, args.timing)),
            }
            ExitCode::SUCCESS
        }
        Err(e) => error_exit(&e),
    }
}

fn region_text(region: &Region) -> String {
    match region {
        Region::Located(loc) => format!("{}:{} {}", loc.file, loc.range, loc.commit),
        Region::Deleted => "deleted".into(),
    }
}

fn map_text(result: &MapResult, verbose: bool, timing: bool) -> String {
    let mut out = match &result.target {
        Region::Located(_) => {
            let origin = result.selected().map(|c| c.origin.as_str()).unwrap_or("-");
            format!("{} [{origin}]\n", region_text(&result.target))
        }
        Region::Deleted => format!(
            "deleted ({})\n",
            result.reason.map(|r| r.as_str()).unwrap_or("no_candidates")
        ),
    };
    if verbose {
        for c in &result.ranked {
            let score = c.score.map(|s| format!("{s:.4}")).unwrap_or_else(|| "-".into());
            out.push_str(&format!("  {score}  {:<8}  {}\n", c.origin.as_str(), region_text(&c.region)));
        }
    }
    if timing {
        out.push_str(&format!(
            "candidates {:.1} ms, selection {:.1} ms\n",
            result.timing.candidates.as_secs_f64() * 1e3,
            result.timing.selection.as_secs_f64() * 1e3
        ));
    }
    out
}

fn aggregate_line(label: &str, a: &Aggregate) -> String {
    let dist = a.mean_char_distance.map(|d| format!("{d:.1}")).unwrap_or_else(|| "-".into());
    format!(
        "{label:<14} {:>5} {:>6.3} {:>6.3} {:>7} {:>6.3} {:>6.3} {:>6.3} {:>6}\n",
        a.records, a.exact_rate, a.overlap_rate, dist, a.mean_recall, a.mean_precision, a.mean_f1, a.errors
    )
}

const TABLE_HEADER: &str = "run             recs  exact  overlp  chdist recall  prec     f1   errs\n";

fn report_text(report: &EvalReport) -> String {
    let mut out = String::new();
    for r in &report.records {
        let status = match (&r.outcome, &r.error) {
            (Some(o), _) => match o.char_distance {
                Some(d) => format!("{} (char distance {d}, f1 {:.3})", o.kind.as_str(), o.f1),
                None => o.kind.as_str().to_owned(),
            },
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "error".into(),
        };
        out.push_str(&format!("{:<20} {status}\n", r.id));
    }
    out.push('\n');
    out.push_str(TABLE_HEADER);
    out.push_str(&aggregate_line("all", &report.aggregate));
    for (tag, agg) in &report.by_tag {
        out.push_str(&aggregate_line(&format!("#{tag}"), agg));
    }
    out
}

fn run_eval(args: EvalArgs) -> ExitCode {
    let records = match load_dataset(&args.dataset) {
        Ok(r) => r,
        Err(e @ Error::Dataset { .. }) => {
            eprintln!("codemapper: {e}");
            return ExitCode::from(EXIT_DATASET);
        }
        Err(e) => {
            eprintln!("codemapper: cannot read dataset: {e}");
            return ExitCode::from(EXIT_DATASET);
        }
    };
    let mut evaluator = Evaluator::for_dataset(&args.dataset).with_jobs(args.jobs);
    let base = args.toggles.config();
    let outcome = (|| -> codemapper::error::Result<(Value, String, bool)> {
        let report = evaluator.evaluate(&records, base)?;
        let mut failed = report.has_errors();
        let mut doc = json!({ "report": report });
        let mut text = report_text(&report);
        if args.ablation {
            let runs = evaluator.ablation(&records, base)?;
            text.push_str("\nablation\n");
            text.push_str(TABLE_HEADER);
            let mut rows = Vec::new();
            for (variant, r) in &runs {
                failed |= r.has_errors();
                text.push_str(&aggregate_line(variant.as_str(), &r.aggregate));
                rows.push(json!({ "variant": variant.as_str(), "aggregate": r.aggregate }));
            }
            doc["ablation"] = Value::Array(rows);
        }
        if let Some(sizes) = &args.context_sweep {
            let runs = evaluator.context_sweep(&records, base, sizes)?;
            text.push_str("\ncontext sweep\n");
            text.push_str(TABLE_HEADER);
            let mut rows = Vec::new();
            for (n, r) in &runs {
                failed |= r.has_errors();
                text.push_str(&aggregate_line(&format!("context={n}"), &r.aggregate));
                rows.push(json!({ "context_lines": n, "aggregate": r.aggregate }));
            }
            doc["context_sweep"] = Value::Array(rows);
        }
        Ok((doc, text, failed))
    })();
    let (doc, text, failed) = match outcome {
        Ok(x) => x,
        Err(e) => return error_exit(&e),
    };
    let rendered = match args.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&doc).unwrap_or_default()),
        Format::Text => text,
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("codemapper: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_REPO);
            }
        }
        None => print!("{rendered}"),
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
