//! Command-line front end.
//!
//! Exit codes: 0 success, 1 the null-data gate failed and the analysis
//! halted, 2 invalid input or I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::{generate_dependent, generate_random, load_csv};
use crate::engine::TrialMode;
use crate::error::{BmcmError, Result};
use crate::expr::{enumerate_models, ModelTemplate};
use crate::pipeline::{render_text, run_full, AnalysisConfig, AnalysisReport, DEFAULT_ALPHA};

pub const EXIT_OK: u8 = 0;
pub const EXIT_GATE_FAILED: u8 = 1;
pub const EXIT_INPUT_ERROR: u8 = 2;

const DEFAULT_TRIALS: u64 = 1024;

#[derive(Debug, Parser)]
#[command(
    name = "bmcm",
    version,
    about = "Boolean operator tendency analysis for binary data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic cohort as CSV.
    Generate(GenerateArgs),
    /// Run the three-step analysis on a CSV dataset.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CohortKind {
    /// x1, x2, x3 and xO are independent fair coins.
    Random,
    /// xO = x1 with exactly half ones; x2, x3 fair coins.
    Dependent,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    kind: CohortKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// CSV file with a header row and 0/1 cells.
    data: PathBuf,
    #[arg(long, default_value = "xO")]
    outcome: String,
    /// Model template, e.g. "x1 ? x2 ? x3 = xO". Repeatable.
    #[arg(long = "model")]
    models: Vec<String>,
    /// Add the six orderings and groupings of three explanatory variables.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    /// Trials per row in sampled mode.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Keep null rows in the operator trials.
    #[arg(long = "include-null-step2")]
    include_null_step2: bool,
    /// Continue past a failed null-data gate.
    #[arg(long)]
    ignore_gate: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Report path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return if err.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_INPUT_ERROR
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(&args, stdout),
        Command::Analyze(args) => cmd_analyze(&args, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            EXIT_INPUT_ERROR
        }
    }
}

fn write_output(path: Option<&Path>, stdout: &mut dyn Write, body: &[u8]) -> Result<()> {
    match path {
        Some(path) => {
            let mut file = File::create(path)
                .map_err(|e| BmcmError::Io(format!("{}: {e}", path.display())))?;
            file.write_all(body)?;
            file.flush()?;
        }
        None => stdout.write_all(body)?,
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs, stdout: &mut dyn Write) -> Result<u8> {
    let dataset = match args.kind {
        CohortKind::Random => generate_random(args.n, args.seed)?,
        CohortKind::Dependent => generate_dependent(args.n, args.seed)?,
    };
    let mut buf = Vec::new();
    dataset.write_csv(&mut buf)?;
    write_output(args.out.as_deref(), stdout, &buf)?;
    Ok(EXIT_OK)
}

fn analyze_config(args: &AnalyzeArgs) -> AnalysisConfig {
    AnalysisConfig {
        trials: match args.mode {
            ModeArg::Exhaustive => TrialMode::Exhaustive,
            ModeArg::Sampled => TrialMode::Sampled {
                trials_per_row: args.trials,
            },
        },
        seed: args.seed,
        alpha: args.alpha,
        include_null_in_step2: args.include_null_step2,
        ignore_gate: args.ignore_gate,
    }
}

fn cmd_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<u8> {
    let config = analyze_config(args);
    config.validate()?;
    let file = File::open(&args.data)
        .map_err(|e| BmcmError::Io(format!("{}: {e}", args.data.display())))?;
    let dataset = load_csv(BufReader::new(file), &args.outcome)?;

    let mut templates = args
        .models
        .iter()
        .map(|text| ModelTemplate::parse(text))
        .collect::<Result<Vec<_>>>()?;
    if args.enumerate {
        templates.extend(enumerate_models(&dataset.explanatory(), dataset.outcome())?);
    }
    if let Some(t) = templates.iter().find(|t| t.target() != dataset.outcome()) {
        return Err(BmcmError::TargetMismatch {
            expected: dataset.outcome().to_string(),
            found: t.target().to_string(),
        });
    }
    for t in &templates {
        for v in t.variables() {
            dataset.column_index(v)?;
        }
    }

    let report = run_full(&dataset, &templates, &config)?;
    let body = render(&report, args.format);
    write_output(args.out.as_deref(), stdout, body.as_bytes())?;
    Ok(if report.halted {
        EXIT_GATE_FAILED
    } else {
        EXIT_OK
    })
}

fn render(report: &AnalysisReport, format: FormatArg) -> String {
    match format {
        FormatArg::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        FormatArg::Text => render_text(report),
    }
}

/// Convenience for callers that want to run the CLI against real stdio.
pub fn main_with_stdio() -> u8 {
    run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    )
}
