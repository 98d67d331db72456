//! Command-line driver.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::coding::CostMode;
use crate::error::{Error, Result};
use crate::io::{format_grammar, format_metrics, load_corpus, render_alignment, Tokenization};
use crate::sifting::{sp70_run, RunOutcome, RunParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Chars,
    Tokens,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CostArg {
    Ideal,
    Sfe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Artifact {
    Grammar,
    Alignments,
    Metrics,
    Repo,
}

/// Learn a grammar from a corpus, one pattern per line.
#[derive(Debug, Parser)]
#[command(name = "sp70", version)]
struct Args {
    /// Corpus file.
    #[arg(long)]
    corpus: PathBuf,
    /// One symbol per character, or per whitespace separated token.
    #[arg(long, value_enum, default_value = "chars")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "ideal")]
    cost: CostArg,
    /// Alignments kept per cycle.
    #[arg(long, default_value_t = 10)]
    beam: usize,
    /// Alignments used for learning per sentence.
    #[arg(long = "best-few", default_value_t = 2)]
    best_few: usize,
    /// Alternative grammars kept per stage.
    #[arg(long = "grammar-beam", default_value_t = 8)]
    grammar_beam: usize,
    /// Purge Old to the best grammar after every N sentences.
    #[arg(long)]
    batch: Option<usize>,
    /// Bits charged for learner-made symbols before costs are recomputed.
    #[arg(long = "provisional-cost")]
    provisional_cost: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "grammar,metrics")]
    emit: Vec<Artifact>,
}

/// Run the driver on `argv` (program name first) and return the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&args) {
        Ok(summary) => {
            print!("{summary}");
            let _ = std::io::stdout().flush();
            EXIT_OK
        }
        Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("sp70: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("sp70: {e}");
            EXIT_DATA
        }
    }
}

fn execute(args: &Args) -> Result<String> {
    let tokenization = match args.mode {
        ModeArg::Chars => Tokenization::Chars,
        ModeArg::Tokens => Tokenization::WhitespaceTokens,
    };
    let mut params = RunParams {
        mode: match args.cost {
            CostArg::Ideal => CostMode::Ideal,
            CostArg::Sfe => CostMode::Sfe,
        },
        batch_size: args.batch,
        provisional_cost: args.provisional_cost,
        ..RunParams::default()
    };
    params.align.beam_width = args.beam;
    params.align.best_few = args.best_few;
    params.search.grammar_beam = args.grammar_beam;
    params.align.validate()?;
    params.search.validate()?;

    let corpus = load_corpus(&args.corpus, tokenization)?;
    let outcome = sp70_run(&corpus, &params)?;
    write_artifacts(&outcome, &args.out, &args.emit)?;
    Ok(summary(&outcome))
}

fn write_artifacts(outcome: &RunOutcome, dir: &Path, emit: &[Artifact]) -> Result<()> {
    let mut emit = emit.to_vec();
    emit.sort();
    emit.dedup();
    if emit.is_empty() {
        return Ok(());
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (grammar, repo) = &outcome.sift.tidied;
    for artifact in emit {
        let (name, text) = match artifact {
            Artifact::Grammar => ("grammar.txt", format_grammar(grammar, repo)?),
            Artifact::Metrics => ("metrics.csv", format_metrics(&outcome.sift.metrics)),
            Artifact::Alignments => ("alignments.txt", alignments_text(outcome)),
            Artifact::Repo => ("repo.txt", repo_text(outcome)),
        };
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn alignments_text(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    for (i, found) in outcome.sift.full_alignments.iter().enumerate() {
        let _ = writeln!(out, "# pattern {}", i + 1);
        match found.first() {
            Some(a) => {
                let s = a.scores();
                let _ = writeln!(out, "# CD {:.2} (B_N {:.2}, B_E {:.2})", s.cd, s.b_n, s.b_e);
                out.push_str(&render_alignment(a));
            }
            None => out.push_str("# no full alignment\n"),
        }
        out.push('\n');
    }
    out
}

fn repo_text(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    for p in outcome.repo.iter() {
        let _ = writeln!(out, "{}\t{}\t{}", p.id, p.frequency, p.to_line());
    }
    out
}

fn summary(outcome: &RunOutcome) -> String {
    let g = &outcome.sift.tidied.0;
    let original = outcome.sift.metrics.last().map(|m| m.original).unwrap_or(0.0);
    let ratio = if original > 0.0 { g.t / original } else { f64::NAN };
    format!(
        "members {}\nG {:.2}\nE {:.2}\nT {:.2}\ncompression {:.2}\n",
        g.members.len(),
        g.g,
        g.e,
        g.t,
        ratio
    )
}
