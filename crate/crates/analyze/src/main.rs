use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use dialogue_core::analysis::{
    avg_token_length, collect_transcripts, cronbach_alpha, face_deltas, fit_line, score_sentiments, FaceScore,
    LexiconScorer, SessionTranscript,
};
use dialogue_core::FileStore;

#[derive(Parser, Debug)]
#[command(name = "dialogue-analyze", version, about = "Statistics over stored session transcripts")]
struct Cli {
    /// Engine data directory (users/, sessions/, states/).
    #[arg(long, default_value = "data", global = true)]
    data_dir: PathBuf,
    /// Word valence lexicon used by `sentiment` and `regress`.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    out: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Average number of tokens per user turn, per session.
    Wordcount,
    /// Positive and negative sentence shares per session (neutral omitted).
    Sentiment,
    /// Linear trend of the sentiment shares over sessions, per user.
    Regress,
    /// Before/after face-scale deltas. Input CSV: user_id,session,before,after
    Facescale {
        /// Defaults to <data-dir>/facescale.csv
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// Cronbach's alpha of a survey. Input CSV: header of item names, one row per respondent.
    Alpha {
        /// Defaults to <data-dir>/survey.csv
        #[arg(long)]
        survey: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct WordcountRow {
    user_id: String,
    session_number: u32,
    session_id: String,
    avg_token_length: f64,
}

#[derive(Serialize)]
struct SentimentRow {
    user_id: String,
    session_number: u32,
    session_id: String,
    positive: f64,
    negative: f64,
}

#[derive(Serialize)]
struct RegressRow {
    user_id: String,
    series: &'static str,
    sessions: usize,
    slope: f64,
    intercept: f64,
    mse: f64,
    variance_score: f64,
}

#[derive(Deserialize)]
struct FaceInput {
    user_id: String,
    session: u32,
    before: i32,
    after: i32,
}

#[derive(Serialize)]
struct FaceRow {
    user_id: String,
    session: u32,
    before: i32,
    after: i32,
    delta: i32,
}

#[derive(Serialize)]
struct AlphaRow {
    respondents: usize,
    items: usize,
    alpha: f64,
}

fn emit<T: Serialize>(format: Format, rows: &[T], out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn transcripts(data_dir: &Path) -> Result<Vec<SessionTranscript>> {
    if !data_dir.is_dir() {
        bail!("data directory {} does not exist", data_dir.display());
    }
    let store = FileStore::open(data_dir).with_context(|| format!("opening {}", data_dir.display()))?;
    Ok(collect_transcripts(&store)?)
}

fn lexicon(path: Option<&Path>) -> Result<LexiconScorer> {
    let path = path.context("--lexicon is required for this command")?;
    Ok(LexiconScorer::load(path)?)
}

fn sentiment_rows(data_dir: &Path, scorer: &LexiconScorer) -> Result<Vec<SentimentRow>> {
    let mut rows = Vec::new();
    for s in transcripts(data_dir)? {
        match score_sentiments(&s.turns, scorer) {
            Ok(shares) => rows.push(SentimentRow {
                user_id: s.user_id,
                session_number: s.session_number,
                session_id: s.session_id,
                positive: shares.positive,
                negative: shares.negative,
            }),
            Err(e) => eprintln!("skipping {}: {e}", s.session_id),
        }
    }
    Ok(rows)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Wordcount => {
            let mut rows = Vec::new();
            for s in transcripts(&cli.data_dir)? {
                match avg_token_length(&s.turns) {
                    Ok(avg) => rows.push(WordcountRow {
                        user_id: s.user_id,
                        session_number: s.session_number,
                        session_id: s.session_id,
                        avg_token_length: avg,
                    }),
                    Err(e) => eprintln!("skipping {}: {e}", s.session_id),
                }
            }
            emit(cli.out, &rows, out)
        }
        Command::Sentiment => {
            let scorer = lexicon(cli.lexicon.as_deref())?;
            emit(cli.out, &sentiment_rows(&cli.data_dir, &scorer)?, out)
        }
        Command::Regress => {
            let scorer = lexicon(cli.lexicon.as_deref())?;
            let mut by_user: BTreeMap<String, Vec<SentimentRow>> = BTreeMap::new();
            for row in sentiment_rows(&cli.data_dir, &scorer)? {
                by_user.entry(row.user_id.clone()).or_default().push(row);
            }
            let mut rows = Vec::new();
            for (user, sessions) in by_user {
                for series in ["positive", "negative"] {
                    let points: Vec<(f64, f64)> = sessions
                        .iter()
                        .map(|r| {
                            let y = if series == "positive" { r.positive } else { r.negative };
                            (f64::from(r.session_number), y)
                        })
                        .collect();
                    match fit_line(&points) {
                        Ok(fit) => rows.push(RegressRow {
                            user_id: user.clone(),
                            series,
                            sessions: points.len(),
                            slope: fit.slope,
                            intercept: fit.intercept,
                            mse: fit.mse,
                            variance_score: fit.variance_score,
                        }),
                        Err(e) => eprintln!("skipping {user} {series}: {e}"),
                    }
                }
            }
            emit(cli.out, &rows, out)
        }
        Command::Facescale { scores } => {
            let path = scores.clone().unwrap_or_else(|| cli.data_dir.join("facescale.csv"));
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_path(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let inputs: Vec<FaceInput> = reader.deserialize().collect::<Result<_, _>>()?;
            let scores: Vec<FaceScore> = inputs
                .iter()
                .map(|i| FaceScore {
                    session: i.session,
                    before: i.before,
                    after: i.after,
                })
                .collect();
            let deltas = face_deltas(&scores)?;
            let rows: Vec<FaceRow> = inputs
                .into_iter()
                .zip(deltas)
                .map(|(i, d)| FaceRow {
                    user_id: i.user_id,
                    session: i.session,
                    before: i.before,
                    after: i.after,
                    delta: d.delta,
                })
                .collect();
            emit(cli.out, &rows, out)
        }
        Command::Alpha { survey } => {
            let path = survey.clone().unwrap_or_else(|| cli.data_dir.join("survey.csv"));
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_path(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let mut matrix = Vec::new();
            for (i, record) in reader.records().enumerate() {
                let record = record?;
                let row = record
                    .iter()
                    .map(|cell| cell.parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .with_context(|| format!("{}: respondent {} has a non-numeric score", path.display(), i + 1))?;
                matrix.push(row);
            }
            let alpha = cronbach_alpha(&matrix)?;
            let row = AlphaRow {
                respondents: matrix.len(),
                items: matrix[0].len(),
                alpha,
            };
            emit(cli.out, &[row], out)
        }
    }
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dialogue-analyze: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
