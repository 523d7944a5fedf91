//! Command-line front end of the correction protocol: read triplets, pick
//! spans from oracle or predicted QE, apply the best of the top-k
//! suggestions, report corpus TER and BLEU against the MT baseline.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use postedit_core::harness::{self, parse_triplets, HarnessConfig, OracleScorers, Selection, SharedScorer};
use postedit_core::lexicon::Lexicon;
use postedit_core::qe::{HeuristicQe, OracleQe, QeProvider};
use postedit_core::subword::CharGroupSegmenter;
use postedit_core::suggest::{NgramScorer, SuggestConfig};

use crate::fixtures;
use crate::wire::ReportView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectionArg {
    Oracle,
    Predicted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScorerArg {
    /// Bilingual n-gram scorer trained on the corpus.
    Ngram,
    /// Knows each sentence's post-edit.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QeArg {
    /// Lexicon coverage.
    Heuristic,
    /// Gold labels from the post-edits.
    Oracle,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "evalharness", about = "Simulated post-editing with QE-selected spans and top-k suggestions")]
pub struct Args {
    /// Triplets TSV: source, MT, post-edit.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value = "oracle")]
    pub selection: SelectionArg,
    #[arg(long, default_value_t = 5, value_parser = parse_top_k)]
    pub topk: usize,
    /// Maximum number of masks.
    #[arg(long, default_value_t = 5)]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub beam: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Correct missing-word gaps as well as BAD words.
    #[arg(long, value_enum, default_value = "on")]
    pub gaps: Switch,
    #[arg(long, value_enum, default_value = "ngram")]
    pub scorer: ScorerArg,
    /// QE provider for `--selection predicted`.
    #[arg(long, value_enum, default_value = "heuristic")]
    pub qe: QeArg,
    /// Lexicon TSV for the heuristic QE; the bundled one by default.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Parallel corpus TSV for the n-gram scorer; the bundled one by default.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

fn parse_top_k(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if harness::TOP_K_CHOICES.contains(&k) => Ok(k),
        _ => Err(format!("must be one of {:?}", harness::TOP_K_CHOICES)),
    }
}

fn read(path: &Option<PathBuf>, bundled: &str) -> Result<String, String> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(bundled.to_string()),
    }
}

/// Row label in the style of the results table, e.g. `Oracle QE (top-3)`.
pub fn label(args: &Args) -> String {
    let sel = match args.selection {
        SelectionArg::Oracle => "Oracle QE",
        SelectionArg::Predicted => "Predicted QE",
    };
    format!("{sel} (top-{})", args.topk)
}

/// Runs the harness and renders the report.
pub fn run(args: &Args, data_text: &str) -> Result<String, String> {
    let data = parse_triplets(data_text).map_err(|e| e.to_string())?;
    let selection = match args.selection {
        SelectionArg::Oracle => Selection::Oracle,
        SelectionArg::Predicted => Selection::Predicted,
    };
    let suggest = SuggestConfig::new(args.m, args.beam).map_err(|e| e.to_string())?;
    let mut config = HarnessConfig::new(selection, args.topk, suggest).map_err(|e| e.to_string())?;
    config.gaps = args.gaps == Switch::On;
    config.seed = args.seed;

    let segmenter = CharGroupSegmenter::default();
    let qe: Box<dyn QeProvider> = match args.qe {
        QeArg::Heuristic => Box::new(HeuristicQe::new(Lexicon::from_tsv(&read(&args.lexicon, fixtures::LEXICON)?).map_err(|e| e.to_string())?)),
        QeArg::Oracle => {
            let mut oracle = OracleQe::new();
            for t in &data {
                oracle.insert(t.mt.clone(), t.post_edit.clone());
            }
            Box::new(oracle)
        }
    };
    let report = match args.scorer {
        ScorerArg::Oracle => harness::run(&data, &config, &OracleScorers(&segmenter), &*qe, &segmenter),
        ScorerArg::Ngram => {
            let corpus = fixtures::parse_corpus(&read(&args.corpus, fixtures::CORPUS)?).map_err(|e| e.to_string())?;
            let ngram = NgramScorer::train(&corpus, &segmenter).map_err(|e| e.to_string())?;
            harness::run(&data, &config, &SharedScorer(&ngram), &*qe, &segmenter)
        }
    }
    .map_err(|e| e.to_string())?;

    Ok(match args.format {
        Format::Table => report.table(&label(args)),
        Format::Json => {
            let view = ReportView { baseline: report.baseline.into(), corrected: report.corrected.into(), deltas: report.deltas.into() };
            serde_json::to_string_pretty(&view).map_err(|e| e.to_string())? + "\n"
        }
    })
}
