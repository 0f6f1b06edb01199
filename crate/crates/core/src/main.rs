use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entnet::config::PipelineConfig;
use entnet::pipeline::{exit_code, run, Stage};

#[derive(Parser)]
#[command(name = "entnet", version, about = "Entity co-occurrence networks and temporal term streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Strip markup and segment sentences.
    Ingest(Opts),
    /// Load or tag entity mentions.
    Annotate(Opts),
    /// Merge entity variants into clusters.
    Normalize(Opts),
    /// Build, analyse and export the co-occurrence graph.
    Graph(Opts),
    /// Extract terms and build period streams.
    Temporal(Opts),
    /// Run every stage in order.
    All(Opts),
}

#[derive(Args)]
struct Opts {
    /// TOML config (or a manifest.json from an earlier run).
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Corpus directory or file; repeatable.
    #[arg(long)]
    corpus: Vec<PathBuf>,
    #[arg(long)]
    annotations: Option<PathBuf>,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long)]
    terms: Option<PathBuf>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    abbreviations: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    honorifics: Option<Vec<String>>,
    #[arg(long)]
    strip_page_numbers: Option<bool>,
    /// P_MAX or P_AV.
    #[arg(long)]
    normalization: Option<String>,
    #[arg(long)]
    av_override: Option<f64>,
    #[arg(long)]
    year_min: Option<i32>,
    #[arg(long)]
    year_max: Option<i32>,
    /// Period boundaries, comma separated; an empty string gives one period.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    boundaries: Option<Vec<i32>>,
    #[arg(long)]
    n_terms: Option<usize>,
    #[arg(long)]
    top_k_entities: Option<usize>,
    #[arg(long)]
    min_assoc: Option<u64>,
    #[arg(long)]
    min_overlap: Option<usize>,
    #[arg(long)]
    min_edge_weight: Option<u64>,
    #[arg(long)]
    layout_seed: Option<u64>,
    #[arg(long)]
    layout_iterations: Option<u32>,
    #[arg(long)]
    community_seed: Option<u64>,
}

macro_rules! apply {
    ($cfg:ident, $opts:ident; $($field:ident),*) => {
        $(if let Some(v) = $opts.$field { $cfg.$field = v; })*
    };
}

macro_rules! apply_opt {
    ($cfg:ident, $opts:ident; $($field:ident),*) => {
        $(if let Some(v) = $opts.$field { $cfg.$field = Some(v); })*
    };
}

impl Opts {
    fn into_config(self) -> entnet::Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        let opts = self;
        if !opts.corpus.is_empty() {
            cfg.corpus = opts.corpus;
        }
        apply!(cfg, opts; out, strip_page_numbers, normalization, year_min, year_max, n_terms,
            top_k_entities, min_assoc, min_overlap, min_edge_weight, layout_seed,
            layout_iterations, community_seed);
        apply_opt!(cfg, opts; annotations, gazetteer, terms, stopwords, abbreviations, honorifics,
            av_override, boundaries);
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (stage, opts) = match cli.command {
        Command::Ingest(o) => (Stage::Ingest, o),
        Command::Annotate(o) => (Stage::Annotate, o),
        Command::Normalize(o) => (Stage::Normalize, o),
        Command::Graph(o) => (Stage::Graph, o),
        Command::Temporal(o) => (Stage::Temporal, o),
        Command::All(o) => (Stage::All, o),
    };
    let result = opts.into_config().and_then(|cfg| run(&cfg, stage));
    match result {
        Ok(report) => {
            for path in &report.artifacts {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("entnet: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
