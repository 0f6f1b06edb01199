//! Stage orchestration over files in an output directory.
//!
//! ```text
//! out/ingest/documents.tsv          document ids in corpus order
//! out/ingest/<doc>.txt              normalized text
//! out/ingest/<doc>.sentences.tsv    index<TAB>start_char<TAB>end_char
//! out/annotate/mentions.tsv         annotation TSV
//! out/normalize/clusters.tsv        cluster dump
//! out/graph/graph.gexf              GEXF 1.2
//! out/graph/edges.tsv               source<TAB>target<TAB>weight
//! out/temporal/terms.tsv            term<TAB>score<TAB>count
//! out/temporal/triples.tsv          year<TAB>entity<TAB>term<TAB>count
//! out/temporal/sankey.json          Sankey stream model
//! out/manifest.json                 config, checksums, versions
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::annotation::{extract_years, heuristic_tag, parse_annotations, serialize_annotations, validate_mentions, EntityMention, Gazetteer};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::graph::{betweenness, build_graph, export_gexf, force_atlas, louvain, write_edge_list};
use crate::ingest::{ingest, Document, RawCorpus, Segmenter};
use crate::normalize::{clusters_from_records, normalize, read_cluster_dump, write_cluster_dump, EntityCluster};
use crate::temporal::terms::{parse_term_list, DEFAULT_STOPWORDS};
use crate::temporal::{build_streams, collect_triples, export_sankey_json, TermExtractor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Annotate,
    Normalize,
    Graph,
    Temporal,
    All,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Annotate => "annotate",
            Stage::Normalize => "normalize",
            Stage::Graph => "graph",
            Stage::Temporal => "temporal",
            Stage::All => "all",
        }
    }

    fn expand(self) -> Vec<Stage> {
        match self {
            Stage::All => vec![Stage::Ingest, Stage::Annotate, Stage::Normalize, Stage::Graph, Stage::Temporal],
            s => vec![s],
        }
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Stage::Ingest, Stage::Annotate, Stage::Normalize, Stage::Graph, Stage::Temporal, Stage::All]
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown stage `{s}`")))
    }
}

/// Artifact locations under an output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }
    pub fn documents(&self) -> PathBuf {
        self.root.join("ingest/documents.tsv")
    }
    pub fn text(&self, doc_id: &str) -> PathBuf {
        self.root.join(format!("ingest/{doc_id}.txt"))
    }
    pub fn sidecar(&self, doc_id: &str) -> PathBuf {
        self.root.join(format!("ingest/{doc_id}.sentences.tsv"))
    }
    pub fn mentions(&self) -> PathBuf {
        self.root.join("annotate/mentions.tsv")
    }
    pub fn clusters(&self) -> PathBuf {
        self.root.join("normalize/clusters.tsv")
    }
    pub fn gexf(&self) -> PathBuf {
        self.root.join("graph/graph.gexf")
    }
    pub fn edges(&self) -> PathBuf {
        self.root.join("graph/edges.tsv")
    }
    pub fn terms(&self) -> PathBuf {
        self.root.join("temporal/terms.tsv")
    }
    pub fn triples(&self) -> PathBuf {
        self.root.join("temporal/triples.tsv")
    }
    pub fn sankey(&self) -> PathBuf {
        self.root.join("temporal/sankey.json")
    }
    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.json")
    }
}

/// What a run produced.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub stages: Vec<&'static str>,
    pub artifacts: Vec<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str, report: &mut RunReport) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    report.artifacts.push(path.to_path_buf());
    Ok(())
}

fn require(path: PathBuf, stage: &'static str) -> Result<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::MissingPrerequisite { stage, path })
    }
}

fn require_input(path: &Path, what: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} {} does not exist", path.display())))
    }
}

pub fn load_documents(layout: &Layout) -> Result<Vec<Document>> {
    let index = read(&require(layout.documents(), "ingest")?)?;
    index
        .lines()
        .filter(|l| !l.is_empty())
        .map(|doc_id| {
            let text = read(&require(layout.text(doc_id), "ingest")?)?;
            let sidecar = read(&require(layout.sidecar(doc_id), "ingest")?)?;
            Document::from_sidecar(doc_id, text, &sidecar)
        })
        .collect()
}

pub fn load_mentions(layout: &Layout) -> Result<Vec<EntityMention>> {
    parse_annotations(&read(&require(layout.mentions(), "annotate")?)?)
}

pub fn load_clusters(layout: &Layout, mentions: &[EntityMention]) -> Result<Vec<EntityCluster>> {
    let records = read_cluster_dump(&read(&require(layout.clusters(), "normalize")?)?)?;
    clusters_from_records(&records, mentions)
}

fn run_ingest(cfg: &PipelineConfig, layout: &Layout, report: &mut RunReport) -> Result<()> {
    if cfg.corpus.is_empty() {
        return Err(Error::Config("`corpus` lists no input".into()));
    }
    let segmenter = match &cfg.abbreviations {
        Some(list) => Segmenter::new(list.iter().cloned()),
        None => Segmenter::default(),
    };
    let mut ids = String::new();
    for path in &cfg.corpus {
        require_input(path, "corpus input")?;
        let corpus = RawCorpus::load(path)?;
        let doc = ingest(&corpus, cfg.strip_page_numbers, &segmenter)?;
        if ids.lines().any(|l| l == doc.doc_id) {
            return Err(Error::Config(format!("two corpus inputs share the document id `{}`", doc.doc_id)));
        }
        write(&layout.text(&doc.doc_id), &doc.text, report)?;
        write(&layout.sidecar(&doc.doc_id), &doc.sidecar(), report)?;
        let _ = writeln!(ids, "{}", doc.doc_id);
    }
    write(&layout.documents(), &ids, report)
}

fn run_annotate(cfg: &PipelineConfig, layout: &Layout, report: &mut RunReport) -> Result<()> {
    let docs = load_documents(layout)?;
    let mentions = if let Some(path) = &cfg.annotations {
        require_input(path, "annotation file")?;
        let mentions = parse_annotations(&read(path)?)?;
        validate_mentions(&mentions, &docs)?;
        mentions
    } else if let Some(path) = &cfg.gazetteer {
        require_input(path, "gazetteer")?;
        let gazetteer = Gazetteer::parse(&read(path)?)?;
        docs.iter().flat_map(|d| heuristic_tag(d, &gazetteer)).collect()
    } else {
        return Err(Error::Config("set `annotations` or `gazetteer`".into()));
    };
    write(&layout.mentions(), &serialize_annotations(&mentions), report)
}

fn run_normalize(cfg: &PipelineConfig, layout: &Layout, report: &mut RunReport) -> Result<()> {
    let mentions = load_mentions(layout)?;
    let clusters = normalize(&mentions, &cfg.policy()?)?;
    write(&layout.clusters(), &write_cluster_dump(&clusters), report)
}

fn run_graph(cfg: &PipelineConfig, layout: &Layout, report: &mut RunReport) -> Result<()> {
    let docs = load_documents(layout)?;
    let mentions = load_mentions(layout)?;
    let clusters = load_clusters(layout, &mentions)?;
    let graph = build_graph(&clusters, &mentions, &docs)?.filter_min_weight(cfg.min_edge_weight);
    let bc = betweenness(&graph);
    let partition = louvain(&graph, cfg.community_seed);
    let positions = force_atlas(&graph, cfg.layout_seed, cfg.layout_iterations);
    write(&layout.gexf(), &export_gexf(&graph, &partition, &bc, &positions)?, report)?;
    write(&layout.edges(), &write_edge_list(&graph), report)
}

fn run_temporal(cfg: &PipelineConfig, layout: &Layout, report: &mut RunReport) -> Result<()> {
    let docs = load_documents(layout)?;
    let mentions = load_mentions(layout)?;
    let clusters = load_clusters(layout, &mentions)?;
    let extractor = match &cfg.stopwords {
        Some(path) => {
            require_input(path, "stopword list")?;
            TermExtractor::new(parse_term_list(&read(path)?))
        }
        None => TermExtractor::new(DEFAULT_STOPWORDS.iter().copied()),
    }
    .with_mask(&mentions);
    let terms = match &cfg.terms {
        Some(path) => {
            require_input(path, "term list")?;
            extractor.score_listed(&docs, &parse_term_list(&read(path)?))
        }
        None => extractor.extract(&docs, cfg.n_terms),
    };
    let years = extract_years(&mentions, cfg.year_min, cfg.year_max);
    let triples = collect_triples(&docs, &mentions, &clusters, &years, &terms, &extractor)?;
    let model = build_streams(&triples, &cfg.stream_config())?;

    let mut terms_tsv = String::new();
    for t in &terms {
        let _ = writeln!(terms_tsv, "{}\t{}\t{}", t.term, t.score, t.count);
    }
    let mut triples_tsv = String::new();
    for t in &triples {
        let _ = writeln!(triples_tsv, "{}\t{}\t{}\t{}", t.year, t.entity, t.term, t.count);
    }
    write(&layout.terms(), &terms_tsv, report)?;
    write(&layout.triples(), &triples_tsv, report)?;
    write(&layout.sankey(), &export_sankey_json(&model)?, report)
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

/// Input files with checksums; corpus directories are expanded to their pages.
fn input_checksums(cfg: &PipelineConfig) -> Result<Vec<serde_json::Value>> {
    let mut files: Vec<PathBuf> = Vec::new();
    for p in &cfg.corpus {
        if p.is_dir() {
            let mut pages: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file())
                .collect();
            pages.sort();
            files.extend(pages);
        } else {
            files.push(p.clone());
        }
    }
    files.extend(
        [&cfg.annotations, &cfg.gazetteer, &cfg.terms, &cfg.stopwords]
            .into_iter()
            .flatten()
            .cloned(),
    );
    files
        .iter()
        .filter(|f| f.is_file())
        .map(|f| Ok(json!({ "path": f, "sha256": sha256_file(f)? })))
        .collect()
}

fn write_manifest(cfg: &PipelineConfig, layout: &Layout, report: &mut RunReport) -> Result<()> {
    let mut artifacts = Vec::new();
    for path in &report.artifacts {
        let rel = path.strip_prefix(&layout.root).unwrap_or(path);
        artifacts.push(json!({ "path": rel, "sha256": sha256_file(path)? }));
    }
    let manifest = json!({
        "tool": "entnet",
        "version": env!("CARGO_PKG_VERSION"),
        "stages": report.stages,
        "config": cfg,
        "inputs": input_checksums(cfg)?,
        "artifacts": artifacts,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))? + "\n";
    write(&layout.manifest(), &text, report)
}

/// Runs one stage (or all) and writes a manifest next to the artifacts.
pub fn run(cfg: &PipelineConfig, stage: Stage) -> Result<RunReport> {
    cfg.validate()?;
    for path in &cfg.corpus {
        require_input(path, "corpus input")?;
    }
    for path in [&cfg.annotations, &cfg.gazetteer, &cfg.terms, &cfg.stopwords].into_iter().flatten() {
        require_input(path, "input")?;
    }
    let layout = Layout::new(&cfg.out);
    let mut report = RunReport::default();
    for s in stage.expand() {
        match s {
            Stage::Ingest => run_ingest(cfg, &layout, &mut report)?,
            Stage::Annotate => run_annotate(cfg, &layout, &mut report)?,
            Stage::Normalize => run_normalize(cfg, &layout, &mut report)?,
            Stage::Graph => run_graph(cfg, &layout, &mut report)?,
            Stage::Temporal => run_temporal(cfg, &layout, &mut report)?,
            Stage::All => unreachable!(),
        }
        report.stages.push(s.name());
    }
    write_manifest(cfg, &layout, &mut report)?;
    Ok(report)
}

/// Process exit code for an error: 2 for a missing prerequisite artifact,
/// 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::MissingPrerequisite { .. } => 2,
        _ => 1,
    }
}
