//! Pipeline configuration: a flat TOML file whose keys can all be overridden
//! from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{Mode, NormalizationPolicy};
use crate::temporal::StreamConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(PathBuf),
    Many(Vec<PathBuf>),
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<PathBuf>, D::Error> {
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(p) => vec![p],
        OneOrMany::Many(v) => v,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Directories of HTML pages or plain-text files, one document each.
    #[serde(deserialize_with = "one_or_many")]
    pub corpus: Vec<PathBuf>,
    /// Annotation TSV; takes precedence over `gazetteer`.
    pub annotations: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    /// Term list replacing term extraction.
    pub terms: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub abbreviations: Option<Vec<String>>,
    pub honorifics: Option<Vec<String>>,
    pub strip_page_numbers: bool,
    pub normalization: String,
    pub av_override: Option<f64>,
    pub year_min: i32,
    pub year_max: i32,
    /// First years of each period after the first; absent means yearly.
    pub boundaries: Option<Vec<i32>>,
    pub n_terms: usize,
    pub top_k_entities: usize,
    pub min_assoc: u64,
    pub min_overlap: usize,
    pub min_edge_weight: u64,
    pub layout_seed: u64,
    pub layout_iterations: u32,
    pub community_seed: u64,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: Vec::new(),
            annotations: None,
            gazetteer: None,
            terms: None,
            stopwords: None,
            abbreviations: None,
            honorifics: None,
            strip_page_numbers: false,
            normalization: Mode::Average.as_str().to_string(),
            av_override: None,
            year_min: 1990,
            year_max: 2020,
            boundaries: None,
            n_terms: 50,
            top_k_entities: 20,
            min_assoc: 2,
            min_overlap: 1,
            min_edge_weight: 1,
            layout_seed: 42,
            layout_iterations: 300,
            community_seed: 42,
            out: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    /// Parses TOML; relative paths are resolved against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| {
            let location = e
                .span()
                .map(|s| {
                    let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
                    format!("line {line}: ")
                })
                .unwrap_or_default();
            Error::Config(format!("{location}{}", e.message()))
        })?;
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    /// Loads a TOML config, or the `config` object of a run manifest (`.json`).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if path.extension().is_some_and(|e| e == "json") {
            let manifest: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("line {}: {e}", e.line())))?;
            let cfg = manifest
                .get("config")
                .ok_or_else(|| Error::Config("manifest has no `config` object".into()))?;
            let mut cfg: PipelineConfig =
                serde_json::from_value(cfg.clone()).map_err(|e| Error::Config(e.to_string()))?;
            cfg.resolve_paths(base);
            return Ok(cfg);
        }
        PipelineConfig::from_toml(&text, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.corpus.iter_mut().for_each(fix);
        for p in [&mut self.annotations, &mut self.gazetteer, &mut self.terms, &mut self.stopwords]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        fix(&mut self.out);
    }

    pub fn validate(&self) -> Result<()> {
        if self.year_min > self.year_max {
            return Err(Error::Config(format!(
                "year_min {} exceeds year_max {}",
                self.year_min, self.year_max
            )));
        }
        for (name, value) in [
            ("n_terms", self.n_terms as u64),
            ("top_k_entities", self.top_k_entities as u64),
            ("min_assoc", self.min_assoc),
            ("min_overlap", self.min_overlap as u64),
            ("min_edge_weight", self.min_edge_weight),
        ] {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        self.policy()?;
        self.stream_config().periods().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    pub fn mode(&self) -> Result<Mode> {
        self.normalization.parse().map_err(|e: Error| Error::Config(e.to_string()))
    }

    pub fn policy(&self) -> Result<NormalizationPolicy> {
        let mut policy = NormalizationPolicy::new(self.mode()?);
        if let Some(av) = self.av_override {
            policy = policy.with_av_override(av).map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(h) = &self.honorifics {
            policy = policy.with_honorifics(h.iter().cloned());
        }
        Ok(policy)
    }

    pub fn stream_config(&self) -> StreamConfig {
        let mut cfg = StreamConfig::yearly(self.year_min, self.year_max);
        if let Some(b) = &self.boundaries {
            cfg.boundaries = b.clone();
        }
        cfg.top_k_entities = self.top_k_entities;
        cfg.min_assoc = self.min_assoc;
        cfg.min_overlap = self.min_overlap;
        cfg
    }
}
