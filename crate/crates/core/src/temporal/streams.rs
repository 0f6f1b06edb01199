//! Entity–term streams over time.
//!
//! A year applies only to the sentence it is mentioned in. Each sentence with
//! years, entities and terms yields one unit per (year, entity, term)
//! combination. Years are grouped into periods; an entity gets a stream node
//! in a period when some term reaches `min_assoc` there, and nodes of
//! consecutive periods are joined by a tube when they share at least
//! `min_overlap` terms. Tubes may join different entities, so a node can
//! split into several or several can merge into one.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::terms::{TermExtractor, TermRecord};
use crate::annotation::{EntityMention, YearMention};
use crate::error::{Error, Result};
use crate::ingest::Document;
use crate::normalize::{cluster_index, EntityCluster};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triple {
    pub year: i32,
    pub entity: String,
    pub term: String,
    pub count: u64,
}

/// Aggregated (year, entity canonical, term) counts, sorted.
pub fn collect_triples(
    docs: &[Document],
    mentions: &[EntityMention],
    clusters: &[EntityCluster],
    years: &[YearMention<'_>],
    terms: &[TermRecord],
    extractor: &TermExtractor,
) -> Result<Vec<Triple>> {
    let index = cluster_index(clusters);
    let mut years_at: HashMap<(&str, usize), BTreeSet<i32>> = HashMap::new();
    for y in years {
        years_at.entry((y.doc_id, y.sentence_index)).or_default().insert(y.year);
    }
    let mut entities_at: HashMap<(&str, usize), BTreeSet<&str>> = HashMap::new();
    for m in mentions.iter().filter(|m| m.etype.is_actor()) {
        let &c = index
            .get(&(m.etype, m.surface.as_str()))
            .ok_or_else(|| Error::UnmappedMention {
                etype: m.etype.to_string(),
                surface: m.surface.clone(),
            })?;
        entities_at
            .entry((m.doc_id.as_str(), m.sentence_index))
            .or_default()
            .insert(clusters[c].canonical.as_str());
    }
    let term_set: HashSet<String> = terms.iter().map(|t| t.term.clone()).collect();
    let max_words = term_set.iter().map(|t| t.split(' ').count()).max().unwrap_or(0);

    let mut counts: BTreeMap<(i32, &str, &str), u64> = BTreeMap::new();
    for doc in docs {
        for s in &doc.sentences {
            let key = (doc.doc_id.as_str(), s.index);
            let (Some(ys), Some(es)) = (years_at.get(&key), entities_at.get(&key)) else {
                continue;
            };
            let found = extractor.terms_in(&doc.doc_id, s.index, &s.text, &term_set, max_words);
            for &year in ys {
                for &entity in es {
                    for &term in &found {
                        *counts.entry((year, entity, term)).or_default() += 1;
                    }
                }
            }
        }
    }
    Ok(counts
        .into_iter()
        .map(|((year, entity, term), count)| Triple {
            year,
            entity: entity.to_string(),
            term: term.to_string(),
            count,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Period {
    pub index: usize,
    pub start_year: i32,
    pub end_year: i32,
}

impl Period {
    pub fn contains(&self, year: i32) -> bool {
        (self.start_year..=self.end_year).contains(&year)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamNode {
    pub period: usize,
    pub entity: String,
    pub terms: BTreeMap<String, u64>,
}

impl StreamNode {
    pub fn id(&self) -> String {
        node_id(self.period, &self.entity)
    }
}

pub fn node_id(period: usize, entity: &str) -> String {
    format!("p{period}:{entity}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tube {
    pub from: String,
    pub to: String,
    pub weight: usize,
    pub shared_terms: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreamModel {
    pub periods: Vec<Period>,
    pub nodes: Vec<StreamNode>,
    pub tubes: Vec<Tube>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamConfig {
    pub year_min: i32,
    pub year_max: i32,
    /// First years of periods after the first; empty means a single period.
    pub boundaries: Vec<i32>,
    pub top_k_entities: usize,
    pub min_assoc: u64,
    pub min_overlap: usize,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig::yearly(1990, 2020)
    }
}

impl StreamConfig {
    /// One period per year.
    pub fn yearly(year_min: i32, year_max: i32) -> Self {
        StreamConfig {
            year_min,
            year_max,
            boundaries: (year_min + 1..=year_max).collect(),
            top_k_entities: 20,
            min_assoc: 2,
            min_overlap: 1,
        }
    }

    pub fn periods(&self) -> Result<Vec<Period>> {
        if self.year_min > self.year_max {
            return Err(Error::InvalidArgument(format!(
                "year range {}..{} is empty",
                self.year_min, self.year_max
            )));
        }
        let mut periods = Vec::with_capacity(self.boundaries.len() + 1);
        let mut start = self.year_min;
        for &b in &self.boundaries {
            if b <= start || b > self.year_max {
                return Err(Error::InvalidArgument(format!(
                    "boundary {b} must be increasing and inside {}..={}",
                    self.year_min + 1, self.year_max
                )));
            }
            periods.push(Period {
                index: periods.len(),
                start_year: start,
                end_year: b - 1,
            });
            start = b;
        }
        periods.push(Period {
            index: periods.len(),
            start_year: start,
            end_year: self.year_max,
        });
        Ok(periods)
    }
}

pub fn build_streams(triples: &[Triple], cfg: &StreamConfig) -> Result<StreamModel> {
    let periods = cfg.periods()?;
    if cfg.top_k_entities == 0 || cfg.min_assoc == 0 || cfg.min_overlap == 0 {
        return Err(Error::InvalidArgument(
            "top_k_entities, min_assoc and min_overlap must be positive".into(),
        ));
    }
    let in_range: Vec<&Triple> = triples
        .iter()
        .filter(|t| (cfg.year_min..=cfg.year_max).contains(&t.year))
        .collect();

    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    for t in &in_range {
        *totals.entry(t.entity.as_str()).or_default() += t.count;
    }
    let mut ranked: Vec<(&str, u64)> = totals.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let kept: HashSet<&str> = ranked.iter().take(cfg.top_k_entities).map(|(e, _)| *e).collect();

    let period_of = |year: i32| periods.iter().position(|p| p.contains(year));
    let mut cells: BTreeMap<(usize, &str), BTreeMap<String, u64>> = BTreeMap::new();
    for t in in_range.iter().filter(|t| kept.contains(t.entity.as_str())) {
        let p = period_of(t.year).expect("year inside configured range");
        *cells
            .entry((p, t.entity.as_str()))
            .or_default()
            .entry(t.term.clone())
            .or_default() += t.count;
    }

    let nodes: Vec<StreamNode> = cells
        .into_iter()
        .filter_map(|((period, entity), terms)| {
            let terms: BTreeMap<String, u64> = terms.into_iter().filter(|(_, c)| *c >= cfg.min_assoc).collect();
            (!terms.is_empty()).then(|| StreamNode {
                period,
                entity: entity.to_string(),
                terms,
            })
        })
        .collect();

    let mut tubes = Vec::new();
    for a in &nodes {
        for b in nodes.iter().filter(|b| b.period == a.period + 1) {
            let shared: Vec<String> = a.terms.keys().filter(|t| b.terms.contains_key(*t)).cloned().collect();
            if shared.len() >= cfg.min_overlap {
                tubes.push(Tube {
                    from: a.id(),
                    to: b.id(),
                    weight: shared.len(),
                    shared_terms: shared,
                });
            }
        }
    }
    Ok(StreamModel { periods, nodes, tubes })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDiff {
    pub common: Vec<String>,
    pub only_a: Vec<String>,
    pub only_b: Vec<String>,
}

impl StreamModel {
    pub fn node(&self, id: &str) -> Option<&StreamNode> {
        self.nodes.iter().find(|n| n.id() == id)
    }

    /// Checks the structural invariants: contiguous periods, unique node ids,
    /// tubes between existing nodes of consecutive periods whose weight and
    /// shared terms equal the nodes' term intersection.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Sankey(m));
        for (i, p) in self.periods.iter().enumerate() {
            if p.index != i || p.start_year > p.end_year {
                return bad(format!("period {i} is malformed"));
            }
            if i > 0 && self.periods[i - 1].end_year + 1 != p.start_year {
                return bad(format!("period {i} does not follow period {}", i - 1));
            }
        }
        let mut by_id: HashMap<String, &StreamNode> = HashMap::new();
        for n in &self.nodes {
            if n.period >= self.periods.len() {
                return bad(format!("node {} refers to a missing period", n.id()));
            }
            if by_id.insert(n.id(), n).is_some() {
                return bad(format!("duplicate node {}", n.id()));
            }
        }
        let mut seen = HashSet::new();
        for t in &self.tubes {
            let (Some(a), Some(b)) = (by_id.get(&t.from), by_id.get(&t.to)) else {
                return bad(format!("tube {} -> {} has a missing endpoint", t.from, t.to));
            };
            if b.period != a.period + 1 {
                return bad(format!("tube {} -> {} skips periods", t.from, t.to));
            }
            if !seen.insert((&t.from, &t.to)) {
                return bad(format!("duplicate tube {} -> {}", t.from, t.to));
            }
            let shared: Vec<&String> = a.terms.keys().filter(|k| b.terms.contains_key(*k)).collect();
            if t.weight == 0 || t.weight != shared.len() || t.shared_terms.iter().ne(shared.iter().copied()) {
                return bad(format!("tube {} -> {} disagrees with its endpoints' terms", t.from, t.to));
            }
        }
        Ok(())
    }
}

/// Terms common to both nodes and exclusive to each; sorted.
pub fn diff_terms(model: &StreamModel, a: &str, b: &str) -> Result<TermDiff> {
    let na = model.node(a).ok_or_else(|| Error::UnknownNode(a.to_string()))?;
    let nb = model.node(b).ok_or_else(|| Error::UnknownNode(b.to_string()))?;
    let split = |x: &StreamNode, y: &StreamNode| -> Vec<String> {
        x.terms.keys().filter(|t| !y.terms.contains_key(*t)).cloned().collect()
    };
    Ok(TermDiff {
        common: na.terms.keys().filter(|t| nb.terms.contains_key(*t)).cloned().collect(),
        only_a: split(na, nb),
        only_b: split(nb, na),
    })
}
