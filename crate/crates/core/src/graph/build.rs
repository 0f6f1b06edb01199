use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::annotation::{EntityMention, EntityType};
use crate::error::{Error, Result};
use crate::ingest::Document;
use crate::normalize::{cluster_index, EntityCluster};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphNode {
    pub id: usize,
    pub label: String,
    pub etype: EntityType,
    /// Mentions of the cluster in the corpus.
    pub occurrences: u64,
}

/// Undirected weighted edge with `source < target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: u64,
}

/// Undirected co-occurrence graph. Node ids are positions in `nodes`; edges
/// are sorted, unique per pair, loop-free and have weight ≥ 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoocGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Edge>,
}

impl CoocGraph {
    /// Builds a graph from raw edges, summing duplicates. Self-loops and
    /// zero weights are rejected.
    pub fn from_edges(nodes: Vec<GraphNode>, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        let n = nodes.len();
        let mut acc: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!("edge {a}-{b} references a missing node")));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop on node {a}")));
            }
            if w == 0 {
                return Err(Error::InvalidArgument(format!("edge {a}-{b} has weight 0")));
            }
            *acc.entry((a.min(b), a.max(b))).or_default() += w;
        }
        Ok(CoocGraph {
            nodes,
            edges: acc
                .into_iter()
                .map(|((source, target), weight)| Edge { source, target, weight })
                .collect(),
        })
    }

    /// Plain graph with labels "0", "1", … for analyses and tests.
    pub fn unlabeled(n: usize, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        let nodes = (0..n)
            .map(|id| GraphNode {
                id,
                label: id.to_string(),
                etype: EntityType::Organization,
                occurrences: 1,
            })
            .collect();
        CoocGraph::from_edges(nodes, edges)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Neighbor lists `(neighbor, weight)`, sorted by neighbor.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.source].push((e.target, e.weight));
            adj[e.target].push((e.source, e.weight));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Copy keeping only edges with weight ≥ `min_weight`; nodes are kept.
    pub fn filter_min_weight(&self, min_weight: u64) -> CoocGraph {
        CoocGraph {
            nodes: self.nodes.clone(),
            edges: self.edges.iter().copied().filter(|e| e.weight >= min_weight).collect(),
        }
    }
}

/// One node per cluster with at least one mention; each sentence adds 1 to
/// the edge of every unordered pair of distinct clusters it mentions,
/// however often each is mentioned.
pub fn build_graph(clusters: &[EntityCluster], mentions: &[EntityMention], docs: &[Document]) -> Result<CoocGraph> {
    let index = cluster_index(clusters);
    let sentence_counts: HashMap<&str, usize> = docs.iter().map(|d| (d.doc_id.as_str(), d.sentences.len())).collect();

    let mut occurrences = vec![0u64; clusters.len()];
    let mut per_sentence: BTreeMap<(&str, usize), BTreeSet<usize>> = BTreeMap::new();
    for m in mentions.iter().filter(|m| m.etype.is_actor()) {
        let &cluster = index
            .get(&(m.etype, m.surface.as_str()))
            .ok_or_else(|| Error::UnmappedMention {
                etype: m.etype.to_string(),
                surface: m.surface.clone(),
            })?;
        match sentence_counts.get(m.doc_id.as_str()) {
            Some(&n) if m.sentence_index < n => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "mention `{}` points at missing sentence {}/{}",
                    m.surface, m.doc_id, m.sentence_index
                )))
            }
        }
        occurrences[cluster] += 1;
        per_sentence.entry((m.doc_id.as_str(), m.sentence_index)).or_default().insert(cluster);
    }

    // Renumber the clusters that actually occur, keeping cluster order.
    let mut node_of = vec![usize::MAX; clusters.len()];
    let mut nodes = Vec::new();
    for (i, c) in clusters.iter().enumerate() {
        if occurrences[i] > 0 {
            node_of[i] = nodes.len();
            nodes.push(GraphNode {
                id: nodes.len(),
                label: c.canonical.clone(),
                etype: c.etype,
                occurrences: occurrences[i],
            });
        }
    }

    let mut pairs = Vec::new();
    for members in per_sentence.values() {
        let ids: Vec<usize> = members.iter().map(|&c| node_of[c]).collect();
        for (k, &a) in ids.iter().enumerate() {
            for &b in &ids[k + 1..] {
                pairs.push((a, b, 1));
            }
        }
    }
    CoocGraph::from_edges(nodes, pairs)
}

/// `source<TAB>target<TAB>weight` with node labels.
pub fn write_edge_list(g: &CoocGraph) -> String {
    let mut out = String::new();
    for e in &g.edges {
        let _ = writeln!(out, "{}\t{}\t{}", g.nodes[e.source].label, g.nodes[e.target].label, e.weight);
    }
    out
}

/// Reads an edge list back as `(source label, target label, weight)`.
pub fn read_edge_list(input: &str) -> Result<Vec<(String, String, u64)>> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let f: Vec<&str> = line.split('\t').collect();
            let weight = f.get(2).and_then(|w| w.parse().ok());
            match (f.len(), weight) {
                (3, Some(w)) => Ok((f[0].to_string(), f[1].to_string(), w)),
                _ => Err(Error::Malformed {
                    line: n + 1,
                    message: "expected `source<TAB>target<TAB>weight`".into(),
                }),
            }
        })
        .collect()
}
