#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entnet::annotation::{EntityMention, EntityType};
use entnet::graph::{CoocGraph, Partition};
use entnet::ingest::{Document, Sentence};
use entnet::normalize::{EntityCluster, SurfaceStat};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p) with integer weights in 1..=max_weight.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, max_weight: u64) -> CoocGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b, rng.gen_range(1..=max_weight)));
            }
        }
    }
    CoocGraph::unlabeled(n, edges).unwrap()
}

pub fn path_graph(n: usize) -> CoocGraph {
    CoocGraph::unlabeled(n, (1..n).map(|i| (i - 1, i, 1))).unwrap()
}

pub fn clique(n: usize) -> CoocGraph {
    CoocGraph::unlabeled(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, 1)))).unwrap()
}

pub fn barbell() -> CoocGraph {
    let mut edges = Vec::new();
    for base in [0, 5] {
        for a in 0..5 {
            for b in a + 1..5 {
                edges.push((base + a, base + b, 1));
            }
        }
    }
    edges.push((4, 5, 1));
    CoocGraph::unlabeled(10, edges).unwrap()
}

fn unweighted_adjacency(g: &CoocGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut adj = vec![vec![false; n]; n];
    for e in &g.edges {
        adj[e.source][e.target] = true;
        adj[e.target][e.source] = true;
    }
    adj
}

/// All-pairs betweenness from distance and shortest-path-count tables:
/// v lies on a shortest s-t path iff d(s,v) + d(v,t) = d(s,t), and then
/// carries σ(s,v)·σ(v,t) of the σ(s,t) paths. Normalized over unordered pairs.
pub fn brute_betweenness(g: &CoocGraph) -> Vec<f64> {
    let n = g.node_count();
    if n < 3 {
        return vec![0.0; n];
    }
    let adj = unweighted_adjacency(g);
    let mut dist = vec![vec![usize::MAX; n]; n];
    let mut sigma = vec![vec![0u128; n]; n];
    for s in 0..n {
        dist[s][s] = 0;
        sigma[s][s] = 1;
        let mut queue = VecDeque::from([s]);
        let mut order = Vec::new();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in 0..n {
                if adj[v][w] && dist[s][w] == usize::MAX {
                    dist[s][w] = dist[s][v] + 1;
                    queue.push_back(w);
                }
            }
        }
        // Path counts layer by layer, summing over predecessors.
        for &v in order.iter().skip(1) {
            sigma[s][v] = (0..n)
                .filter(|&u| adj[u][v] && dist[s][u] != usize::MAX && dist[s][u] + 1 == dist[s][v])
                .map(|u| sigma[s][u])
                .sum();
        }
    }
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            if dist[s][t] == usize::MAX {
                continue;
            }
            for v in 0..n {
                if v == s || v == t || dist[s][v] == usize::MAX || dist[v][t] == usize::MAX {
                    continue;
                }
                if dist[s][v] + dist[v][t] == dist[s][t] {
                    bc[v] += (sigma[s][v] * sigma[v][t]) as f64 / sigma[s][t] as f64;
                }
            }
        }
    }
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    bc.iter().map(|b| b / pairs).collect()
}

/// Q = 1/(2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j), over the full matrix.
pub fn brute_modularity(g: &CoocGraph, assignment: &[usize]) -> f64 {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for e in &g.edges {
        a[e.source][e.target] += e.weight as f64;
        a[e.target][e.source] += e.weight as f64;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assignment[i] == assignment[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of 0..n as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max + 1 {
            if i == 0 && c > 0 {
                break;
            }
            cur.push(c);
            rec(i + 1, n, if i == 0 { 0 } else { max.max(c) }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        rec(0, n, 0, &mut Vec::new(), &mut out);
    }
    out
}

pub fn best_modularity(g: &CoocGraph) -> f64 {
    all_partitions(g.node_count())
        .iter()
        .map(|p| brute_modularity(g, p))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn same_partition(p: &Partition, assignment: &[usize]) -> bool {
    p.canonicalized().assignment == Partition { assignment: assignment.to_vec() }.canonicalized().assignment
}

const ORG_WORDS: &[&str] = &[
    "Federal", "Reserve", "Goldman", "Sachs", "Lehman", "Brothers", "Morgan", "Stanley", "Treasury",
    "National", "Trust", "Capital", "Mutual", "Savings", "Bear", "Stearns", "Fannie", "Mae",
];
const FIRST_NAMES: &[&str] = &["Alan", "Ben", "Mary", "Tim", "Hank", "Sheila", "Chris", "Angelo"];
const LAST_NAMES: &[&str] = &["Greenspan", "Bernanke", "Schapiro", "Geithner", "Paulson", "Bair", "Dodd", "Mozilo"];

pub fn org_surface(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(1..=3);
    let words: Vec<&str> = (0..len).map(|_| *ORG_WORDS.choose(rng).unwrap()).collect();
    match rng.gen_range(0..6) {
        0 if len > 1 => words.iter().map(|w| &w[..1]).collect(),
        1 if len > 1 => words.join(" and "),
        _ => words.join(" "),
    }
}

pub fn person_surface(rng: &mut ChaCha8Rng) -> String {
    let first = FIRST_NAMES.choose(rng).unwrap();
    let last = LAST_NAMES.choose(rng).unwrap();
    match rng.gen_range(0..5) {
        0 => last.to_string(),
        1 => format!("Mr. {last}"),
        2 => format!("Chairman {last}"),
        _ => format!("{first} {last}"),
    }
}

/// Up to `max` distinct organization and person surfaces with counts.
pub fn random_surface_stats(rng: &mut ChaCha8Rng, max: usize) -> Vec<SurfaceStat> {
    let target = rng.gen_range(1..=max);
    let mut seen: BTreeMap<(EntityType, String), u64> = BTreeMap::new();
    for _ in 0..target * 3 {
        if seen.len() >= target {
            break;
        }
        let (etype, surface) = if rng.gen_bool(0.5) {
            (EntityType::Organization, org_surface(rng))
        } else {
            (EntityType::Person, person_surface(rng))
        };
        let count = if rng.gen_bool(0.2) { rng.gen_range(5..=40) } else { rng.gen_range(1..=4) };
        seen.entry((etype, surface)).or_insert(count);
    }
    seen.into_iter()
        .map(|((etype, surface), count)| SurfaceStat { surface, etype, count })
        .collect()
}

pub const TERMS: &[&str] = &["subprime loans", "bank capital", "credit default swaps", "leverage", "bailout", "liquidity"];
const FILLER: &[&str] = &["officials met", "markets moved", "analysts noted", "reports followed"];

/// A synthetic corpus with its mentions. Sentence parts are separated by
/// `", "` so every part is its own token run.
pub struct SynthCorpus {
    pub docs: Vec<Document>,
    pub mentions: Vec<EntityMention>,
}

pub struct SynthParams {
    pub docs: usize,
    pub sentences: usize,
    pub surfaces: usize,
    pub year_range: (i32, i32),
}

pub fn synth_corpus(rng: &mut ChaCha8Rng, p: &SynthParams) -> SynthCorpus {
    let mut pool: Vec<(EntityType, String)> = Vec::new();
    while pool.len() < p.surfaces {
        let item = if rng.gen_bool(0.5) {
            (EntityType::Organization, org_surface(rng))
        } else {
            (EntityType::Person, person_surface(rng))
        };
        if !pool.contains(&item) && !TERMS.contains(&item.1.to_lowercase().as_str()) {
            pool.push(item);
        }
    }
    let mut docs = Vec::new();
    let mut mentions = Vec::new();
    for d in 0..p.docs {
        let doc_id = format!("doc{d:03}");
        let mut text = String::new();
        let mut sentences = Vec::new();
        for index in 0..p.sentences {
            let mut parts: Vec<(String, Option<EntityType>)> = Vec::new();
            for _ in 0..rng.gen_range(0..=4) {
                let (t, s) = pool.choose(rng).unwrap().clone();
                parts.push((s, Some(t)));
            }
            for _ in 0..rng.gen_range(0..=2) {
                let year = rng.gen_range(p.year_range.0..=p.year_range.1);
                parts.push((year.to_string(), Some(EntityType::Date)));
            }
            for _ in 0..rng.gen_range(0..=3) {
                parts.push((TERMS.choose(rng).unwrap().to_string(), None));
            }
            parts.push((FILLER.choose(rng).unwrap().to_string(), None));
            parts.shuffle(rng);

            let mut sentence = String::new();
            for (k, (part, etype)) in parts.iter().enumerate() {
                if k > 0 {
                    sentence.push_str(", ");
                }
                let start = sentence.chars().count();
                sentence.push_str(part);
                if let Some(etype) = etype {
                    mentions.push(EntityMention {
                        doc_id: doc_id.clone(),
                        sentence_index: index,
                        start_char: start,
                        end_char: start + part.chars().count(),
                        surface: part.clone(),
                        etype: *etype,
                    });
                }
            }
            sentence.push('.');
            if !text.is_empty() {
                text.push(' ');
            }
            let start_char = text.chars().count();
            text.push_str(&sentence);
            sentences.push(Sentence {
                index,
                start_char,
                end_char: start_char + sentence.chars().count(),
                text: sentence,
            });
        }
        docs.push(Document { doc_id, text, sentences });
    }
    SynthCorpus { docs, mentions }
}

fn canonical_of<'c>(clusters: &'c [EntityCluster], etype: EntityType, surface: &str) -> &'c str {
    clusters
        .iter()
        .find(|c| c.etype == etype && c.members.iter().any(|m| m.surface == surface))
        .map(|c| c.canonical.as_str())
        .expect("every actor mention belongs to a cluster")
}

/// Edge weights recounted sentence by sentence, keyed by sorted label pairs.
pub fn brute_edge_weights(
    docs: &[Document],
    mentions: &[EntityMention],
    clusters: &[EntityCluster],
) -> BTreeMap<(String, String), u64> {
    let mut out = BTreeMap::new();
    for d in docs {
        for s in &d.sentences {
            let present: BTreeSet<&str> = mentions
                .iter()
                .filter(|m| m.doc_id == d.doc_id && m.sentence_index == s.index && m.etype.is_actor())
                .map(|m| canonical_of(clusters, m.etype, &m.surface))
                .collect();
            let present: Vec<&str> = present.into_iter().collect();
            for i in 0..present.len() {
                for j in i + 1..present.len() {
                    *out.entry((present[i].to_string(), present[j].to_string())).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

pub fn graph_edge_weights(g: &CoocGraph) -> BTreeMap<(String, String), u64> {
    g.edges
        .iter()
        .map(|e| {
            let (a, b) = (&g.nodes[e.source].label, &g.nodes[e.target].label);
            let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            (key, e.weight)
        })
        .collect()
}

/// Σ over sentences of #years × #entities × #terms, read straight from the
/// sentence parts of a synthetic corpus.
pub fn brute_triple_total(
    docs: &[Document],
    mentions: &[EntityMention],
    clusters: &[EntityCluster],
    year_range: (i32, i32),
    terms: &[&str],
) -> u64 {
    let mut total = 0;
    for d in docs {
        for s in &d.sentences {
            let here: Vec<&EntityMention> = mentions
                .iter()
                .filter(|m| m.doc_id == d.doc_id && m.sentence_index == s.index)
                .collect();
            let years: BTreeSet<i32> = here
                .iter()
                .filter(|m| m.etype == EntityType::Date)
                .filter_map(|m| m.surface.parse().ok())
                .filter(|y| (year_range.0..=year_range.1).contains(y))
                .collect();
            let entities: BTreeSet<&str> = here
                .iter()
                .filter(|m| m.etype.is_actor())
                .map(|m| canonical_of(clusters, m.etype, &m.surface))
                .collect();
            let body = s.text.trim_end_matches('.');
            let found: BTreeSet<&str> = body
                .split(", ")
                .filter(|part| terms.contains(part))
                .collect();
            total += (years.len() * entities.len() * found.len()) as u64;
        }
    }
    total
}

/// Graphs with at most eight nodes used for the Louvain quality check:
/// paths, cycles, stars, cliques, pairs of joined cliques, random trees and
/// planted two- or three-group partitions.
pub fn small_fixture_graphs() -> Vec<(String, CoocGraph)> {
    let mut out = Vec::new();
    for n in 3..=8 {
        out.push((format!("path{n}"), path_graph(n)));
        out.push((format!("cycle{n}"), CoocGraph::unlabeled(n, (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n), 1))).unwrap()));
        out.push((format!("star{n}"), CoocGraph::unlabeled(n, (1..n).map(|i| (0, i, 1))).unwrap()));
        out.push((format!("clique{n}"), clique(n)));
    }
    for a in 2..=4 {
        for b in a..=8 - a {
            let mut edges: Vec<(usize, usize, u64)> = Vec::new();
            for (base, size) in [(0, a), (a, b)] {
                for i in 0..size {
                    for j in i + 1..size {
                        edges.push((base + i, base + j, 1));
                    }
                }
            }
            edges.push((a - 1, a, 1));
            out.push((format!("cliques{a}+{b}"), CoocGraph::unlabeled(a + b, edges).unwrap()));
        }
    }
    let mut r = rng(2024);
    for k in 0..30 {
        let n = 4 + k % 5;
        let edges: Vec<(usize, usize, u64)> = (1..n).map(|v| (r.gen_range(0..v), v, r.gen_range(1..=3))).collect();
        out.push((format!("tree{k}"), CoocGraph::unlabeled(n, edges).unwrap()));
    }
    for k in 0..60 {
        let n = 5 + k % 4;
        let groups = 2 + k % 2;
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let p = if a % groups == b % groups { 0.9 } else { 0.1 };
                if r.gen_bool(p) {
                    edges.push((a, b, r.gen_range(1..=3)));
                }
            }
        }
        out.push((format!("planted{k}"), CoocGraph::unlabeled(n, edges).unwrap()));
    }
    out
}
