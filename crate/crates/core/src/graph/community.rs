//! Louvain community detection and weighted modularity.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::CoocGraph;
use crate::error::{Error, Result};

/// Community id per node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub assignment: Vec<usize>,
}

impl Partition {
    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
        }
    }

    pub fn community_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    /// Relabels communities 0, 1, … in order of first appearance.
    pub fn canonicalized(&self) -> Partition {
        let mut map = vec![usize::MAX; self.assignment.iter().max().map_or(0, |m| m + 1)];
        let mut next = 0;
        let assignment = self
            .assignment
            .iter()
            .map(|&c| {
                if map[c] == usize::MAX {
                    map[c] = next;
                    next += 1;
                }
                map[c]
            })
            .collect();
        Partition { assignment }
    }

    /// Node ids grouped by community.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.community_count()];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out.retain(|c| !c.is_empty());
        out
    }
}

/// `Q = Σ_c [ in_c / m − (tot_c / 2m)² ]` with `in_c` the weight inside
/// community `c` and `tot_c` its total degree. Zero when the graph has no
/// edges.
pub fn modularity(g: &CoocGraph, p: &Partition) -> Result<f64> {
    if p.assignment.len() != g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "partition covers {} nodes, graph has {}",
            p.assignment.len(),
            g.node_count()
        )));
    }
    let m = g.total_weight() as f64;
    if m == 0.0 {
        return Ok(0.0);
    }
    let k = p.community_count();
    let mut inside = vec![0.0; k];
    let mut tot = vec![0.0; k];
    for e in &g.edges {
        let (a, b) = (p.assignment[e.source], p.assignment[e.target]);
        let w = e.weight as f64;
        tot[a] += w;
        tot[b] += w;
        if a == b {
            inside[a] += w;
        }
    }
    Ok(inside
        .iter()
        .zip(&tot)
        .map(|(i, t)| i / m - (t / (2.0 * m)).powi(2))
        .sum())
}

/// Working graph of one Louvain level; self-loops hold the internal weight
/// of aggregated communities.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    degree: Vec<f64>,
    /// Total edge weight m.
    m: f64,
}

impl Level {
    fn from_graph(g: &CoocGraph) -> Self {
        let adj: Vec<Vec<(usize, f64)>> = g
            .adjacency()
            .into_iter()
            .map(|l| l.into_iter().map(|(v, w)| (v, w as f64)).collect())
            .collect();
        let degree = adj.iter().map(|l| l.iter().map(|(_, w)| w).sum()).collect();
        Level {
            self_loops: vec![0.0; adj.len()],
            adj,
            degree,
            m: g.total_weight() as f64,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, comm: &[usize]) -> f64 {
        let k = comm.iter().max().map_or(0, |c| c + 1);
        let mut inside = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for v in 0..self.len() {
            let c = comm[v];
            tot[c] += self.degree[v];
            inside[c] += self.self_loops[v];
            for &(u, w) in &self.adj[v] {
                if u > v && comm[u] == c {
                    inside[c] += w;
                }
            }
        }
        inside
            .iter()
            .zip(&tot)
            .map(|(i, t)| i / self.m - (t / (2.0 * self.m)).powi(2))
            .sum()
    }

    /// Collapses communities (numbered `0..k`) into single nodes.
    fn aggregate(&self, comm: &[usize], k: usize) -> Level {
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        let mut self_loops = vec![0.0; k];
        let mut degree = vec![0.0; k];
        for v in 0..self.len() {
            let c = comm[v];
            self_loops[c] += self.self_loops[v];
            degree[c] += self.degree[v];
            for &(u, w) in &self.adj[v] {
                let d = comm[u];
                if d == c {
                    if u > v {
                        self_loops[c] += w;
                    }
                } else {
                    *weights[c].entry(d).or_default() += w;
                }
            }
        }
        Level {
            adj: weights.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
            degree,
            m: self.m,
        }
    }
}

/// Modularity values observed while running [`louvain_traced`].
#[derive(Debug, Clone, Default)]
pub struct LouvainTrace {
    /// Modularity of the singleton start, then after every local-move sweep.
    pub sweeps: Vec<f64>,
    /// Number of aggregation levels performed.
    pub levels: usize,
}

const LEVEL_MIN_GAIN: f64 = 1e-7;
const MOVE_EPS: f64 = 1e-12;

/// Louvain partition; see [`louvain_traced`].
pub fn louvain(g: &CoocGraph, seed: u64) -> Partition {
    louvain_traced(g, seed).0
}

/// Greedy modularity optimization: local moves to a local optimum, then
/// aggregation, until a level gains less than 1e-7. A last round of local
/// moves on the original nodes refines the result. Nodes are visited in a
/// seeded random order each sweep; a node moves only for a strictly positive
/// gain, and equal gains go to the lowest community id.
pub fn louvain_traced(g: &CoocGraph, seed: u64) -> (Partition, LouvainTrace) {
    let n = g.node_count();
    let mut trace = LouvainTrace::default();
    let mut level = Level::from_graph(g);
    if level.m == 0.0 {
        trace.sweeps.push(0.0);
        return (Partition::singletons(n), trace);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node_level: Vec<usize> = (0..n).collect();
    let identity: Vec<usize> = (0..n).collect();
    let mut q = level.modularity(&identity);
    trace.sweeps.push(q);

    loop {
        let comm = local_moves(&level, (0..level.len()).collect(), false, &mut rng, &mut trace);
        let (comm, k) = renumber(&comm);
        for slot in node_level.iter_mut() {
            *slot = comm[*slot];
        }
        let q_new = level.modularity(&comm);
        if k == level.len() || q_new - q < LEVEL_MIN_GAIN {
            break;
        }
        q = q_new;
        level = level.aggregate(&comm, k);
        trace.levels += 1;
    }
    let refined = local_moves(&Level::from_graph(g), node_level, true, &mut rng, &mut trace);
    let p = Partition { assignment: refined }.canonicalized();
    (p, trace)
}

fn renumber(comm: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; comm.len()];
    let mut next = 0;
    let out = comm
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect();
    (out, next)
}

/// Local-move sweeps from `comm` (ids below `level.len()`) until a sweep
/// moves nothing or gains less than the level threshold. With `isolate`, a
/// node may also leave for an empty community.
fn local_moves(
    level: &Level,
    mut comm: Vec<usize>,
    isolate: bool,
    rng: &mut ChaCha8Rng,
    trace: &mut LouvainTrace,
) -> Vec<usize> {
    let n = level.len();
    let two_m = 2.0 * level.m;
    let mut tot = vec![0.0f64; n];
    let mut size = vec![0usize; n];
    for v in 0..n {
        tot[comm[v]] += level.degree[v];
        size[comm[v]] += 1;
    }
    let mut link = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut q = level.modularity(&comm);

    loop {
        order.shuffle(rng);
        let mut moved = 0usize;
        for &v in &order {
            let own = comm[v];
            let k_v = level.degree[v];
            for &(u, w) in &level.adj[v] {
                let c = comm[u];
                if link[c] == 0.0 {
                    touched.push(c);
                }
                link[c] += w;
            }
            tot[own] -= k_v;
            touched.sort_unstable();
            touched.dedup();
            let gain = |c: usize, link_c: f64| link_c - tot[c] * k_v / two_m;
            let mut best = own;
            let mut best_gain = gain(own, link[own]);
            for &c in &touched {
                if c == own {
                    continue;
                }
                let g = gain(c, link[c]);
                if g > best_gain + MOVE_EPS * (1.0 + best_gain.abs()) {
                    best = c;
                    best_gain = g;
                }
            }
            if isolate && size[own] > 1 && 0.0 > best_gain + MOVE_EPS * (1.0 + best_gain.abs()) {
                if let Some(empty) = size.iter().position(|&s| s == 0) {
                    best = empty;
                }
            }
            tot[best] += k_v;
            if best != own {
                comm[v] = best;
                size[own] -= 1;
                size[best] += 1;
                moved += 1;
            }
            for &c in &touched {
                link[c] = 0.0;
            }
            touched.clear();
        }
        let q_new = level.modularity(&comm);
        assert!(
            q_new >= q - 1e-9,
            "Louvain sweep decreased modularity: {q} -> {q_new}"
        );
        trace.sweeps.push(q_new);
        let gained = q_new - q;
        q = q_new;
        if moved == 0 || gained < LEVEL_MIN_GAIN {
            break;
        }
    }
    comm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique_edges(nodes: &[usize]) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                out.push((a, b, 1));
            }
        }
        out
    }

    #[test]
    fn modularity_examples() {
        // Two disconnected edges, each its own community: 2 × (1/2 − 1/4).
        let g = CoocGraph::unlabeled(4, [(0, 1, 1), (2, 3, 1)]).unwrap();
        let p = Partition { assignment: vec![0, 0, 1, 1] };
        assert!((modularity(&g, &p).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(modularity(&CoocGraph::unlabeled(3, []).unwrap(), &Partition::singletons(3)).unwrap(), 0.0);
        assert_eq!(modularity(&CoocGraph::default(), &Partition::singletons(0)).unwrap(), 0.0);
        assert!(modularity(&g, &Partition::singletons(3)).is_err());
        let g = CoocGraph::unlabeled(3, [(0, 1, 2), (1, 2, 1)]).unwrap();
        let q = modularity(&g, &Partition { assignment: vec![0; 3] }).unwrap();
        assert!(q.abs() < 1e-12);
        // Singletons: Q = −Σ deg² / (2m)².
        let q = modularity(&g, &Partition::singletons(3)).unwrap();
        assert!((q + (4.0 + 9.0 + 1.0) / 36.0).abs() < 1e-12);
    }

    #[test]
    fn barbell() {
        let mut edges = clique_edges(&[0, 1, 2, 3, 4]);
        edges.extend(clique_edges(&[5, 6, 7, 8, 9]));
        edges.push((4, 5, 1));
        let g = CoocGraph::unlabeled(10, edges).unwrap();
        for seed in 0..20 {
            let p = louvain(&g, seed);
            assert_eq!(p.assignment, [0, 0, 0, 0, 0, 1, 1, 1, 1, 1], "seed {seed}");
        }
    }

    #[test]
    fn edgeless_and_single_edge() {
        let g = CoocGraph::unlabeled(4, []).unwrap();
        assert_eq!(louvain(&g, 1), Partition::singletons(4));
        let g = CoocGraph::unlabeled(2, [(0, 1, 1)]).unwrap();
        assert_eq!(louvain(&g, 1).assignment, [0, 0]);
        assert!(louvain(&CoocGraph::default(), 0).assignment.is_empty());
    }

    #[test]
    fn deterministic_and_monotone() {
        let mut edges = clique_edges(&[0, 1, 2, 3]);
        edges.extend(clique_edges(&[4, 5, 6]));
        edges.extend([(3, 4, 1), (6, 7, 2), (7, 8, 1), (8, 9, 3), (9, 7, 1)]);
        let g = CoocGraph::unlabeled(10, edges).unwrap();
        let (p1, t1) = louvain_traced(&g, 7);
        let (p2, _) = louvain_traced(&g, 7);
        assert_eq!(p1, p2);
        assert!(t1.sweeps.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        let q = modularity(&g, &p1).unwrap();
        assert!((q - t1.sweeps.last().copied().unwrap()).abs() < 1e-9);
        assert!(q >= modularity(&g, &Partition::singletons(10)).unwrap());
    }

    #[test]
    fn canonicalize() {
        let p = Partition { assignment: vec![3, 1, 3, 0] };
        assert_eq!(p.canonicalized().assignment, [0, 1, 0, 2]);
        assert_eq!(p.canonicalized().communities(), [vec![0, 2], vec![1], vec![3]]);
    }
}
