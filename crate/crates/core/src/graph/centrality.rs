use std::collections::VecDeque;

use super::CoocGraph;

/// Number of neighbors of each node.
pub fn degree(g: &CoocGraph) -> Vec<usize> {
    let mut deg = vec![0; g.node_count()];
    for e in &g.edges {
        deg[e.source] += 1;
        deg[e.target] += 1;
    }
    deg
}

/// Shortest-path betweenness on the unweighted skeleton (Brandes'
/// dependency accumulation), normalized by the `(n-1)(n-2)/2` pairs not
/// involving the node. Graphs with fewer than three nodes score 0.
pub fn betweenness(g: &CoocGraph) -> Vec<f64> {
    let n = g.node_count();
    let adj: Vec<Vec<usize>> = g.adjacency().into_iter().map(|l| l.into_iter().map(|(v, _)| v).collect()).collect();
    let mut bc = vec![0.0; n];

    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        stack.clear();
        for v in 0..n {
            preds[v].clear();
            sigma[v] = 0.0;
            dist[v] = -1;
            delta[v] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }

    // Each unordered pair was counted from both endpoints.
    if n < 3 {
        return vec![0.0; n];
    }
    let ordered_pairs = (n - 1) as f64 * (n - 2) as f64;
    bc.iter().map(|b| b / ordered_pairs).collect()
}
