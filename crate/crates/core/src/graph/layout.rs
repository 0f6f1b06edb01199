//! ForceAtlas-style layout: every pair of nodes repels, only linked nodes
//! attract.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{degree, CoocGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub positions: Vec<(f64, f64)>,
    pub seed: u64,
    pub iterations: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceAtlasConfig {
    /// k_r in `k_r (deg_u + 1)(deg_v + 1) / d`.
    pub repulsion: f64,
    /// k_a in `k_a · w · d`.
    pub attraction: f64,
    /// Side of the square holding the initial positions, per √n.
    pub initial_side: f64,
    /// Displacement cap at the first iteration, as a fraction of the side.
    pub initial_step: f64,
    /// Geometric decay of the displacement cap per iteration.
    pub cooling: f64,
}

impl Default for ForceAtlasConfig {
    fn default() -> Self {
        ForceAtlasConfig {
            repulsion: 100.0,
            attraction: 0.05,
            initial_side: 100.0,
            initial_step: 0.1,
            cooling: 0.99,
        }
    }
}

const MIN_DISTANCE: f64 = 0.01;

/// Runs `iterations` force steps from a seeded uniform start with the default
/// constants.
pub fn force_atlas(g: &CoocGraph, seed: u64, iterations: u32) -> Layout {
    force_atlas_with(g, seed, iterations, &ForceAtlasConfig::default())
}

pub fn force_atlas_with(g: &CoocGraph, seed: u64, iterations: u32, cfg: &ForceAtlasConfig) -> Layout {
    let n = g.node_count();
    let side = cfg.initial_side * (n.max(1) as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(-0.5..0.5) * side, rng.gen_range(-0.5..0.5) * side))
        .collect();
    let mass: Vec<f64> = degree(g).into_iter().map(|d| d as f64 + 1.0).collect();
    let mut step = cfg.initial_step * side;
    let mut force = vec![(0.0f64, 0.0f64); n];

    for _ in 0..iterations {
        force.iter_mut().for_each(|f| *f = (0.0, 0.0));
        for u in 0..n {
            for v in u + 1..n {
                let (dx, dy, d) = offset(&pos, u, v);
                let f = cfg.repulsion * mass[u] * mass[v] / d;
                let (fx, fy) = (f * dx / d, f * dy / d);
                force[u].0 += fx;
                force[u].1 += fy;
                force[v].0 -= fx;
                force[v].1 -= fy;
            }
        }
        for e in &g.edges {
            let (dx, dy, d) = offset(&pos, e.source, e.target);
            let f = cfg.attraction * e.weight as f64 * d;
            let (fx, fy) = (f * dx / d, f * dy / d);
            force[e.source].0 -= fx;
            force[e.source].1 -= fy;
            force[e.target].0 += fx;
            force[e.target].1 += fy;
        }
        for (p, &(fx, fy)) in pos.iter_mut().zip(&force) {
            let len = fx.hypot(fy);
            if len > 0.0 && len.is_finite() {
                let s = len.min(step) / len;
                p.0 += fx * s;
                p.1 += fy * s;
            }
        }
        step *= cfg.cooling;
    }
    Layout {
        positions: pos,
        seed,
        iterations,
    }
}

/// Vector from `v` to `u` and its length, nudged apart when coincident.
fn offset(pos: &[(f64, f64)], u: usize, v: usize) -> (f64, f64, f64) {
    let (mut dx, mut dy) = (pos[u].0 - pos[v].0, pos[u].1 - pos[v].1);
    let mut d = dx.hypot(dy);
    if d < MIN_DISTANCE {
        // Deterministic direction from the pair indices.
        let angle = (u * 7919 + v * 104729) as f64;
        dx = MIN_DISTANCE * angle.cos();
        dy = MIN_DISTANCE * angle.sin();
        d = MIN_DISTANCE;
    }
    (dx, dy, d)
}
