//! Seeded random instance families for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{GraphEdge, Instance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub vertices: usize,
    pub terminals: usize,
    pub max_weight: i64,
    /// Probability of each non-tree vertex pair becoming an extra edge.
    pub density: f64,
}

/// Random spanning tree plus independent extra edges; integer weights in
/// `1..=max_weight`. Terminals are a uniform sample of the vertices.
pub fn random_instance(spec: RandomSpec, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.vertices.max(2);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let weight = |rng: &mut ChaCha8Rng| rng.gen_range(1..=spec.max_weight.max(1));
    let mut adjacent = vec![false; n * n];
    let mut edges = Vec::new();
    for i in 1..n {
        let (u, v) = (order[i], order[rng.gen_range(0..i)]);
        adjacent[u * n + v] = true;
        adjacent[v * n + u] = true;
        edges.push(GraphEdge {
            u,
            v,
            weight: weight(&mut rng),
        });
    }
    for u in 0..n {
        for v in u + 1..n {
            if !adjacent[u * n + v] && rng.gen_bool(spec.density.clamp(0.0, 1.0)) {
                edges.push(GraphEdge {
                    u,
                    v,
                    weight: weight(&mut rng),
                });
            }
        }
    }
    let mut terminals: Vec<usize> = (0..n).collect();
    terminals.shuffle(&mut rng);
    terminals.truncate(spec.terminals.clamp(2, n));
    Instance::new(
        format!("rand-v{n}-t{}-s{seed}", terminals.len()),
        n,
        edges,
        terminals,
    )
}

/// `rows × cols` grid with random weights and `terminals` random vertices.
pub fn grid_instance(
    rows: usize,
    cols: usize,
    terminals: usize,
    max_weight: i64,
    seed: u64,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push(GraphEdge {
                    u: id(r, c),
                    v: id(r, c + 1),
                    weight: rng.gen_range(1..=max_weight.max(1)),
                });
            }
            if r + 1 < rows {
                edges.push(GraphEdge {
                    u: id(r, c),
                    v: id(r + 1, c),
                    weight: rng.gen_range(1..=max_weight.max(1)),
                });
            }
        }
    }
    let n = rows * cols;
    let mut picks: Vec<usize> = (0..n).collect();
    picks.shuffle(&mut rng);
    picks.truncate(terminals.clamp(2, n.max(2)));
    Instance::new(
        format!("grid-{rows}x{cols}-t{}-s{seed}", picks.len()),
        n,
        edges,
        picks,
    )
}
