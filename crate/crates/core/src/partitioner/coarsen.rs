//! Heavy-edge matching coarsening.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::WeightedGraph;

pub(super) struct CoarseLevel {
    pub graph: WeightedGraph,
    /// Vertex of the next finer graph → vertex of `graph`.
    pub cmap: Vec<usize>,
}

/// Coarsens until at most `target` vertices remain or matching stalls.
pub(super) fn coarsen(graph: &WeightedGraph, target: usize, rng: &mut ChaCha8Rng) -> Vec<CoarseLevel> {
    let mut levels: Vec<CoarseLevel> = Vec::new();
    // Keep coarse vertices small enough that the initial partition can balance.
    let max_vw = ((1.5 * graph.total_vertex_weight() as f64 / target as f64) as u64).max(graph.max_vertex_weight());
    loop {
        let current = levels.last().map_or(graph, |l| &l.graph);
        let n = current.num_vertices();
        if n <= target {
            break;
        }
        let level = match_once(current, max_vw, rng);
        if level.graph.num_vertices() as f64 > 0.95 * n as f64 {
            if level.graph.num_vertices() < n {
                levels.push(level);
            }
            break;
        }
        levels.push(level);
    }
    levels
}

fn match_once(g: &WeightedGraph, max_vw: u64, rng: &mut ChaCha8Rng) -> CoarseLevel {
    let n = g.num_vertices();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut mate = vec![usize::MAX; n];
    for &v in &order {
        if mate[v] != usize::MAX {
            continue;
        }
        let mut best: Option<(u64, usize)> = None;
        for (&u, &w) in g.neighbors(v).iter().zip(g.edge_weights(v)) {
            if mate[u] != usize::MAX || g.vertex_weight(u) + g.vertex_weight(v) > max_vw {
                continue;
            }
            let better = match best {
                None => true,
                Some((bw, bu)) => w > bw || (w == bw && u < bu),
            };
            if better {
                best = Some((w, u));
            }
        }
        match best {
            Some((_, u)) => {
                mate[v] = u;
                mate[u] = v;
            }
            None => mate[v] = v,
        }
    }

    let mut cmap = vec![usize::MAX; n];
    let mut nc = 0;
    for v in 0..n {
        if cmap[v] == usize::MAX {
            cmap[v] = nc;
            cmap[mate[v]] = nc;
            nc += 1;
        }
    }
    let mut vw = vec![0u64; nc];
    for v in 0..n {
        vw[cmap[v]] += g.vertex_weight(v);
    }
    let mut half = Vec::with_capacity(g.num_edges() * 2);
    for v in 0..n {
        let cv = cmap[v];
        for (&u, &w) in g.neighbors(v).iter().zip(g.edge_weights(v)) {
            let cu = cmap[u];
            if cu != cv {
                half.push((cv, cu, w));
            }
        }
    }
    CoarseLevel { graph: WeightedGraph::from_half_edges(vw, half), cmap }
}
