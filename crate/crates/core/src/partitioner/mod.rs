//! Multilevel k-way graph partitioning of weighted dual graphs.
//!
//! The scheme is the usual three-phase one: heavy-edge matching coarsens the
//! graph, the coarsest graph is split by recursive bisection (k ≤ 8) or greedy
//! region growing (k > 8), and the partition is projected back with
//! boundary refinement at every level. An optional final pass makes every
//! part connected.

mod coarsen;
mod initial;
mod refine;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::DualGraph;

/// Integer weight scale applied by [`scale_weights`].
pub const WEIGHT_SCALE: f64 = 1000.0;

/// Allowed part-weight excess over the mean, as a fraction of the mean.
pub const BALANCE_TOLERANCE: f64 = 0.05;

/// Undirected graph with positive integer vertex and edge weights, CSR form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    adjacency: Vec<usize>,
    edge_weights: Vec<u64>,
    vertex_weights: Vec<u64>,
}

impl WeightedGraph {
    /// Builds a graph from undirected `(a, b, w)` edges. Parallel edges are
    /// merged by summing weights; self loops are dropped.
    pub fn from_edges(
        vertex_weights: Vec<u64>,
        edges: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Result<Self> {
        let n = vertex_weights.len();
        if vertex_weights.iter().any(|&w| w == 0) {
            return Err(Error::Partition("vertex weights must be positive".into()));
        }
        let mut half = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::Partition(format!("edge ({a}, {b}) out of range for {n} vertices")));
            }
            if w == 0 {
                return Err(Error::Partition("edge weights must be positive".into()));
            }
            if a != b {
                half.push((a, b, w));
                half.push((b, a, w));
            }
        }
        Ok(Self::from_half_edges(vertex_weights, half))
    }

    /// `half` must already contain both directions of every edge.
    fn from_half_edges(vertex_weights: Vec<u64>, mut half: Vec<(usize, usize, u64)>) -> Self {
        let n = vertex_weights.len();
        half.sort_unstable_by_key(|&(a, b, _)| (a, b));
        let mut offsets = vec![0usize; n + 1];
        let mut adjacency = Vec::with_capacity(half.len());
        let mut edge_weights: Vec<u64> = Vec::with_capacity(half.len());
        let mut last = None;
        for (a, b, w) in half {
            if last == Some((a, b)) {
                *edge_weights.last_mut().unwrap() += w;
            } else {
                offsets[a + 1] += 1;
                adjacency.push(b);
                edge_weights.push(w);
                last = Some((a, b));
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        WeightedGraph { offsets, adjacency, edge_weights, vertex_weights }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn edge_weights(&self, v: usize) -> &[u64] {
        &self.edge_weights[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn vertex_weight(&self, v: usize) -> u64 {
        self.vertex_weights[v]
    }

    pub fn vertex_weights(&self) -> &[u64] {
        &self.vertex_weights
    }

    pub fn total_vertex_weight(&self) -> u64 {
        self.vertex_weights.iter().sum()
    }

    pub fn total_edge_weight(&self) -> u64 {
        self.edge_weights.iter().sum::<u64>() / 2
    }

    pub(crate) fn max_vertex_weight(&self) -> u64 {
        self.vertex_weights.iter().copied().max().unwrap_or(0)
    }

    /// Subgraph induced by `vertices` (in the given order).
    pub(crate) fn induced(&self, vertices: &[usize]) -> WeightedGraph {
        let mut local = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut half = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for (&u, &w) in self.neighbors(v).iter().zip(self.edge_weights(v)) {
                if local[u] != usize::MAX {
                    half.push((i, local[u], w));
                }
            }
        }
        let vw = vertices.iter().map(|&v| self.vertex_weights[v]).collect();
        Self::from_half_edges(vw, half)
    }
}

/// Assignment of every vertex to one of `k` parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub parts: Vec<usize>,
    pub k: usize,
}

impl Partition {
    pub fn part_weights(&self, graph: &WeightedGraph) -> Vec<u64> {
        let mut w = vec![0; self.k];
        for (v, &p) in self.parts.iter().enumerate() {
            w[p] += graph.vertex_weight(v);
        }
        w
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &p in &self.parts {
            s[p] += 1;
        }
        s
    }

    /// True when every part induces a connected subgraph.
    pub fn is_contiguous(&self, graph: &WeightedGraph) -> bool {
        part_components(graph, &self.parts).iter().all(|c| c.len() <= 1)
    }
}

/// Converts a dual graph to integer weights, `max(1, round(1000·w/w_max))`,
/// scaling vertex and edge weights independently.
pub fn scale_weights(dual: &DualGraph) -> WeightedGraph {
    let scale = |w: f64, max: f64| -> u64 {
        if max > 0.0 {
            ((WEIGHT_SCALE * w / max).round() as u64).max(1)
        } else {
            1
        }
    };
    let vmax = dual.vertex_weights.iter().copied().fold(0.0, f64::max);
    let emax = (0..dual.num_vertices())
        .flat_map(|v| dual.edge_weights(v).iter().copied())
        .fold(0.0, f64::max);
    let vw = dual.vertex_weights.iter().map(|&w| scale(w, vmax)).collect();
    let mut half = Vec::with_capacity(2 * dual.num_edges());
    for v in 0..dual.num_vertices() {
        for (&u, &w) in dual.neighbors(v).iter().zip(dual.edge_weights(v)) {
            half.push((v, u, scale(w, emax)));
        }
    }
    WeightedGraph::from_half_edges(vw, half)
}

/// Sum of weights of edges whose endpoints lie in different parts.
pub fn edge_cut(graph: &WeightedGraph, partition: &Partition) -> u64 {
    let p = &partition.parts;
    let mut cut = 0;
    for v in 0..graph.num_vertices() {
        for (&u, &w) in graph.neighbors(v).iter().zip(graph.edge_weights(v)) {
            if u > v && p[u] != p[v] {
                cut += w;
            }
        }
    }
    cut
}

/// Largest part weight accepted by refinement: the mean plus 5%, plus one
/// heaviest vertex so that indivisible vertices can always be placed.
pub fn max_part_weight(total: u64, k: usize, max_vertex_weight: u64) -> u64 {
    let mean = total as f64 / k as f64;
    (mean * (1.0 + BALANCE_TOLERANCE)).ceil() as u64 + max_vertex_weight
}

/// Partitions `graph` into exactly `k` nonempty parts.
pub fn partition_kway(graph: &WeightedGraph, k: usize, contiguous: bool, seed: u64) -> Result<Partition> {
    let n = graph.num_vertices();
    if k == 0 {
        return Err(Error::Partition("number of parts must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Partition(format!("{k} parts requested for a graph of {n} vertices")));
    }
    if k == 1 {
        return Ok(Partition { parts: vec![0; n], k });
    }
    if k == n {
        return Ok(Partition { parts: (0..n).collect(), k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let target = (4 * k).max(64);
    let levels = coarsen::coarsen(graph, target, &mut rng);
    let coarsest = levels.last().map_or(graph, |l| &l.graph);

    let mut parts = initial::initial_partition(coarsest, k, &mut rng);
    refine::balance(coarsest, &mut parts, k);
    refine::refine(coarsest, &mut parts, k, &mut rng);

    for i in (0..levels.len()).rev() {
        let finer = if i == 0 { graph } else { &levels[i - 1].graph };
        parts = levels[i].cmap.iter().map(|&c| parts[c]).collect();
        refine::balance(finer, &mut parts, k);
        refine::refine(finer, &mut parts, k, &mut rng);
    }

    refine::fill_empty_parts(graph, &mut parts, k);
    if contiguous {
        make_contiguous(graph, &mut parts, k);
    }
    Ok(Partition { parts, k })
}

/// Connected components of every part: `result[p]` lists the components of
/// part `p`, each as a vertex list, largest weight first.
pub(crate) fn part_components(graph: &WeightedGraph, parts: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let k = parts.iter().copied().max().map_or(0, |m| m + 1);
    let n = graph.num_vertices();
    let mut seen = vec![false; n];
    let mut comps: Vec<Vec<Vec<usize>>> = vec![Vec::new(); k];
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let p = parts[s];
        let mut comp = Vec::new();
        seen[s] = true;
        stack.push(s);
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &u in graph.neighbors(v) {
                if !seen[u] && parts[u] == p {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        comps[p].push(comp);
    }
    for list in comps.iter_mut() {
        let weight = |c: &Vec<usize>| c.iter().map(|&v| graph.vertex_weight(v)).sum::<u64>();
        list.sort_by(|a, b| weight(b).cmp(&weight(a)).then(a[0].cmp(&b[0])));
    }
    comps
}

/// Reassigns every fragment other than the heaviest component of its part to
/// the adjacent part sharing the largest edge weight with it. Fragments
/// without any neighbouring part (disconnected graphs) stay where they are.
fn make_contiguous(graph: &WeightedGraph, parts: &mut [usize], k: usize) {
    for _ in 0..graph.num_vertices() {
        let comps = part_components(graph, parts);
        let mut moved = false;
        for (p, list) in comps.iter().enumerate().take(k) {
            for frag in list.iter().skip(1) {
                let mut links: Vec<(usize, u64)> = Vec::new();
                for &v in frag {
                    for (&u, &w) in graph.neighbors(v).iter().zip(graph.edge_weights(v)) {
                        let q = parts[u];
                        if q != p {
                            match links.iter_mut().find(|(x, _)| *x == q) {
                                Some(l) => l.1 += w,
                                None => links.push((q, w)),
                            }
                        }
                    }
                }
                if let Some(&(q, _)) = links.iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))) {
                    for &v in frag {
                        parts[v] = q;
                    }
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
}
