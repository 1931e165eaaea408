//! Initial partitions of the coarsest graph.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{max_part_weight, WeightedGraph};

const BISECTION_TRIALS: usize = 8;
const FM_PASSES: usize = 8;
/// FM gives up on a pass after this many moves without a new best cut.
const FM_STALL: usize = 64;

pub(super) fn initial_partition(g: &WeightedGraph, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if k > 8 {
        region_growing(g, k, rng)
    } else {
        let mut parts = vec![0; g.num_vertices()];
        let all: Vec<usize> = (0..g.num_vertices()).collect();
        recursive_bisection(g, &all, k, 0, &mut parts, rng);
        parts
    }
}

fn recursive_bisection(
    g: &WeightedGraph,
    vertices: &[usize],
    k: usize,
    offset: usize,
    parts: &mut [usize],
    rng: &mut ChaCha8Rng,
) {
    if k == 1 {
        for &v in vertices {
            parts[v] = offset;
        }
        return;
    }
    let k0 = k / 2;
    let sub = g.induced(vertices);
    let side = bisect(&sub, k0, k - k0, rng);
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (i, &v) in vertices.iter().enumerate() {
        if side[i] == 0 {
            left.push(v);
        } else {
            right.push(v);
        }
    }
    recursive_bisection(g, &left, k0, offset, parts, rng);
    recursive_bisection(g, &right, k - k0, offset + k0, parts, rng);
}

/// Two-way split with side weights proportional to `k0 : k1`; each side gets
/// at least `k0` (resp. `k1`) vertices.
pub(super) fn bisect(g: &WeightedGraph, k0: usize, k1: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let n = g.num_vertices();
    let total = g.total_vertex_weight();
    let target0 = total as f64 * k0 as f64 / (k0 + k1) as f64;
    let maxw = [
        max_part_weight(total * k0 as u64, k0 + k1, g.max_vertex_weight()),
        max_part_weight(total * k1 as u64, k0 + k1, g.max_vertex_weight()),
    ];
    let mut best: Option<(bool, u64, Vec<u8>)> = None;
    let trials = BISECTION_TRIALS.min(n);
    for t in 0..trials {
        let seed = if t == 0 { pseudo_peripheral(g, 0) } else { rng.gen_range(0..n) };
        let mut side = grow_bisection(g, seed, target0);
        ensure_counts(g, &mut side, [k0, k1]);
        fm_refine(g, &mut side, maxw, [k0, k1]);
        let w = side_weights(g, &side);
        let balanced = w[0] <= maxw[0] && w[1] <= maxw[1];
        let cut = cut2(g, &side);
        let better = match &best {
            None => true,
            Some((b, c, _)) => (balanced && !b) || (balanced == *b && cut < *c),
        };
        if better {
            best = Some((balanced, cut, side));
        }
    }
    best.map(|b| b.2).unwrap_or_else(|| vec![0; n])
}

/// End point of a double breadth-first sweep from `start`.
fn pseudo_peripheral(g: &WeightedGraph, start: usize) -> usize {
    let mut v = start;
    for _ in 0..2 {
        let dist = bfs(g, v);
        v = (0..g.num_vertices())
            .filter(|&u| dist[u] != usize::MAX)
            .max_by(|&a, &b| dist[a].cmp(&dist[b]).then(b.cmp(&a)))
            .unwrap_or(v);
    }
    v
}

fn bfs(g: &WeightedGraph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.num_vertices()];
    let mut q = VecDeque::new();
    dist[s] = 0;
    q.push_back(s);
    while let Some(v) = q.pop_front() {
        for &u in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
        }
    }
    dist
}

/// Greedy graph growing: side 0 starts at `seed` and absorbs the side-1
/// vertex of highest gain until its weight is closest to `target0`.
fn grow_bisection(g: &WeightedGraph, seed: usize, target0: f64) -> Vec<u8> {
    let n = g.num_vertices();
    let mut side = vec![1u8; n];
    let mut gain = vec![0i64; n];
    let mut frontier = vec![false; n];
    for v in 0..n {
        gain[v] = -(g.edge_weights(v).iter().sum::<u64>() as i64);
    }
    let mut w0 = 0u64;
    let mut count0 = 0;
    let mut next = Some(seed);
    while let Some(v) = next {
        side[v] = 0;
        frontier[v] = false;
        w0 += g.vertex_weight(v);
        count0 += 1;
        for (&u, &w) in g.neighbors(v).iter().zip(g.edge_weights(v)) {
            gain[u] += 2 * w as i64;
            if side[u] == 1 {
                frontier[u] = true;
            }
        }
        if count0 + 1 >= n || w0 as f64 >= target0 {
            break;
        }
        let candidate = (0..n)
            .filter(|&u| frontier[u])
            .max_by(|&a, &b| gain[a].cmp(&gain[b]).then(b.cmp(&a)))
            .or_else(|| (0..n).find(|&u| side[u] == 1));
        next = candidate.filter(|&u| {
            let after = w0 as f64 + g.vertex_weight(u) as f64;
            (after - target0).abs() <= (w0 as f64 - target0).abs()
        });
    }
    side
}

fn side_weights(g: &WeightedGraph, side: &[u8]) -> [u64; 2] {
    let mut w = [0; 2];
    for (v, &s) in side.iter().enumerate() {
        w[s as usize] += g.vertex_weight(v);
    }
    w
}

fn cut2(g: &WeightedGraph, side: &[u8]) -> u64 {
    let mut c = 0;
    for v in 0..g.num_vertices() {
        for (&u, &w) in g.neighbors(v).iter().zip(g.edge_weights(v)) {
            if u > v && side[u] != side[v] {
                c += w;
            }
        }
    }
    c
}

fn gains(g: &WeightedGraph, side: &[u8]) -> Vec<i64> {
    (0..g.num_vertices())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .zip(g.edge_weights(v))
                .map(|(&u, &w)| if side[u] != side[v] { w as i64 } else { -(w as i64) })
                .sum()
        })
        .collect()
}

/// Moves best-gain vertices until each side holds at least its minimum count.
fn ensure_counts(g: &WeightedGraph, side: &mut [u8], min: [usize; 2]) {
    loop {
        let count0 = side.iter().filter(|&&s| s == 0).count();
        let counts = [count0, side.len() - count0];
        let Some(short) = (0..2).find(|&s| counts[s] < min[s]) else {
            return;
        };
        let gain = gains(g, side);
        let from = 1 - short as u8;
        let v = (0..side.len())
            .filter(|&v| side[v] == from)
            .max_by(|&a, &b| gain[a].cmp(&gain[b]).then(b.cmp(&a)))
            .expect("graph has at least k vertices");
        side[v] = short as u8;
    }
}

/// Fiduccia–Mattheyses passes: tentative moves in best-gain order, rolled back
/// to the lowest-cut balanced prefix.
fn fm_refine(g: &WeightedGraph, side: &mut [u8], maxw: [u64; 2], min_count: [usize; 2]) {
    let n = g.num_vertices();
    for _ in 0..FM_PASSES {
        let mut gain = gains(g, side);
        let mut w = side_weights(g, side);
        let mut count = [0usize; 2];
        for &s in side.iter() {
            count[s as usize] += 1;
        }
        let overweight = |w: &[u64; 2]| w[0].saturating_sub(maxw[0]) + w[1].saturating_sub(maxw[1]);
        let mut locked = vec![false; n];
        let mut cut = cut2(g, side) as i64;
        let mut best = (overweight(&w), cut, 0usize);
        let mut moves: Vec<usize> = Vec::new();
        while moves.len() < n {
            let mut pick: Option<usize> = None;
            for v in 0..n {
                if locked[v] {
                    continue;
                }
                let s = side[v] as usize;
                let d = 1 - s;
                if count[s] <= min_count[s] {
                    continue;
                }
                let fits = w[d] + g.vertex_weight(v) <= maxw[d] || w[s] > maxw[s];
                if !fits {
                    continue;
                }
                if pick.is_none_or(|p| gain[v] > gain[p]) {
                    pick = Some(v);
                }
            }
            let Some(v) = pick else { break };
            let s = side[v] as usize;
            let d = 1 - s;
            side[v] = d as u8;
            locked[v] = true;
            w[s] -= g.vertex_weight(v);
            w[d] += g.vertex_weight(v);
            count[s] -= 1;
            count[d] += 1;
            cut -= gain[v];
            gain[v] = -gain[v];
            for (&u, &ew) in g.neighbors(v).iter().zip(g.edge_weights(v)) {
                // u's edge to v flipped between internal and external.
                if side[u] as usize == d {
                    gain[u] -= 2 * ew as i64;
                } else {
                    gain[u] += 2 * ew as i64;
                }
            }
            moves.push(v);
            let state = (overweight(&w), cut, moves.len());
            if (state.0, state.1) < (best.0, best.1) {
                best = state;
            }
            if moves.len() - best.2 > FM_STALL {
                break;
            }
        }
        for &v in moves[best.2..].iter().rev() {
            side[v] = 1 - side[v];
        }
        if best.2 == 0 {
            break;
        }
    }
}

/// Rounds of re-seeding each region at its innermost vertex and regrowing.
const RESEED_ROUNDS: usize = 3;

/// k seeds spread by farthest-point search, then lightest-part-first
/// breadth-first growth; seeds are moved to region centres and regrown a few
/// times to even out boxed-in regions.
fn region_growing(g: &WeightedGraph, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = g.num_vertices();
    let mut dist = vec![usize::MAX; n];
    let mut seeds = Vec::with_capacity(k);
    let mut is_seed = vec![false; n];
    let mut q = VecDeque::new();
    let mut s = rng.gen_range(0..n);
    for _ in 0..k {
        seeds.push(s);
        is_seed[s] = true;
        dist[s] = 0;
        q.push_back(s);
        while let Some(v) = q.pop_front() {
            for &u in g.neighbors(v) {
                if dist[v] + 1 < dist[u] {
                    dist[u] = dist[v] + 1;
                    q.push_back(u);
                }
            }
        }
        s = match (0..n).filter(|&v| !is_seed[v]).max_by(|&a, &b| dist[a].cmp(&dist[b]).then(b.cmp(&a))) {
            Some(v) => v,
            None => break,
        };
    }

    let mut parts = grow_from(g, &seeds);
    for _ in 0..RESEED_ROUNDS {
        let centres = region_centres(g, &parts, k);
        if centres == seeds {
            break;
        }
        seeds = centres;
        parts = grow_from(g, &seeds);
    }
    parts
}

fn grow_from(g: &WeightedGraph, seeds: &[usize]) -> Vec<usize> {
    let n = g.num_vertices();
    let k = seeds.len();
    let mut parts = vec![usize::MAX; n];
    let mut weight = vec![0u64; k];
    let mut frontier: Vec<VecDeque<usize>> = vec![VecDeque::new(); k];
    let mut heap = BinaryHeap::new();
    for (p, &s) in seeds.iter().enumerate() {
        parts[s] = p;
        weight[p] = g.vertex_weight(s);
        frontier[p].extend(g.neighbors(s));
        heap.push(Reverse((weight[p], p)));
    }
    while let Some(Reverse((w, p))) = heap.pop() {
        if w != weight[p] {
            continue;
        }
        while let Some(v) = frontier[p].pop_front() {
            if parts[v] == usize::MAX {
                parts[v] = p;
                weight[p] += g.vertex_weight(v);
                frontier[p].extend(g.neighbors(v).iter().filter(|&&u| parts[u] == usize::MAX));
                heap.push(Reverse((weight[p], p)));
                break;
            }
        }
    }

    // Vertices in components without a seed.
    for v in 0..n {
        if parts[v] == usize::MAX {
            let p = (0..k).min_by_key(|&p| (weight[p], p)).unwrap();
            let mut stack = vec![v];
            parts[v] = p;
            while let Some(x) = stack.pop() {
                weight[p] += g.vertex_weight(x);
                for &u in g.neighbors(x) {
                    if parts[u] == usize::MAX {
                        parts[u] = p;
                        stack.push(u);
                    }
                }
            }
        }
    }
    parts
}

/// For each part, the vertex farthest (in hops) from the part's border.
fn region_centres(g: &WeightedGraph, parts: &[usize], k: usize) -> Vec<usize> {
    let n = g.num_vertices();
    let mut depth = vec![usize::MAX; n];
    let mut q = VecDeque::new();
    for v in 0..n {
        if g.neighbors(v).iter().any(|&u| parts[u] != parts[v]) {
            depth[v] = 0;
            q.push_back(v);
        }
    }
    while let Some(v) = q.pop_front() {
        for &u in g.neighbors(v) {
            if parts[u] == parts[v] && depth[u] == usize::MAX {
                depth[u] = depth[v] + 1;
                q.push_back(u);
            }
        }
    }
    let mut best: Vec<Option<usize>> = vec![None; k];
    for v in 0..n {
        let p = parts[v];
        // Parts with no border (a whole component) keep depth MAX everywhere.
        let d = if depth[v] == usize::MAX { 0 } else { depth[v] };
        let better = match best[p] {
            None => true,
            Some(b) => {
                let db = if depth[b] == usize::MAX { 0 } else { depth[b] };
                d > db
            }
        };
        if better {
            best[p] = Some(v);
        }
    }
    best.into_iter().map(|b| b.expect("every part holds its seed")).collect()
}
