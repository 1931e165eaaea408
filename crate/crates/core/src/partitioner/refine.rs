//! k-way balancing and boundary refinement.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::{max_part_weight, WeightedGraph};

const REFINE_PASSES: usize = 10;
const BALANCE_PASSES: usize = 20;

struct State {
    weight: Vec<u64>,
    count: Vec<usize>,
}

impl State {
    fn new(g: &WeightedGraph, parts: &[usize], k: usize) -> Self {
        let mut weight = vec![0; k];
        let mut count = vec![0; k];
        for (v, &p) in parts.iter().enumerate() {
            weight[p] += g.vertex_weight(v);
            count[p] += 1;
        }
        State { weight, count }
    }

    fn apply(&mut self, g: &WeightedGraph, parts: &mut [usize], v: usize, to: usize) {
        let from = parts[v];
        self.weight[from] -= g.vertex_weight(v);
        self.count[from] -= 1;
        self.weight[to] += g.vertex_weight(v);
        self.count[to] += 1;
        parts[v] = to;
    }
}

/// Edge weight from `v` to each adjacent part, own part included.
fn connections(g: &WeightedGraph, parts: &[usize], v: usize, buf: &mut Vec<(usize, u64)>) {
    buf.clear();
    for (&u, &w) in g.neighbors(v).iter().zip(g.edge_weights(v)) {
        let p = parts[u];
        match buf.iter_mut().find(|(q, _)| *q == p) {
            Some(e) => e.1 += w,
            None => buf.push((p, w)),
        }
    }
}

/// Greedy boundary refinement; only strictly cut-decreasing moves that keep
/// the target within the balance bound are taken.
pub(super) fn refine(g: &WeightedGraph, parts: &mut [usize], k: usize, rng: &mut ChaCha8Rng) {
    let maxw = max_part_weight(g.total_vertex_weight(), k, g.max_vertex_weight());
    let mut st = State::new(g, parts, k);
    let mut order: Vec<usize> = (0..g.num_vertices()).collect();
    let mut buf = Vec::new();
    for _ in 0..REFINE_PASSES {
        order.shuffle(rng);
        let mut moved = 0;
        for &v in &order {
            let a = parts[v];
            if st.count[a] <= 1 {
                continue;
            }
            connections(g, parts, v, &mut buf);
            if buf.iter().all(|&(p, _)| p == a) {
                continue;
            }
            let internal = buf.iter().find(|e| e.0 == a).map_or(0, |e| e.1);
            let vw = g.vertex_weight(v);
            let best = buf
                .iter()
                .filter(|&&(p, w)| p != a && w > internal && st.weight[p] + vw <= maxw)
                .max_by(|x, y| x.1.cmp(&y.1).then(st.weight[y.0].cmp(&st.weight[x.0])).then(y.0.cmp(&x.0)));
            if let Some(&(b, _)) = best {
                st.apply(g, parts, v, b);
                moved += 1;
            }
        }
        if moved == 0 {
            break;
        }
    }
}

/// Moves boundary vertices out of parts heavier than the balance bound. Each
/// move goes to a neighbouring part that is closer, in the part adjacency
/// graph, to a part with spare room, so excess weight flows towards light
/// regions even across a band of full parts.
pub(super) fn balance(g: &WeightedGraph, parts: &mut [usize], k: usize) {
    let max_vw = g.max_vertex_weight();
    let maxw = max_part_weight(g.total_vertex_weight(), k, max_vw);
    let mut st = State::new(g, parts, k);
    let mut buf = Vec::new();
    for _ in 0..BALANCE_PASSES {
        if st.weight.iter().all(|&w| w <= maxw) {
            return;
        }
        let dist = distance_to_room(g, parts, &st.weight, maxw.saturating_sub(max_vw), k);
        let mut moved = 0;
        for v in 0..g.num_vertices() {
            let a = parts[v];
            if st.weight[a] <= maxw || st.count[a] <= 1 {
                continue;
            }
            connections(g, parts, v, &mut buf);
            let internal = buf.iter().find(|e| e.0 == a).map_or(0, |e| e.1) as i64;
            let best = buf.iter().filter(|&&(p, _)| p != a && dist[p] < dist[a]).max_by(|x, y| {
                (x.1 as i64 - internal)
                    .cmp(&(y.1 as i64 - internal))
                    .then(dist[y.0].cmp(&dist[x.0]))
                    .then(st.weight[y.0].cmp(&st.weight[x.0]))
                    .then(y.0.cmp(&x.0))
            });
            if let Some(&(b, _)) = best {
                st.apply(g, parts, v, b);
                moved += 1;
            }
        }
        if moved == 0 {
            return;
        }
    }
}

/// Hop distance in the part adjacency graph to the nearest part whose weight
/// is at most `room`.
fn distance_to_room(g: &WeightedGraph, parts: &[usize], weight: &[u64], room: u64, k: usize) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for v in 0..g.num_vertices() {
        for &u in g.neighbors(v) {
            if parts[u] != parts[v] {
                adj[parts[v]].push(parts[u]);
            }
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let mut dist = vec![usize::MAX; k];
    let mut q = std::collections::VecDeque::new();
    for p in 0..k {
        if weight[p] <= room {
            dist[p] = 0;
            q.push_back(p);
        }
    }
    while let Some(p) = q.pop_front() {
        for &r in &adj[p] {
            if dist[r] == usize::MAX {
                dist[r] = dist[p] + 1;
                q.push_back(r);
            }
        }
    }
    dist
}

/// Gives every empty part one vertex taken from the part with most vertices,
/// preferring a vertex with few links inside its part.
pub(super) fn fill_empty_parts(g: &WeightedGraph, parts: &mut [usize], k: usize) {
    let mut st = State::new(g, parts, k);
    for p in 0..k {
        if st.count[p] > 0 {
            continue;
        }
        let donor = (0..k).max_by(|&a, &b| st.count[a].cmp(&st.count[b]).then(b.cmp(&a))).unwrap();
        let inside = |v: usize| g.neighbors(v).iter().filter(|&&u| parts[u] == donor).count();
        let v = (0..g.num_vertices())
            .filter(|&v| parts[v] == donor)
            .min_by_key(|&v| (inside(v), v))
            .unwrap();
        st.apply(g, parts, v, p);
    }
}
