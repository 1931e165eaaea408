//! Coarse edges for the edge-based (3D) coarsening path.

use std::collections::{BTreeMap, HashMap};

use super::coarse::CoarseFace;
use crate::mesh::{LevelEdge, LevelTopology};

/// Coarse edges: chains of fine edges shared by two or more coarse faces.
///
/// `faces` must come from [`super::select_coarse_faces`]; the returned
/// edges refer to coarse-level faces (primary coarse faces, in order) and
/// coarse-level elements. Closed loops are broken into two open chains at a
/// pair of topologically farthest nodes, and disconnected pieces become
/// separate edges. Returns no edges on levels without edge data.
pub fn select_coarse_edges(level: &LevelTopology, faces: &[CoarseFace]) -> Vec<LevelEdge> {
    let (Some(edges), Some(fine_edges)) = (&level.edges, &level.fine.topology.edges) else {
        return Vec::new();
    };
    let mut next_face = vec![usize::MAX; level.faces.len()];
    let mut next_elements: Vec<Vec<usize>> = Vec::new();
    for (k, f) in faces.iter().filter(|f| f.is_primary()).enumerate() {
        for &i in &f.faces {
            next_face[i] = k;
        }
        let mut els = vec![f.owner];
        if let super::Opposite::Agglomerate(b) = f.opposite {
            els.push(b);
        }
        next_elements.push(els);
    }

    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, edge) in edges.iter().enumerate() {
        let mut key: Vec<usize> = edge.faces.iter().map(|&f| next_face[f]).filter(|&k| k != usize::MAX).collect();
        key.sort_unstable();
        key.dedup();
        if key.len() >= 2 {
            groups.entry(key).or_default().push(i);
        }
    }

    let mut out = Vec::new();
    for (key, members) in groups {
        let mut fes: Vec<usize> = members.iter().flat_map(|&i| edges[i].fine_edges.iter().copied()).collect();
        fes.sort_unstable();
        fes.dedup();
        let mut elements: Vec<usize> = key.iter().flat_map(|&k| next_elements[k].iter().copied()).collect();
        elements.sort_unstable();
        elements.dedup();
        let ends = |e: usize| fine_edges.edges[e].nodes;
        for chain in split_chains(&fes, ends) {
            out.push(LevelEdge { nodes: Vec::new(), fine_edges: chain, faces: key.clone(), elements: elements.clone() });
        }
    }
    out
}

/// Connected pieces of a set of fine edges, with closed loops cut in two.
fn split_chains(fes: &[usize], ends: impl Fn(usize) -> [usize; 2]) -> Vec<Vec<usize>> {
    let mut at_node: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in fes {
        for n in ends(e) {
            at_node.entry(n).or_default().push(e);
        }
    }
    let mut seen: HashMap<usize, bool> = fes.iter().map(|&e| (e, false)).collect();
    let mut chains = Vec::new();
    for &start in fes {
        if seen[&start] {
            continue;
        }
        seen.insert(start, true);
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            let e = comp[i];
            i += 1;
            for n in ends(e) {
                for &d in &at_node[&n] {
                    if !seen[&d] {
                        seen.insert(d, true);
                        comp.push(d);
                    }
                }
            }
        }
        comp.sort_unstable();
        let is_loop = comp.len() >= 3 && comp.iter().flat_map(|&e| ends(e)).all(|n| at_node[&n].len() == 2);
        if is_loop {
            let (a, b) = break_loop(&comp, &ends, &at_node);
            chains.push(a);
            chains.push(b);
        } else {
            chains.push(comp);
        }
    }
    chains
}

/// Walks a simple cycle from its lowest node and cuts it at the antipodal node.
fn break_loop(
    cycle: &[usize],
    ends: &impl Fn(usize) -> [usize; 2],
    at_node: &HashMap<usize, Vec<usize>>,
) -> (Vec<usize>, Vec<usize>) {
    let start = cycle.iter().flat_map(|&e| ends(e)).min().expect("nonempty cycle");
    let mut order = Vec::with_capacity(cycle.len());
    let mut node = start;
    let mut prev = usize::MAX;
    for _ in 0..cycle.len() {
        let e = *at_node[&node].iter().filter(|&&d| d != prev).min().expect("cycle continues");
        order.push(e);
        let [x, y] = ends(e);
        node = if x == node { y } else { x };
        prev = e;
    }
    let half = cycle.len() / 2;
    let mut a = order[..half].to_vec();
    let mut b = order[half..].to_vec();
    a.sort_unstable();
    b.sort_unstable();
    (a, b)
}

/// Fine nodes at the ends of each coarse edge (nodes of degree other than 2
/// within the edge).
pub fn chain_endpoints(level: &LevelTopology, edges: &[LevelEdge]) -> Vec<usize> {
    let Some(fine_edges) = &level.fine.topology.edges else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut degree: HashMap<usize, usize> = HashMap::new();
    for edge in edges {
        degree.clear();
        for &e in &edge.fine_edges {
            for n in fine_edges.edges[e].nodes {
                *degree.entry(n).or_insert(0) += 1;
            }
        }
        out.extend(degree.iter().filter(|(_, &d)| d != 2).map(|(&n, _)| n));
    }
    out.sort_unstable();
    out.dedup();
    out
}
