//! Repair of raw agglomerations into total, contiguous, well-formed ones.

use serde::{Deserialize, Serialize};

use super::rgb::shared_faces;
use super::Agglomeration;
use crate::mesh::LevelTopology;

/// What cleanup had to fix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanupReport {
    /// Unused elements attached to an adjacent agglomerate in the first round.
    pub unused_attached: usize,
    /// Unused elements only reachable through other unused elements.
    pub isolated_resolved: usize,
    /// Disconnected fragments moved to a neighbouring agglomerate.
    pub disconnected_split: usize,
    /// Agglomerates merged into the single agglomerate enclosing them.
    pub enclosed_merged: usize,
}

impl CleanupReport {
    pub fn total(&self) -> usize {
        self.unused_attached + self.isolated_resolved + self.disconnected_split + self.enclosed_merged
    }
}

/// Makes a raw assignment total, contiguous and densely numbered.
///
/// The steps run in a fixed order: unused elements are absorbed round by
/// round into the neighbour sharing most faces (ties go to the smaller
/// agglomerate, then the lower id), disconnected fragments are moved to a
/// neighbour, enclosed agglomerates are merged into their only neighbour,
/// ids are re-densified and contiguity is enforced once more.
pub fn cleanup(level: &LevelTopology, raw: &[Option<usize>]) -> (Agglomeration, CleanupReport) {
    assert_eq!(raw.len(), level.num_elements(), "assignment length must match the level");
    let mut report = CleanupReport::default();
    let mut assign = raw.to_vec();
    attach_unused(level, &mut assign, &mut report);
    let mut labels: Vec<usize> = assign.into_iter().map(|a| a.expect("all elements attached")).collect();
    split_disconnected(level, &mut labels, &mut report);
    merge_enclosed(level, &mut labels, &mut report);
    densify(&mut labels);
    split_disconnected(level, &mut labels, &mut report);
    densify(&mut labels);
    let agg = Agglomeration::from_assignment(level.level, labels).expect("labels are dense");
    (agg, report)
}

fn sizes_of(labels: impl Iterator<Item = usize>, len: usize) -> Vec<usize> {
    let mut sizes = vec![0; len];
    for a in labels {
        sizes[a] += 1;
    }
    sizes
}

/// Picks the most-shared candidate; ties go to the smaller size, then the lower id.
fn best_candidate(links: &[(usize, usize)], sizes: &[usize]) -> Option<usize> {
    links
        .iter()
        .max_by(|x, y| x.1.cmp(&y.1).then(sizes[y.0].cmp(&sizes[x.0])).then(y.0.cmp(&x.0)))
        .map(|l| l.0)
}

fn add_link(links: &mut Vec<(usize, usize)>, a: usize, count: usize) {
    match links.iter_mut().find(|l| l.0 == a) {
        Some(l) => l.1 += count,
        None => links.push((a, count)),
    }
}

fn attach_unused(level: &LevelTopology, assign: &mut [Option<usize>], report: &mut CleanupReport) {
    let mut next_id = assign.iter().flatten().max().map_or(0, |m| m + 1);
    let mut round = 0;
    let mut links = Vec::new();
    loop {
        let pending: Vec<usize> = (0..assign.len()).filter(|&e| assign[e].is_none()).collect();
        if pending.is_empty() {
            return;
        }
        round += 1;
        let snapshot = assign.to_vec();
        let sizes = sizes_of(snapshot.iter().flatten().copied(), next_id);
        let mut attached = 0;
        for &e in &pending {
            links.clear();
            for (u, count) in shared_faces(level, e) {
                if let Some(a) = snapshot[u] {
                    add_link(&mut links, a, count);
                }
            }
            if let Some(a) = best_candidate(&links, &sizes) {
                assign[e] = Some(a);
                attached += 1;
            }
        }
        if round == 1 {
            report.unused_attached += attached;
        } else {
            report.isolated_resolved += attached;
        }
        if attached == 0 {
            // Whole dual-graph components without any assignment become new agglomerates.
            for &e in &pending {
                if assign[e].is_some() {
                    continue;
                }
                let id = next_id;
                next_id += 1;
                assign[e] = Some(id);
                report.isolated_resolved += 1;
                let mut stack = vec![e];
                while let Some(x) = stack.pop() {
                    for &u in level.dual.neighbors(x) {
                        if assign[u].is_none() {
                            assign[u] = Some(id);
                            report.isolated_resolved += 1;
                            stack.push(u);
                        }
                    }
                }
            }
        }
    }
}

/// Connected components of every agglomerate, in order of lowest element.
fn components(level: &LevelTopology, labels: &[usize]) -> Vec<Vec<usize>> {
    let n = labels.len();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let x = comp[i];
            i += 1;
            for &u in level.dual.neighbors(x) {
                if !seen[u] && labels[u] == labels[s] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

fn split_disconnected(level: &LevelTopology, labels: &mut [usize], report: &mut CleanupReport) {
    let mut links = Vec::new();
    loop {
        let comps = components(level, labels);
        let num_ids = labels.iter().max().map_or(0, |m| m + 1);
        // Keep the largest component of every agglomerate; ties keep the earliest.
        let mut main: Vec<Option<usize>> = vec![None; num_ids];
        for (c, comp) in comps.iter().enumerate() {
            let a = labels[comp[0]];
            if main[a].map_or(true, |m| comps[m].len() < comp.len()) {
                main[a] = Some(c);
            }
        }
        let fragments: Vec<usize> = (0..comps.len()).filter(|&c| main[labels[comps[c][0]]] != Some(c)).collect();
        if fragments.is_empty() {
            return;
        }
        let mut sizes = sizes_of(labels.iter().copied(), num_ids);
        let mut gained = vec![false; num_ids + fragments.len()];
        let mut next_id = num_ids;
        for c in fragments {
            let comp = &comps[c];
            let a = labels[comp[0]];
            if gained[a] {
                continue;
            }
            links.clear();
            for &e in comp {
                for (u, count) in shared_faces(level, e) {
                    if labels[u] != a {
                        add_link(&mut links, labels[u], count);
                    }
                }
            }
            let target = best_candidate(&links, &sizes).unwrap_or_else(|| {
                // A separate piece of the mesh; it can only stand alone.
                next_id += 1;
                sizes.push(0);
                next_id - 1
            });
            for &e in comp {
                labels[e] = target;
            }
            sizes[a] -= comp.len();
            sizes[target] += comp.len();
            gained[target] = true;
            report.disconnected_split += 1;
        }
    }
}

fn merge_enclosed(level: &LevelTopology, labels: &mut [usize], report: &mut CleanupReport) {
    loop {
        let num_ids = labels.iter().max().map_or(0, |m| m + 1);
        let mut on_boundary = vec![false; num_ids];
        // First distinct neighbour, and whether a second one exists.
        let mut neighbour: Vec<Option<usize>> = vec![None; num_ids];
        let mut several = vec![false; num_ids];
        for face in &level.faces {
            let a = labels[face.left];
            match face.right {
                None => on_boundary[a] = true,
                Some(r) => {
                    let b = labels[r];
                    if a == b {
                        continue;
                    }
                    for (x, y) in [(a, b), (b, a)] {
                        match neighbour[x] {
                            None => neighbour[x] = Some(y),
                            Some(z) if z != y => several[x] = true,
                            _ => {}
                        }
                    }
                }
            }
        }
        let mut target: Vec<Option<usize>> = vec![None; num_ids];
        for a in 0..num_ids {
            if on_boundary[a] || several[a] {
                continue;
            }
            if let Some(b) = neighbour[a] {
                if target[b].is_none() {
                    target[a] = Some(b);
                }
            }
        }
        let merged = target.iter().flatten().count();
        if merged == 0 {
            return;
        }
        report.enclosed_merged += merged;
        for l in labels.iter_mut() {
            if let Some(b) = target[*l] {
                *l = b;
            }
        }
    }
}

/// Renumbers ids to `0..k` preserving their relative order.
fn densify(labels: &mut [usize]) {
    let num_ids = labels.iter().max().map_or(0, |m| m + 1);
    let mut used = vec![false; num_ids];
    for &l in labels.iter() {
        used[l] = true;
    }
    let mut map = vec![0; num_ids];
    let mut next = 0;
    for (id, u) in used.into_iter().enumerate() {
        if u {
            map[id] = next;
            next += 1;
        }
    }
    for l in labels.iter_mut() {
        *l = map[*l];
    }
}
