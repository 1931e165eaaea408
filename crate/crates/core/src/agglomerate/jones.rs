//! Face-weight agglomeration in the style of Jones and Vassilevski.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use super::{Assignment, WeightState};
use crate::mesh::LevelTopology;

/// Integer weights with a max-priority index over the non-negative ones.
/// Ties resolve to the lowest index.
pub(super) struct Weights {
    w: Vec<i64>,
    queue: BTreeSet<(Reverse<i64>, usize)>,
}

impl Weights {
    pub fn new(w: Vec<i64>) -> Self {
        let queue = w.iter().enumerate().filter(|(_, &x)| x >= 0).map(|(i, &x)| (Reverse(x), i)).collect();
        Weights { w, queue }
    }

    #[inline]
    pub fn get(&self, i: usize) -> i64 {
        self.w[i]
    }

    pub fn set(&mut self, i: usize, value: i64) {
        let old = self.w[i];
        if old == value {
            return;
        }
        if old >= 0 {
            self.queue.remove(&(Reverse(old), i));
        }
        self.w[i] = value;
        if value >= 0 {
            self.queue.insert((Reverse(value), i));
        }
    }

    pub fn consume(&mut self, i: usize) {
        self.set(i, -1);
    }

    /// Adds `by` unless the entry is consumed.
    pub fn bump(&mut self, i: usize, by: i64) {
        let old = self.w[i];
        if old != -1 {
            self.set(i, old + by);
        }
    }

    /// Index of the maximal non-negative weight.
    pub fn max(&self) -> Option<usize> {
        self.queue.first().map(|&(_, i)| i)
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.w
    }
}

/// Highest-weight entry of `candidates`, lowest index on ties.
pub(super) fn best_of(weights: &Weights, candidates: impl Iterator<Item = usize>) -> Option<usize> {
    candidates.max_by(|&a, &b| weights.get(a).cmp(&weights.get(b)).then(b.cmp(&a)))
}

pub fn jones_coarsen(level: &LevelTopology) -> Assignment {
    jones_with_state(level).0
}

/// Runs the algorithm and also returns the final face weights.
///
/// Only interior faces take part: a boundary face has no second element to
/// merge and starts consumed. Face neighbours share a node (2D) or an edge
/// (3D) of the fine mesh.
pub fn jones_with_state(level: &LevelTopology) -> (Assignment, WeightState) {
    let faces = &level.faces;
    let adj = level.face_adjacency();
    let mut weights = Weights::new(faces.iter().map(|f| if f.is_boundary() { -1 } else { 0 }).collect());
    let mut assign: Assignment = vec![None; level.num_elements()];
    let mut next_id = 0;

    while let Some(start) = weights.max() {
        let id = next_id;
        next_id += 1;
        let mut members = Vec::new();
        let mut f = start;
        loop {
            let face = &faces[f];
            for e in std::iter::once(face.left).chain(face.right) {
                if assign[e].is_none() {
                    assign[e] = Some(id);
                    members.push(e);
                }
            }
            let w_max = weights.get(f);
            weights.consume(f);
            for &f1 in &adj[f] {
                let by = if faces[f1].shares_element(face) { 2 } else { 1 };
                weights.bump(f1, by);
            }
            match best_of(&weights, adj[f].iter().copied()) {
                Some(g) if weights.get(g) >= w_max => f = g,
                _ => break,
            }
        }
        for &e in &members {
            for &fa in &level.element_faces[e] {
                weights.consume(fa);
            }
        }
    }
    (assign, WeightState { faces: weights.into_vec(), edges: Vec::new() })
}
