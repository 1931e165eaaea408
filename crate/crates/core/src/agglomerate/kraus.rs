//! Edge- then face-weight agglomeration, after Kraus and Synka.

use super::jones::{best_of, Weights};
use super::{Assignment, WeightState};
use crate::mesh::LevelTopology;

pub fn kraus_coarsen(level: &LevelTopology) -> Assignment {
    kraus_with_state(level).0
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Runs the algorithm and also returns the final face and edge weights.
///
/// In 3D the edge phase runs first, as long as any edge weight is
/// non-negative; a level without edge data runs the face phase only. The
/// face phase only grows into faces that share an element with the current
/// face. Boundary faces start consumed, as in [`super::jones_coarsen`].
pub fn kraus_with_state(level: &LevelTopology) -> (Assignment, WeightState) {
    let faces = &level.faces;
    let fadj = level.face_adjacency();
    let mut fw = Weights::new(faces.iter().map(|f| if f.is_boundary() { -1 } else { 0 }).collect());

    let edges = if level.dim() == 3 { level.edges.as_deref().unwrap_or(&[]) } else { &[] };
    let eadj = if edges.is_empty() { Vec::new() } else { level.edge_adjacency() };
    let mut ew = Weights::new(vec![0; edges.len()]);
    let mut element_edges = vec![Vec::new(); level.num_elements()];
    for (i, e) in edges.iter().enumerate() {
        for &el in &e.elements {
            element_edges[el].push(i);
        }
    }

    let mut assign: Assignment = vec![None; level.num_elements()];
    let mut next_id = 0;
    let mut f3_mark = vec![usize::MAX; faces.len()];
    let mut step = 0usize;

    loop {
        let mut members = Vec::new();
        let id = next_id;
        if let Some(start) = ew.max() {
            next_id += 1;
            let mut e = start;
            loop {
                for &el in &edges[e].elements {
                    if assign[el].is_none() {
                        assign[el] = Some(id);
                        members.push(el);
                    }
                }
                let w_max = ew.get(e);
                ew.consume(e);
                for &e1 in &eadj[e] {
                    let by = if sorted_intersect(&edges[e1].faces, &edges[e].faces) { 2 } else { 1 };
                    ew.bump(e1, by);
                }
                step += 1;
                for &fa in &edges[e].faces {
                    for &f3 in &fadj[fa] {
                        if f3_mark[f3] != step {
                            f3_mark[f3] = step;
                            fw.bump(f3, 1);
                        }
                    }
                }
                let shares_face = eadj[e].iter().copied().filter(|&d| sorted_intersect(&edges[d].faces, &edges[e].faces));
                match best_of(&ew, shares_face) {
                    Some(d) if ew.get(d) >= w_max => e = d,
                    _ => break,
                }
            }
        } else if let Some(start) = fw.max() {
            next_id += 1;
            let mut f = start;
            loop {
                let face = &faces[f];
                for el in std::iter::once(face.left).chain(face.right) {
                    if assign[el].is_none() {
                        assign[el] = Some(id);
                        members.push(el);
                    }
                }
                let w_max = fw.get(f);
                fw.consume(f);
                for &f1 in &fadj[f] {
                    let by = if faces[f1].shares_element(face) { 2 } else { 1 };
                    fw.bump(f1, by);
                }
                let shares_element = fadj[f].iter().copied().filter(|&g| faces[g].shares_element(face));
                match best_of(&fw, shares_element) {
                    Some(g) if fw.get(g) >= w_max => f = g,
                    _ => break,
                }
            }
        } else {
            break;
        }
        for &el in &members {
            for &fa in &level.element_faces[el] {
                fw.consume(fa);
            }
            for &ed in &element_edges[el] {
                ew.consume(ed);
            }
        }
    }
    (assign, WeightState { faces: fw.into_vec(), edges: ew.into_vec() })
}
