//! Coarse faces and coarse nodes of an agglomerated level.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::agglomerate::Agglomeration;
use crate::mesh::{LevelFace, LevelTopology};

/// What lies on the other side of a coarse face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Opposite {
    Agglomerate(usize),
    /// Domain boundary with the tag of its fine faces.
    Boundary(Option<i32>),
}

/// One connected piece of an agglomerate's interface with a neighbour or
/// with one tagged part of the domain boundary. Interfaces between two
/// agglomerates appear twice, once per owner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseFace {
    pub owner: usize,
    pub opposite: Opposite,
    /// Level faces making up the coarse face, sorted.
    pub faces: Vec<usize>,
    /// Index of this piece among the components of its interface.
    pub component: usize,
    /// Level nodes on the coarse face, sorted.
    pub nodes: Vec<usize>,
}

impl CoarseFace {
    pub fn is_boundary(&self) -> bool {
        matches!(self.opposite, Opposite::Boundary(_))
    }

    /// The copy owned by the lower agglomerate id (or the only copy on the
    /// boundary); these form the faces of the coarse level.
    pub fn is_primary(&self) -> bool {
        match self.opposite {
            Opposite::Agglomerate(b) => self.owner < b,
            Opposite::Boundary(_) => true,
        }
    }
}

/// Groups the external level faces of every agglomerate by neighbour (or
/// boundary tag) and splits each group into connected components.
///
/// Faces are adjacent when they share a fine node in 2D or a fine edge in 3D.
pub fn select_coarse_faces(level: &LevelTopology, agg: &Agglomeration) -> Vec<CoarseFace> {
    let labels = agg.element_to_agg();
    let mut groups: BTreeMap<(usize, Opposite), Vec<usize>> = BTreeMap::new();
    for (i, face) in level.faces.iter().enumerate() {
        let a = labels[face.left];
        match face.right.map(|r| labels[r]) {
            None => groups.entry((a, Opposite::Boundary(face.tag))).or_default().push(i),
            Some(b) if b != a => {
                groups.entry((a.min(b), Opposite::Agglomerate(a.max(b)))).or_default().push(i);
            }
            _ => {}
        }
    }
    let adjacency = level.face_adjacency();
    let mut in_group = vec![usize::MAX; level.faces.len()];
    let mut out = Vec::new();
    for (g, ((owner, opposite), faces)) in groups.into_iter().enumerate() {
        for &f in &faces {
            in_group[f] = g;
        }
        let mut seen = vec![false; faces.len()];
        let mut component = 0;
        for start in 0..faces.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![faces[start]];
            let mut i = 0;
            while i < comp.len() {
                let f = comp[i];
                i += 1;
                for &h in &adjacency[f] {
                    if in_group[h] == g {
                        let k = faces.binary_search(&h).expect("face in its group");
                        if !seen[k] {
                            seen[k] = true;
                            comp.push(h);
                        }
                    }
                }
            }
            comp.sort_unstable();
            let mut nodes: Vec<usize> = comp.iter().flat_map(|&f| level.faces[f].nodes.iter().copied()).collect();
            nodes.sort_unstable();
            nodes.dedup();
            let face = CoarseFace { owner, opposite, faces: comp, component, nodes };
            if let Opposite::Agglomerate(b) = opposite {
                out.push(CoarseFace { owner: b, opposite: Opposite::Agglomerate(owner), ..face.clone() });
            }
            out.push(face);
            component += 1;
        }
    }
    out.sort_by(|x, y| (x.owner, x.opposite, x.component).cmp(&(y.owner, y.opposite, y.component)));
    out
}

/// `2^(dim-2)`: the coarse-face multiplier of the coarse-node rule.
pub fn face_factor(dim: usize) -> usize {
    1 << (dim - 2)
}

/// Whether a node lying in `faces` coarse faces and `aggs` agglomerates is
/// a coarse node.
pub fn is_coarse_node(faces: usize, aggs: usize, dim: usize) -> bool {
    faces > face_factor(dim) * aggs
}

/// Coarse nodes by the face-count rule, as sorted level-node indices.
pub fn select_coarse_nodes(level: &LevelTopology, agg: &Agglomeration, faces: &[CoarseFace]) -> Vec<usize> {
    let face_count = faces_per_node(level.num_nodes(), faces);
    (0..level.num_nodes())
        .filter(|&n| is_coarse_node(face_count[n], aggs_at_node(level, agg, n), level.dim()))
        .collect()
}

pub(crate) fn faces_per_node(num_nodes: usize, faces: &[CoarseFace]) -> Vec<usize> {
    let mut count = vec![0; num_nodes];
    for face in faces {
        for &n in &face.nodes {
            count[n] += 1;
        }
    }
    count
}

pub(crate) fn aggs_at_node(level: &LevelTopology, agg: &Agglomeration, n: usize) -> usize {
    let mut aggs: Vec<usize> = level.node_elements[n].iter().map(|&e| agg.agg_of(e)).collect();
    aggs.sort_unstable();
    aggs.dedup();
    aggs.len()
}

/// Agglomerates none of whose elements contain a coarse node.
pub fn agglomerates_without_nodes(level: &LevelTopology, agg: &Agglomeration, coarse: &[usize]) -> Vec<usize> {
    let mut has = vec![false; agg.num_agglomerates()];
    for &n in coarse {
        for &e in &level.node_elements[n] {
            has[agg.agg_of(e)] = true;
        }
    }
    (0..has.len()).filter(|&a| !has[a]).collect()
}

/// Faces of the coarse level, one per primary coarse face, in the order of
/// `faces` restricted to primary copies.
pub(crate) fn coarse_level_faces(level: &LevelTopology, faces: &[CoarseFace]) -> Vec<LevelFace> {
    faces
        .iter()
        .filter(|f| f.is_primary())
        .map(|f| {
            let mut fine_faces: Vec<usize> =
                f.faces.iter().flat_map(|&i| level.faces[i].fine_faces.iter().copied()).collect();
            fine_faces.sort_unstable();
            let (right, tag) = match f.opposite {
                Opposite::Agglomerate(b) => (Some(b), None),
                Opposite::Boundary(t) => (None, t),
            };
            LevelFace {
                left: f.owner,
                right,
                tag,
                area: f.faces.iter().map(|&i| level.faces[i].area).sum(),
                fine_faces,
                nodes: Vec::new(),
            }
        })
        .collect()
}
