//! Prolongation, restriction, material projection and Galerkin products.

use std::collections::BTreeSet;

use super::coarse::CoarseFace;
use crate::agglomerate::Agglomeration;
use crate::error::{Error, Result};
use crate::mesh::{LevelTopology, Material};
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

/// Element rings searched around an interior node before falling back to
/// all coarse nodes of its agglomerate.
pub const MAX_RINGS: usize = 20;

/// Which rule produced a prolongation row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Injection,
    Face,
    /// Interior node resolved after this many ring expansions.
    Interior(usize),
    Fallback,
}

/// Coarse-to-level prolongation: rows are level nodes, columns coarse nodes
/// (`coarse` holds their level-node indices in column order, ascending).
///
/// Coarse nodes inject. A node on coarse faces averages the coarse nodes on
/// all of them. Any other node averages the coarse nodes sharing an element
/// with it, widening the search one element ring at a time inside its
/// agglomerate(s), and after [`MAX_RINGS`] rings takes every coarse node of
/// the agglomerate. Averages are equal-weight.
pub fn build_prolongation(
    level: &LevelTopology,
    agg: &Agglomeration,
    faces: &[CoarseFace],
    coarse: &[usize],
) -> Result<(SparseMatrix<f64>, Vec<RowKind>)> {
    let nn = level.num_nodes();
    let mut column = vec![usize::MAX; nn];
    for (j, &n) in coarse.iter().enumerate() {
        column[n] = j;
    }
    let mut node_faces: Vec<Vec<usize>> = vec![Vec::new(); nn];
    for (i, f) in faces.iter().enumerate() {
        for &n in &f.nodes {
            node_faces[n].push(i);
        }
    }
    let face_coarse: Vec<Vec<usize>> =
        faces.iter().map(|f| f.nodes.iter().copied().filter(|&n| column[n] != usize::MAX).collect()).collect();

    let mut triplets = Vec::new();
    let mut kinds = Vec::with_capacity(nn);
    let mut support: BTreeSet<usize> = BTreeSet::new();
    for n in 0..nn {
        if column[n] != usize::MAX {
            triplets.push((n, column[n], 1.0));
            kinds.push(RowKind::Injection);
            continue;
        }
        support.clear();
        for &f in &node_faces[n] {
            support.extend(face_coarse[f].iter().copied());
        }
        let kind = if !support.is_empty() {
            RowKind::Face
        } else {
            interior_support(level, agg, n, &column, &mut support)
        };
        if support.is_empty() {
            return Err(Error::NoCoarseNodes { level: level.level, agglomerate: agg.agg_of(level.node_elements[n][0]) });
        }
        let w = 1.0 / support.len() as f64;
        triplets.extend(support.iter().map(|&c| (n, column[c], w)));
        kinds.push(kind);
    }
    Ok((SparseMatrix::from_triplets(nn, coarse.len(), triplets), kinds))
}

fn interior_support(
    level: &LevelTopology,
    agg: &Agglomeration,
    n: usize,
    column: &[usize],
    support: &mut BTreeSet<usize>,
) -> RowKind {
    let mut allowed: Vec<usize> = level.node_elements[n].iter().map(|&e| agg.agg_of(e)).collect();
    allowed.sort_unstable();
    allowed.dedup();
    let mut elements: BTreeSet<usize> = level.node_elements[n].iter().copied().collect();
    let mut nodes: BTreeSet<usize> = BTreeSet::from([n]);
    for ring in 0..=MAX_RINGS {
        for &e in &elements {
            support.extend(level.element_nodes[e].iter().copied().filter(|&m| column[m] != usize::MAX));
        }
        if !support.is_empty() {
            return RowKind::Interior(ring);
        }
        if ring == MAX_RINGS {
            break;
        }
        let fresh: Vec<usize> = elements
            .iter()
            .flat_map(|&e| level.element_nodes[e].iter().copied())
            .filter(|m| !nodes.contains(m))
            .collect();
        if fresh.is_empty() {
            break;
        }
        for m in fresh {
            nodes.insert(m);
            elements.extend(level.node_elements[m].iter().copied().filter(|&e| allowed.binary_search(&agg.agg_of(e)).is_ok()));
        }
    }
    for &a in &allowed {
        for &e in agg.members(a) {
            support.extend(level.element_nodes[e].iter().copied().filter(|&m| column[m] != usize::MAX));
        }
    }
    RowKind::Fallback
}

/// Restriction: the entrywise transpose of the prolongation.
pub fn restriction<T: Scalar>(p: &SparseMatrix<T>) -> SparseMatrix<T> {
    p.transpose()
}

/// Volume-weighted average of source and cross sections per agglomerate.
pub fn project_materials(level: &LevelTopology, materials: &[Material], agg: &Agglomeration) -> Vec<Material> {
    agg.agglomerates()
        .iter()
        .map(|members| {
            let mut v = 0.0;
            let mut sum = [0.0; 3];
            for &e in members {
                let w = level.element_volumes[e];
                let m = &materials[e];
                v += w;
                sum[0] += w * m.source;
                sum[1] += w * m.sigma_t;
                sum[2] += w * m.sigma_s;
            }
            Material { source: sum[0] / v, sigma_t: sum[1] / v, sigma_s: sum[2] / v }
        })
        .collect()
}

/// Coarse operator `Pᵀ A P`.
pub fn galerkin_operator<T: Scalar>(a: &SparseMatrix<T>, p: &SparseMatrix<T>) -> Result<SparseMatrix<T>> {
    SparseMatrix::galerkin(a, p)
}
