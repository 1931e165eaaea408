//! Multigrid hierarchies built by repeated agglomeration.
//!
//! Each coarsening step agglomerates the current level, selects coarse
//! faces and coarse nodes, builds the prolongation and assembles the next
//! [`LevelTopology`] from the agglomerates, so every algorithm applies on
//! every level.

mod coarse;
mod edges;
mod transfer;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::agglomerate::{coarsen, cleanup, Agglomeration, Algorithm, CleanupReport, CoarsenConfig};
use crate::error::{Error, Result};
use crate::mesh::{FineGrid, LevelTopology, Material};
use crate::mesh::NOT_A_NODE;
use crate::scalar::{Real, Scalar};
use crate::sparse::SparseMatrix;

pub use coarse::{
    agglomerates_without_nodes, face_factor, is_coarse_node, select_coarse_faces, select_coarse_nodes, CoarseFace,
    Opposite,
};
pub use edges::{chain_endpoints, select_coarse_edges};
pub use transfer::{build_prolongation, galerkin_operator, project_materials, restriction, RowKind, MAX_RINGS};

/// Desired agglomerate size per level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSchedule {
    /// Size on the finest level.
    pub top: usize,
    /// Size on lower levels.
    pub lower: usize,
    /// Size on lower levels with fewer than `small_below` elements.
    pub small: usize,
    pub small_below: usize,
}

impl LevelSchedule {
    /// 2D: 24 then 4. 3D: 168 then 8, dropping to 4 below 100 elements.
    pub fn for_dim(dim: usize) -> Self {
        if dim == 3 {
            LevelSchedule { top: 168, lower: 8, small: 4, small_below: 100 }
        } else {
            LevelSchedule { top: 24, lower: 4, small: 4, small_below: 100 }
        }
    }

    pub fn size_for(&self, level: usize, num_elements: usize) -> usize {
        match level {
            0 => self.top,
            _ if num_elements < self.small_below => self.small,
            _ => self.lower,
        }
    }
}

/// When to stop adding levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    /// Stop once a level has at most this many nodes.
    pub min_nodes: usize,
    /// Stop after a level that removes less than this fraction of the nodes.
    pub min_reduction: f64,
    pub max_levels: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { min_nodes: 60, min_reduction: 0.10, max_levels: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchyConfig {
    pub algorithm: Algorithm,
    pub schedule: LevelSchedule,
    pub stop: StopRule,
    pub seed: u64,
}

impl HierarchyConfig {
    pub fn new(algorithm: Algorithm, dim: usize, seed: u64) -> Self {
        HierarchyConfig { algorithm, schedule: LevelSchedule::for_dim(dim), stop: StopRule::default(), seed }
    }
}

/// How one level was coarsened into the next.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub desired_size: usize,
    pub agglomeration: Agglomeration,
    pub cleanup: CleanupReport,
    /// Agglomerates merged into a neighbour because they had no coarse node.
    pub merged_without_nodes: usize,
    pub coarse_faces: Vec<CoarseFace>,
    /// Level-node indices of the coarse nodes; column order of `prolongation`.
    pub coarse_nodes: Vec<usize>,
    /// Rows: this level's nodes. Columns: the next level's nodes.
    pub prolongation: SparseMatrix<f64>,
    pub row_kinds: Vec<RowKind>,
}

#[derive(Debug, Clone)]
pub struct GridLevel {
    pub topology: LevelTopology,
    pub materials: Vec<Material>,
    /// Coarsening to the next level; `None` on the coarsest level.
    pub transfer: Option<Transfer>,
}

#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub levels: Vec<GridLevel>,
    pub config: HierarchyConfig,
}

impl Hierarchy {
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn node_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.topology.num_nodes()).collect()
    }

    pub fn element_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.topology.num_elements()).collect()
    }

    pub fn prolongations(&self) -> impl Iterator<Item = &SparseMatrix<f64>> {
        self.levels.iter().filter_map(|l| l.transfer.as_ref().map(|t| &t.prolongation))
    }

    pub fn grid_complexity(&self) -> f64 {
        grid_complexity(&self.node_counts())
    }

    /// Agglomerate id of every fine element on each coarse level, composed
    /// through the hierarchy.
    pub fn fine_agglomerates(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for level in &self.levels {
            if let Some(t) = &level.transfer {
                let map = level.topology.fine_to_element.iter().map(|&e| t.agglomeration.agg_of(e)).collect();
                out.push(map);
            }
        }
        out
    }
}

/// Sum of node counts over levels divided by the finest count.
pub fn grid_complexity(node_counts: &[usize]) -> f64 {
    match node_counts.first() {
        Some(&n0) if n0 > 0 => node_counts.iter().sum::<usize>() as f64 / n0 as f64,
        _ => 1.0,
    }
}

/// Sum of operator nonzeros over levels divided by the finest count.
pub fn operator_complexity<T: Scalar>(operators: &[SparseMatrix<T>]) -> f64 {
    match operators.first() {
        Some(a) if a.nnz() > 0 => operators.iter().map(SparseMatrix::nnz).sum::<usize>() as f64 / a.nnz() as f64,
        _ => 1.0,
    }
}

/// Galerkin operators on every level, starting from the fine operator.
pub fn galerkin_hierarchy<T: Real>(
    hierarchy: &Hierarchy,
    fine: SparseMatrix<T>,
) -> Result<Vec<SparseMatrix<T>>> {
    let mut ops = vec![fine];
    for p in hierarchy.prolongations() {
        let a = ops.last().expect("fine operator present");
        ops.push(galerkin_operator(a, &p.cast::<T>())?);
    }
    Ok(ops)
}

/// One coarsening step: agglomeration, coarse topology, prolongation and the
/// next level.
pub fn coarsen_level(
    level: &LevelTopology,
    config: &CoarsenConfig,
) -> Result<(Transfer, LevelTopology)> {
    let (mut agg, report) = coarsen(level, config)?;
    let kraus_edges = config.algorithm == Algorithm::Kraus && level.edges.is_some();
    let mut merged_without_nodes = 0;
    loop {
        let faces = select_coarse_faces(level, &agg);
        let (coarse_nodes, next_edges) = if kraus_edges {
            let edges = select_coarse_edges(level, &faces);
            (kraus_coarse_nodes(level, &agg, &faces, &edges), Some(edges))
        } else {
            (select_coarse_nodes(level, &agg, &faces), None)
        };
        let missing = agglomerates_without_nodes(level, &agg, &coarse_nodes);
        if missing.is_empty() {
            let (prolongation, row_kinds) = build_prolongation(level, &agg, &faces, &coarse_nodes)?;
            let element_fine = agg
                .agglomerates()
                .iter()
                .map(|members| {
                    let mut v: Vec<usize> = members.iter().flat_map(|&e| level.element_fine[e].iter().copied()).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            let next_faces = coarse::coarse_level_faces(level, &faces);
            let nodes = coarse_nodes.iter().map(|&n| level.nodes[n]).collect();
            let next = LevelTopology::assemble(level.level + 1, Arc::clone(&level.fine), element_fine, next_faces, nodes, next_edges);
            let transfer = Transfer {
                desired_size: config.desired_size,
                agglomeration: agg,
                cleanup: report,
                merged_without_nodes,
                coarse_faces: faces,
                coarse_nodes,
                prolongation,
                row_kinds,
            };
            return Ok((transfer, next));
        }
        agg = merge_into_neighbours(level, &agg, &missing)?;
        merged_without_nodes += missing.len();
    }
}

/// Coarse nodes at the ends of coarse edges; agglomerates left without one
/// fall back to the face-count rule.
fn kraus_coarse_nodes(
    level: &LevelTopology,
    agg: &Agglomeration,
    faces: &[CoarseFace],
    edges: &[crate::mesh::LevelEdge],
) -> Vec<usize> {
    let map = level.node_map();
    let mut nodes: Vec<usize> =
        chain_endpoints(level, edges).into_iter().map(|n| map[n]).filter(|&n| n != NOT_A_NODE).collect();
    let missing = agglomerates_without_nodes(level, agg, &nodes);
    if !missing.is_empty() {
        let rule = select_coarse_nodes(level, agg, faces);
        nodes.extend(rule.into_iter().filter(|&n| {
            level.node_elements[n].iter().any(|&e| missing.binary_search(&agg.agg_of(e)).is_ok())
        }));
        nodes.sort_unstable();
        nodes.dedup();
    }
    nodes
}

/// Merges each listed agglomerate into the neighbour sharing most faces
/// with it (ties: smaller, then lower id), then cleans up.
fn merge_into_neighbours(level: &LevelTopology, agg: &Agglomeration, victims: &[usize]) -> Result<Agglomeration> {
    let sizes = agg.sizes();
    let mut labels = agg.element_to_agg().to_vec();
    let mut is_victim = vec![false; agg.num_agglomerates()];
    for &a in victims {
        is_victim[a] = true;
    }
    for &a in victims {
        let mut links: Vec<(usize, usize)> = Vec::new();
        for &e in agg.members(a) {
            for &f in &level.element_faces[e] {
                let face = &level.faces[f];
                let Some(r) = face.right else { continue };
                let other = labels[if face.left == e { r } else { face.left }];
                if other == a {
                    continue;
                }
                match links.iter_mut().find(|l| l.0 == other) {
                    Some(l) => l.1 += 1,
                    None => links.push((other, 1)),
                }
            }
        }
        let best = links
            .iter()
            .max_by(|x, y| x.1.cmp(&y.1).then(sizes[y.0].cmp(&sizes[x.0])).then(y.0.cmp(&x.0)))
            .map(|l| l.0);
        let Some(b) = best else {
            return Err(Error::NoCoarseNodes { level: level.level, agglomerate: a });
        };
        for &e in agg.members(a) {
            labels[e] = b;
        }
    }
    let raw: Vec<Option<usize>> = labels.into_iter().map(Some).collect();
    Ok(cleanup(level, &raw).0)
}

/// Builds the hierarchy for `fine` with per-element `materials`.
pub fn build_hierarchy(fine: Arc<FineGrid>, materials: Vec<Material>, config: &HierarchyConfig) -> Result<Hierarchy> {
    if materials.len() != fine.mesh.num_elements() {
        return Err(Error::DimensionMismatch(format!(
            "{} materials for {} elements",
            materials.len(),
            fine.mesh.num_elements()
        )));
    }
    let stop = config.stop;
    if stop.max_levels == 0 {
        return Err(Error::Config("max_levels must be at least 1".into()));
    }
    let mut levels = vec![GridLevel { topology: LevelTopology::finest(fine), materials, transfer: None }];
    while levels.len() < stop.max_levels {
        let current = levels.last().expect("finest level present");
        let topo = &current.topology;
        let n_el = topo.num_elements();
        if topo.num_nodes() <= stop.min_nodes || n_el < 2 {
            break;
        }
        let s = config.schedule.size_for(topo.level, n_el);
        if config.algorithm.uses_size() && n_el < s {
            break;
        }
        let cc = CoarsenConfig::new(config.algorithm, s, config.seed.wrapping_add(topo.level as u64));
        let (transfer, next) = coarsen_level(topo, &cc)?;
        if next.num_nodes() >= topo.num_nodes() {
            break;
        }
        let stagnated = next.num_nodes() as f64 > (1.0 - stop.min_reduction) * topo.num_nodes() as f64;
        let materials = project_materials(topo, &current.materials, &transfer.agglomeration);
        levels.last_mut().expect("level present").transfer = Some(transfer);
        levels.push(GridLevel { topology: next, materials, transfer: None });
        if stagnated {
            log::debug!("level {} removed under {:.0}% of the nodes; stopping", levels.len() - 1, 100.0 * stop.min_reduction);
            break;
        }
    }
    Ok(Hierarchy { levels, config: *config })
}
