//! Element agglomeration: seven coarsening algorithms, cleanup and statistics.
//!
//! Every algorithm works on a [`LevelTopology`], so it applies to the fine
//! mesh and to any coarse level alike. Algorithms return a possibly partial
//! [`Assignment`]; [`cleanup`] turns it into a total, contiguous
//! [`Agglomeration`].

mod aspect;
mod cleanup;
mod greedy;
mod jones;
mod kraus;
mod node;
mod rgb;
mod sizebased;
mod stats;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::LevelTopology;

pub use aspect::{aspect_objective, aspect_ratio_coarsen, refine_aspect, size_band};
pub use cleanup::{cleanup, CleanupReport};
pub use greedy::greedy_coarsen;
pub use jones::{jones_coarsen, jones_with_state};
pub use kraus::{kraus_coarsen, kraus_with_state};
pub use node::node_coarsen;
pub use rgb::rgb_coarsen;
pub use sizebased::{sizebased_coarsen, sizebased_parts};
pub use stats::{agglomerate_stats, AgglomerateStats};

/// Element → agglomerate map as produced by an algorithm, before cleanup.
pub type Assignment = Vec<Option<usize>>;

/// The seven coarsening algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Jones,
    Kraus,
    Rgb,
    Node,
    Greedy,
    SizeBased,
    Aspect,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Jones,
        Algorithm::Kraus,
        Algorithm::Rgb,
        Algorithm::Node,
        Algorithm::Greedy,
        Algorithm::SizeBased,
        Algorithm::Aspect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Jones => "jones",
            Algorithm::Kraus => "kraus",
            Algorithm::Rgb => "rgb",
            Algorithm::Node => "node",
            Algorithm::Greedy => "greedy",
            Algorithm::SizeBased => "sizebased",
            Algorithm::Aspect => "aspect",
        }
    }

    /// Whether the algorithm takes a desired agglomerate size.
    pub fn uses_size(self) -> bool {
        matches!(self, Algorithm::Greedy | Algorithm::SizeBased | Algorithm::Aspect)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let alias = match lower.as_str() {
            "metis" | "size-based" | "size_based" => "sizebased",
            "mgridgen" | "aspect-ratio" | "aspect_ratio" => "aspect",
            other => other,
        };
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == alias)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

/// Parameters of one coarsening step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarsenConfig {
    pub algorithm: Algorithm,
    /// Desired agglomerate size; ignored by jones, kraus, rgb and node.
    pub desired_size: usize,
    pub seed: u64,
}

impl CoarsenConfig {
    pub fn new(algorithm: Algorithm, desired_size: usize, seed: u64) -> Self {
        CoarsenConfig { algorithm, desired_size, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithm.uses_size() && self.desired_size < 2 {
            return Err(Error::Config(format!(
                "{} needs a desired agglomerate size of at least 2, got {}",
                self.algorithm, self.desired_size
            )));
        }
        Ok(())
    }
}

/// Per-face and per-edge weights of the face/edge based algorithms; −1 marks
/// a consumed entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightState {
    pub faces: Vec<i64>,
    pub edges: Vec<i64>,
}

/// Total element → agglomerate map with dense ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agglomeration {
    level: usize,
    element_to_agg: Vec<usize>,
    agg_to_elements: Vec<Vec<usize>>,
}

impl Agglomeration {
    /// Wraps a total map; ids must be dense in `[0, max + 1)`.
    pub fn from_assignment(level: usize, element_to_agg: Vec<usize>) -> Result<Self> {
        let n_agg = element_to_agg.iter().copied().max().map_or(0, |m| m + 1);
        let mut agg_to_elements = vec![Vec::new(); n_agg];
        for (e, &a) in element_to_agg.iter().enumerate() {
            agg_to_elements[a].push(e);
        }
        if let Some(a) = agg_to_elements.iter().position(|v| v.is_empty()) {
            return Err(Error::InvalidMesh(format!("agglomerate id {a} is unused; ids must be dense")));
        }
        Ok(Agglomeration { level, element_to_agg, agg_to_elements })
    }

    /// Converts a partial assignment, failing if any element is unassigned.
    pub fn from_partial(level: usize, assignment: &[Option<usize>]) -> Result<Self> {
        let missing = assignment.iter().filter(|a| a.is_none()).count();
        if missing > 0 {
            return Err(Error::Unassigned { level, count: missing });
        }
        Self::from_assignment(level, assignment.iter().map(|a| a.unwrap()).collect())
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn num_elements(&self) -> usize {
        self.element_to_agg.len()
    }

    pub fn num_agglomerates(&self) -> usize {
        self.agg_to_elements.len()
    }

    pub fn element_to_agg(&self) -> &[usize] {
        &self.element_to_agg
    }

    pub fn agg_of(&self, element: usize) -> usize {
        self.element_to_agg[element]
    }

    pub fn members(&self, agg: usize) -> &[usize] {
        &self.agg_to_elements[agg]
    }

    pub fn agglomerates(&self) -> &[Vec<usize>] {
        &self.agg_to_elements
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.agg_to_elements.iter().map(Vec::len).collect()
    }

    pub fn average_size(&self) -> f64 {
        self.num_elements() as f64 / self.num_agglomerates().max(1) as f64
    }

    /// True when every agglomerate is connected through shared faces.
    pub fn is_contiguous(&self, level: &LevelTopology) -> bool {
        let mut seen = vec![false; self.num_elements()];
        let mut stack = Vec::new();
        for members in &self.agg_to_elements {
            let a = self.element_to_agg[members[0]];
            seen[members[0]] = true;
            stack.push(members[0]);
            let mut reached = 0;
            while let Some(e) = stack.pop() {
                reached += 1;
                for &u in level.dual.neighbors(e) {
                    if !seen[u] && self.element_to_agg[u] == a {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            if reached != members.len() {
                return false;
            }
        }
        true
    }
}

/// Runs the configured algorithm without cleanup.
pub fn coarsen_raw(level: &LevelTopology, config: &CoarsenConfig) -> Result<Assignment> {
    config.validate()?;
    let s = config.desired_size;
    Ok(match config.algorithm {
        Algorithm::Jones => jones_coarsen(level),
        Algorithm::Kraus => kraus_coarsen(level),
        Algorithm::Rgb => rgb_coarsen(level, config.seed),
        Algorithm::Node => node_coarsen(level, config.seed),
        Algorithm::Greedy => greedy_coarsen(level, s, config.seed)?,
        Algorithm::SizeBased => sizebased_coarsen(level, s, config.seed)?,
        Algorithm::Aspect => aspect_ratio_coarsen(level, s, config.seed)?,
    })
}

/// Runs the configured algorithm followed by cleanup.
pub fn coarsen(level: &LevelTopology, config: &CoarsenConfig) -> Result<(Agglomeration, CleanupReport)> {
    let raw = coarsen_raw(level, config)?;
    Ok(cleanup(level, &raw))
}

/// Number of assigned agglomerate ids in a raw assignment.
pub fn count_agglomerates(assignment: &[Option<usize>]) -> usize {
    let mut ids: Vec<usize> = assignment.iter().flatten().copied().collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}

#[cfg(test)]
pub(crate) mod testing {
    use crate::mesh::{generate_mesh, FineGrid, LevelTopology, MeshSpec};

    pub fn level(spec: &MeshSpec) -> LevelTopology {
        LevelTopology::finest(FineGrid::new(generate_mesh(spec).unwrap()).unwrap())
    }

    pub fn square(n: usize) -> LevelTopology {
        level(&MeshSpec::unit_square(n))
    }

    pub fn two_triangles() -> LevelTopology {
        use crate::mesh::Mesh;
        use std::collections::BTreeMap;
        let c = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
        let m = Mesh::new(2, c, vec![0, 1, 2, 0, 2, 3], vec![1, 1], BTreeMap::new()).unwrap();
        LevelTopology::finest(FineGrid::new(m).unwrap())
    }

    pub fn single_tet() -> LevelTopology {
        use crate::mesh::Mesh;
        use std::collections::BTreeMap;
        let c = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let m = Mesh::new(3, c, vec![0, 1, 2, 3], vec![1], BTreeMap::new()).unwrap();
        LevelTopology::finest(FineGrid::new(m).unwrap())
    }
}
