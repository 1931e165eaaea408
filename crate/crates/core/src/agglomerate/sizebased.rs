//! Partitioner-driven agglomeration with a target size.

use super::Assignment;
use crate::error::{Error, Result};
use crate::mesh::LevelTopology;
use crate::partitioner::{partition_kway, scale_weights};

/// Number of agglomerates requested for `n` elements at size `s`.
pub fn sizebased_parts(n: usize, s: usize) -> Result<usize> {
    if s < 2 {
        return Err(Error::Config(format!("sizebased needs a desired size of at least 2, got {s}")));
    }
    match n / s {
        0 => Err(Error::Config(format!("desired size {s} exceeds the {n} elements on this level; use a smaller size"))),
        k => Ok(k),
    }
}

/// Splits the weighted dual graph into `floor(n / s)` contiguous parts.
pub fn sizebased_coarsen(level: &LevelTopology, s: usize, seed: u64) -> Result<Assignment> {
    let k = sizebased_parts(level.num_elements(), s)?;
    let graph = scale_weights(&level.dual);
    let partition = partition_kway(&graph, k, true, seed)?;
    Ok(partition.parts.into_iter().map(Some).collect())
}
