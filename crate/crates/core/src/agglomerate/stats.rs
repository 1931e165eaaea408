use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::aspect::surfaces_and_volumes;
use super::Agglomeration;
use crate::mesh::LevelTopology;

/// Summary statistics of a total agglomeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgglomerateStats {
    pub num_elements: usize,
    pub num_agglomerates: usize,
    pub average_size: f64,
    pub min_size: usize,
    pub max_size: usize,
    /// Agglomerate size → number of agglomerates of that size.
    pub size_histogram: BTreeMap<usize, usize>,
    /// Mean of external surface squared over volume.
    pub mean_surface_ratio: f64,
    /// Dual-graph edges whose endpoints lie in different agglomerates.
    pub edge_cut: usize,
}

pub fn agglomerate_stats(level: &LevelTopology, agg: &Agglomeration) -> AgglomerateStats {
    let labels = agg.element_to_agg();
    let sizes = agg.sizes();
    let mut size_histogram = BTreeMap::new();
    for &s in &sizes {
        *size_histogram.entry(s).or_insert(0) += 1;
    }
    let (area, volume) = surfaces_and_volumes(level, labels);
    let k = agg.num_agglomerates().max(1);
    let mean_surface_ratio = area.iter().zip(&volume).map(|(a, v)| a * a / v).sum::<f64>() / k as f64;
    let edge_cut = (0..labels.len())
        .map(|e| level.dual.neighbors(e).iter().filter(|&&u| u > e && labels[u] != labels[e]).count())
        .sum();
    AgglomerateStats {
        num_elements: agg.num_elements(),
        num_agglomerates: agg.num_agglomerates(),
        average_size: agg.average_size(),
        min_size: sizes.iter().copied().min().unwrap_or(0),
        max_size: sizes.iter().copied().max().unwrap_or(0),
        size_histogram,
        mean_surface_ratio,
        edge_cut,
    }
}
