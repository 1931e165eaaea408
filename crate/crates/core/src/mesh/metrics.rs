use serde::{Deserialize, Serialize};

use super::{LevelTopology, Mesh, MeshTopology};
use crate::error::{Error, Result};

/// Connectivity statistics of one mesh level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshMetrics {
    pub node_element_ratio: f64,
    /// Mean number of elements containing each node.
    pub average_connectivity: f64,
    pub num_nodes: usize,
    pub num_elements: usize,
    pub num_faces: usize,
}

impl MeshMetrics {
    /// Metrics from element-to-node incidence; works for any element shape.
    pub fn from_incidence<'a>(
        num_nodes: usize,
        num_faces: usize,
        elements: impl ExactSizeIterator<Item = &'a [usize]>,
    ) -> Result<Self> {
        let num_elements = elements.len();
        if num_elements == 0 || num_nodes == 0 {
            return Err(Error::EmptyMesh);
        }
        let incidences: usize = elements.map(|e| e.len()).sum();
        Ok(MeshMetrics {
            node_element_ratio: num_nodes as f64 / num_elements as f64,
            average_connectivity: incidences as f64 / num_nodes as f64,
            num_nodes,
            num_elements,
            num_faces,
        })
    }
}

pub fn mesh_metrics(mesh: &Mesh, topology: &MeshTopology) -> Result<MeshMetrics> {
    MeshMetrics::from_incidence(mesh.num_nodes(), topology.faces.len(), mesh.elements())
}

/// Metrics of a (possibly agglomerated) level: nodes are the level's nodes,
/// elements its agglomerates.
pub fn level_metrics(level: &LevelTopology) -> Result<MeshMetrics> {
    MeshMetrics::from_incidence(
        level.num_nodes(),
        level.faces.len(),
        level.element_nodes.iter().map(|v| v.as_slice()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_topology, generate_mesh, MeshSpec};
    use std::collections::BTreeMap;

    #[test]
    fn periodic_quad_grid_connectivity_is_four() {
        let n = 8;
        let id = |i: usize, j: usize| (j % n) * n + (i % n);
        let quads: Vec<Vec<usize>> = (0..n)
            .flat_map(|j| (0..n).map(move |i| vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]))
            .collect();
        let m = MeshMetrics::from_incidence(n * n, 2 * n * n, quads.iter().map(|q| q.as_slice())).unwrap();
        assert_eq!(m.average_connectivity, 4.0);
        assert_eq!(m.node_element_ratio, 1.0);
    }

    #[test]
    fn single_triangle_metrics() {
        let c = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let mesh = Mesh::new(2, c, vec![0, 1, 2], vec![0], BTreeMap::new()).unwrap();
        let t = build_topology(&mesh).unwrap();
        let m = mesh_metrics(&mesh, &t).unwrap();
        assert_eq!(m.node_element_ratio, 3.0);
        assert_eq!(m.average_connectivity, 1.0);
    }

    #[test]
    fn generated_2d_mesh_in_unstructured_range() {
        // Boundary nodes push a 16x16 grid to ratio 289/512; the band holds from 24 up.
        for n in [24, 32, 64] {
            let mesh = generate_mesh(&MeshSpec::reference(2, n).with_jitter(0.25)).unwrap();
            let t = build_topology(&mesh).unwrap();
            let m = mesh_metrics(&mesh, &t).unwrap();
            assert!((5.5..=6.5).contains(&m.average_connectivity), "{m:?}");
            assert!((0.45..=0.55).contains(&m.node_element_ratio), "{m:?}");
        }
    }

    #[test]
    fn empty_mesh_is_error() {
        let r = MeshMetrics::from_incidence(0, 0, std::iter::empty::<&[usize]>());
        assert!(matches!(r, Err(Error::EmptyMesh)));
    }
}
