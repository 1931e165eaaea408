//! A mesh level seen as elements, faces, nodes and (optionally) edges.
//!
//! The finest level is the simplicial mesh itself. Coarser levels are built
//! from agglomerates, with every entity remembering the fine-mesh faces, edges
//! and elements it is made of. Adjacency on any level is therefore decided on
//! the fine mesh: two level faces are neighbours when they share a fine node
//! (2D) or a fine edge (3D), two level edges when they share a fine node.

use std::sync::Arc;

use super::{build_topology, DualGraph, Mesh, MeshTopology};
use crate::error::Result;

/// The fine mesh together with its derived topology, shared by all levels.
#[derive(Debug)]
pub struct FineGrid {
    pub mesh: Mesh,
    pub topology: MeshTopology,
}

impl FineGrid {
    pub fn new(mesh: Mesh) -> Result<Arc<Self>> {
        let topology = build_topology(&mesh)?;
        Ok(Arc::new(FineGrid { mesh, topology }))
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelFace {
    pub left: usize,
    pub right: Option<usize>,
    pub tag: Option<i32>,
    pub area: f64,
    /// Fine-mesh faces making up this face.
    pub fine_faces: Vec<usize>,
    /// Level nodes lying on the face, sorted.
    pub nodes: Vec<usize>,
}

impl LevelFace {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }

    pub fn touches(&self, element: usize) -> bool {
        self.left == element || self.right == Some(element)
    }

    pub fn shares_element(&self, other: &LevelFace) -> bool {
        other.touches(self.left) || self.right.is_some_and(|r| other.touches(r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelEdge {
    /// Level nodes on the edge, sorted.
    pub nodes: Vec<usize>,
    pub fine_edges: Vec<usize>,
    /// Level faces containing the edge, sorted.
    pub faces: Vec<usize>,
    /// Level elements containing the edge, sorted.
    pub elements: Vec<usize>,
}

/// Topology of one multigrid level.
#[derive(Debug, Clone)]
pub struct LevelTopology {
    pub level: usize,
    pub fine: Arc<FineGrid>,
    pub element_volumes: Vec<f64>,
    /// Fine elements of each level element, sorted.
    pub element_fine: Vec<Vec<usize>>,
    pub fine_to_element: Vec<usize>,
    /// Level nodes contained in each element, sorted.
    pub element_nodes: Vec<Vec<usize>>,
    pub element_faces: Vec<Vec<usize>>,
    pub faces: Vec<LevelFace>,
    /// Fine-mesh node index of each level node, ascending.
    pub nodes: Vec<usize>,
    pub node_elements: Vec<Vec<usize>>,
    pub node_on_boundary: Vec<bool>,
    pub edges: Option<Vec<LevelEdge>>,
    pub dual: DualGraph,
}

/// Sentinel for "fine node is not a node of this level".
pub(crate) const NOT_A_NODE: usize = usize::MAX;

impl LevelTopology {
    /// The fine mesh as level 0.
    pub fn finest(fine: Arc<FineGrid>) -> Self {
        let topo = &fine.topology;
        let faces = topo
            .faces
            .faces
            .iter()
            .enumerate()
            .map(|(i, f)| LevelFace {
                left: f.left,
                right: f.right,
                tag: f.tag,
                area: f.area,
                fine_faces: vec![i],
                nodes: Vec::new(),
            })
            .collect();
        let edges = topo.edges.as_ref().map(|es| {
            es.edges
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let mut elements = e.elements.clone();
                    elements.sort_unstable();
                    LevelEdge { nodes: Vec::new(), fine_edges: vec![i], faces: e.faces.clone(), elements }
                })
                .collect()
        });
        let element_fine = (0..fine.mesh.num_elements()).map(|e| vec![e]).collect();
        let nodes = (0..fine.mesh.num_nodes()).collect();
        Self::assemble(0, fine, element_fine, faces, nodes, edges)
    }

    /// Builds a level from its elements (as fine-element sets), faces, node
    /// set and optional edges; derived incidence is filled in here.
    pub fn assemble(
        level: usize,
        fine: Arc<FineGrid>,
        element_fine: Vec<Vec<usize>>,
        mut faces: Vec<LevelFace>,
        nodes: Vec<usize>,
        mut edges: Option<Vec<LevelEdge>>,
    ) -> Self {
        let mesh = &fine.mesh;
        let topo = &fine.topology;
        let ne = element_fine.len();

        let mut fine_to_element = vec![usize::MAX; mesh.num_elements()];
        let mut element_volumes = vec![0.0; ne];
        for (e, members) in element_fine.iter().enumerate() {
            for &f in members {
                fine_to_element[f] = e;
                element_volumes[e] += topo.volumes[f];
            }
        }

        let mut node_map = vec![NOT_A_NODE; mesh.num_nodes()];
        for (i, &n) in nodes.iter().enumerate() {
            node_map[n] = i;
        }

        let mut element_nodes: Vec<Vec<usize>> = element_fine
            .iter()
            .map(|members| {
                let mut v: Vec<usize> = members
                    .iter()
                    .flat_map(|&f| mesh.element(f).iter().map(|&n| node_map[n]))
                    .filter(|&n| n != NOT_A_NODE)
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        element_nodes.shrink_to_fit();

        let mut node_elements = vec![Vec::new(); nodes.len()];
        for (e, ns) in element_nodes.iter().enumerate() {
            for &n in ns {
                node_elements[n].push(e);
            }
        }

        for face in faces.iter_mut() {
            let mut v: Vec<usize> = face
                .fine_faces
                .iter()
                .flat_map(|&f| topo.faces.faces[f].nodes().iter().map(|&n| node_map[n]))
                .filter(|&n| n != NOT_A_NODE)
                .collect();
            v.sort_unstable();
            v.dedup();
            face.nodes = v;
        }

        if let (Some(edges), Some(es)) = (edges.as_mut(), topo.edges.as_ref()) {
            for edge in edges.iter_mut() {
                let mut v: Vec<usize> = edge
                    .fine_edges
                    .iter()
                    .flat_map(|&e| es.edges[e].nodes.iter().map(|&n| node_map[n]))
                    .filter(|&n| n != NOT_A_NODE)
                    .collect();
                v.sort_unstable();
                v.dedup();
                edge.nodes = v;
            }
        }

        let mut element_faces = vec![Vec::new(); ne];
        for (i, f) in faces.iter().enumerate() {
            element_faces[f.left].push(i);
            if let Some(r) = f.right {
                element_faces[r].push(i);
            }
        }

        let node_on_boundary = nodes.iter().map(|&n| topo.boundary_nodes[n]).collect();
        let dual = DualGraph::from_pairs(
            element_volumes.clone(),
            faces.iter().filter_map(|f| f.right.map(|r| (f.left, r, f.area))),
        );

        LevelTopology {
            level,
            fine,
            element_volumes,
            element_fine,
            fine_to_element,
            element_nodes,
            element_faces,
            faces,
            nodes,
            node_elements,
            node_on_boundary,
            edges,
            dual,
        }
    }

    pub fn dim(&self) -> usize {
        self.fine.dim()
    }

    pub fn num_elements(&self) -> usize {
        self.element_fine.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Fine node index to level node index, or `usize::MAX`.
    pub fn node_map(&self) -> Vec<usize> {
        let mut map = vec![NOT_A_NODE; self.fine.mesh.num_nodes()];
        for (i, &n) in self.nodes.iter().enumerate() {
            map[n] = i;
        }
        map
    }

    /// Neighbouring faces of every face (sharing a fine node in 2D, a fine
    /// edge in 3D). Lists are sorted and exclude the face itself.
    pub fn face_adjacency(&self) -> Vec<Vec<usize>> {
        let topo = &self.fine.topology;
        let mut incidence: Vec<(usize, usize)> = Vec::new();
        for (i, face) in self.faces.iter().enumerate() {
            for &ff in &face.fine_faces {
                match &topo.edges {
                    Some(es) => incidence.extend(es.face_edges[ff].iter().map(|&e| (e, i))),
                    None => incidence.extend(topo.faces.faces[ff].nodes().iter().map(|&n| (n, i))),
                }
            }
        }
        group_pairs(self.faces.len(), incidence)
    }

    /// Neighbouring edges of every edge (sharing a fine node).
    pub fn edge_adjacency(&self) -> Vec<Vec<usize>> {
        let (Some(edges), Some(es)) = (&self.edges, &self.fine.topology.edges) else {
            return Vec::new();
        };
        let mut incidence: Vec<(usize, usize)> = Vec::new();
        for (i, edge) in edges.iter().enumerate() {
            for &fe in &edge.fine_edges {
                incidence.extend(es.edges[fe].nodes.iter().map(|&n| (n, i)));
            }
        }
        group_pairs(edges.len(), incidence)
    }
}

/// Turns `(shared entity, item)` incidences into item adjacency lists.
fn group_pairs(n_items: usize, mut incidence: Vec<(usize, usize)>) -> Vec<Vec<usize>> {
    incidence.sort_unstable();
    incidence.dedup();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_items];
    let mut i = 0;
    while i < incidence.len() {
        let mut j = i + 1;
        while j < incidence.len() && incidence[j].0 == incidence[i].0 {
            j += 1;
        }
        for a in i..j {
            for b in i..j {
                if a != b {
                    adj[incidence[a].1].push(incidence[b].1);
                }
            }
        }
        i = j;
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, MeshSpec};

    #[test]
    fn finest_level_mirrors_mesh() {
        let fine = FineGrid::new(generate_mesh(&MeshSpec::unit_square(2)).unwrap()).unwrap();
        let l = LevelTopology::finest(fine.clone());
        assert_eq!(l.num_elements(), 8);
        assert_eq!(l.num_nodes(), 9);
        assert_eq!(l.faces.len(), fine.topology.faces.len());
        assert!(l.element_nodes.iter().all(|v| v.len() == 3));
        assert_eq!(l.node_elements[4].len(), 6);
        assert!(!l.node_on_boundary[4]);
        assert!((l.element_volumes.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn face_adjacency_2d_shares_nodes() {
        let fine = FineGrid::new(generate_mesh(&MeshSpec::unit_square(1)).unwrap()).unwrap();
        let l = LevelTopology::finest(fine);
        let adj = l.face_adjacency();
        // Unit square split by one diagonal: 5 faces; the diagonal touches all four sides.
        let diag = l.faces.iter().position(|f| !f.is_boundary()).unwrap();
        assert_eq!(adj[diag].len(), 4);
        for (i, list) in adj.iter().enumerate() {
            for &j in list {
                assert!(adj[j].contains(&i));
            }
        }
    }

    #[test]
    fn face_adjacency_3d_shares_edges() {
        let fine = FineGrid::new(generate_mesh(&MeshSpec::unit_cube(1)).unwrap()).unwrap();
        let l = LevelTopology::finest(fine.clone());
        let adj = l.face_adjacency();
        let es = fine.topology.edges.as_ref().unwrap();
        for (i, list) in adj.iter().enumerate() {
            for &j in list {
                let a = es.face_edges[i];
                let b = es.face_edges[j];
                assert!(a.iter().any(|x| b.contains(x)));
            }
        }
        let eadj = l.edge_adjacency();
        assert_eq!(eadj.len(), es.edges.len());
    }
}
