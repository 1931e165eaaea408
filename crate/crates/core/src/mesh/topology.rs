//! Faces, edges and the element dual graph of a simplicial mesh.

use super::geometry::{element_volumes, face_measure};
use super::{FaceKey, Mesh};
use crate::error::{Error, Result};

/// A (dim-1)-simplex with its one or two incident elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub key: FaceKey,
    pub left: usize,
    /// `None` on the domain boundary.
    pub right: Option<usize>,
    pub area: f64,
    pub tag: Option<i32>,
}

impl Face {
    pub fn nodes(&self) -> &[usize] {
        self.key.nodes()
    }

    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct FaceSet {
    pub faces: Vec<Face>,
    faces_per_element: usize,
    element_faces: Vec<usize>,
    pub node_faces: Vec<Vec<usize>>,
}

impl FaceSet {
    /// Faces of element `e`; local face `i` is opposite local node `i`.
    pub fn element_faces(&self, e: usize) -> &[usize] {
        &self.element_faces[e * self.faces_per_element..(e + 1) * self.faces_per_element]
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn num_interior(&self) -> usize {
        self.faces.iter().filter(|f| !f.is_boundary()).count()
    }

    pub fn num_boundary(&self) -> usize {
        self.faces.len() - self.num_interior()
    }
}

/// A mesh edge (3D only) with incident faces and elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub nodes: [usize; 2],
    pub faces: Vec<usize>,
    pub elements: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct EdgeSet {
    pub edges: Vec<Edge>,
    /// Three edges per face, indexed like the face set.
    pub face_edges: Vec<[usize; 3]>,
    pub node_edges: Vec<Vec<usize>>,
}

/// Weighted undirected graph in CSR form: vertices are elements (or
/// agglomerates), edges join face-sharing pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DualGraph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    edge_weights: Vec<f64>,
    pub vertex_weights: Vec<f64>,
}

impl DualGraph {
    /// Builds the graph from `(a, b, weight)` pairs; parallel edges are merged
    /// by summing weights and self-loops are ignored.
    pub fn from_pairs(vertex_weights: Vec<f64>, pairs: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let n = vertex_weights.len();
        let mut half: Vec<(usize, usize, f64)> = Vec::new();
        for (a, b, w) in pairs {
            if a != b {
                half.push((a, b, w));
                half.push((b, a, w));
            }
        }
        half.sort_unstable_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut offsets = vec![0usize; n + 1];
        let mut neighbors = Vec::with_capacity(half.len());
        let mut edge_weights: Vec<f64> = Vec::with_capacity(half.len());
        let mut last = None;
        for (a, b, w) in half {
            if last == Some((a, b)) {
                *edge_weights.last_mut().unwrap() += w;
            } else {
                offsets[a + 1] += 1;
                neighbors.push(b);
                edge_weights.push(w);
                last = Some((a, b));
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        DualGraph { offsets, neighbors, edge_weights, vertex_weights }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn edge_weights(&self, v: usize) -> &[f64] {
        &self.edge_weights[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Weight of edge `a`-`b`, if present.
    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        self.neighbors(a).binary_search(&b).ok().map(|k| self.edge_weights(a)[k])
    }
}

/// All derived topology of a fine mesh.
#[derive(Debug, Clone)]
pub struct MeshTopology {
    pub faces: FaceSet,
    /// Present only in 3D.
    pub edges: Option<EdgeSet>,
    pub dual: DualGraph,
    pub volumes: Vec<f64>,
    pub node_elements: Vec<Vec<usize>>,
    pub boundary_nodes: Vec<bool>,
}

fn local_faces(mesh: &Mesh) -> Vec<(FaceKey, usize)> {
    let nv = mesh.nodes_per_element();
    let mut out = Vec::with_capacity(mesh.num_elements() * nv);
    let mut buf = Vec::with_capacity(3);
    for (e, nodes) in mesh.elements().enumerate() {
        for skip in 0..nv {
            buf.clear();
            buf.extend(nodes.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &n)| n));
            out.push((FaceKey::new(&buf), e * nv + skip));
        }
    }
    out.sort_unstable();
    out
}

/// Distinct faces in canonical (sorted key) order.
pub(crate) fn enumerate_faces(mesh: &Mesh) -> Vec<FaceKey> {
    let mut keys: Vec<FaceKey> = local_faces(mesh).into_iter().map(|(k, _)| k).collect();
    keys.dedup();
    keys
}

/// Derives faces, edges (3D) and the dual graph.
pub fn build_topology(mesh: &Mesh) -> Result<MeshTopology> {
    let dim = mesh.dim();
    let nv = mesh.nodes_per_element();
    let volumes = element_volumes(mesh)?;
    let locals = local_faces(mesh);

    let mut faces: Vec<Face> = Vec::new();
    let mut element_faces = vec![usize::MAX; mesh.num_elements() * nv];
    let mut i = 0;
    while i < locals.len() {
        let key = locals[i].0;
        let mut j = i + 1;
        while j < locals.len() && locals[j].0 == key {
            j += 1;
        }
        let count = j - i;
        if count > 2 {
            return Err(Error::NonConforming { nodes: key.nodes().to_vec(), count });
        }
        let left = locals[i].1 / nv;
        let right = (count == 2).then(|| locals[i + 1].1 / nv);
        if right == Some(left) {
            return Err(Error::InvalidMesh(format!("element {left} repeats a face")));
        }
        let pts: Vec<[f64; 3]> = key.nodes().iter().map(|&n| mesh.coords()[n]).collect();
        let fid = faces.len();
        for slot in &locals[i..j] {
            element_faces[slot.1] = fid;
        }
        faces.push(Face { key, left, right, area: face_measure(dim, &pts), tag: None });
        i = j;
    }

    for (key, &tag) in mesh.boundary_tags() {
        let fid = faces
            .binary_search_by(|f| f.key.cmp(key))
            .map_err(|_| Error::InvalidMesh(format!("tagged face {:?} is not a mesh face", key.nodes())))?;
        if !faces[fid].is_boundary() {
            return Err(Error::InvalidMesh(format!("interior face {:?} carries a boundary tag", key.nodes())));
        }
        faces[fid].tag = Some(tag);
    }

    let mut node_faces = vec![Vec::new(); mesh.num_nodes()];
    let mut boundary_nodes = vec![false; mesh.num_nodes()];
    for (fid, f) in faces.iter().enumerate() {
        for &n in f.nodes() {
            node_faces[n].push(fid);
            if f.is_boundary() {
                boundary_nodes[n] = true;
            }
        }
    }

    let mut node_elements = vec![Vec::new(); mesh.num_nodes()];
    for (e, nodes) in mesh.elements().enumerate() {
        for &n in nodes {
            node_elements[n].push(e);
        }
    }

    let edges = (dim == 3).then(|| build_edges(mesh, &faces));

    let dual = DualGraph::from_pairs(
        volumes.clone(),
        faces.iter().filter_map(|f| f.right.map(|r| (f.left, r, f.area))),
    );

    Ok(MeshTopology {
        faces: FaceSet { faces, faces_per_element: nv, element_faces, node_faces },
        edges,
        dual,
        volumes,
        node_elements,
        boundary_nodes,
    })
}

fn build_edges(mesh: &Mesh, faces: &[Face]) -> EdgeSet {
    let mut locals: Vec<([usize; 2], usize)> = Vec::with_capacity(mesh.num_elements() * 6);
    for (e, nodes) in mesh.elements().enumerate() {
        for a in 0..4 {
            for b in a + 1..4 {
                let (x, y) = (nodes[a].min(nodes[b]), nodes[a].max(nodes[b]));
                locals.push(([x, y], e));
            }
        }
    }
    locals.sort_unstable();
    let mut edges: Vec<Edge> = Vec::new();
    for (key, e) in locals {
        match edges.last_mut() {
            Some(last) if last.nodes == key => last.elements.push(e),
            _ => edges.push(Edge { nodes: key, faces: Vec::new(), elements: vec![e] }),
        }
    }
    let find = |a: usize, b: usize| -> usize {
        let key = [a.min(b), a.max(b)];
        edges.binary_search_by(|x| x.nodes.cmp(&key)).expect("face edge missing from edge set")
    };
    let mut face_edges = Vec::with_capacity(faces.len());
    for f in faces {
        let n = f.nodes();
        face_edges.push([find(n[0], n[1]), find(n[0], n[2]), find(n[1], n[2])]);
    }
    for (fid, fe) in face_edges.iter().enumerate() {
        for &ed in fe {
            edges[ed].faces.push(fid);
        }
    }
    let mut node_edges = vec![Vec::new(); mesh.num_nodes()];
    for (eid, ed) in edges.iter().enumerate() {
        node_edges[ed.nodes[0]].push(eid);
        node_edges[ed.nodes[1]].push(eid);
    }
    EdgeSet { edges, face_edges, node_edges }
}
