//! Simplicial meshes: storage, derived topology, geometry and generation.

mod generate;
mod geometry;
mod level;
mod metrics;
mod topology;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{generate_mesh, MeshSpec, REGION_A, REGION_B};
pub(crate) use geometry::element_diameter;
pub use geometry::{face_measure, geometry_measures, simplex_measure, GeometryMeasures};
pub use level::{FineGrid, LevelEdge, LevelFace, LevelTopology};
pub(crate) use level::NOT_A_NODE;
pub use metrics::{level_metrics, mesh_metrics, MeshMetrics};
pub use topology::{build_topology, DualGraph, Edge, EdgeSet, Face, FaceSet, MeshTopology};

/// Sorted node tuple identifying a (dim-1)-simplex. In 2D the unused third
/// slot holds [`FaceKey::PAD`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceKey(pub [usize; 3]);

impl FaceKey {
    pub const PAD: usize = usize::MAX;

    pub fn new(nodes: &[usize]) -> Self {
        let mut k = [Self::PAD; 3];
        k[..nodes.len()].copy_from_slice(nodes);
        k.sort_unstable();
        FaceKey(k)
    }

    pub fn nodes(&self) -> &[usize] {
        let n = if self.0[2] == Self::PAD { 2 } else { 3 };
        &self.0[..n]
    }
}

/// Conforming triangle (2D) or tetrahedron (3D) mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    coords: Vec<[f64; 3]>,
    elements: Vec<usize>,
    material_ids: Vec<i32>,
    boundary_tags: BTreeMap<FaceKey, i32>,
}

impl Mesh {
    /// Builds and validates a mesh. `elements` is flat with `dim + 1` node
    /// indices per element; every element must have positive signed measure.
    pub fn new(
        dim: usize,
        coords: Vec<[f64; 3]>,
        elements: Vec<usize>,
        material_ids: Vec<i32>,
        boundary_tags: BTreeMap<FaceKey, i32>,
    ) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidMesh(format!("dimension {dim} not supported")));
        }
        let nv = dim + 1;
        if elements.len() % nv != 0 {
            return Err(Error::InvalidMesh("element connectivity length".into()));
        }
        let ne = elements.len() / nv;
        if material_ids.len() != ne {
            return Err(Error::InvalidMesh(format!(
                "{} material ids for {} elements",
                material_ids.len(),
                ne
            )));
        }
        if let Some(&bad) = elements.iter().find(|&&n| n >= coords.len()) {
            return Err(Error::InvalidMesh(format!("node index {bad} out of range")));
        }
        for (k, key) in boundary_tags.keys().enumerate() {
            if key.nodes().len() != dim || key.nodes().iter().any(|&n| n >= coords.len()) {
                return Err(Error::InvalidMesh(format!("boundary tag entry {k} is malformed")));
            }
        }
        let mesh = Mesh { dim, coords, elements, material_ids, boundary_tags };
        for e in 0..ne {
            let m = mesh.element_measure(e);
            if !(m > 0.0) {
                return Err(Error::DegenerateElement { element: e, measure: m });
            }
        }
        Ok(mesh)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn num_elements(&self) -> usize {
        self.elements.len() / (self.dim + 1)
    }

    #[inline]
    pub fn nodes_per_element(&self) -> usize {
        self.dim + 1
    }

    pub fn coords(&self) -> &[[f64; 3]] {
        &self.coords
    }

    #[inline]
    pub fn element(&self, e: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.elements[e * nv..(e + 1) * nv]
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.elements.chunks_exact(self.dim + 1)
    }

    pub fn material_ids(&self) -> &[i32] {
        &self.material_ids
    }

    pub fn boundary_tags(&self) -> &BTreeMap<FaceKey, i32> {
        &self.boundary_tags
    }

    /// Signed measure (area or volume) of element `e`.
    pub fn element_measure(&self, e: usize) -> f64 {
        let pts: Vec<[f64; 3]> = self.element(e).iter().map(|&n| self.coords[n]).collect();
        simplex_measure(self.dim, &pts)
    }

    pub fn centroid(&self, e: usize) -> [f64; 3] {
        let nodes = self.element(e);
        let mut c = [0.0; 3];
        for &n in nodes {
            for d in 0..3 {
                c[d] += self.coords[n][d];
            }
        }
        c.map(|v| v / nodes.len() as f64)
    }
}

/// Per-region material data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Isotropic source (cm⁻² s⁻¹).
    pub source: f64,
    /// Total cross section (cm⁻¹).
    pub sigma_t: f64,
    /// Scatter cross section (cm⁻¹).
    pub sigma_s: f64,
}

impl Material {
    pub fn new(source: f64, sigma_t: f64, sigma_s: f64) -> Result<Self> {
        if !(sigma_t >= sigma_s && sigma_s >= 0.0) {
            return Err(Error::Material(format!(
                "need sigma_t >= sigma_s >= 0, got sigma_t={sigma_t}, sigma_s={sigma_s}"
            )));
        }
        Ok(Material { source, sigma_t, sigma_s })
    }

    /// Absorption cross section `sigma_t - sigma_s`.
    pub fn sigma_a(&self) -> f64 {
        self.sigma_t - self.sigma_s
    }

    /// Diffusion coefficient `1 / (3 sigma_t)`.
    pub fn diffusion(&self) -> Result<f64> {
        if self.sigma_t > 0.0 {
            Ok(1.0 / (3.0 * self.sigma_t))
        } else {
            Err(Error::Material("sigma_t = 0: diffusion coefficient undefined".into()))
        }
    }
}

/// Region id to material map with an optional fallback for unlisted ids.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MaterialTable {
    pub regions: BTreeMap<i32, Material>,
    pub fallback: Option<Material>,
}

impl MaterialTable {
    pub fn uniform(m: Material) -> Self {
        MaterialTable { regions: BTreeMap::new(), fallback: Some(m) }
    }

    /// Two-region table: `region_a` on [`REGION_A`], `region_b` everywhere else.
    pub fn two_region(region_a: Material, region_b: Material) -> Self {
        let mut regions = BTreeMap::new();
        regions.insert(REGION_A, region_a);
        regions.insert(REGION_B, region_b);
        MaterialTable { regions, fallback: Some(region_b) }
    }

    pub fn get(&self, region: i32) -> Result<Material> {
        self.regions
            .get(&region)
            .copied()
            .or(self.fallback)
            .ok_or_else(|| Error::Material(format!("no material for region {region}")))
    }

    /// Resolves one material per element.
    pub fn per_element(&self, mesh: &Mesh) -> Result<Vec<Material>> {
        mesh.material_ids().iter().map(|&r| self.get(r)).collect()
    }
}
