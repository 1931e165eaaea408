//! Jittered structured simplicial meshes of a box.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FaceKey, Mesh};
use crate::error::{Error, Result};

/// Material id of the inner source box.
pub const REGION_A: i32 = 1;
/// Material id of the surrounding region.
pub const REGION_B: i32 = 2;

const MAX_ATTEMPTS: u64 = 5;

/// Box mesh description. `jitter` is a fraction of the cell width and must be
/// below 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    pub dim: usize,
    pub extent: [f64; 3],
    pub subdivisions: usize,
    pub jitter: f64,
    pub seed: u64,
    /// Axis-aligned `(lo, hi)` corners of region A; everything else is region B.
    pub source_box: Option<([f64; 3], [f64; 3])>,
}

impl MeshSpec {
    pub fn unit_square(n: usize) -> Self {
        MeshSpec { dim: 2, extent: [1.0, 1.0, 0.0], subdivisions: n, jitter: 0.0, seed: 0, source_box: None }
    }

    pub fn unit_cube(n: usize) -> Self {
        MeshSpec { dim: 3, extent: [1.0, 1.0, 1.0], subdivisions: n, jitter: 0.0, seed: 0, source_box: None }
    }

    /// The model-problem geometry: a 10 cm box with a centered 2 cm source box.
    pub fn reference(dim: usize, n: usize) -> Self {
        let ext = if dim == 2 { [10.0, 10.0, 0.0] } else { [10.0; 3] };
        let (lo, hi) = if dim == 2 { ([4.0, 4.0, 0.0], [6.0, 6.0, 0.0]) } else { ([4.0; 3], [6.0; 3]) };
        MeshSpec { dim, extent: ext, subdivisions: n, jitter: 0.2, seed: 0, source_box: Some((lo, hi)) }
    }

    pub fn with_jitter(mut self, jitter: f64) -> Self {
        self.jitter = jitter;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Generates a box mesh: two triangles per square cell in 2D, six Kuhn
/// tetrahedra per cube cell in 3D. Interior nodes are displaced by seeded
/// uniform jitter; each box side gets its own boundary tag (1..=2·dim, in the
/// order -x, +x, -y, +y, -z, +z).
pub fn generate_mesh(spec: &MeshSpec) -> Result<Mesh> {
    let dim = spec.dim;
    if dim != 2 && dim != 3 {
        return Err(Error::Generation(format!("dimension {dim} not supported")));
    }
    let n = spec.subdivisions;
    if n == 0 {
        return Err(Error::Generation("need at least one subdivision".into()));
    }
    if !(0.0..0.5).contains(&spec.jitter) {
        return Err(Error::Generation(format!("jitter {} must lie in [0, 0.5)", spec.jitter)));
    }
    if spec.extent[..dim].iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Generation("box extent must be positive".into()));
    }

    let per_axis = n + 1;
    let nz = if dim == 3 { per_axis } else { 1 };
    let index = |i: usize, j: usize, k: usize| (k * per_axis + j) * per_axis + i;
    let mut lattice = Vec::with_capacity(per_axis * per_axis * nz);
    for k in 0..nz {
        for j in 0..per_axis {
            for i in 0..per_axis {
                lattice.push([i, j, k]);
            }
        }
    }
    let h: Vec<f64> = (0..dim).map(|d| spec.extent[d] / n as f64).collect();

    let mut elements: Vec<usize> = Vec::new();
    let mut materials = Vec::new();
    let mut cells: Vec<Vec<[usize; 3]>> = Vec::new();
    if dim == 2 {
        for j in 0..n {
            for i in 0..n {
                let v00 = [i, j, 0];
                let v10 = [i + 1, j, 0];
                let v11 = [i + 1, j + 1, 0];
                let v01 = [i, j + 1, 0];
                cells.push(vec![v00, v10, v11]);
                cells.push(vec![v00, v11, v01]);
            }
        }
    } else {
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    for p in PERMS {
                        let mut v = [i, j, k];
                        let mut tet = vec![v];
                        for axis in p {
                            v[axis] += 1;
                            tet.push(v);
                        }
                        cells.push(tet);
                    }
                }
            }
        }
    }
    for cell in &cells {
        let mut centroid = [0.0; 3];
        for v in cell {
            for d in 0..dim {
                centroid[d] += v[d] as f64 * h[d] / cell.len() as f64;
            }
        }
        let in_source = spec.source_box.is_some_and(|(lo, hi)| (0..dim).all(|d| centroid[d] > lo[d] && centroid[d] < hi[d]));
        materials.push(if in_source { REGION_A } else { REGION_B });
        elements.extend(cell.iter().map(|v| index(v[0], v[1], v[2])));
    }

    let on_side = |v: &[usize; 3], side: usize| -> bool {
        let axis = side / 2;
        if side % 2 == 0 { v[axis] == 0 } else { v[axis] == n }
    };
    let mut tags = BTreeMap::new();
    let nv = dim + 1;
    let mut buf = Vec::with_capacity(3);
    for el in elements.chunks_exact(nv) {
        for skip in 0..nv {
            buf.clear();
            buf.extend(el.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x));
            for side in 0..2 * dim {
                if buf.iter().all(|&x| on_side(&lattice[x], side)) {
                    tags.insert(FaceKey::new(&buf), side as i32 + 1);
                    break;
                }
            }
        }
    }

    let lattice_pos: Vec<[f64; 3]> = lattice.iter().map(|v| [v[0] as f64, v[1] as f64, v[2] as f64]).collect();
    for el in elements.chunks_exact_mut(nv) {
        let pts: Vec<[f64; 3]> = el.iter().map(|&x| lattice_pos[x]).collect();
        if super::simplex_measure(dim, &pts) < 0.0 {
            el.swap(0, 1);
        }
    }

    let interior = |v: &[usize; 3]| (0..dim).all(|d| v[d] > 0 && v[d] < n);
    let mut jitter = spec.jitter;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(attempt);
        let coords: Vec<[f64; 3]> = lattice
            .iter()
            .map(|v| {
                let mut x = [0.0; 3];
                for d in 0..dim {
                    x[d] = v[d] as f64 * h[d];
                }
                if jitter > 0.0 && interior(v) {
                    for d in 0..dim {
                        x[d] += rng.gen_range(-jitter..=jitter) * h[d];
                    }
                }
                x
            })
            .collect();
        let inverted = elements.chunks_exact(nv).any(|el| {
            let pts: Vec<[f64; 3]> = el.iter().map(|&x| coords[x]).collect();
            !(super::simplex_measure(dim, &pts) > 0.0)
        });
        if inverted {
            jitter *= 0.5;
            continue;
        }
        return Mesh::new(dim, coords, elements, materials, tags);
    }
    Err(Error::Generation(format!("elements still inverted after {MAX_ATTEMPTS} jitter reductions")))
}
