use super::Mesh;
use crate::error::{Error, Result};

#[inline]
fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Signed area (2D) or volume (3D) of a simplex given its vertices.
pub fn simplex_measure(dim: usize, pts: &[[f64; 3]]) -> f64 {
    match dim {
        2 => {
            let a = sub(pts[1], pts[0]);
            let b = sub(pts[2], pts[0]);
            0.5 * (a[0] * b[1] - a[1] * b[0])
        }
        3 => {
            let a = sub(pts[1], pts[0]);
            let b = sub(pts[2], pts[0]);
            let c = sub(pts[3], pts[0]);
            let n = cross(a, b);
            (n[0] * c[0] + n[1] * c[1] + n[2] * c[2]) / 6.0
        }
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Length (2D) or area (3D) of a face given its vertices.
pub fn face_measure(dim: usize, pts: &[[f64; 3]]) -> f64 {
    match dim {
        2 => norm(sub(pts[1], pts[0])),
        3 => 0.5 * norm(cross(sub(pts[1], pts[0]), sub(pts[2], pts[0]))),
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Longest edge of element `e`.
pub(crate) fn element_diameter(mesh: &Mesh, e: usize) -> f64 {
    let nodes = mesh.element(e);
    let c = mesh.coords();
    let mut h: f64 = 0.0;
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            h = h.max(norm(sub(c[nodes[i]], c[nodes[j]])));
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryMeasures {
    pub element_volumes: Vec<f64>,
    /// Indexed like [`super::FaceSet::faces`].
    pub face_areas: Vec<f64>,
}

/// Element volumes and face areas; any non-positive measure is an error.
pub fn geometry_measures(mesh: &Mesh) -> Result<GeometryMeasures> {
    let element_volumes = element_volumes(mesh)?;
    let keys = super::topology::enumerate_faces(mesh);
    let mut face_areas = Vec::with_capacity(keys.len());
    for key in keys {
        let pts: Vec<[f64; 3]> = key.nodes().iter().map(|&n| mesh.coords()[n]).collect();
        let a = face_measure(mesh.dim(), &pts);
        if !(a > 0.0) {
            return Err(Error::InvalidMesh(format!("face {:?} has zero area", key.nodes())));
        }
        face_areas.push(a);
    }
    Ok(GeometryMeasures { element_volumes, face_areas })
}

pub(crate) fn element_volumes(mesh: &Mesh) -> Result<Vec<f64>> {
    (0..mesh.num_elements())
        .map(|e| {
            let m = mesh.element_measure(e);
            if m > 0.0 {
                Ok(m)
            } else {
                Err(Error::DegenerateElement { element: e, measure: m })
            }
        })
        .collect()
}
