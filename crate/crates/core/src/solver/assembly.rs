//! Piecewise-linear finite element assembly of the model problems.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::element_diameter;
use crate::mesh::{Material, MaterialTable, Mesh, MeshTopology};
use crate::scalar::Real;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// `-div(D grad u) + sigma_a u = S` with `D = 1/(3 sigma_t)`.
    Diffuse,
    /// Advection-diffusion-reaction with `sigma_a = sigma_t` and
    /// streamline-diffusion stabilisation.
    Absorbing,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Diffuse => "diffuse",
            ProblemKind::Absorbing => "absorbing",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "diffuse" => Ok(ProblemKind::Diffuse),
            "absorbing" => Ok(ProblemKind::Absorbing),
            _ => Err(Error::Config(format!("unknown problem '{s}' (expected diffuse or absorbing)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// Homogeneous Dirichlet on every boundary node.
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub materials: MaterialTable,
    /// Advection velocity in cm/s; zero for the diffuse problem.
    pub velocity: [f64; 3],
    pub boundary: BoundaryCondition,
}

impl ProblemSpec {
    /// The two-region model problems: a unit source in region A, none in B.
    pub fn reference(kind: ProblemKind) -> Self {
        let (a, b, velocity) = match kind {
            ProblemKind::Diffuse => (
                Material { source: 1.0, sigma_t: 10.0, sigma_s: 10.0 },
                Material { source: 0.0, sigma_t: 10.0, sigma_s: 10.0 },
                [0.0; 3],
            ),
            ProblemKind::Absorbing => (
                Material { source: 1.0, sigma_t: 0.5, sigma_s: 0.0 },
                Material { source: 0.0, sigma_t: 1.0, sigma_s: 0.0 },
                [1.0, 0.0, 0.0],
            ),
        };
        ProblemSpec {
            kind,
            materials: MaterialTable::two_region(a, b),
            velocity,
            boundary: BoundaryCondition::Dirichlet,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == ProblemKind::Diffuse && self.velocity.iter().any(|&v| v != 0.0) {
            return Err(Error::Config("the diffuse problem has no advection velocity".into()));
        }
        Ok(())
    }
}

/// Gradients of the barycentric basis functions and the element measure.
pub(crate) fn p1_gradients(mesh: &Mesh, e: usize) -> (Vec<[f64; 3]>, f64) {
    let dim = mesh.dim();
    let nodes = mesh.element(e);
    let c = mesh.coords();
    let x0 = c[nodes[0]];
    let mut j = [[0.0; 3]; 3];
    for k in 0..dim {
        for d in 0..dim {
            j[k][d] = c[nodes[k + 1]][d] - x0[d];
        }
    }
    // Rows of J hold edge vectors; grad(lambda_{k+1}) is column k of J^{-1}.
    let inv = invert(&j, dim);
    let mut grads = vec![[0.0; 3]; dim + 1];
    for k in 0..dim {
        for d in 0..dim {
            grads[k + 1][d] = inv[d][k];
            grads[0][d] -= inv[d][k];
        }
    }
    (grads, mesh.element_measure(e))
}

fn invert(j: &[[f64; 3]; 3], dim: usize) -> [[f64; 3]; 3] {
    let mut inv = [[0.0; 3]; 3];
    if dim == 2 {
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        inv[0][0] = j[1][1] / det;
        inv[0][1] = -j[0][1] / det;
        inv[1][0] = -j[1][0] / det;
        inv[1][1] = j[0][0] / det;
    } else {
        let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
            + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
        for r in 0..3 {
            for c in 0..3 {
                let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
                let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
                inv[r][c] = (j[r1][c1] * j[r2][c2] - j[r1][c2] * j[r2][c1]) / det;
            }
        }
    }
    inv
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Element matrix and load vector for one element with constant material.
pub(crate) fn element_system(
    mesh: &Mesh,
    e: usize,
    kind: ProblemKind,
    m: &Material,
    velocity: [f64; 3],
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let dim = mesh.dim();
    let nv = dim + 1;
    let (grads, vol) = p1_gradients(mesh, e);
    let diff = m.diffusion()?;
    let sigma = match kind {
        ProblemKind::Diffuse => m.sigma_a(),
        ProblemKind::Absorbing => m.sigma_t,
    };
    let b = if kind == ProblemKind::Absorbing { velocity } else { [0.0; 3] };
    let speed = dot(&b, &b).sqrt();
    let tau = if speed > 0.0 {
        let h = element_diameter(mesh, e);
        let peclet = speed * h / (2.0 * diff);
        if peclet > 1.0 { h / (2.0 * speed) } else { 0.0 }
    } else {
        0.0
    };
    let mass_off = vol / ((nv * (nv + 1)) as f64);
    let mean = vol / nv as f64;
    let mut k = vec![vec![0.0; nv]; nv];
    let mut f = vec![0.0; nv];
    let b_grad: Vec<f64> = grads.iter().map(|g| dot(&b, g)).collect();
    for i in 0..nv {
        for j in 0..nv {
            let mass = if i == j { 2.0 * mass_off } else { mass_off };
            k[i][j] = diff * vol * dot(&grads[i], &grads[j]) + sigma * mass + mean * b_grad[j];
            if tau > 0.0 {
                k[i][j] += tau * b_grad[i] * (vol * b_grad[j] + sigma * mean);
            }
        }
        f[i] = m.source * mean + tau * b_grad[i] * m.source * vol;
    }
    Ok((k, f))
}

/// Assembles the system matrix and right-hand side with homogeneous
/// Dirichlet conditions: boundary rows and columns are cleared except for
/// the diagonal, and the boundary right-hand side is zero.
pub fn assemble_problem<T: Real>(
    mesh: &Mesh,
    topology: &MeshTopology,
    spec: &ProblemSpec,
) -> Result<(SparseMatrix<T>, Vec<T>)> {
    spec.validate()?;
    let materials = spec.materials.per_element(mesh)?;
    let n = mesh.num_nodes();
    let mut triplets = Vec::with_capacity(mesh.num_elements() * (mesh.dim() + 1) * (mesh.dim() + 1));
    let mut rhs = vec![0.0; n];
    for e in 0..mesh.num_elements() {
        let (k, f) = element_system(mesh, e, spec.kind, &materials[e], spec.velocity)?;
        let nodes = mesh.element(e);
        for (i, &a) in nodes.iter().enumerate() {
            rhs[a] += f[i];
            for (j, &b) in nodes.iter().enumerate() {
                triplets.push((a, b, k[i][j]));
            }
        }
    }
    let full = SparseMatrix::from_triplets(n, n, triplets);
    Ok(apply_dirichlet(&full, &rhs, &topology.boundary_nodes))
}

/// Row and column elimination of the flagged nodes, keeping their diagonal.
pub(crate) fn apply_dirichlet<T: Real>(a: &SparseMatrix<f64>, rhs: &[f64], fixed: &[bool]) -> (SparseMatrix<T>, Vec<T>) {
    let n = a.nrows();
    let mut triplets = Vec::with_capacity(a.nnz());
    for i in 0..n {
        for (j, v) in a.row(i) {
            if (fixed[i] || fixed[j]) && i != j {
                continue;
            }
            triplets.push((i, j, T::of(v)));
        }
    }
    let b = rhs.iter().zip(fixed).map(|(&v, &d)| if d { T::zero() } else { T::of(v) }).collect();
    (SparseMatrix::from_triplets(n, n, triplets), b)
}

/// Pure-diffusion stiffness matrix (`D = 1`, no reaction), before boundary
/// conditions.
pub fn stiffness_matrix(mesh: &Mesh) -> SparseMatrix<f64> {
    let n = mesh.num_nodes();
    let mut triplets = Vec::new();
    for e in 0..mesh.num_elements() {
        let (grads, vol) = p1_gradients(mesh, e);
        let nodes = mesh.element(e);
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate() {
                triplets.push((a, b, vol * dot(&grads[i], &grads[j])));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, triplets)
}

/// Consistent P1 mass matrix.
pub fn mass_matrix(mesh: &Mesh) -> SparseMatrix<f64> {
    let n = mesh.num_nodes();
    let nv = mesh.dim() + 1;
    let mut triplets = Vec::new();
    for e in 0..mesh.num_elements() {
        let off = mesh.element_measure(e) / ((nv * (nv + 1)) as f64);
        let nodes = mesh.element(e);
        for &a in nodes {
            for &b in nodes {
                triplets.push((a, b, if a == b { 2.0 * off } else { off }));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, triplets)
}
