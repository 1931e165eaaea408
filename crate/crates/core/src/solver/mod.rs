//! Model problems, FGMRES with a multigrid preconditioner, and reporting.

mod assembly;
mod krylov;
mod multigrid;

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use assembly::{assemble_problem, mass_matrix, stiffness_matrix, BoundaryCondition, ProblemKind, ProblemSpec};
pub use krylov::{fgmres, scaled_residual, IdentityPreconditioner, JacobiGmres, KrylovConfig, KrylovOutcome, Preconditioner};
pub use multigrid::{DenseLu, Multigrid, SmootherConfig, SmootherKind, MAX_DIRECT_UNKNOWNS};

use crate::agglomerate::Algorithm;
use crate::error::{Error, Result};
use crate::hierarchy::{build_hierarchy, galerkin_hierarchy, operator_complexity, Hierarchy, HierarchyConfig};
use crate::mesh::{generate_mesh, FineGrid, Material, MaterialTable, MeshSpec};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// `None` runs FGMRES without a preconditioner.
    pub hierarchy: Option<HierarchyConfig>,
    pub smoother: SmootherConfig,
    pub krylov: KrylovConfig,
}

impl SolveConfig {
    pub fn multigrid(hierarchy: HierarchyConfig) -> Self {
        SolveConfig { hierarchy: Some(hierarchy), smoother: SmootherConfig::default(), krylov: KrylovConfig::default() }
    }

    pub fn unpreconditioned() -> Self {
        SolveConfig { hierarchy: None, smoother: SmootherConfig::default(), krylov: KrylovConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub problem: ProblemKind,
    /// Algorithm name, or `none` without a preconditioner.
    pub algorithm: String,
    pub unknowns: usize,
    pub levels: usize,
    pub node_counts: Vec<usize>,
    pub grid_complexity: f64,
    pub operator_complexity: f64,
    pub iterations: usize,
    /// Relative residual estimates, starting at 1.
    #[serde(rename = "residuals")]
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    pub converged: bool,
    pub assembly_time_s: f64,
    /// Coarsening, cleanup, coarse topology, transfers, Galerkin products
    /// and the coarsest factorisation.
    pub setup_time_s: f64,
    /// FGMRES iterations only.
    pub solve_time_s: f64,
    pub setup_includes_galerkin: bool,
}

/// A solve report together with the solution and the hierarchy used.
#[derive(Debug)]
pub struct Solution<T> {
    pub report: SolveReport,
    pub x: Vec<T>,
    pub hierarchy: Option<Hierarchy>,
}

/// Assembles the problem on `fine`, builds the hierarchy and preconditioner,
/// and solves from a zero initial guess.
pub fn solve_problem<T: Real>(fine: &Arc<FineGrid>, spec: &ProblemSpec, config: &SolveConfig) -> Result<SolveReport> {
    solve_problem_full::<T>(fine, spec, config).map(|s| s.report)
}

/// As [`solve_problem`], also returning the solution and hierarchy.
pub fn solve_problem_full<T: Real>(fine: &Arc<FineGrid>, spec: &ProblemSpec, config: &SolveConfig) -> Result<Solution<T>> {
    let t0 = Instant::now();
    let (a, b) = assemble_problem::<T>(&fine.mesh, &fine.topology, spec)?;
    let assembly_time_s = t0.elapsed().as_secs_f64();
    let n = b.len();
    let mut x = vec![T::zero(); n];

    let t1 = Instant::now();
    let (outcome, setup_time_s, solve_time_s, hierarchy, algorithm, complexity, op_complexity, node_counts) =
        match &config.hierarchy {
            Some(hcfg) => {
                let materials = spec.materials.per_element(&fine.mesh)?;
                let h = build_hierarchy(Arc::clone(fine), materials, hcfg)?;
                let ops = galerkin_hierarchy(&h, a.clone())?;
                let prolongations = h.prolongations().map(|p| p.cast::<T>()).collect();
                let op_complexity = operator_complexity(&ops);
                let mg = Multigrid::new(ops, prolongations, config.smoother)?;
                let setup = t1.elapsed().as_secs_f64();
                let t2 = Instant::now();
                let out = fgmres(&a, &b, &mut x, &mg, &config.krylov)?;
                let solve = t2.elapsed().as_secs_f64();
                let gc = h.grid_complexity();
                let counts = h.node_counts();
                (out, setup, solve, Some(h), hcfg.algorithm.name().to_string(), gc, op_complexity, counts)
            }
            None => {
                let t2 = Instant::now();
                let out = fgmres(&a, &b, &mut x, &IdentityPreconditioner, &config.krylov)?;
                let solve = t2.elapsed().as_secs_f64();
                (out, 0.0, solve, None, "none".to_string(), 1.0, 1.0, vec![n])
            }
        };
    let report = SolveReport {
        problem: spec.kind,
        algorithm,
        unknowns: n,
        levels: node_counts.len(),
        node_counts,
        grid_complexity: complexity,
        operator_complexity: op_complexity,
        iterations: outcome.iterations,
        residual_history: outcome.residual_history,
        final_residual: outcome.final_residual,
        converged: outcome.converged,
        assembly_time_s,
        setup_time_s,
        solve_time_s,
        setup_includes_galerkin: true,
    };
    Ok(Solution { report, x, hierarchy })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsResult {
    pub subdivisions: Vec<usize>,
    pub mesh_sizes: Vec<f64>,
    pub l2_errors: Vec<f64>,
    /// Least-squares slope of `log(error)` against `log(h)`; `None` when an
    /// error is zero.
    pub slope: Option<f64>,
}

/// Manufactured-solution study for `-Δu = f` on the unit square or cube
/// with `u = amplitude · Π sin(π x_i)`, solved on structured meshes with
/// the given subdivisions.
pub fn mms_convergence(dim: usize, subdivisions: &[usize], amplitude: f64) -> Result<MmsResult> {
    if subdivisions.len() < 2 {
        return Err(Error::Config("need at least two refinements for a slope".into()));
    }
    let exact = move |p: [f64; 3]| amplitude * (0..dim).map(|d| (PI * p[d]).sin()).product::<f64>();
    let source = move |p: [f64; 3]| dim as f64 * PI * PI * exact(p);
    // D = 1 and no absorption.
    let unit = Material { source: 0.0, sigma_t: 1.0 / 3.0, sigma_s: 1.0 / 3.0 };
    let mut errors = Vec::new();
    let mut sizes = Vec::new();
    for &n in subdivisions {
        let spec = if dim == 2 { MeshSpec::unit_square(n) } else { MeshSpec::unit_cube(n) };
        let fine = FineGrid::new(generate_mesh(&spec)?)?;
        let mesh = &fine.mesh;
        let f_nodes: Vec<f64> = mesh.coords().iter().map(|&p| source(p)).collect();
        let load = mass_matrix(mesh).mul_vec(&f_nodes);
        let (a, b) = assembly::apply_dirichlet::<f64>(&stiffness_matrix(mesh), &load, &fine.topology.boundary_nodes);
        let mut x = vec![0.0; b.len()];
        let krylov = KrylovConfig { tol: 1e-12, abs_tol: 0.0, max_iterations: 1000, ..KrylovConfig::default() };
        let out = if a.nrows() <= MAX_DIRECT_UNKNOWNS {
            let lu = DenseLu::factor(&a)?;
            lu.solve(&b, &mut x);
            None
        } else {
            let materials = MaterialTable::uniform(unit).per_element(mesh)?;
            let hcfg = HierarchyConfig::new(Algorithm::SizeBased, dim, 0);
            let h = build_hierarchy(Arc::clone(&fine), materials, &hcfg)?;
            let ops = galerkin_hierarchy(&h, a.clone())?;
            let mg = Multigrid::new(ops, h.prolongations().cloned().collect(), SmootherConfig::default())?;
            Some(fgmres(&a, &b, &mut x, &mg, &krylov)?)
        };
        if let Some(out) = out {
            if !out.converged {
                return Err(Error::Divergence(format!("manufactured solve on n={n} did not converge")));
            }
        }
        errors.push(l2_error(mesh, &x, &exact));
        sizes.push(1.0 / n as f64);
    }
    let slope = if errors.iter().all(|&e| e > 0.0) {
        let pts: Vec<(f64, f64)> = sizes.iter().zip(&errors).map(|(h, e)| (h.ln(), e.ln())).collect();
        Some(fit_slope(&pts))
    } else {
        None
    };
    Ok(MmsResult { subdivisions: subdivisions.to_vec(), mesh_sizes: sizes, l2_errors: errors, slope })
}

/// Least-squares slope through `(x, y)` points.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `‖u_h − u‖_{L²}` with a quadrature rule exact for quadratics.
fn l2_error(mesh: &crate::mesh::Mesh, uh: &[f64], exact: &impl Fn([f64; 3]) -> f64) -> f64 {
    let dim = mesh.dim();
    // Barycentric points and weights.
    let rule: Vec<(Vec<f64>, f64)> = if dim == 2 {
        vec![(vec![0.5, 0.5, 0.0], 1.0 / 3.0), (vec![0.0, 0.5, 0.5], 1.0 / 3.0), (vec![0.5, 0.0, 0.5], 1.0 / 3.0)]
    } else {
        let (a, b) = (0.585_410_196_624_968_5, 0.138_196_601_125_010_5);
        (0..4).map(|k| ((0..4).map(|i| if i == k { a } else { b }).collect(), 0.25)).collect()
    };
    let c = mesh.coords();
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        let nodes = mesh.element(e);
        let vol = mesh.element_measure(e);
        for (bary, w) in &rule {
            let mut p = [0.0; 3];
            let mut u = 0.0;
            for (k, &n) in nodes.iter().enumerate() {
                for d in 0..3 {
                    p[d] += bary[k] * c[n][d];
                }
                u += bary[k] * uh[n];
            }
            total += w * vol * (u - exact(p)).powi(2);
        }
    }
    total.sqrt()
}
