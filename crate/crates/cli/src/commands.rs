//! Subcommand implementations.

use std::io::Write;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use rayon::prelude::*;

use agglomg::agglomerate::Algorithm;
use agglomg::hierarchy::{build_hierarchy, Hierarchy, HierarchyConfig};
use agglomg::mesh::{generate_mesh, level_metrics, FineGrid, MeshSpec};
use agglomg::mesh_io::{read_msh, write_report_json, write_sweep_csv, write_sweep_csv_to, write_vtk, SweepRecord};
use agglomg::solver::{solve_problem_full, ProblemSpec, SolveConfig};

use crate::config::{MeshSource, RunConfig};

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    NotConverged,
}

pub fn load_mesh(source: &MeshSource) -> Result<Arc<FineGrid>> {
    let mesh = match source {
        MeshSource::Msh(path) => {
            let import = read_msh(path)?;
            info!(
                "read {}: {} nodes ({} unused), {} elements ({} ignored), regions {:?}",
                path.display(),
                import.file_nodes,
                import.orphan_nodes,
                import.mesh.num_elements(),
                import.ignored_elements,
                import.regions()
            );
            import.mesh
        }
        MeshSource::Generated { dim, n } => generate_mesh(&MeshSpec::reference(*dim, *n))?,
    };
    Ok(FineGrid::new(mesh)?)
}

/// Hierarchy settings for one algorithm and top size.
fn hierarchy_config(cfg: &RunConfig, dim: usize, algorithm: Algorithm, size: Option<usize>) -> HierarchyConfig {
    let mut h = HierarchyConfig::new(algorithm, dim, cfg.seed);
    if let Some(s) = size {
        h.schedule.top = s;
    }
    if let Some(s) = cfg.lower_size {
        h.schedule.lower = s;
    }
    if let Some(v) = cfg.min_nodes {
        h.stop.min_nodes = v;
    }
    if let Some(v) = cfg.min_reduction {
        h.stop.min_reduction = v;
    }
    if let Some(v) = cfg.max_levels {
        h.stop.max_levels = v;
    }
    h
}

fn solve_config(cfg: &RunConfig, hierarchy: HierarchyConfig) -> SolveConfig {
    let mut s = SolveConfig::multigrid(hierarchy);
    if let Some(k) = cfg.max_iterations {
        s.krylov.max_iterations = k;
    }
    s
}

fn warn_unused_size(cfg: &RunConfig) {
    if !cfg.sizes.is_empty() || cfg.lower_size.is_some() {
        for a in cfg.algorithms.iter().filter(|a| !a.uses_size()) {
            warn!("--size/--lower-size is ignored for {a}: it chooses its own agglomerate sizes");
        }
    }
}

fn echo(command: &str, cfg: &RunConfig) {
    println!("# agglomg {command}");
    print!("{}", cfg.to_kv());
    println!();
}

fn single(cfg: &RunConfig, fine: &FineGrid) -> HierarchyConfig {
    hierarchy_config(cfg, fine.dim(), cfg.algorithms[0], cfg.sizes.first().copied())
}

fn build(cfg: &RunConfig, fine: &Arc<FineGrid>) -> Result<Hierarchy> {
    let hcfg = single(cfg, fine);
    let spec = ProblemSpec::reference(cfg.problem);
    let materials = spec.materials.per_element(&fine.mesh)?;
    Ok(build_hierarchy(Arc::clone(fine), materials, &hcfg)?)
}

fn print_levels(h: &Hierarchy) {
    let nodes = h.node_counts();
    println!("{:>5} {:>9} {:>9} {:>12} {:>9} {:>10}", "level", "elements", "nodes", "coarse_faces", "avg_size", "complexity");
    let mut sum = 0;
    for (l, level) in h.levels.iter().enumerate() {
        sum += nodes[l];
        let (faces, avg) = match &level.transfer {
            Some(t) => (
                t.coarse_faces.iter().filter(|f| f.is_primary()).count().to_string(),
                format!("{:.2}", t.agglomeration.average_size()),
            ),
            None => ("-".into(), "-".into()),
        };
        println!(
            "{:>5} {:>9} {:>9} {:>12} {:>9} {:>10.4}",
            l,
            level.topology.num_elements(),
            nodes[l],
            faces,
            avg,
            sum as f64 / nodes[0] as f64
        );
    }
}

pub fn coarsen(cfg: &RunConfig) -> Result<Outcome> {
    warn_unused_size(cfg);
    echo("coarsen", cfg);
    let fine = load_mesh(&cfg.mesh)?;
    let h = build(cfg, &fine)?;
    print_levels(&h);
    if let Some(path) = &cfg.vtk {
        write_vtk(path, &fine.mesh, &h.fine_agglomerates())?;
        info!("wrote {}", path.display());
    }
    Ok(Outcome::Success)
}

pub fn export(cfg: &RunConfig) -> Result<Outcome> {
    let Some(path) = &cfg.vtk else { bail!("export needs --vtk PATH") };
    warn_unused_size(cfg);
    echo("export", cfg);
    let fine = load_mesh(&cfg.mesh)?;
    let h = build(cfg, &fine)?;
    let levels = h.fine_agglomerates();
    write_vtk(path, &fine.mesh, &levels)?;
    println!("wrote {} with {} agglomerate level(s)", path.display(), levels.len());
    Ok(Outcome::Success)
}

pub fn solve(cfg: &RunConfig) -> Result<Outcome> {
    warn_unused_size(cfg);
    echo("solve", cfg);
    let fine = load_mesh(&cfg.mesh)?;
    let spec = ProblemSpec::reference(cfg.problem);
    let solve_cfg = solve_config(cfg, single(cfg, &fine));
    let solution = solve_problem_full::<f64>(&fine, &spec, &solve_cfg)?;
    let r = &solution.report;
    println!("problem        {}", r.problem);
    println!("algorithm      {}", r.algorithm);
    println!("unknowns       {}", r.unknowns);
    println!("levels         {} {:?}", r.levels, r.node_counts);
    println!("complexity     grid {:.4}, operator {:.4}", r.grid_complexity, r.operator_complexity);
    println!("iterations     {}", r.iterations);
    println!("residual       {:.3e}", r.final_residual);
    println!("converged      {}", r.converged);
    println!("setup time     {:.3} s (includes Galerkin products)", r.setup_time_s);
    println!("solve time     {:.3} s", r.solve_time_s);
    if let Some(path) = &cfg.json {
        write_report_json(path, r)?;
        info!("wrote {}", path.display());
    }
    Ok(if r.converged { Outcome::Success } else { Outcome::NotConverged })
}

fn sweep_one(cfg: &RunConfig, fine: &Arc<FineGrid>, algorithm: Algorithm, size: usize) -> SweepRecord {
    let run = || -> agglomg::Result<SweepRecord> {
        let hcfg = hierarchy_config(cfg, fine.dim(), algorithm, Some(size));
        let spec = ProblemSpec::reference(cfg.problem);
        let (h, solve) = if cfg.solve {
            let s = solve_problem_full::<f64>(fine, &spec, &solve_config(cfg, hcfg))?;
            (s.hierarchy.expect("multigrid solve keeps its hierarchy"), Some(s.report))
        } else {
            let materials = spec.materials.per_element(&fine.mesh)?;
            (build_hierarchy(Arc::clone(fine), materials, &hcfg)?, None)
        };
        let first = h.levels[0].transfer.as_ref();
        let level1 = h.levels.get(1).map(|l| level_metrics(&l.topology)).transpose()?;
        Ok(SweepRecord {
            algorithm: algorithm.name().to_string(),
            desired_size: size,
            average_size: first.map(|t| t.agglomeration.average_size()),
            grid_complexity: Some(h.grid_complexity()),
            levels: Some(h.num_levels()),
            node_element_ratio: level1.as_ref().map(|m| m.node_element_ratio),
            connectivity: level1.as_ref().map(|m| m.average_connectivity),
            iterations: solve.as_ref().map(|r| r.iterations),
            converged: solve.as_ref().map(|r| r.converged),
            solve_time_s: solve.as_ref().map(|r| r.solve_time_s),
            setup_time_s: solve.as_ref().map(|r| r.setup_time_s),
            status: "ok".into(),
            error: None,
        })
    };
    run().unwrap_or_else(|e| {
        warn!("{algorithm} with size {size} failed: {e}");
        SweepRecord::failed(algorithm.name(), size, e)
    })
}

pub fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    warn_unused_size(cfg);
    let fine = load_mesh(&cfg.mesh)?;
    let sizes = if cfg.sizes_given { cfg.sizes.clone() } else { vec![HierarchyConfig::new(Algorithm::SizeBased, fine.dim(), 0).schedule.top] };
    let jobs: Vec<(Algorithm, usize)> =
        cfg.algorithms.iter().flat_map(|&a| sizes.iter().map(move |&s| (a, s))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cfg.jobs {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().context("thread pool")?;
    let records: Vec<SweepRecord> = pool.install(|| jobs.par_iter().map(|&(a, s)| sweep_one(cfg, &fine, a, s)).collect());
    match &cfg.csv {
        Some(path) => {
            echo("sweep", cfg);
            write_sweep_csv(path, &records)?;
            println!("wrote {} row(s) to {}", records.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_sweep_csv_to(&mut lock, &records).context("writing CSV to stdout")?;
            lock.flush()?;
        }
    }
    Ok(Outcome::Success)
}
