//! Run configuration from flags and `key=value` files.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use agglomg::agglomerate::Algorithm;
use agglomg::solver::ProblemKind;

/// Flags shared by every subcommand. Everything is optional here so that a
/// `--config` file can supply it; [`RunConfig::resolve`] checks the result.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Read a gmsh MSH 2.2 ASCII mesh.
    #[arg(long, value_name = "PATH")]
    pub mesh: Option<PathBuf>,
    /// Generate the two-region 2D reference mesh with N cells per side.
    #[arg(long = "gen-2d", value_name = "N")]
    pub gen_2d: Option<usize>,
    /// Generate the two-region 3D reference mesh with N cells per side.
    #[arg(long = "gen-3d", value_name = "N")]
    pub gen_3d: Option<usize>,
    /// Algorithm name; `sweep` also takes a comma list or `all`.
    #[arg(long, value_name = "NAME")]
    pub alg: Option<String>,
    /// Desired top-level agglomerate size; `sweep` takes a comma list.
    #[arg(long, value_name = "S")]
    pub size: Option<String>,
    /// Desired agglomerate size on lower levels.
    #[arg(long = "lower-size", value_name = "S2")]
    pub lower_size: Option<usize>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// diffuse or absorbing.
    #[arg(long, value_name = "KIND")]
    pub problem: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub vtk: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Concurrent sweep configurations.
    #[arg(long, value_name = "K")]
    pub jobs: Option<usize>,
    /// key=value file with the same keys as the flags.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Stop coarsening at or below this many nodes.
    #[arg(long = "min-nodes", value_name = "N")]
    pub min_nodes: Option<usize>,
    /// Stop after a level that removes less than this fraction of nodes.
    #[arg(long = "min-reduction", value_name = "F")]
    pub min_reduction: Option<f64>,
    #[arg(long = "max-levels", value_name = "N")]
    pub max_levels: Option<usize>,
    /// FGMRES iteration cap.
    #[arg(long = "max-iterations", value_name = "N")]
    pub max_iterations: Option<usize>,
    /// Sweep: also solve each configuration.
    #[arg(long)]
    pub solve: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Msh(PathBuf),
    Generated { dim: usize, n: usize },
}

/// Fully resolved configuration of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mesh: MeshSource,
    pub algorithms: Vec<Algorithm>,
    /// Explicit top sizes; empty means the per-dimension default.
    pub sizes: Vec<usize>,
    /// Whether `sizes` was given at all (an empty sweep list is explicit).
    pub sizes_given: bool,
    pub lower_size: Option<usize>,
    pub seed: u64,
    pub problem: ProblemKind,
    pub csv: Option<PathBuf>,
    pub vtk: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub min_nodes: Option<usize>,
    pub min_reduction: Option<f64>,
    pub max_levels: Option<usize>,
    pub max_iterations: Option<usize>,
    pub solve: bool,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| anyhow::anyhow!("invalid {what} '{t}': {e}")))
        .collect()
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| anyhow::anyhow!("config key {key}: invalid value '{value}': {e}"))
}

impl RunArgs {
    /// Fills unset fields from a `key=value` text. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn merge_file_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').with_context(|| format!("config line {}: expected key=value", i + 1))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            let path = || Some(PathBuf::from(value));
            match key.as_str() {
                "mesh" => self.mesh = self.mesh.take().or_else(path),
                "gen_2d" => self.gen_2d = self.gen_2d.or(Some(parse_value(&key, value)?)),
                "gen_3d" => self.gen_3d = self.gen_3d.or(Some(parse_value(&key, value)?)),
                "alg" => self.alg = self.alg.take().or_else(|| Some(value.to_string())),
                "size" => self.size = self.size.take().or_else(|| Some(value.to_string())),
                "lower_size" => self.lower_size = self.lower_size.or(Some(parse_value(&key, value)?)),
                "seed" => self.seed = self.seed.or(Some(parse_value(&key, value)?)),
                "problem" => self.problem = self.problem.take().or_else(|| Some(value.to_string())),
                "csv" => self.csv = self.csv.take().or_else(path),
                "vtk" => self.vtk = self.vtk.take().or_else(path),
                "json" => self.json = self.json.take().or_else(path),
                "jobs" => self.jobs = self.jobs.or(Some(parse_value(&key, value)?)),
                "min_nodes" => self.min_nodes = self.min_nodes.or(Some(parse_value(&key, value)?)),
                "min_reduction" => self.min_reduction = self.min_reduction.or(Some(parse_value(&key, value)?)),
                "max_levels" => self.max_levels = self.max_levels.or(Some(parse_value(&key, value)?)),
                "max_iterations" => self.max_iterations = self.max_iterations.or(Some(parse_value(&key, value)?)),
                "solve" => self.solve = self.solve || parse_value::<bool>(&key, value)?,
                _ => bail!("config line {}: unknown key '{key}'", i + 1),
            }
        }
        Ok(())
    }
}

impl RunConfig {
    /// Merges the config file (flags win) and validates. `multi` allows
    /// algorithm and size lists.
    pub fn resolve(mut args: RunArgs, multi: bool) -> Result<Self> {
        if let Some(path) = args.config.clone() {
            let text = std::fs::read_to_string(&path).with_context(|| format!("{}", path.display()))?;
            args.merge_file_text(&text).with_context(|| format!("{}", path.display()))?;
        }
        let sources = [args.mesh.is_some(), args.gen_2d.is_some(), args.gen_3d.is_some()];
        let mesh = match (args.mesh, args.gen_2d, args.gen_3d) {
            _ if sources.iter().filter(|&&s| s).count() != 1 => {
                bail!("give exactly one of --mesh, --gen-2d, --gen-3d")
            }
            (Some(p), _, _) => MeshSource::Msh(p),
            (_, Some(n), _) => MeshSource::Generated { dim: 2, n },
            (_, _, Some(n)) => MeshSource::Generated { dim: 3, n },
            _ => unreachable!(),
        };
        if let MeshSource::Generated { n: 0, .. } = mesh {
            bail!("generated meshes need at least one cell per side");
        }
        let alg = args.alg.context("--alg is required")?;
        let algorithms: Vec<Algorithm> =
            if alg.trim() == "all" { Algorithm::ALL.to_vec() } else { parse_list(&alg, "algorithm")? };
        if algorithms.is_empty() {
            bail!("--alg names no algorithm");
        }
        let sizes_given = args.size.is_some();
        let sizes: Vec<usize> = match &args.size {
            Some(s) => parse_list(s, "size")?,
            None => Vec::new(),
        };
        if !multi {
            if algorithms.len() > 1 {
                bail!("only sweep takes several algorithms");
            }
            if sizes.len() > 1 || (sizes_given && sizes.is_empty()) {
                bail!("only sweep takes a size list");
            }
        }
        let problem = match &args.problem {
            Some(p) => p.parse::<ProblemKind>()?,
            None => ProblemKind::Diffuse,
        };
        if args.jobs == Some(0) {
            bail!("--jobs must be at least 1");
        }
        Ok(RunConfig {
            mesh,
            algorithms,
            sizes,
            sizes_given,
            lower_size: args.lower_size,
            seed: args.seed.unwrap_or(0),
            problem,
            csv: args.csv,
            vtk: args.vtk,
            json: args.json,
            jobs: args.jobs,
            min_nodes: args.min_nodes,
            min_reduction: args.min_reduction,
            max_levels: args.max_levels,
            max_iterations: args.max_iterations,
            solve: args.solve,
        })
    }

    /// The configuration as a `key=value` file that resolves back to it.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        match &self.mesh {
            MeshSource::Msh(p) => writeln!(s, "mesh={}", p.display()),
            MeshSource::Generated { dim, n } => writeln!(s, "gen_{dim}d={n}"),
        }
        .unwrap();
        let algs: Vec<&str> = self.algorithms.iter().map(|a| a.name()).collect();
        writeln!(s, "alg={}", algs.join(",")).unwrap();
        if self.sizes_given {
            let sizes: Vec<String> = self.sizes.iter().map(usize::to_string).collect();
            writeln!(s, "size={}", sizes.join(",")).unwrap();
        }
        let opt = |s: &mut String, key: &str, v: Option<String>| {
            if let Some(v) = v {
                writeln!(s, "{key}={v}").unwrap();
            }
        };
        opt(&mut s, "lower_size", self.lower_size.map(|v| v.to_string()));
        writeln!(s, "seed={}", self.seed).unwrap();
        writeln!(s, "problem={}", self.problem).unwrap();
        opt(&mut s, "csv", self.csv.as_ref().map(|p| p.display().to_string()));
        opt(&mut s, "vtk", self.vtk.as_ref().map(|p| p.display().to_string()));
        opt(&mut s, "json", self.json.as_ref().map(|p| p.display().to_string()));
        opt(&mut s, "jobs", self.jobs.map(|v| v.to_string()));
        opt(&mut s, "min_nodes", self.min_nodes.map(|v| v.to_string()));
        opt(&mut s, "min_reduction", self.min_reduction.map(|v| v.to_string()));
        opt(&mut s, "max_levels", self.max_levels.map(|v| v.to_string()));
        opt(&mut s, "max_iterations", self.max_iterations.map(|v| v.to_string()));
        if self.solve {
            writeln!(s, "solve=true").unwrap();
        }
        s
    }
}
