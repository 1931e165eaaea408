//! Property tests for invariants that cut across modules.

use std::collections::VecDeque;
use std::sync::Arc;

use agglomg::agglomerate::{
    aspect_objective, cleanup, coarsen, count_agglomerates, greedy_coarsen, jones_with_state,
    kraus_with_state, refine_aspect, sizebased_coarsen, Agglomeration, Algorithm, CoarsenConfig,
};
use agglomg::hierarchy::{build_hierarchy, galerkin_hierarchy, Hierarchy, HierarchyConfig, RowKind};
use agglomg::mesh::{generate_mesh, mesh_metrics, FineGrid, LevelTopology, MeshSpec};
use agglomg::partitioner::{partition_kway, WeightedGraph};
use agglomg::solver::{
    assemble_problem, fgmres, solve_problem, IdentityPreconditioner, JacobiGmres, KrylovConfig, Multigrid,
    ProblemKind, ProblemSpec, SmootherConfig, SmootherKind, SolveConfig,
};
use agglomg::SparseMatrix;
use proptest::prelude::*;

fn grid(dim: usize, n: usize, jitter: f64, seed: u64) -> Arc<FineGrid> {
    let spec = if dim == 2 { MeshSpec::unit_square(n) } else { MeshSpec::unit_cube(n) };
    FineGrid::new(generate_mesh(&spec.with_jitter(jitter).with_seed(seed)).unwrap()).unwrap()
}

/// Small 2D (n in 3..=10) or 3D (n in 1..=3) mesh.
fn small_grid() -> impl Strategy<Value = Arc<FineGrid>> {
    (2usize..=3, 1usize..=8, 0.0..0.4f64, any::<u64>())
        .prop_map(|(dim, n, j, seed)| if dim == 2 { grid(2, n + 2, j, seed) } else { grid(3, n.min(3), j, seed) })
}

fn diffuse() -> ProblemSpec {
    ProblemSpec::reference(ProblemKind::Diffuse)
}

fn components(adjacent: impl Fn(usize) -> Vec<usize>, members: &[usize], label: &dyn Fn(usize) -> bool) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    let mut count = 0;
    for &start in members {
        if !seen.insert(start) {
            continue;
        }
        count += 1;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for u in adjacent(v) {
                if label(u) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
    }
    count
}

/// Total, densely numbered and face-connected.
fn well_formed(level: &LevelTopology, agg: &Agglomeration) -> Result<(), String> {
    let map = agg.element_to_agg();
    if map.len() != level.num_elements() {
        return Err("not total".into());
    }
    for a in 0..agg.num_agglomerates() {
        let members: Vec<usize> = (0..map.len()).filter(|&e| map[e] == a).collect();
        if members.is_empty() {
            return Err(format!("id {a} unused"));
        }
        let n = components(|e| level.dual.neighbors(e).to_vec(), &members, &|u| map[u] == a);
        if n != 1 {
            return Err(format!("agglomerate {a} has {n} components"));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mesh_face_counts_and_dual_symmetry(f in small_grid()) {
        let topo = &f.topology;
        let nv = f.mesh.nodes_per_element();
        let interior = topo.faces.faces.iter().filter(|x| !x.is_boundary()).count();
        let boundary = topo.faces.faces.len() - interior;
        prop_assert_eq!(f.mesh.num_elements() * nv, 2 * interior + boundary);
        for face in &topo.faces.faces {
            prop_assert!(face.area > 0.0);
            prop_assert_eq!(face.is_boundary(), face.tag.is_some());
            prop_assert!(face.right != Some(face.left));
        }
        let dual = &topo.dual;
        for v in 0..dual.num_vertices() {
            prop_assert!(dual.degree(v) <= f.dim() + 1);
            for (&u, &w) in dual.neighbors(v).iter().zip(dual.edge_weights(v)) {
                prop_assert_eq!(dual.weight(u, v), Some(w));
            }
        }
        prop_assert_eq!(dual.num_edges(), interior);
        let m = mesh_metrics(&f.mesh, topo).unwrap();
        prop_assert!(m.node_element_ratio > 0.0 && m.average_connectivity > 0.0);
    }

    #[test]
    fn mesh_generation_is_pure(dim in 2usize..=3, n in 1usize..5, j in 0.0..0.45f64, seed in any::<u64>()) {
        let spec = if dim == 2 { MeshSpec::unit_square(n) } else { MeshSpec::unit_cube(n) };
        let spec = spec.with_jitter(j).with_seed(seed);
        prop_assert_eq!(generate_mesh(&spec).unwrap(), generate_mesh(&spec).unwrap());
    }

    #[test]
    fn every_algorithm_gives_a_well_formed_deterministic_agglomeration(
        f in small_grid(), alg in 0usize..7, s in 2usize..12, seed in any::<u64>()
    ) {
        let level = LevelTopology::finest(f);
        let algorithm = Algorithm::ALL[alg];
        prop_assume!(!algorithm.uses_size() || s <= level.num_elements());
        let cfg = CoarsenConfig::new(algorithm, s, seed);
        let (a, report) = coarsen(&level, &cfg).unwrap();
        prop_assert!(well_formed(&level, &a).is_ok(), "{:?}", well_formed(&level, &a));
        prop_assert!(report.total() <= level.num_elements() * 4);
        let (b, _) = coarsen(&level, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cleanup_is_idempotent(f in small_grid(), raw in proptest::collection::vec(proptest::option::weighted(0.7, 0usize..9), 400)) {
        let level = LevelTopology::finest(f);
        let raw = &raw[..level.num_elements().min(raw.len())];
        prop_assume!(raw.len() == level.num_elements());
        let (once, _) = cleanup(&level, raw);
        prop_assert!(well_formed(&level, &once).is_ok());
        let again: Vec<Option<usize>> = once.element_to_agg().iter().copied().map(Some).collect();
        let (twice, report) = cleanup(&level, &again);
        prop_assert_eq!(report.total(), 0);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn size_contracts_before_cleanup(f in small_grid(), s in 2usize..12, seed in any::<u64>()) {
        let level = LevelTopology::finest(f);
        let n = level.num_elements();
        let greedy = greedy_coarsen(&level, s, seed).unwrap();
        let mut sizes = vec![0usize; n];
        for a in greedy.iter().flatten() {
            sizes[*a] += 1;
        }
        prop_assert!(sizes.iter().all(|&c| c <= s));
        if n >= s {
            let parts = sizebased_coarsen(&level, s, seed).unwrap();
            prop_assert_eq!(count_agglomerates(&parts), n / s);
        }
    }

    #[test]
    fn aspect_refinement_never_worsens_the_objective(f in small_grid(), s in 2usize..10, seed in any::<u64>()) {
        let level = LevelTopology::finest(f);
        let raw = greedy_coarsen(&level, s, seed).unwrap();
        let (agg, _) = cleanup(&level, &raw);
        let mut labels = agg.element_to_agg().to_vec();
        let before = aspect_objective(&level, &labels);
        refine_aspect(&level, &mut labels, s);
        prop_assert!(aspect_objective(&level, &labels) <= before + 1e-12 * before.abs().max(1.0));
    }

    #[test]
    fn face_weight_algorithms_consume_everything(f in small_grid()) {
        let level = LevelTopology::finest(f);
        let (_, jones) = jones_with_state(&level);
        prop_assert!(jones.faces.iter().all(|&w| w == -1));
        let (_, kraus) = kraus_with_state(&level);
        prop_assert!(kraus.faces.iter().all(|&w| w == -1));
        prop_assert!(kraus.edges.iter().all(|&w| w == -1));
    }
}

/// Connected graph: a random spanning tree plus extra edges.
fn connected_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..60).prop_flat_map(|n| {
        (
            proptest::collection::vec(1u64..1000, n),
            proptest::collection::vec((any::<prop::sample::Index>(), 1u64..1000), n - 1),
            proptest::collection::vec((0..n, 0..n, 1u64..1000), 0..2 * n),
        )
            .prop_map(|(vw, tree, extra)| {
                let mut edges: Vec<(usize, usize, u64)> =
                    tree.iter().enumerate().map(|(i, (p, w))| (i + 1, p.index(i + 1), *w)).collect();
                edges.extend(extra);
                WeightedGraph::from_edges(vw, edges).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn partition_has_exactly_k_parts(g in connected_graph(), k in 1usize..9, contiguous in any::<bool>(), seed in any::<u64>()) {
        let k = k.min(g.num_vertices());
        let p = partition_kway(&g, k, contiguous, seed).unwrap();
        prop_assert_eq!(p.k, k);
        prop_assert_eq!(p.parts.len(), g.num_vertices());
        let mut sizes = vec![0; k];
        for &x in &p.parts {
            prop_assert!(x < k);
            sizes[x] += 1;
        }
        prop_assert!(sizes.iter().all(|&c| c > 0));
        if contiguous {
            for part in 0..k {
                let members: Vec<usize> = (0..g.num_vertices()).filter(|&v| p.parts[v] == part).collect();
                let n = components(|v| g.neighbors(v).to_vec(), &members, &|u| p.parts[u] == part);
                prop_assert_eq!(n, 1, "part {} split", part);
            }
        }
        prop_assert_eq!(p, partition_kway(&g, k, contiguous, seed).unwrap());
    }
}

fn small_hierarchy(f: &Arc<FineGrid>, alg: Algorithm, seed: u64) -> Hierarchy {
    let mut cfg = HierarchyConfig::new(alg, f.dim(), seed);
    cfg.schedule.top = 6;
    cfg.stop.min_nodes = 8;
    build_hierarchy(Arc::clone(f), diffuse().materials.per_element(&f.mesh).unwrap(), &cfg).unwrap()
}

/// Dense Cholesky succeeds (all pivots positive) exactly for SPD matrices.
fn positive_definite(a: &SparseMatrix<f64>) -> bool {
    let n = a.nrows();
    let mut l = a.to_dense();
    for j in 0..n {
        let d = l[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in j + 1..n {
            l[i][j] = (l[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>()) / d;
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hierarchy_transfer_invariants(f in small_grid(), alg in 0usize..7, seed in any::<u64>()) {
        let h = small_hierarchy(&f, Algorithm::ALL[alg], seed);
        let counts = h.node_counts();
        prop_assert!(counts.windows(2).all(|w| w[1] < w[0]), "{:?}", counts);
        prop_assert!(h.grid_complexity() >= 1.0);
        for (l, level) in h.levels.iter().enumerate() {
            let Some(t) = &level.transfer else { continue };
            let p = &t.prolongation;
            prop_assert_eq!(p.nrows(), counts[l]);
            prop_assert_eq!(p.ncols(), counts[l + 1]);
            for i in 0..p.nrows() {
                let row: Vec<(usize, f64)> = p.row(i).collect();
                prop_assert!(row.iter().all(|e| e.1 > 0.0));
                match t.row_kinds[i] {
                    RowKind::Injection => prop_assert!(row.len() == 1 && row[0].1 == 1.0),
                    _ => prop_assert!((row.iter().map(|e| e.1).sum::<f64>() - 1.0).abs() <= 1e-14),
                }
            }
        }
    }

    #[test]
    fn galerkin_operators_stay_spd(f in small_grid(), alg in 0usize..7, seed in any::<u64>()) {
        let h = small_hierarchy(&f, Algorithm::ALL[alg], seed);
        let (a, _) = assemble_problem::<f64>(&f.mesh, &f.topology, &diffuse()).unwrap();
        let ops = galerkin_hierarchy(&h, a).unwrap();
        for (l, op) in ops.iter().enumerate() {
            prop_assert!(op.is_symmetric(1e-12), "level {}", l);
            prop_assert!(positive_definite(op), "level {} not positive definite", l);
        }
    }
}

/// Fine operator, prolongations and a V-cycle of a small diffuse problem.
fn multigrid(f: &Arc<FineGrid>, alg: Algorithm, seed: u64, smoother: SmootherConfig) -> (SparseMatrix<f64>, Multigrid<f64>) {
    let h = small_hierarchy(f, alg, seed);
    let (a, _) = assemble_problem::<f64>(&f.mesh, &f.topology, &diffuse()).unwrap();
    let ops = galerkin_hierarchy(&h, a.clone()).unwrap();
    let ps = h.prolongations().cloned().collect();
    (a, Multigrid::new(ops, ps, smoother).unwrap())
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt() <= tol * scale
}

fn vector(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_vcycle_is_linear(f in small_grid(), alg in 0usize..7, seed in any::<u64>(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
        let cfg = SmootherConfig { kind: SmootherKind::Jacobi { omega: 0.7 }, inner_iterations: 2, applications: 2 };
        let (a, mg) = multigrid(&f, Algorithm::ALL[alg], seed, cfg);
        let n = a.nrows();
        let (r1, r2) = (vector(n, seed), vector(n, seed ^ 1));
        let combo: Vec<f64> = r1.iter().zip(&r2).map(|(x, y)| alpha * x + beta * y).collect();
        let (mut z1, mut z2, mut z) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        mg.vcycle(&r1, &mut z1);
        mg.vcycle(&r2, &mut z2);
        mg.vcycle(&combo, &mut z);
        let expected: Vec<f64> = z1.iter().zip(&z2).map(|(x, y)| alpha * x + beta * y).collect();
        prop_assert!(close(&z, &expected, 1e-12));
    }

    #[test]
    fn gmres_vcycle_is_homogeneous(f in small_grid(), alg in 0usize..7, seed in any::<u64>(), alpha in 0.01..100.0f64) {
        let (a, mg) = multigrid(&f, Algorithm::ALL[alg], seed, SmootherConfig::default());
        let n = a.nrows();
        let r = vector(n, seed);
        let scaled: Vec<f64> = r.iter().map(|x| alpha * x).collect();
        let (mut z, mut zs) = (vec![0.0; n], vec![0.0; n]);
        mg.vcycle(&r, &mut z);
        mg.vcycle(&scaled, &mut zs);
        let expected: Vec<f64> = z.iter().map(|x| alpha * x).collect();
        prop_assert!(zs.iter().all(|v| v.is_finite()));
        prop_assert!(close(&zs, &expected, 1e-10));
        let mut zero = vec![1.0; n];
        mg.vcycle(&vec![0.0; n], &mut zero);
        prop_assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn solver_is_deterministic(n in 6usize..14, seed in any::<u64>(), alg in 0usize..7) {
        let f = FineGrid::new(generate_mesh(&MeshSpec::reference(2, n).with_seed(seed)).unwrap()).unwrap();
        let mut cfg = HierarchyConfig::new(Algorithm::ALL[alg], 2, seed);
        cfg.schedule.top = 6;
        let cfg = SolveConfig::multigrid(cfg);
        let a = solve_problem::<f64>(&f, &diffuse(), &cfg).unwrap();
        let b = solve_problem::<f64>(&f, &diffuse(), &cfg).unwrap();
        prop_assert!(a.converged);
        prop_assert_eq!(a.iterations, b.iterations);
        prop_assert_eq!(a.residual_history, b.residual_history);
        prop_assert_eq!(a.node_counts, b.node_counts);
    }
}

/// Random SPD matrix: a weighted graph Laplacian plus a positive diagonal.
fn spd(n: usize, edges: &[(usize, usize, f64)], shift: &[f64]) -> SparseMatrix<f64> {
    let mut t: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, shift[i])).collect();
    for &(i, j, w) in edges {
        let (i, j) = (i % n, j % n);
        if i != j {
            t.extend([(i, i, w), (j, j, w), (i, j, -w), (j, i, -w)]);
        }
    }
    SparseMatrix::from_triplets(n, n, t)
}

fn scaled_norm(a: &SparseMatrix<f64>, b: &[f64], x: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let d = a.diagonal();
    (0..b.len()).map(|i| ((b[i] - ax[i]) / d[i]).powi(2)).sum::<f64>().sqrt()
}

/// Minimum residual over `x0 + span{r0, A r0, ...}` with `k` directions, by
/// orthonormalising the Krylov vectors and then their images (each twice).
fn min_residual_step(a: &SparseMatrix<f64>, b: &[f64], x0: &[f64], k: usize) -> (Vec<f64>, f64) {
    let n = b.len();
    let ax = a.mul_vec(x0);
    let r0: Vec<f64> = (0..n).map(|i| b[i] - ax[i]).collect();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    let orth = |basis: &[Vec<f64>], mut w: Vec<f64>| {
        for _ in 0..2 {
            for q in basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let nrm = dot(&w, &w).sqrt();
        w.iter().map(|v| v / nrm).collect::<Vec<f64>>()
    };
    let mut v: Vec<Vec<f64>> = Vec::new();
    let mut next = r0.clone();
    for _ in 0..k {
        let q = orth(&v, next);
        next = a.mul_vec(&q);
        v.push(q);
    }
    // QR of A V by Gram-Schmidt, then y = R^-1 Q^T r0.
    let av: Vec<Vec<f64>> = v.iter().map(|q| a.mul_vec(q)).collect();
    let mut qs: Vec<Vec<f64>> = Vec::new();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        let q = orth(&qs, av[j].clone());
        for (i, qi) in qs.iter().enumerate() {
            r[i][j] = dot(qi, &av[j]);
        }
        r[j][j] = dot(&q, &av[j]);
        qs.push(q);
    }
    let c: Vec<f64> = qs.iter().map(|q| dot(q, &r0)).collect();
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        y[i] = (c[i] - (i + 1..k).map(|j| r[i][j] * y[j]).sum::<f64>()) / r[i][i];
    }
    let mut x = x0.to_vec();
    for (yi, q) in y.iter().zip(&v) {
        x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += yi * qi);
    }
    let axn = a.mul_vec(&x);
    let res = (0..n).map(|i| (b[i] - axn[i]).powi(2)).sum::<f64>().sqrt();
    (x, res)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn smoother_reduces_the_scaled_residual(
        n in 2usize..30,
        edges in proptest::collection::vec((0usize..30, 0usize..30, 0.1..5.0f64), 1..60),
        shift in proptest::collection::vec(0.01..2.0f64, 30),
        iterations in 1usize..5,
        seed in any::<u64>(),
    ) {
        let a = spd(n, &edges, &shift);
        let b = vector(n, seed);
        let mut x = vector(n, seed ^ 7);
        let smoother = JacobiGmres::new(&a, iterations).unwrap();
        // Once an application solves the system the rest only stir round-off.
        let floor = 1e-12 * scaled_norm(&a, &b, &x);
        for _ in 0..3 {
            let before = scaled_norm(&a, &b, &x);
            smoother.smooth(&a, &b, &mut x);
            let after = scaled_norm(&a, &b, &x);
            prop_assert!(after <= before * (1.0 + 1e-12) + floor, "{} -> {}", before, after);
        }
    }

    #[test]
    fn identity_fgmres_matches_restarted_gmres(
        n in 6usize..13,
        entries in proptest::collection::vec((0usize..13, 0usize..13, -0.5..0.5f64), 0..40),
        diag in proptest::collection::vec(2.0..4.0f64, 13),
        restart in 2usize..5,
        seed in any::<u64>(),
    ) {
        let mut t: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, diag[i])).collect();
        t.extend(entries.iter().filter(|e| e.0 < n && e.1 < n && e.0 != e.1).copied());
        let a = SparseMatrix::from_triplets(n, n, t);
        let b = vector(n, seed);
        let cycles = 3;
        let cfg = KrylovConfig { restart, tol: 0.0, abs_tol: 0.0, max_iterations: restart * cycles };
        let mut x = vec![0.0; n];
        let out = fgmres(&a, &b, &mut x, &IdentityPreconditioner, &cfg).unwrap();

        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut oracle = vec![1.0];
        let mut x0 = vec![0.0; n];
        for _ in 0..cycles {
            for k in 1..=restart {
                oracle.push(min_residual_step(&a, &b, &x0, k).1 / bnorm);
            }
            x0 = min_residual_step(&a, &b, &x0, restart).0;
        }
        prop_assert_eq!(out.residual_history.len(), oracle.len());
        for (h, o) in out.residual_history.iter().zip(&oracle) {
            prop_assert!((h - o).abs() <= 1e-9 * o.max(1e-3), "{:?} vs {:?}", out.residual_history, oracle);
        }
        prop_assert!(close(&x, &x0, 1e-8));
    }
}
