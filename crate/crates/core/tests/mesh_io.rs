use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use agglomg::agglomerate::Algorithm;
use agglomg::hierarchy::{build_hierarchy, HierarchyConfig};
use agglomg::mesh::{generate_mesh, FineGrid, Material, Mesh, MeshSpec};
use agglomg::mesh_io::{parse_msh, read_msh, write_vtk, write_vtk_to};
use agglomg::Error;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect()
}

#[test]
fn one_triangle_fixture() {
    let m = read_msh(fixture("one_triangle.msh")).unwrap();
    assert_eq!(m.mesh.num_elements(), 1);
    assert_eq!(m.mesh.material_ids(), &[7]);
    assert_eq!(m.regions(), vec![7]);
}

#[test]
fn tet_with_boundary_face_fixture() {
    let m = read_msh(fixture("tet_with_face.msh")).unwrap();
    assert_eq!(m.mesh.dim(), 3);
    assert_eq!(m.mesh.num_elements(), 1);
    assert_eq!(m.mesh.boundary_tags().len(), 1);
    assert_eq!(m.mesh.boundary_tags().values().copied().collect::<Vec<_>>(), vec![5]);
    assert_eq!(m.ignored_elements, 0);
}

#[test]
fn version4_fixture_is_rejected() {
    match read_msh(fixture("version4.msh")) {
        Err(Error::UnsupportedMshVersion(v)) => assert!(v.starts_with("4.1"), "{v}"),
        other => panic!("expected a version error, got {other:?}"),
    }
}

#[test]
fn two_region_square_matches_declared_counts() {
    let m = read_msh(fixture("square_two_regions.msh")).unwrap();
    assert_eq!(m.file_nodes, 9);
    assert_eq!(m.file_elements, 17);
    assert_eq!(m.mesh.num_nodes(), 9);
    // 8 triangles and 8 boundary lines are used; the point element is not.
    assert_eq!(m.mesh.num_elements(), 8);
    assert_eq!(m.mesh.boundary_tags().len(), 8);
    assert_eq!(m.ignored_elements, 1);
    assert_eq!(m.regions(), vec![1, 2]);
    assert_eq!(m.mesh.material_ids().iter().filter(|&&r| r == 1).count(), 2);
    assert_eq!(m.physical_names.get(&2).map(String::as_str), Some("shield"));
    let area: f64 = (0..8).map(|e| m.mesh.element_measure(e)).sum();
    assert!((area - 1.0).abs() < 1e-14);
    // The imported mesh is usable downstream.
    FineGrid::new(m.mesh).unwrap();
}

#[test]
fn missing_file_names_the_path() {
    let err = read_msh("/nonexistent/dir/mesh.msh").unwrap_err();
    assert!(err.to_string().contains("/nonexistent/dir/mesh.msh"));
}

#[test]
fn vtk_rejects_unassigned_and_sparse_ids() {
    let mesh = generate_mesh(&MeshSpec::unit_square(2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.vtk");
    let mut ids = vec![0usize; 8];
    ids[3] = usize::MAX;
    assert!(matches!(write_vtk(&path, &mesh, &[ids]), Err(Error::Unassigned { level: 0, count: 1 })));
    let gap = vec![0, 0, 0, 0, 2, 2, 2, 2];
    assert!(write_vtk(&path, &mesh, &[gap]).is_err());
    assert!(write_vtk(&path, &mesh, &[vec![0; 7]]).is_err());
}

/// Test-side MSH 2.2 writer with shuffled, non-contiguous node ids.
fn to_msh(mesh: &Mesh) -> String {
    let id = |n: usize| 1000 + 7 * (mesh.num_nodes() - n);
    let mut s = String::from("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    writeln!(s, "$Nodes\n{}", mesh.num_nodes()).unwrap();
    for (n, p) in mesh.coords().iter().enumerate() {
        writeln!(s, "{} {:e} {:e} {:e}", id(n), p[0], p[1], p[2]).unwrap();
    }
    s.push_str("$EndNodes\n");
    let (face_type, vol_type) = if mesh.dim() == 2 { (1, 2) } else { (2, 4) };
    let faces: Vec<(&[usize], i32)> = mesh.boundary_tags().iter().map(|(k, &t)| (k.nodes(), t)).collect();
    writeln!(s, "$Elements\n{}", faces.len() + mesh.num_elements()).unwrap();
    let mut next = 1;
    for (nodes, tag) in faces {
        let list: Vec<String> = nodes.iter().map(|&n| id(n).to_string()).collect();
        writeln!(s, "{next} {face_type} 2 {tag} 1 {}", list.join(" ")).unwrap();
        next += 1;
    }
    for (e, el) in mesh.elements().enumerate() {
        let list: Vec<String> = el.iter().map(|&n| id(n).to_string()).collect();
        writeln!(s, "{next} {vol_type} 2 {} 1 {}", mesh.material_ids()[e], list.join(" ")).unwrap();
        next += 1;
    }
    s.push_str("$EndElements\n");
    s
}

/// Cell arrays of a legacy VTK file by name.
fn vtk_cell_arrays(text: &str) -> (usize, BTreeMap<String, Vec<i64>>) {
    let mut lines = text.lines();
    let mut cells = 0;
    let mut arrays = BTreeMap::new();
    while let Some(line) = lines.next() {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["CELL_DATA", n] => cells = n.parse().unwrap(),
            ["SCALARS", name, "int", "1"] => {
                assert_eq!(lines.next(), Some("LOOKUP_TABLE default"));
                let values = (0..cells).map(|_| lines.next().unwrap().trim().parse().unwrap()).collect();
                arrays.insert(name.to_string(), values);
            }
            _ => {}
        }
    }
    (cells, arrays)
}

fn small_mesh(dim: usize, n: usize, seed: u64) -> Mesh {
    let spec = if dim == 2 { MeshSpec::reference(2, n) } else { MeshSpec::reference(3, n) };
    generate_mesh(&spec.with_seed(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn msh_round_trip_matches_declared_counts(dim in 2usize..=3, n in 1usize..6, seed in 0u64..1000) {
        let n = if dim == 3 { n.min(3) } else { n * 2 };
        let mesh = small_mesh(dim, n, seed);
        let text = to_msh(&mesh);
        let import = parse_msh(&text).unwrap();
        prop_assert_eq!(import.file_nodes, mesh.num_nodes());
        prop_assert_eq!(import.file_elements, mesh.num_elements() + mesh.boundary_tags().len());
        prop_assert_eq!(import.mesh.num_nodes(), import.file_nodes - import.orphan_nodes);
        prop_assert_eq!(
            import.mesh.num_elements() + import.mesh.boundary_tags().len() + import.ignored_elements,
            import.file_elements
        );
        prop_assert_eq!(import.orphan_nodes, 0);
        prop_assert_eq!(import.reoriented, 0);
        prop_assert_eq!(&import.mesh, &mesh);
    }

    #[test]
    fn vtk_has_dense_ids_per_level(dim in 2usize..=3, seed in 0u64..1000, alg_index in 0usize..7) {
        let n = if dim == 2 { 12 } else { 4 };
        let fine = FineGrid::new(small_mesh(dim, n, seed)).unwrap();
        let mut cfg = HierarchyConfig::new(Algorithm::ALL[alg_index], dim, seed);
        cfg.schedule.top = 6;
        cfg.stop.min_nodes = 10;
        let materials = vec![Material::new(1.0, 1.0, 0.5).unwrap(); fine.mesh.num_elements()];
        let h = build_hierarchy(Arc::clone(&fine), materials, &cfg).unwrap();
        let levels = h.fine_agglomerates();
        let mut buf = Vec::new();
        write_vtk_to(&mut buf, &fine.mesh, &levels).unwrap();
        let (cells, arrays) = vtk_cell_arrays(std::str::from_utf8(&buf).unwrap());
        prop_assert_eq!(cells, fine.mesh.num_elements());
        prop_assert_eq!(arrays.len(), levels.len() + 1);
        for (k, level) in h.levels.iter().filter(|l| l.transfer.is_some()).enumerate() {
            let ids = &arrays[&format!("agglomerate_L{k}")];
            prop_assert_eq!(ids.len(), cells);
            let count = level.transfer.as_ref().unwrap().agglomeration.num_agglomerates();
            let mut used = vec![false; count];
            for &a in ids {
                prop_assert!(a >= 0 && (a as usize) < count);
                used[a as usize] = true;
            }
            prop_assert!(used.iter().all(|&u| u));
        }
    }
}
