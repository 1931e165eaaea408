//! gmsh MSH 2.2 ASCII reader.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{simplex_measure, FaceKey, Mesh};

const LINE: u32 = 1;
const TRIANGLE: u32 = 2;
const TETRAHEDRON: u32 = 4;

/// A mesh read from an MSH file, with what was skipped on the way.
#[derive(Debug, Clone)]
pub struct MshImport {
    pub mesh: Mesh,
    /// Node count declared in `$Nodes`.
    pub file_nodes: usize,
    /// Element count declared in `$Elements`.
    pub file_elements: usize,
    /// Elements of other types, or lower-dimensional elements that are not
    /// faces of the mesh.
    pub ignored_elements: usize,
    /// Nodes referenced by no volume element, dropped from the mesh.
    pub orphan_nodes: usize,
    /// Elements whose node order was flipped to give positive measure.
    pub reoriented: usize,
    /// `$PhysicalNames` entries by tag.
    pub physical_names: BTreeMap<i32, String>,
}

impl MshImport {
    /// Distinct region ids of the volume elements.
    pub fn regions(&self) -> Vec<i32> {
        let mut r = self.mesh.material_ids().to_vec();
        r.sort_unstable();
        r.dedup();
        r
    }
}

struct RawElement {
    kind: u32,
    physical: i32,
    nodes: Vec<usize>,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if !l.is_empty() {
                return Ok((i + 1, l));
            }
        }
        Err(Error::MshParse { line: 0, msg: "unexpected end of file".into() })
    }

    fn expect(&mut self, tag: &str) -> Result<()> {
        let (line, l) = self.next()?;
        if l == tag {
            Ok(())
        } else {
            Err(Error::MshParse { line, msg: format!("expected {tag}, found '{l}'") })
        }
    }
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok()).ok_or_else(|| Error::MshParse { line, msg: format!("bad or missing {what}") })
}

/// Reads an MSH 2.2 ASCII file.
pub fn read_msh(path: impl AsRef<Path>) -> Result<MshImport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_msh(&text)
}

/// Parses MSH 2.2 ASCII text.
///
/// Triangles are volume elements unless the file contains tetrahedra, in
/// which case they must be boundary faces. Lines in 2D and triangles in 3D
/// that coincide with mesh faces carry their physical tag over as the
/// boundary tag; element physical tags become region ids.
pub fn parse_msh(text: &str) -> Result<MshImport> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    lines.expect("$MeshFormat")?;
    let (line, fmt) = lines.next()?;
    let mut toks = fmt.split_whitespace();
    let version = toks.next().unwrap_or("");
    if version != "2.2" {
        return Err(Error::UnsupportedMshVersion(version.to_string()));
    }
    let file_type: u32 = parse(toks.next(), line, "file type")?;
    if file_type != 0 {
        return Err(Error::UnsupportedMshVersion(format!("{version} binary")));
    }
    lines.expect("$EndMeshFormat")?;

    let mut physical_names = BTreeMap::new();
    let mut coords: Vec<[f64; 3]> = Vec::new();
    let mut node_index: HashMap<usize, usize> = HashMap::new();
    let mut raw: Vec<RawElement> = Vec::new();
    let mut file_elements = 0;
    let mut ignored = 0;
    let mut seen_nodes = false;
    let mut seen_elements = false;
    while let Ok((line, l)) = lines.next() {
        match l {
            "$PhysicalNames" => {
                let (line, l) = lines.next()?;
                let count: usize = parse(Some(l), line, "physical name count")?;
                for _ in 0..count {
                    let (line, l) = lines.next()?;
                    let mut t = l.splitn(3, char::is_whitespace);
                    let _dim: u32 = parse(t.next(), line, "physical dimension")?;
                    let tag: i32 = parse(t.next(), line, "physical tag")?;
                    let name = t.next().unwrap_or("").trim().trim_matches('"').to_string();
                    physical_names.insert(tag, name);
                }
                lines.expect("$EndPhysicalNames")?;
            }
            "$Nodes" => {
                let (line, l) = lines.next()?;
                let count: usize = parse(Some(l), line, "node count")?;
                coords.reserve(count);
                for _ in 0..count {
                    let (line, l) = lines.next()?;
                    let mut t = l.split_whitespace();
                    let id: usize = parse(t.next(), line, "node id")?;
                    let mut p = [0.0; 3];
                    for v in &mut p {
                        *v = parse(t.next(), line, "coordinate")?;
                    }
                    if node_index.insert(id, coords.len()).is_some() {
                        return Err(Error::MshParse { line, msg: format!("duplicate node id {id}") });
                    }
                    coords.push(p);
                }
                lines.expect("$EndNodes")?;
                seen_nodes = true;
            }
            "$Elements" => {
                let (line, l) = lines.next()?;
                file_elements = parse(Some(l), line, "element count")?;
                for _ in 0..file_elements {
                    let (line, l) = lines.next()?;
                    let mut t = l.split_whitespace();
                    let _id: usize = parse(t.next(), line, "element id")?;
                    let kind: u32 = parse(t.next(), line, "element type")?;
                    let ntags: usize = parse(t.next(), line, "tag count")?;
                    let mut tags = Vec::with_capacity(ntags);
                    for _ in 0..ntags {
                        tags.push(parse::<i32>(t.next(), line, "tag")?);
                    }
                    let arity = match kind {
                        LINE => 2,
                        TRIANGLE => 3,
                        TETRAHEDRON => 4,
                        _ => {
                            ignored += 1;
                            continue;
                        }
                    };
                    let mut nodes = Vec::with_capacity(arity);
                    for _ in 0..arity {
                        let id: usize = parse(t.next(), line, "element node")?;
                        let &n = node_index
                            .get(&id)
                            .ok_or_else(|| Error::MshParse { line, msg: format!("unknown node {id}") })?;
                        nodes.push(n);
                    }
                    raw.push(RawElement { kind, physical: tags.first().copied().unwrap_or(0), nodes });
                }
                lines.expect("$EndElements")?;
                seen_elements = true;
            }
            _ if l.starts_with('$') && !l.starts_with("$End") => {
                // Unknown section: skip to its end marker.
                let end = format!("$End{}", &l[1..]);
                loop {
                    let (_, s) = lines.next()?;
                    if s == end {
                        break;
                    }
                }
            }
            _ => return Err(Error::MshParse { line, msg: format!("unexpected '{l}'") }),
        }
    }
    if !seen_nodes || !seen_elements {
        return Err(Error::MshParse { line: 0, msg: "missing $Nodes or $Elements section".into() });
    }

    let dim = if raw.iter().any(|e| e.kind == TETRAHEDRON) { 3 } else { 2 };
    let (volume, face_kind) = if dim == 3 { (TETRAHEDRON, TRIANGLE) } else { (TRIANGLE, LINE) };

    // Keep only nodes used by volume elements, in file order.
    let mut used = vec![false; coords.len()];
    for e in raw.iter().filter(|e| e.kind == volume) {
        for &n in &e.nodes {
            used[n] = true;
        }
    }
    let mut renumber = vec![usize::MAX; coords.len()];
    let mut kept = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            renumber[i] = kept.len();
            kept.push(coords[i]);
        }
    }
    let orphan_nodes = coords.len() - kept.len();

    let mut elements = Vec::new();
    let mut material_ids = Vec::new();
    let mut reoriented = 0;
    let mut faces: Vec<(FaceKey, i32)> = Vec::new();
    for e in &raw {
        if e.kind == volume {
            let mut nodes: Vec<usize> = e.nodes.iter().map(|&n| renumber[n]).collect();
            let pts: Vec<[f64; 3]> = nodes.iter().map(|&n| kept[n]).collect();
            if simplex_measure(dim, &pts) < 0.0 {
                nodes.swap(0, 1);
                reoriented += 1;
            }
            elements.extend(nodes);
            material_ids.push(e.physical);
        } else if e.kind == face_kind {
            if e.nodes.iter().any(|&n| renumber[n] == usize::MAX) {
                if dim == 3 {
                    return Err(Error::MixedDimension);
                }
                ignored += 1;
                continue;
            }
            let nodes: Vec<usize> = e.nodes.iter().map(|&n| renumber[n]).collect();
            faces.push((FaceKey::new(&nodes), e.physical));
        } else {
            ignored += 1;
        }
    }
    if elements.is_empty() {
        return Err(Error::EmptyMesh);
    }

    // Tagged faces must be faces of the volume mesh. In 3D a triangle that
    // is not means the file mixes surface and volume meshes.
    let mut mesh_faces: Vec<FaceKey> = Vec::with_capacity(elements.len());
    for el in elements.chunks_exact(dim + 1) {
        for skip in 0..=dim {
            let f: Vec<usize> = el.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &n)| n).collect();
            mesh_faces.push(FaceKey::new(&f));
        }
    }
    mesh_faces.sort_unstable();
    mesh_faces.dedup();
    let mut boundary_tags = BTreeMap::new();
    for (key, tag) in faces {
        if mesh_faces.binary_search(&key).is_ok() {
            boundary_tags.insert(key, tag);
        } else if dim == 3 {
            return Err(Error::MixedDimension);
        } else {
            ignored += 1;
        }
    }

    let mesh = Mesh::new(dim, kept, elements, material_ids, boundary_tags)?;
    if ignored > 0 {
        log::warn!("MSH import ignored {ignored} element(s) of unsupported type or dimension");
    }
    Ok(MshImport {
        mesh,
        file_nodes: coords.len(),
        file_elements,
        ignored_elements: ignored,
        orphan_nodes,
        reoriented,
        physical_names,
    })
}
