//! Legacy ASCII VTK output of a mesh with per-level agglomerate ids.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

const VTK_TRIANGLE: u8 = 5;
const VTK_TETRA: u8 = 10;

/// Checks that every level labels each fine element with an id in a dense
/// range. `usize::MAX` marks an unassigned element.
fn validate(mesh: &Mesh, levels: &[Vec<usize>]) -> Result<()> {
    for (k, ids) in levels.iter().enumerate() {
        if ids.len() != mesh.num_elements() {
            return Err(Error::DimensionMismatch(format!(
                "level {k} labels {} elements, mesh has {}",
                ids.len(),
                mesh.num_elements()
            )));
        }
        let unassigned = ids.iter().filter(|&&a| a == usize::MAX).count();
        if unassigned > 0 {
            return Err(Error::Unassigned { level: k, count: unassigned });
        }
        let count = ids.iter().max().map_or(0, |&m| m + 1);
        let mut used = vec![false; count];
        for &a in ids {
            used[a] = true;
        }
        if let Some(gap) = used.iter().position(|&u| !u) {
            return Err(Error::Config(format!("level {k} agglomerate ids are not dense (id {gap} unused)")));
        }
    }
    Ok(())
}

/// Writes `mesh` with one `agglomerate_L<k>` cell array per entry of
/// `levels`, each mapping fine elements to their level-`k` agglomerate.
pub fn write_vtk(path: impl AsRef<Path>, mesh: &Mesh, levels: &[Vec<usize>]) -> Result<()> {
    let path = path.as_ref();
    validate(mesh, levels)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_vtk_to(&mut w, mesh, levels).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Writes the VTK text to any writer; `levels` must already be valid.
pub fn write_vtk_to(w: &mut impl Write, mesh: &Mesh, levels: &[Vec<usize>]) -> std::io::Result<()> {
    let nv = mesh.nodes_per_element();
    let ne = mesh.num_elements();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "agglomeration levels")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.num_nodes())?;
    for p in mesh.coords() {
        writeln!(w, "{} {} {}", p[0], p[1], p[2])?;
    }
    writeln!(w, "CELLS {} {}", ne, ne * (nv + 1))?;
    for el in mesh.elements() {
        write!(w, "{nv}")?;
        for n in el {
            write!(w, " {n}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {ne}")?;
    let kind = if mesh.dim() == 2 { VTK_TRIANGLE } else { VTK_TETRA };
    for _ in 0..ne {
        writeln!(w, "{kind}")?;
    }
    writeln!(w, "CELL_DATA {ne}")?;
    writeln!(w, "SCALARS region int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for r in mesh.material_ids() {
        writeln!(w, "{r}")?;
    }
    for (k, ids) in levels.iter().enumerate() {
        writeln!(w, "SCALARS agglomerate_L{k} int 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for a in ids {
            writeln!(w, "{a}")?;
        }
    }
    Ok(())
}
