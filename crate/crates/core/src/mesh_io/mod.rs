//! Mesh input (gmsh MSH 2.2) and result output (VTK, CSV, JSON).

mod msh;
mod report;
mod vtk;

pub use msh::{parse_msh, read_msh, MshImport};
pub use report::{read_sweep_csv, write_report_json, write_sweep_csv, write_sweep_csv_to, SweepRecord};
pub use vtk::{write_vtk, write_vtk_to};
