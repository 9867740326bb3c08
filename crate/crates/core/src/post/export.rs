use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fem::dofs::DofMap;
use crate::mesh::Mesh;
use crate::post::stream::StreamFunctionField;
use crate::solver::SolutionFields;

/// VTK cell type of the 6-node quadratic triangle.
const VTK_QUADRATIC_TRIANGLE: u8 = 22;

/// Nodal pressure on the P2 node set: vertex values, averaged at midpoints.
pub fn pressure_at_p2_nodes(solution: &SolutionFields, dofs: &DofMap) -> Vec<f64> {
    let mut out = solution.p.clone();
    out.extend(dofs.edges.iter().map(|[a, b]| 0.5 * (solution.p[*a] + solution.p[*b])));
    out
}

/// Formats with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_fields_csv<W: Write>(
    mut w: W,
    solution: &SolutionFields,
    dofs: &DofMap,
    stream: &StreamFunctionField,
) -> std::io::Result<()> {
    let p = pressure_at_p2_nodes(solution, dofs);
    writeln!(w, "x,y,U,V,T,p,psi")?;
    for (i, pt) in dofs.node_points.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt17(pt.x),
            fmt17(pt.y),
            fmt17(solution.u[i]),
            fmt17(solution.v[i]),
            fmt17(solution.t[i]),
            fmt17(p[i]),
            fmt17(stream.psi[i])
        )?;
    }
    Ok(())
}

/// Legacy ASCII VTK with the P2 nodes as points and quadratic triangle cells.
pub fn write_fields_vtk<W: Write>(
    mut w: W,
    solution: &SolutionFields,
    dofs: &DofMap,
    stream: &StreamFunctionField,
) -> std::io::Result<()> {
    let n = dofs.n_p2();
    let ne = dofs.n_elements();
    writeln!(w, "# vtk DataFile Version 2.0")?;
    writeln!(w, "hybrid nanofluid cavity solution")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {n} double")?;
    for p in &dofs.node_points {
        writeln!(w, "{} {} 0", fmt17(p.x), fmt17(p.y))?;
    }
    writeln!(w, "CELLS {ne} {}", ne * 7)?;
    for nodes in &dofs.element_nodes {
        let ids: Vec<String> = nodes.iter().map(|i| i.to_string()).collect();
        writeln!(w, "6 {}", ids.join(" "))?;
    }
    writeln!(w, "CELL_TYPES {ne}")?;
    for _ in 0..ne {
        writeln!(w, "{VTK_QUADRATIC_TRIANGLE}")?;
    }
    writeln!(w, "POINT_DATA {n}")?;
    let p = pressure_at_p2_nodes(solution, dofs);
    let scalars: [(&str, &[f64]); 5] = [
        ("U", &solution.u),
        ("V", &solution.v),
        ("T", &solution.t),
        ("p", &p),
        ("psi", &stream.psi),
    ];
    for (name, values) in scalars {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in values {
            writeln!(w, "{}", fmt17(*v))?;
        }
    }
    writeln!(w, "VECTORS velocity double")?;
    for i in 0..n {
        writeln!(w, "{} {} 0", fmt17(solution.u[i]), fmt17(solution.v[i]))?;
    }
    Ok(())
}

/// Writes `fields.csv` and `fields.vtk` under `dir`; returns both paths.
pub fn export_fields(
    solution: &SolutionFields,
    mesh: &Mesh,
    dofs: &DofMap,
    stream: &StreamFunctionField,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    debug_assert_eq!(mesh.nodes.len(), dofs.n_vertices);
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join("fields.csv");
    let vtk = dir.join("fields.vtk");
    write_file(&csv, |w| write_fields_csv(w, solution, dofs, stream))?;
    write_file(&vtk, |w| write_fields_vtk(w, solution, dofs, stream))?;
    Ok(vec![csv, vtk])
}

pub fn write_file(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
