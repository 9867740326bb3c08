//! Python bindings: run a cavity case, build meshes, evaluate mixture
//! properties and run manufactured-solution studies.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hnf_cavity::bench::{run_case as run_case_rs, CaseConfig};
use hnf_cavity::mesh::{build_mesh as build_mesh_rs, validate_mesh, BoundaryTag, GeometrySpec, Shape};
use hnf_cavity::mms::{CaseKind, ManufacturedCase, MmsStudy};
use hnf_cavity::properties::{compute_ratios as compute_ratios_rs, default_materials, MixtureSpec};
use hnf_cavity::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::NonConvergence { .. }
        | Error::StudyAborted { .. }
        | Error::SingularLinearSystem(_)
        | Error::DimensionMismatch(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn geometry(shape: &str, heater_extent: f64) -> PyResult<GeometrySpec> {
    let shape: Shape = shape.parse().map_err(to_py)?;
    Ok(GeometrySpec::of_shape(shape).with_heater_extent(heater_extent))
}

/// Solves one case and returns its scalar diagnostics. Artifacts are
/// written under `out` when given.
#[pyfunction]
#[pyo3(signature = (shape="square", grid=32, pr=0.71, ra=1e3, phi=0.0, heater_extent=1.0, out=None))]
#[allow(clippy::too_many_arguments)]
fn run_case<'py>(
    py: Python<'py>,
    shape: &str,
    grid: usize,
    pr: f64,
    ra: f64,
    phi: f64,
    heater_extent: f64,
    out: Option<PathBuf>,
) -> PyResult<Bound<'py, PyDict>> {
    let config = CaseConfig::new(geometry(shape, heater_extent)?, grid, pr, ra, phi);
    let o = py.detach(|| run_case_rs(&config, out.as_deref())).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("label", &o.label)?;
    d.set_item("nu", o.nu)?;
    d.set_item("nu_unweighted", o.nu_unweighted)?;
    d.set_item("nu_variational", o.nu_variational)?;
    d.set_item("psi_max", o.psi_max)?;
    d.set_item("psi_min", o.psi_min)?;
    d.set_item("imbalance", o.imbalance)?;
    d.set_item("iterations", o.iterations)?;
    d.set_item("converged", o.converged)?;
    d.set_item("summary", o.summary_line())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (shape="square", grid=32, heater_extent=1.0))]
fn build_mesh<'py>(py: Python<'py>, shape: &str, grid: usize, heater_extent: f64) -> PyResult<Bound<'py, PyDict>> {
    let spec = geometry(shape, heater_extent)?;
    let mesh = build_mesh_rs(&spec, grid).map_err(to_py)?;
    let count = |t: BoundaryTag| mesh.boundary_edges.iter().filter(|e| e.tag == t).count();
    let d = PyDict::new(py);
    d.set_item("nodes", mesh.nodes.len())?;
    d.set_item("triangles", mesh.triangles.len())?;
    d.set_item("hot_edges", count(BoundaryTag::HotWall))?;
    d.set_item("cold_edges", count(BoundaryTag::ColdWall))?;
    d.set_item("adiabatic_edges", count(BoundaryTag::Adiabatic))?;
    d.set_item("area", mesh.total_area())?;
    d.set_item("valid", validate_mesh(&mesh).all_passed())?;
    d.set_item("coordinates", mesh.nodes.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>())?;
    d.set_item("connectivity", mesh.triangles.clone())?;
    Ok(d)
}

/// Property ratios of the bundled hybrid mixture at total volume fraction `phi`.
#[pyfunction]
#[pyo3(signature = (phi, split=0.5))]
fn compute_ratios(py: Python<'_>, phi: f64, split: f64) -> PyResult<Bound<'_, PyDict>> {
    let materials = default_materials().map_err(to_py)?;
    let r = compute_ratios_rs(&MixtureSpec::new(materials, phi).with_split(split)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("rho_ratio", r.rho_ratio)?;
    d.set_item("mu_ratio", r.mu_ratio)?;
    d.set_item("rhobeta_ratio", r.rhobeta_ratio)?;
    d.set_item("alpha_ratio", r.alpha_ratio)?;
    d.set_item("conductivity_ratio", r.conductivity_ratio)?;
    Ok(d)
}

/// Refinement study on the unit square; returns errors per level and fitted rates.
#[pyfunction]
#[pyo3(signature = (case="trigonometric", levels=3, pr=1.0, ra=1e2))]
fn mms_study<'py>(py: Python<'py>, case: &str, levels: usize, pr: f64, ra: f64) -> PyResult<Bound<'py, PyDict>> {
    let kind = match case {
        "zero" => CaseKind::Zero,
        "polynomial" => CaseKind::Polynomial,
        "trigonometric" => CaseKind::Trigonometric,
        _ => return Err(PyValueError::new_err(format!("unknown manufactured case `{case}`"))),
    };
    let report = py
        .detach(|| MmsStudy::new(levels, pr, ra).run(&ManufacturedCase { kind }))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("h", report.h.clone())?;
    d.set_item("err_u_h1", report.err_u_h1.clone())?;
    d.set_item("err_t_h1", report.err_t_h1.clone())?;
    d.set_item("err_p_l2", report.err_p_l2.clone())?;
    d.set_item("rates", report.rates())?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "hnf_cavity")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run_case, m)?)?;
    m.add_function(wrap_pyfunction!(build_mesh, m)?)?;
    m.add_function(wrap_pyfunction!(compute_ratios, m)?)?;
    m.add_function(wrap_pyfunction!(mms_study, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
