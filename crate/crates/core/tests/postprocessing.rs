use hnf_cavity::mesh::{build_mesh, BoundaryEdge, GeometrySpec, Mesh, Point2};
use hnf_cavity::post::{
    energy_balance, energy_balance_with, export_fields, global_nusselt, stream_function, variational_wall_flux,
    wall_flux, write_fields_csv, write_fields_vtk, FluxMethod, NusseltWeighting,
};
use hnf_cavity::properties::{compute_ratios, default_materials, MixtureSpec};
use hnf_cavity::solver::{SolutionFields, SolverConfig};
use hnf_cavity::{solve_stationary, BoundaryTag, DofMap, Error, PropertyRatios};

fn solved(geometry: GeometrySpec, n: usize, ratios: &PropertyRatios, pr: f64, ra: f64) -> (Mesh, DofMap, SolutionFields) {
    let mesh = build_mesh(&geometry, n).unwrap();
    let dofs = DofMap::new(&mesh);
    let (s, _) = solve_stationary(&mesh, &dofs, ratios, pr, ra, &SolverConfig::default()).unwrap();
    (mesh, dofs, s)
}

#[test]
fn conduction_gives_unit_nusselt() {
    let r = PropertyRatios::unity();
    let (mesh, dofs, s) = solved(GeometrySpec::square(), 6, &r, 0.71, 0.0);
    let nu = global_nusselt(&s, &mesh, &dofs, &r, BoundaryTag::HotWall).unwrap();
    assert!((nu.global_nu - 1.0).abs() < 1e-10);
    assert!(nu.local_profile.iter().all(|p| (p.flux - 1.0).abs() < 1e-10));
    let v = variational_wall_flux(&s, &mesh, &dofs, &r, BoundaryTag::HotWall).unwrap();
    assert!((v - 1.0).abs() < 1e-10);
    let eb = energy_balance(&s, &mesh, &dofs, &r).unwrap();
    assert!(eb.imbalance <= 1e-10);
    assert!((eb.cold_flux + 1.0).abs() < 1e-10);
}

#[test]
fn conductivity_weighting_scales_the_flux() {
    let r = compute_ratios(&MixtureSpec::new(default_materials().unwrap(), 0.01)).unwrap();
    let (mesh, dofs, s) = solved(GeometrySpec::square(), 4, &r, 0.71, 0.0);
    let w = wall_flux(&s, &mesh, &dofs, &r, BoundaryTag::HotWall, NusseltWeighting::Conductivity).unwrap();
    let u = wall_flux(&s, &mesh, &dofs, &r, BoundaryTag::HotWall, NusseltWeighting::Unweighted).unwrap();
    assert!((u.global_nu - 1.0).abs() < 1e-10);
    assert!((w.global_nu - r.conductivity_ratio).abs() < 1e-10);
}

#[test]
fn profile_integrates_to_global_value() {
    let r = PropertyRatios::unity();
    let (mesh, dofs, s) = solved(GeometrySpec::l_shape(), 8, &r, 1.0, 1e4);
    let nu = global_nusselt(&s, &mesh, &dofs, &r, BoundaryTag::HotWall).unwrap();
    assert!((nu.integrate_profile() - nu.global_nu).abs() <= 1e-10 * nu.global_nu.abs());
    assert!(nu.global_nu > 0.0);
    assert!(nu.local_profile.windows(2).all(|w| w[1].s > w[0].s));
    let heated = GeometrySpec::l_shape().heated_length();
    assert!((nu.local_profile.iter().map(|p| p.weight).sum::<f64>() - heated).abs() < 1e-12);
}

#[test]
fn missing_wall_is_an_error() {
    let mesh = Mesh {
        nodes: vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
        triangles: vec![[0, 1, 2]],
        boundary_edges: vec![
            BoundaryEdge { nodes: [0, 1], tag: BoundaryTag::Adiabatic },
            BoundaryEdge { nodes: [1, 2], tag: BoundaryTag::ColdWall },
            BoundaryEdge { nodes: [2, 0], tag: BoundaryTag::Adiabatic },
        ],
        resolution: 1,
    };
    let dofs = DofMap::new(&mesh);
    let s = SolutionFields::initial(&dofs);
    let r = PropertyRatios::unity();
    assert!(matches!(
        global_nusselt(&s, &mesh, &dofs, &r, BoundaryTag::HotWall),
        Err(Error::MissingWall(_))
    ));
    assert!(variational_wall_flux(&s, &mesh, &dofs, &r, BoundaryTag::HotWall).is_err());
}

#[test]
fn unconverged_state_has_larger_imbalance() {
    let r = PropertyRatios::unity();
    let mesh = build_mesh(&GeometrySpec::l_shape(), 8).unwrap();
    let dofs = DofMap::new(&mesh);
    let (good, _) = solve_stationary(&mesh, &dofs, &r, 1.0, 1e4, &SolverConfig::default()).unwrap();
    let one_step = SolverConfig {
        max_newton: 1,
        max_picard: 0,
        continuation: vec![1e4],
        ..Default::default()
    };
    let bad = match solve_stationary(&mesh, &dofs, &r, 1.0, 1e4, &one_step) {
        Err(Error::NonConvergence { fields, .. }) => *fields,
        other => panic!("expected non-convergence, got {:?}", other.map(|x| x.1)),
    };
    for method in [FluxMethod::Trace, FluxMethod::Variational] {
        let g = energy_balance_with(&good, &mesh, &dofs, &r, method).unwrap().imbalance;
        let b = energy_balance_with(&bad, &mesh, &dofs, &r, method).unwrap().imbalance;
        assert!(b > g, "{method:?}: unconverged {b:e} vs converged {g:e}");
    }
}

#[test]
fn stream_function_properties() {
    let r = PropertyRatios::unity();
    let mesh = build_mesh(&GeometrySpec::square(), 4).unwrap();
    let dofs = DofMap::new(&mesh);
    let rest = stream_function(&SolutionFields::initial(&dofs), &dofs).unwrap();
    assert!(rest.psi.iter().all(|p| *p == 0.0));
    assert_eq!((rest.psi_min, rest.psi_max), (0.0, 0.0));

    let (mesh, dofs, s) = solved(GeometrySpec::square(), 8, &r, 0.71, 1e3);
    let _ = mesh;
    let sf = stream_function(&s, &dofs).unwrap();
    for (i, d) in dofs.velocity_dirichlet.iter().enumerate() {
        if *d {
            assert_eq!(sf.psi[i], 0.0);
        }
    }
    assert!(sf.psi_min <= 0.0 && 0.0 <= sf.psi_max);
    // a hot left wall drives a clockwise cell, which is positive
    assert!(sf.psi_max > 1.0 && sf.psi_min > -1e-6);
}

/// Benchmark square cavity at Ra = 1e3, Pr = 0.71: Nu = 1.118 and
/// ψ_max = 1.174 (de Vahl Davis).
#[test]
fn square_cavity_benchmark() {
    let r = PropertyRatios::unity();
    let (mesh, dofs, s) = solved(GeometrySpec::square(), 24, &r, 0.71, 1e3);
    let nu = global_nusselt(&s, &mesh, &dofs, &r, BoundaryTag::HotWall).unwrap().global_nu;
    let sf = stream_function(&s, &dofs).unwrap();
    assert!((nu - 1.118).abs() < 0.005, "Nu = {nu}");
    assert!((sf.psi_max - 1.174).abs() < 0.01, "psi_max = {}", sf.psi_max);
}

#[test]
fn csv_round_trip_is_exact() {
    let r = PropertyRatios::unity();
    let (_, dofs, s) = solved(GeometrySpec::square(), 4, &r, 0.71, 1e3);
    let sf = stream_function(&s, &dofs).unwrap();
    let mut buf = Vec::new();
    write_fields_csv(&mut buf, &s, &dofs, &sf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,U,V,T,p,psi"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), dofs.n_p2());
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], dofs.node_points[i].x);
        assert_eq!(row[2], s.u[i]);
        assert_eq!(row[3], s.v[i]);
        assert_eq!(row[4], s.t[i]);
        assert_eq!(row[6], sf.psi[i]);
        if i < dofs.n_vertices {
            assert_eq!(row[5], s.p[i]);
        }
    }
}

#[test]
fn vtk_layout() {
    let r = PropertyRatios::unity();
    let (mesh, dofs, s) = solved(GeometrySpec::h_shape(), 16, &r, 1.0, 1e2);
    let sf = stream_function(&s, &dofs).unwrap();
    let mut buf = Vec::new();
    write_fields_vtk(&mut buf, &s, &dofs, &sf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("# vtk DataFile Version 2.0\n"));
    assert!(text.contains("DATASET UNSTRUCTURED_GRID"));
    assert!(text.contains(&format!("POINTS {} double", dofs.n_p2())));
    assert!(text.contains(&format!("CELLS {} {}", mesh.triangles.len(), 7 * mesh.triangles.len())));
    let arrays = text
        .lines()
        .filter(|l| l.starts_with("SCALARS ") || l.starts_with("VECTORS "))
        .count();
    assert_eq!(arrays, 6);
    let cell_types: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.starts_with("CELL_TYPES"))
        .skip(1)
        .take(mesh.triangles.len())
        .collect();
    assert!(cell_types.iter().all(|l| *l == "22"));
}

#[test]
fn export_writes_both_files() {
    let r = PropertyRatios::unity();
    let (mesh, dofs, s) = solved(GeometrySpec::square(), 3, &r, 0.71, 10.0);
    let sf = stream_function(&s, &dofs).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = export_fields(&s, &mesh, &dofs, &sf, &dir.path().join("nested")).unwrap();
    assert_eq!(files.len(), 2);
    let csv = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(csv.lines().count(), dofs.n_p2() + 1);
    assert!(!csv.contains('\r'));
    assert!(files[1].exists());
}
