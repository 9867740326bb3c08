//! Global operators of the weak formulation on the full (unreduced) P2/P1 node sets.
//!
//! Every element integral uses the 7-point degree-5 rule, which is exact for
//! all integrands here: the trilinear convective forms are products of three
//! quadratics with one derivative, i.e. degree 5.

use crate::fem::dofs::DofMap;
use crate::fem::element::{p2_gradients, p2_values};
use crate::fem::quadrature::QuadratureRule;
use crate::fem::sparse::SparseTriplets;
use crate::properties::PropertyRatios;

/// The constant operators of the formulation, indexed by P2 node (rows and
/// columns) or P1 vertex (rows of the divergence blocks).
#[derive(Debug, Clone)]
pub struct LinearForms {
    /// a₀ on one velocity component: ν ∫ ∇φⱼ·∇φᵢ with ν = (ρ_f/ρ_hnf)(μ_hnf/μ_f) Pr.
    pub viscous: SparseTriplets,
    /// b, x-part: (ρ_f/ρ_hnf) ∫ (∂φⱼ/∂x) qₖ.
    pub divergence_x: SparseTriplets,
    /// b, y-part: (ρ_f/ρ_hnf) ∫ (∂φⱼ/∂y) qₖ.
    pub divergence_y: SparseTriplets,
    /// a₂ restricted to the V equation: γ ∫ φⱼ φᵢ with γ = (ρβ)_hnf/(ρ_hnf β_f) Pr Ra.
    pub buoyancy: SparseTriplets,
    /// a₃: (α_hnf/α_f) ∫ ∇φⱼ·∇φᵢ.
    pub thermal_diffusion: SparseTriplets,
}

pub fn assemble_linear_forms(
    dofs: &DofMap,
    ratios: &PropertyRatios,
    prandtl: f64,
    rayleigh: f64,
) -> LinearForms {
    let n = dofs.n_p2();
    let np = dofs.n_pressure();
    let nu = ratios.viscous_coefficient(prandtl);
    let gamma = ratios.buoyancy_coefficient(prandtl, rayleigh);
    let alpha = ratios.alpha_ratio;
    let rho = ratios.rho_ratio;

    let mut forms = LinearForms {
        viscous: SparseTriplets::new(n, n),
        divergence_x: SparseTriplets::new(np, n),
        divergence_y: SparseTriplets::new(np, n),
        buoyancy: SparseTriplets::new(n, n),
        thermal_diffusion: SparseTriplets::new(n, n),
    };
    let rule = QuadratureRule::seven_point();
    for e in 0..dofs.n_elements() {
        let geom = dofs.geometry(e);
        let nodes = &dofs.element_nodes[e];
        let mut stiff = [[0.0; 6]; 6];
        let mut mass = [[0.0; 6]; 6];
        let mut dx = [[0.0; 6]; 3];
        let mut dy = [[0.0; 6]; 3];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let wq = w * 2.0 * geom.area;
            let phi = p2_values(*l);
            let dphi = p2_gradients(*l, &geom.grad_lambda);
            for i in 0..6 {
                for j in 0..6 {
                    stiff[i][j] += wq * (dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1]);
                    mass[i][j] += wq * phi[i] * phi[j];
                }
            }
            for k in 0..3 {
                for j in 0..6 {
                    dx[k][j] += wq * l[k] * dphi[j][0];
                    dy[k][j] += wq * l[k] * dphi[j][1];
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                forms.viscous.push(nodes[i], nodes[j], nu * stiff[i][j]);
                forms.thermal_diffusion.push(nodes[i], nodes[j], alpha * stiff[i][j]);
                forms.buoyancy.push(nodes[i], nodes[j], gamma * mass[i][j]);
            }
        }
        for k in 0..3 {
            for j in 0..6 {
                forms.divergence_x.push(nodes[k], nodes[j], rho * dx[k][j]);
                forms.divergence_y.push(nodes[k], nodes[j], rho * dy[k][j]);
            }
        }
    }
    forms
}

/// Scalar advection operator `Aᵢⱼ = ∫ (w·∇φⱼ) φᵢ` for a P2 advecting field `w = (wu, wv)`.
fn advection_operator(wu: &[f64], wv: &[f64], dofs: &DofMap) -> SparseTriplets {
    let n = dofs.n_p2();
    assert_eq!(wu.len(), n, "advecting U field has wrong length");
    assert_eq!(wv.len(), n, "advecting V field has wrong length");
    let mut out = SparseTriplets::new(n, n);
    let rule = QuadratureRule::seven_point();
    for e in 0..dofs.n_elements() {
        let geom = dofs.geometry(e);
        let nodes = &dofs.element_nodes[e];
        let mut local = [[0.0; 6]; 6];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let wq = w * 2.0 * geom.area;
            let phi = p2_values(*l);
            let dphi = p2_gradients(*l, &geom.grad_lambda);
            let (mut a, mut b) = (0.0, 0.0);
            for i in 0..6 {
                a += wu[nodes[i]] * phi[i];
                b += wv[nodes[i]] * phi[i];
            }
            for i in 0..6 {
                for j in 0..6 {
                    local[i][j] += wq * (a * dphi[j][0] + b * dphi[j][1]) * phi[i];
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                out.push(nodes[i], nodes[j], local[i][j]);
            }
        }
    }
    out
}

/// `u ↦ a₁(w; u, ·)` on `(U, V)` stacked as `[U nodes | V nodes]`; the operator
/// is block diagonal with the same scalar advection block for each component.
pub fn assemble_convection(wu: &[f64], wv: &[f64], dofs: &DofMap) -> SparseTriplets {
    let scalar = advection_operator(wu, wv, dofs);
    let n = dofs.n_p2();
    let mut out = SparseTriplets::new(2 * n, 2 * n);
    out.entries.reserve(2 * scalar.entries.len());
    for &(r, c, v) in &scalar.entries {
        out.push(r, c, v);
        out.push(n + r, n + c, v);
    }
    out
}

/// `T ↦ a₄(w; T, ·)` on the P2 temperature space.
pub fn assemble_thermal_advection(wu: &[f64], wv: &[f64], dofs: &DofMap) -> SparseTriplets {
    advection_operator(wu, wv, dofs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, BoundaryEdge, BoundaryTag, GeometrySpec, Mesh, Point2};

    fn reference_triangle() -> Mesh {
        Mesh {
            nodes: vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
            triangles: vec![[0, 1, 2]],
            boundary_edges: vec![
                BoundaryEdge { nodes: [0, 1], tag: BoundaryTag::Adiabatic },
                BoundaryEdge { nodes: [1, 2], tag: BoundaryTag::ColdWall },
                BoundaryEdge { nodes: [2, 0], tag: BoundaryTag::HotWall },
            ],
            resolution: 1,
        }
    }

    /// Hand-integrated P2 stiffness on the unit reference triangle, local order
    /// (v0, v1, v2, m01, m12, m20), entries times 6.
    const REFERENCE_STIFFNESS_X6: [[f64; 6]; 6] = [
        [6.0, 1.0, 1.0, -4.0, 0.0, -4.0],
        [1.0, 3.0, 0.0, -4.0, 0.0, 0.0],
        [1.0, 0.0, 3.0, 0.0, 0.0, -4.0],
        [-4.0, -4.0, 0.0, 16.0, -8.0, 0.0],
        [0.0, 0.0, 0.0, -8.0, 16.0, -8.0],
        [-4.0, 0.0, -4.0, 0.0, -8.0, 16.0],
    ];

    #[test]
    fn reference_stiffness_matches_hand_integration() {
        let m = reference_triangle();
        let d = DofMap::new(&m);
        let forms = assemble_linear_forms(&d, &PropertyRatios::unity(), 1.0, 0.0);
        let k = forms.viscous.to_dense();
        // dof ordering: vertices 0..3, then sorted edges (0,1), (0,2), (1,2)
        let local_to_global = [0, 1, 2, 3, 5, 4];
        for i in 0..6 {
            for j in 0..6 {
                let want = REFERENCE_STIFFNESS_X6[i][j] / 6.0;
                let got = k[local_to_global[i]][local_to_global[j]];
                assert!((got - want).abs() < 1e-12, "({i},{j}) {got} vs {want}");
            }
        }
    }

    #[test]
    fn divergence_of_constant_field_vanishes() {
        let m = build_mesh(&GeometrySpec::square(), 3).unwrap();
        let d = DofMap::new(&m);
        let forms = assemble_linear_forms(&d, &PropertyRatios::unity(), 1.0, 1.0);
        let c = vec![0.7; d.n_p2()];
        for y in [forms.divergence_x.apply(&c), forms.divergence_y.apply(&c)] {
            assert!(y.iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn buoyancy_row_sums_give_area() {
        let m = build_mesh(&GeometrySpec::l_shape(), 8).unwrap();
        let d = DofMap::new(&m);
        let ratios = PropertyRatios::unity();
        let (pr, ra) = (2.0, 50.0);
        let forms = assemble_linear_forms(&d, &ratios, pr, ra);
        let rows = forms.buoyancy.apply(&vec![1.0; d.n_p2()]);
        let coef = ratios.buoyancy_coefficient(pr, ra);
        let total: f64 = rows.iter().sum();
        assert!((total - coef * GeometrySpec::l_shape().area()).abs() < 1e-10 * coef);
    }

    #[test]
    fn zero_wind_gives_zero_operator() {
        let m = build_mesh(&GeometrySpec::square(), 2).unwrap();
        let d = DofMap::new(&m);
        let z = vec![0.0; d.n_p2()];
        assert_eq!(assemble_convection(&z, &z, &d).max_abs(), 0.0);
        assert_eq!(assemble_thermal_advection(&z, &z, &d).max_abs(), 0.0);
    }

    #[test]
    fn constant_temperature_not_advected() {
        let m = build_mesh(&GeometrySpec::h_shape(), 16).unwrap();
        let d = DofMap::new(&m);
        let wu: Vec<f64> = d.node_points.iter().map(|p| p.y * p.y - p.x).collect();
        let wv: Vec<f64> = d.node_points.iter().map(|p| p.x * p.y).collect();
        let a = assemble_thermal_advection(&wu, &wv, &d);
        let y = a.apply(&vec![3.0; d.n_p2()]);
        assert!(y.iter().all(|v| v.abs() < 1e-13));
    }

    /// `∫ (∂φⱼ/∂x) φᵢ` and `∫ φᵢ φⱼ` on the reference triangle, times 360,
    /// integrated symbolically.
    const REFERENCE_CONVECTION_X360: [[f64; 6]; 6] = [
        [-24.0, -12.0, 0.0, 36.0, -12.0, 12.0],
        [12.0, 24.0, 0.0, -36.0, -12.0, 12.0],
        [12.0, -12.0, 0.0, 0.0, 24.0, -24.0],
        [-36.0, 36.0, 0.0, 0.0, 48.0, -48.0],
        [12.0, 36.0, 0.0, -48.0, 96.0, -96.0],
        [-36.0, -12.0, 0.0, 48.0, 96.0, -96.0],
    ];
    const REFERENCE_MASS_X360: [[f64; 6]; 6] = [
        [6.0, -1.0, -1.0, 0.0, -4.0, 0.0],
        [-1.0, 6.0, -1.0, 0.0, 0.0, -4.0],
        [-1.0, -1.0, 6.0, -4.0, 0.0, 0.0],
        [0.0, 0.0, -4.0, 32.0, 16.0, 16.0],
        [-4.0, 0.0, 0.0, 16.0, 32.0, 16.0],
        [0.0, -4.0, 0.0, 16.0, 16.0, 32.0],
    ];

    fn assert_local(global: &[Vec<f64>], want_x360: &[[f64; 6]; 6], offset: usize) {
        let local_to_global = [0, 1, 2, 3, 5, 4];
        for i in 0..6 {
            for j in 0..6 {
                let want = want_x360[i][j] / 360.0;
                let got = global[offset + local_to_global[i]][offset + local_to_global[j]];
                assert!((got - want).abs() < 1e-12, "({i},{j}) {got} vs {want}");
            }
        }
    }

    #[test]
    fn reference_convection_matches_symbolic() {
        let m = reference_triangle();
        let d = DofMap::new(&m);
        let one = vec![1.0; d.n_p2()];
        let zero = vec![0.0; d.n_p2()];
        assert_local(&assemble_thermal_advection(&one, &zero, &d).to_dense(), &REFERENCE_CONVECTION_X360, 0);
        let both = assemble_convection(&one, &zero, &d).to_dense();
        assert_local(&both, &REFERENCE_CONVECTION_X360, 0);
        assert_local(&both, &REFERENCE_CONVECTION_X360, d.n_p2());
    }

    #[test]
    fn reference_mass_matches_symbolic() {
        let m = reference_triangle();
        let d = DofMap::new(&m);
        let forms = assemble_linear_forms(&d, &PropertyRatios::unity(), 1.0, 1.0);
        assert_local(&forms.buoyancy.to_dense(), &REFERENCE_MASS_X360, 0);
    }
}
