use crate::error::{Error, Result};
use crate::fem::dofs::DofMap;
use crate::fem::element::{p2_gradients, p2_values, LOCAL_EDGES};
use crate::fem::quadrature::{gauss_legendre, QuadratureRule};
use crate::mesh::{BoundaryTag, Mesh};
use crate::properties::PropertyRatios;
use crate::solver::SolutionFields;

/// Whether wall fluxes carry the conductivity ratio `k_hnf/k_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NusseltWeighting {
    #[default]
    Conductivity,
    Unweighted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    /// Arc length along the wall, measured in outline order.
    pub s: f64,
    /// Heat flux entering the fluid per unit length.
    pub flux: f64,
    /// Quadrature weight (arc length units).
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NusseltReport {
    pub global_nu: f64,
    pub local_profile: Vec<ProfilePoint>,
    pub wall: BoundaryTag,
}

impl NusseltReport {
    /// Quadrature sum of the local profile.
    pub fn integrate_profile(&self) -> f64 {
        self.local_profile.iter().map(|p| p.flux * p.weight).sum()
    }
}

/// Heat entering the fluid through `wall`: `w ∫ ∇T·n_out ds` with one-sided
/// P2 gradient traces and 3-point Gauss quadrature per edge. Positive at the
/// hot wall when heat flows into the cavity.
pub fn global_nusselt(
    solution: &SolutionFields,
    mesh: &Mesh,
    dofs: &DofMap,
    ratios: &PropertyRatios,
    wall: BoundaryTag,
) -> Result<NusseltReport> {
    wall_flux(solution, mesh, dofs, ratios, wall, NusseltWeighting::Conductivity)
}

pub fn wall_flux(
    solution: &SolutionFields,
    mesh: &Mesh,
    dofs: &DofMap,
    ratios: &PropertyRatios,
    wall: BoundaryTag,
    weighting: NusseltWeighting,
) -> Result<NusseltReport> {
    if !mesh.has_tag(wall) {
        return Err(Error::MissingWall(wall.name().to_string()));
    }
    let k = match weighting {
        NusseltWeighting::Conductivity => ratios.conductivity_ratio,
        NusseltWeighting::Unweighted => 1.0,
    };
    let (gx, gw) = gauss_legendre(3);
    let mut profile = Vec::new();
    let mut s0 = 0.0;
    for (be, &(e, local)) in mesh.boundary_edges.iter().zip(&dofs.boundary_owner) {
        if be.tag != wall {
            continue;
        }
        let geom = dofs.geometry(e);
        let nodes = &dofs.element_nodes[e];
        let [a, b] = be.nodes;
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        let len = pa.distance(pb);
        let normal = [(pb.y - pa.y) / len, -(pb.x - pa.x) / len];
        let [la, lb] = LOCAL_EDGES[local];
        for (x, w) in gx.iter().zip(&gw) {
            let mut l = [0.0; 3];
            l[la] = 1.0 - x;
            l[lb] = *x;
            let grads = p2_gradients(l, &geom.grad_lambda);
            let (mut tx, mut ty) = (0.0, 0.0);
            for i in 0..6 {
                tx += solution.t[nodes[i]] * grads[i][0];
                ty += solution.t[nodes[i]] * grads[i][1];
            }
            profile.push(ProfilePoint {
                s: s0 + x * len,
                flux: k * (tx * normal[0] + ty * normal[1]),
                weight: w * len,
            });
        }
        s0 += len;
    }
    let global_nu = profile.iter().map(|p| p.flux * p.weight).sum();
    Ok(NusseltReport {
        global_nu,
        local_profile: profile,
        wall,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    pub hot_flux: f64,
    pub cold_flux: f64,
    /// `|hot + cold| / |hot|`
    pub imbalance: f64,
}

/// How the heat through a wall is evaluated for [`energy_balance_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxMethod {
    /// Gradient traces, as in [`global_nusselt`].
    #[default]
    Trace,
    /// See [`variational_wall_flux`].
    Variational,
}

/// Heat entering through the hot wall, through the cold wall (negative when
/// it leaves), and their relative mismatch, using gradient traces.
pub fn energy_balance(
    solution: &SolutionFields,
    mesh: &Mesh,
    dofs: &DofMap,
    ratios: &PropertyRatios,
) -> Result<EnergyBalance> {
    energy_balance_with(solution, mesh, dofs, ratios, FluxMethod::Trace)
}

pub fn energy_balance_with(
    solution: &SolutionFields,
    mesh: &Mesh,
    dofs: &DofMap,
    ratios: &PropertyRatios,
    method: FluxMethod,
) -> Result<EnergyBalance> {
    let flux = |wall| match method {
        FluxMethod::Trace => global_nusselt(solution, mesh, dofs, ratios, wall).map(|r| r.global_nu),
        FluxMethod::Variational => variational_wall_flux(solution, mesh, dofs, ratios, wall),
    };
    let hot = flux(BoundaryTag::HotWall)?;
    let cold = flux(BoundaryTag::ColdWall)?;
    Ok(EnergyBalance {
        hot_flux: hot,
        cold_flux: cold,
        imbalance: (hot + cold).abs() / hot.abs(),
    })
}

/// `true` when every element exceeds its predecessor.
pub fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Heat entering through `wall` recovered from the discrete energy equation:
/// its residual tested with the P2 basis functions of the wall's Dirichlet
/// nodes, scaled by `k/α`. Same sign convention as [`global_nusselt`].
///
/// Unlike the gradient trace this is exactly conservative up to the weak
/// divergence error, and converges faster under refinement.
pub fn variational_wall_flux(
    solution: &SolutionFields,
    mesh: &Mesh,
    dofs: &DofMap,
    ratios: &PropertyRatios,
    wall: BoundaryTag,
) -> Result<f64> {
    if !mesh.has_tag(wall) {
        return Err(Error::MissingWall(wall.name().to_string()));
    }
    let mut on_wall = vec![false; dofs.n_p2()];
    for (&(e, local), &tag) in dofs.boundary_owner.iter().zip(&dofs.boundary_tags) {
        if tag == wall {
            let [a, b] = LOCAL_EDGES[local];
            let n = &dofs.element_nodes[e];
            for i in [n[a], n[b], n[3 + local]] {
                on_wall[i] = true;
            }
        }
    }
    let rule = QuadratureRule::seven_point();
    let alpha = ratios.alpha_ratio;
    let mut total = 0.0;
    for (e, nodes) in dofs.element_nodes.iter().enumerate() {
        if !nodes.iter().any(|i| on_wall[*i]) {
            continue;
        }
        let geom = dofs.geometry(e);
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let wq = w * 2.0 * geom.area;
            let phi = p2_values(*l);
            let g = p2_gradients(*l, &geom.grad_lambda);
            let (mut u, mut v, mut tx, mut ty) = (0.0, 0.0, 0.0, 0.0);
            for i in 0..6 {
                u += solution.u[nodes[i]] * phi[i];
                v += solution.v[nodes[i]] * phi[i];
                tx += solution.t[nodes[i]] * g[i][0];
                ty += solution.t[nodes[i]] * g[i][1];
            }
            for i in 0..6 {
                if on_wall[nodes[i]] {
                    total += wq * (alpha * (tx * g[i][0] + ty * g[i][1]) + (u * tx + v * ty) * phi[i]);
                }
            }
        }
    }
    Ok(ratios.conductivity_ratio / alpha * total)
}
