use crate::error::Result;
use crate::fem::dofs::DofMap;
use crate::fem::element::{p2_gradients, p2_values};
use crate::fem::quadrature::QuadratureRule;
use crate::fem::sparse::SparseTriplets;
use crate::solver::{LinearSolver, SolutionFields};

#[derive(Debug, Clone, PartialEq)]
pub struct StreamFunctionField {
    pub psi: Vec<f64>,
    pub psi_max: f64,
    pub psi_min: f64,
}

/// P2 stream function with `ψ = 0` on the boundary, normalized so that
/// `U = −∂ψ/∂y`, `V = ∂ψ/∂x`; a clockwise cell is positive.
///
/// Solves `∫ ∇ψ·∇θ = −∫ ω θ` with the vorticity `ω = ∂V/∂x − ∂U/∂y` taken
/// directly from the velocity gradients at the quadrature points.
pub fn stream_function(solution: &SolutionFields, dofs: &DofMap) -> Result<StreamFunctionField> {
    let n = dofs.n_velocity_free;
    let mut psi = vec![0.0; dofs.n_p2()];
    if n == 0 {
        return Ok(StreamFunctionField {
            psi,
            psi_max: 0.0,
            psi_min: 0.0,
        });
    }
    let rule = QuadratureRule::seven_point();
    let mut k = SparseTriplets::new(n, n);
    let mut rhs = vec![0.0; n];
    for e in 0..dofs.n_elements() {
        let geom = dofs.geometry(e);
        let nodes = &dofs.element_nodes[e];
        let free: [Option<usize>; 6] = std::array::from_fn(|i| dofs.velocity_free[nodes[i]]);
        let mut local = [[0.0; 6]; 6];
        let mut load = [0.0; 6];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let wq = w * 2.0 * geom.area;
            let phi = p2_values(*l);
            let dphi = p2_gradients(*l, &geom.grad_lambda);
            let mut omega = 0.0;
            for i in 0..6 {
                omega += solution.v[nodes[i]] * dphi[i][0] - solution.u[nodes[i]] * dphi[i][1];
            }
            for i in 0..6 {
                load[i] -= wq * omega * phi[i];
                for j in 0..6 {
                    local[i][j] += wq * (dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1]);
                }
            }
        }
        for i in 0..6 {
            let Some(fi) = free[i] else { continue };
            rhs[fi] += load[i];
            for j in 0..6 {
                if let Some(fj) = free[j] {
                    k.push(fi, fj, local[i][j]);
                }
            }
        }
    }
    let x = LinearSolver::new().solve(&k.to_csc(), &rhs)?;
    for (node, f) in dofs.velocity_free.iter().enumerate() {
        if let Some(f) = f {
            psi[node] = x[*f];
        }
    }
    let psi_max = psi.iter().copied().fold(0.0, f64::max);
    let psi_min = psi.iter().copied().fold(0.0, f64::min);
    Ok(StreamFunctionField { psi, psi_max, psi_min })
}
