//! Residual and Jacobian of the discrete coupled problem.
//!
//! Unknowns are ordered `[U free | V free | T free | p | λ]`, where `λ` is the
//! scalar multiplier enforcing `∫ p = 0`. Prescribed values enter the residual
//! through the full state and are never unknowns. Residual rows:
//!
//! ```text
//! Uᵢ : ν∫∇U·∇φᵢ + ∫(u·∇U)φᵢ − ρ̃∫p ∂ₓφᵢ            − ∫f₁φᵢ
//! Vᵢ : ν∫∇V·∇φᵢ + ∫(u·∇V)φᵢ − ρ̃∫p ∂ᵧφᵢ − γ∫Tφᵢ   − ∫f₂φᵢ
//! Tᵢ : α∫∇T·∇φᵢ + ∫(u·∇T)φᵢ                        − ∫gφᵢ
//! pₖ : −ρ̃∫(∇·u)qₖ + λ∫qₖ
//! λ  : ∫p
//! ```

use faer::sparse::{SparseColMat, SymbolicSparseColMat};

use crate::error::{Error, Result};
use crate::fem::dofs::{DofMap, SystemLayout};
use crate::fem::element::{p2_gradients, p2_values};
use crate::fem::quadrature::QuadratureRule;
use crate::mesh::Point2;
use crate::properties::PropertyRatios;
use crate::solver::SolutionFields;

/// Volume sources; zero in every physical run, used by manufactured solutions.
pub trait Forcing: Sync {
    fn momentum(&self, p: Point2) -> [f64; 2];
    fn energy(&self, p: Point2) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physics {
    pub ratios: PropertyRatios,
    pub prandtl: f64,
    pub rayleigh: f64,
}

impl Physics {
    pub fn new(ratios: PropertyRatios, prandtl: f64, rayleigh: f64) -> Self {
        Physics {
            ratios,
            prandtl,
            rayleigh,
        }
    }

    fn coefficients(&self) -> Coefficients {
        Coefficients {
            nu: self.ratios.viscous_coefficient(self.prandtl),
            rho: self.ratios.rho_ratio,
            gamma: self.ratios.buoyancy_coefficient(self.prandtl, self.rayleigh),
            alpha: self.ratios.alpha_ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linearization {
    /// Exact derivative of the residual.
    Newton,
    /// Advecting velocity frozen at the current iterate.
    Picard,
}

#[derive(Clone, Copy)]
struct Coefficients {
    nu: f64,
    rho: f64,
    gamma: f64,
    alpha: f64,
}

/// Jacobian and residual at one state.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub jacobian: SparseColMat<usize, f64>,
    pub residual: Vec<f64>,
    pub layout: SystemLayout,
}

/// Euclidean residual norms per equation block.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlockNorms {
    pub momentum: f64,
    pub continuity: f64,
    pub energy: f64,
    pub constraint: f64,
}

impl BlockNorms {
    pub fn of(residual: &[f64], layout: &SystemLayout) -> Self {
        let norm = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>().sqrt();
        BlockNorms {
            momentum: norm(&residual[layout.u..layout.t]),
            energy: norm(&residual[layout.t..layout.p]),
            continuity: norm(&residual[layout.p..layout.multiplier]),
            constraint: residual[layout.multiplier].abs(),
        }
    }

    pub fn total(&self) -> f64 {
        (self.momentum.powi(2) + self.continuity.powi(2) + self.energy.powi(2) + self.constraint.powi(2)).sqrt()
    }
}

const NLOC: usize = 21;

fn block_of(a: usize) -> usize {
    a / 6
}

/// Blocks that never carry entries: p–p, p–T, T–p.
fn structurally_zero(a: usize, b: usize) -> bool {
    let (ba, bb) = (block_of(a), block_of(b));
    (ba == 3 && bb == 3) || (ba == 3 && bb == 2) || (ba == 2 && bb == 3)
}

struct QuadCache {
    bary: Vec<[f64; 3]>,
    weights: Vec<f64>,
    phi: Vec<[f64; 6]>,
}

impl QuadCache {
    fn new() -> Self {
        let rule = QuadratureRule::seven_point();
        QuadCache {
            phi: rule.points.iter().map(|l| p2_values(*l)).collect(),
            bary: rule.points,
            weights: rule.weights,
        }
    }
}

struct LocalOutput {
    residual: [f64; NLOC],
    /// ∫ qₖ over the element
    pressure_mass: [f64; 3],
}

/// Element residual and, when requested, element Jacobian.
#[allow(clippy::too_many_arguments)]
fn element_kernel(
    dofs: &DofMap,
    e: usize,
    state: &SolutionFields,
    c: &Coefficients,
    forcing: Option<&dyn Forcing>,
    quad: &QuadCache,
    mut jac: Option<(&mut [[f64; NLOC]; NLOC], Linearization)>,
) -> LocalOutput {
    let geom = dofs.geometry(e);
    let nodes = &dofs.element_nodes[e];
    let lu: [f64; 6] = std::array::from_fn(|i| state.u[nodes[i]]);
    let lv: [f64; 6] = std::array::from_fn(|i| state.v[nodes[i]]);
    let lt: [f64; 6] = std::array::from_fn(|i| state.t[nodes[i]]);
    let lp: [f64; 3] = std::array::from_fn(|k| state.p[nodes[k]]);

    let mut out = LocalOutput {
        residual: [0.0; NLOC],
        pressure_mass: [0.0; 3],
    };
    if let Some((j, _)) = jac.as_mut() {
        for row in j.iter_mut() {
            row.fill(0.0);
        }
    }

    for q in 0..quad.weights.len() {
        let l = quad.bary[q];
        let wq = quad.weights[q] * 2.0 * geom.area;
        let phi = &quad.phi[q];
        let dphi = p2_gradients(l, &geom.grad_lambda);

        let (mut u, mut v, mut t) = (0.0, 0.0, 0.0);
        let (mut ux, mut uy, mut vx, mut vy, mut tx, mut ty) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..6 {
            u += lu[i] * phi[i];
            v += lv[i] * phi[i];
            t += lt[i] * phi[i];
            ux += lu[i] * dphi[i][0];
            uy += lu[i] * dphi[i][1];
            vx += lv[i] * dphi[i][0];
            vy += lv[i] * dphi[i][1];
            tx += lt[i] * dphi[i][0];
            ty += lt[i] * dphi[i][1];
        }
        let p = lp[0] * l[0] + lp[1] * l[1] + lp[2] * l[2];
        let div = ux + vy;

        let (fm, fe) = match forcing {
            Some(f) => {
                let x = geom.map(l);
                (f.momentum(x), f.energy(x))
            }
            None => ([0.0, 0.0], 0.0),
        };

        let adv_u = u * ux + v * uy;
        let adv_v = u * vx + v * vy;
        let adv_t = u * tx + v * ty;
        for i in 0..6 {
            let (gx, gy) = (dphi[i][0], dphi[i][1]);
            out.residual[i] += wq * (c.nu * (ux * gx + uy * gy) + adv_u * phi[i] - c.rho * p * gx - fm[0] * phi[i]);
            out.residual[6 + i] += wq
                * (c.nu * (vx * gx + vy * gy) + adv_v * phi[i] - c.rho * p * gy - c.gamma * t * phi[i] - fm[1] * phi[i]);
            out.residual[12 + i] += wq * (c.alpha * (tx * gx + ty * gy) + adv_t * phi[i] - fe * phi[i]);
        }
        for k in 0..3 {
            out.residual[18 + k] += wq * (-c.rho * div * l[k]);
            out.pressure_mass[k] += wq * l[k];
        }

        if let Some((jm, lin)) = jac.as_mut() {
            let newton = *lin == Linearization::Newton;
            for i in 0..6 {
                let pi = phi[i];
                let (gix, giy) = (dphi[i][0], dphi[i][1]);
                for j in 0..6 {
                    let pj = phi[j];
                    let (gjx, gjy) = (dphi[j][0], dphi[j][1]);
                    let visc = gix * gjx + giy * gjy;
                    let transport = (u * gjx + v * gjy) * pi;
                    jm[i][j] += wq * (c.nu * visc + transport);
                    jm[6 + i][6 + j] += wq * (c.nu * visc + transport);
                    jm[12 + i][12 + j] += wq * (c.alpha * visc + transport);
                    jm[6 + i][12 + j] += wq * (-c.gamma * pj * pi);
                    if newton {
                        let m = wq * pj * pi;
                        jm[i][j] += m * ux;
                        jm[i][6 + j] += m * uy;
                        jm[6 + i][j] += m * vx;
                        jm[6 + i][6 + j] += m * vy;
                        jm[12 + i][j] += m * tx;
                        jm[12 + i][6 + j] += m * ty;
                    }
                }
                for k in 0..3 {
                    let bx = -c.rho * wq * l[k] * gix;
                    let by = -c.rho * wq * l[k] * giy;
                    jm[i][18 + k] += bx;
                    jm[6 + i][18 + k] += by;
                    jm[18 + k][i] += bx;
                    jm[18 + k][6 + i] += by;
                }
            }
        }
    }

    for k in 0..3 {
        out.residual[18 + k] += state.multiplier * out.pressure_mass[k];
    }
    out
}

/// Assembles residuals and Jacobians on a fixed sparsity pattern.
///
/// The pattern and the map from element entries to compressed-column slots
/// are computed once per [`DofMap`] and reused across Newton iterations.
pub struct NewtonAssembler<'a> {
    dofs: &'a DofMap,
    layout: SystemLayout,
    symbolic: SymbolicSparseColMat<usize>,
    slots: Vec<u32>,
    quad: QuadCache,
}

impl<'a> NewtonAssembler<'a> {
    pub fn new(dofs: &'a DofMap) -> Self {
        let layout = dofs.layout();
        let n = layout.size as u64;
        let mut keys: Vec<u64> = Vec::new();
        visit_pattern(dofs, &layout, |r, c| keys.push(c as u64 * n + r as u64));
        let mut unique = keys.clone();
        unique.sort_unstable();
        unique.dedup();

        let mut col_ptr = vec![0usize; layout.size + 1];
        let mut row_idx = Vec::with_capacity(unique.len());
        for &k in &unique {
            col_ptr[(k / n) as usize + 1] += 1;
            row_idx.push((k % n) as usize);
        }
        for j in 0..layout.size {
            col_ptr[j + 1] += col_ptr[j];
        }
        let slots = keys
            .iter()
            .map(|k| unique.binary_search(k).expect("key present") as u32)
            .collect();
        let symbolic = SymbolicSparseColMat::new_checked(layout.size, layout.size, col_ptr, None, row_idx);
        NewtonAssembler {
            dofs,
            layout,
            symbolic,
            slots,
            quad: QuadCache::new(),
        }
    }

    pub fn layout(&self) -> SystemLayout {
        self.layout
    }

    pub fn dofs(&self) -> &DofMap {
        self.dofs
    }

    pub fn nnz(&self) -> usize {
        self.symbolic.row_idx().len()
    }

    /// Residual over the unknowns at `state`.
    pub fn residual(&self, state: &SolutionFields, physics: &Physics, forcing: Option<&dyn Forcing>) -> Vec<f64> {
        let c = physics.coefficients();
        let mut r = vec![0.0; self.layout.size];
        for e in 0..self.dofs.n_elements() {
            let out = element_kernel(self.dofs, e, state, &c, forcing, &self.quad, None);
            self.scatter_residual(e, state, &out, &mut r);
        }
        r
    }

    fn scatter_residual(&self, e: usize, state: &SolutionFields, out: &LocalOutput, r: &mut [f64]) {
        let unknowns = self.dofs.element_unknowns(e, &self.layout);
        for a in 0..NLOC {
            if let Some(row) = unknowns[a] {
                r[row] += out.residual[a];
            }
        }
        let nodes = &self.dofs.element_nodes[e];
        for k in 0..3 {
            r[self.layout.multiplier] += out.pressure_mass[k] * state.p[nodes[k]];
        }
    }

    pub fn assemble(
        &self,
        state: &SolutionFields,
        physics: &Physics,
        forcing: Option<&dyn Forcing>,
        linearization: Linearization,
    ) -> AssembledSystem {
        let c = physics.coefficients();
        let mut r = vec![0.0; self.layout.size];
        let mut values = vec![0.0; self.nnz()];
        let mut local = [[0.0; NLOC]; NLOC];
        let mut cursor = 0usize;
        for e in 0..self.dofs.n_elements() {
            let out = element_kernel(self.dofs, e, state, &c, forcing, &self.quad, Some((&mut local, linearization)));
            self.scatter_residual(e, state, &out, &mut r);
            let unknowns = self.dofs.element_unknowns(e, &self.layout);
            for a in 0..NLOC {
                if unknowns[a].is_none() {
                    continue;
                }
                for b in 0..NLOC {
                    if structurally_zero(a, b) || unknowns[b].is_none() {
                        continue;
                    }
                    values[self.slots[cursor] as usize] += local[a][b];
                    cursor += 1;
                }
            }
            for k in 0..3 {
                values[self.slots[cursor] as usize] += out.pressure_mass[k];
                values[self.slots[cursor + 1] as usize] += out.pressure_mass[k];
                cursor += 2;
            }
        }
        debug_assert_eq!(cursor, self.slots.len());
        AssembledSystem {
            jacobian: SparseColMat::new(self.symbolic.clone(), values),
            residual: r,
            layout: self.layout,
        }
    }
}

/// Visits `(row, col)` of every emitted Jacobian entry in assembly order.
fn visit_pattern(dofs: &DofMap, layout: &SystemLayout, mut f: impl FnMut(usize, usize)) {
    for e in 0..dofs.n_elements() {
        let unknowns = dofs.element_unknowns(e, layout);
        for a in 0..NLOC {
            let Some(ra) = unknowns[a] else { continue };
            for b in 0..NLOC {
                if structurally_zero(a, b) {
                    continue;
                }
                if let Some(cb) = unknowns[b] {
                    f(ra, cb);
                }
            }
        }
        let nodes = &dofs.element_nodes[e];
        for &vertex in &nodes[..3] {
            f(layout.p + vertex, layout.multiplier);
            f(layout.multiplier, layout.p + vertex);
        }
    }
}

/// One-shot assembly of the Newton system at `state`.
pub fn assemble_newton_system(
    state: &SolutionFields,
    dofs: &DofMap,
    physics: &Physics,
    forcing: Option<&dyn Forcing>,
) -> Result<AssembledSystem> {
    check_state(state, dofs)?;
    Ok(NewtonAssembler::new(dofs).assemble(state, physics, forcing, Linearization::Newton))
}

/// Checks that `state` matches `dofs`; used before any assembly.
pub fn check_state(state: &SolutionFields, dofs: &DofMap) -> Result<()> {
    let (n2, n1) = (dofs.n_p2(), dofs.n_pressure());
    if state.u.len() != n2 || state.v.len() != n2 || state.t.len() != n2 || state.p.len() != n1 {
        return Err(Error::DimensionMismatch(format!(
            "state has (u, v, t, p) lengths ({}, {}, {}, {}), dof map expects ({n2}, {n2}, {n2}, {n1})",
            state.u.len(),
            state.v.len(),
            state.t.len(),
            state.p.len()
        )));
    }
    Ok(())
}
