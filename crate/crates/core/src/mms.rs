//! Manufactured-solution convergence studies on the unit square.
//!
//! Exact fields are prescribed in closed form, the matching volume sources are
//! derived analytically, and the discrete solution is compared against the
//! exact one on a family of uniformly refined meshes.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fem::dofs::{DofMap, TemperatureBoundary};
use crate::fem::element::p2_gradients;
use crate::fem::newton::{Forcing, NewtonAssembler, Physics};
use crate::fem::quadrature::QuadratureRule;
use crate::mesh::{build_mesh, uniform_refine, GeometrySpec, Mesh, Point2};
use crate::properties::PropertyRatios;
use crate::solver::{norm, SolutionFields, SolverConfig, StationaryProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// Every field vanishes.
    Zero,
    /// `u = (x², −2xy)`, `p = x + y − 1`, `T = x² + xy`; representable exactly.
    Polynomial,
    /// Curl of `sin²(πx) sin²(πy)`, `p = cos(πx) cos(πy)`, `T = sin(πx) sin(πy)`.
    Trigonometric,
}

/// Values and derivatives of the exact fields at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExactValues {
    pub u: f64,
    pub v: f64,
    pub p: f64,
    pub t: f64,
    pub grad_u: [f64; 2],
    pub grad_v: [f64; 2],
    pub grad_p: [f64; 2],
    pub grad_t: [f64; 2],
    pub lap_u: f64,
    pub lap_v: f64,
    pub lap_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    pub kind: CaseKind,
}

impl ManufacturedCase {
    pub fn zero() -> Self {
        ManufacturedCase { kind: CaseKind::Zero }
    }

    pub fn polynomial() -> Self {
        ManufacturedCase { kind: CaseKind::Polynomial }
    }

    pub fn trigonometric() -> Self {
        ManufacturedCase {
            kind: CaseKind::Trigonometric,
        }
    }

    pub fn exact(&self, pt: Point2) -> ExactValues {
        let (x, y) = (pt.x, pt.y);
        match self.kind {
            CaseKind::Zero => ExactValues::default(),
            CaseKind::Polynomial => ExactValues {
                u: x * x,
                v: -2.0 * x * y,
                p: x + y - 1.0,
                t: x * x + x * y,
                grad_u: [2.0 * x, 0.0],
                grad_v: [-2.0 * y, -2.0 * x],
                grad_p: [1.0, 1.0],
                grad_t: [2.0 * x + y, x],
                lap_u: 2.0,
                lap_v: 0.0,
                lap_t: 2.0,
            },
            CaseKind::Trigonometric => {
                let (sx, cx) = (PI * x).sin_cos();
                let (sy, cy) = (PI * y).sin_cos();
                let (s2x, c2x) = (2.0 * PI * x).sin_cos();
                let (s2y, c2y) = (2.0 * PI * y).sin_cos();
                let pi2 = PI * PI;
                let pi3 = pi2 * PI;
                ExactValues {
                    u: PI * sx * sx * s2y,
                    v: -PI * s2x * sy * sy,
                    p: cx * cy,
                    t: sx * sy,
                    grad_u: [pi2 * s2x * s2y, 2.0 * pi2 * sx * sx * c2y],
                    grad_v: [-2.0 * pi2 * c2x * sy * sy, -pi2 * s2x * s2y],
                    grad_p: [-PI * sx * cy, -PI * cx * sy],
                    grad_t: [PI * cx * sy, PI * sx * cy],
                    lap_u: 2.0 * pi3 * s2y * (c2x - 2.0 * sx * sx),
                    lap_v: -2.0 * pi3 * s2x * (c2y - 2.0 * sy * sy),
                    lap_t: -2.0 * pi2 * sx * sy,
                }
            }
        }
    }

    /// Volume sources making the exact fields solve the continuous problem.
    pub fn forcing(&self, ratios: PropertyRatios, prandtl: f64, rayleigh: f64) -> ManufacturedForcing {
        ManufacturedForcing {
            case: *self,
            nu: ratios.viscous_coefficient(prandtl),
            rho: ratios.rho_ratio,
            gamma: ratios.buoyancy_coefficient(prandtl, rayleigh),
            alpha: ratios.alpha_ratio,
        }
    }

    /// Nodal interpolant of the exact fields (pressure on the vertices).
    pub fn interpolate(&self, dofs: &DofMap) -> SolutionFields {
        let mut s = SolutionFields::initial(dofs);
        for (i, pt) in dofs.node_points.iter().enumerate() {
            let e = self.exact(*pt);
            s.u[i] = e.u;
            s.v[i] = e.v;
            s.t[i] = e.t;
            if i < dofs.n_vertices {
                s.p[i] = e.p;
            }
        }
        s
    }

    /// Initial state carrying the exact Dirichlet data and zeros elsewhere.
    pub fn boundary_state(&self, dofs: &DofMap) -> SolutionFields {
        SolutionFields::with_boundary_data(
            dofs,
            |p| {
                let e = self.exact(p);
                [e.u, e.v]
            },
            |p| self.exact(p).t,
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ManufacturedForcing {
    case: ManufacturedCase,
    nu: f64,
    rho: f64,
    gamma: f64,
    alpha: f64,
}

impl Forcing for ManufacturedForcing {
    fn momentum(&self, p: Point2) -> [f64; 2] {
        let e = self.case.exact(p);
        let adv_u = e.u * e.grad_u[0] + e.v * e.grad_u[1];
        let adv_v = e.u * e.grad_v[0] + e.v * e.grad_v[1];
        [
            -self.nu * e.lap_u + adv_u + self.rho * e.grad_p[0],
            -self.nu * e.lap_v + adv_v + self.rho * e.grad_p[1] - self.gamma * e.t,
        ]
    }

    fn energy(&self, p: Point2) -> f64 {
        let e = self.case.exact(p);
        -self.alpha * e.lap_t + e.u * e.grad_t[0] + e.v * e.grad_t[1]
    }
}

/// `(|u − u_h|₁, |T − T_h|₁, ‖p − p_h‖₀)` by element quadrature of the given degree.
pub fn discretization_errors(
    case: &ManufacturedCase,
    solution: &SolutionFields,
    dofs: &DofMap,
    quadrature_degree: usize,
) -> (f64, f64, f64) {
    let rule = QuadratureRule::of_degree(quadrature_degree);
    let (mut eu, mut et, mut ep) = (0.0, 0.0, 0.0);
    for e in 0..dofs.n_elements() {
        let geom = dofs.geometry(e);
        let nodes = &dofs.element_nodes[e];
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let wq = w * 2.0 * geom.area;
            let g = p2_gradients(*l, &geom.grad_lambda);
            let mut du = [0.0; 2];
            let mut dv = [0.0; 2];
            let mut dt = [0.0; 2];
            for i in 0..6 {
                for c in 0..2 {
                    du[c] += solution.u[nodes[i]] * g[i][c];
                    dv[c] += solution.v[nodes[i]] * g[i][c];
                    dt[c] += solution.t[nodes[i]] * g[i][c];
                }
            }
            let ph = l[0] * solution.p[nodes[0]] + l[1] * solution.p[nodes[1]] + l[2] * solution.p[nodes[2]];
            let ex = case.exact(geom.map(*l));
            for c in 0..2 {
                eu += wq * ((ex.grad_u[c] - du[c]).powi(2) + (ex.grad_v[c] - dv[c]).powi(2));
                et += wq * (ex.grad_t[c] - dt[c]).powi(2);
            }
            ep += wq * (ex.p - ph).powi(2);
        }
    }
    (eu.sqrt(), et.sqrt(), ep.sqrt())
}

/// Euclidean norm of the forced discrete residual at the interpolated exact fields.
pub fn residual_of_exact(
    case: &ManufacturedCase,
    dofs: &DofMap,
    ratios: PropertyRatios,
    prandtl: f64,
    rayleigh: f64,
) -> f64 {
    let forcing = case.forcing(ratios, prandtl, rayleigh);
    let state = case.interpolate(dofs);
    let assembler = NewtonAssembler::new(dofs);
    let physics = Physics::new(ratios, prandtl, rayleigh);
    norm(&assembler.residual(&state, &physics, Some(&forcing)))
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_rate(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub h: Vec<f64>,
    pub err_u_h1: Vec<f64>,
    pub err_t_h1: Vec<f64>,
    pub err_p_l2: Vec<f64>,
    /// Newton iterations per level.
    pub iterations: Vec<usize>,
}

impl ConvergenceReport {
    fn tail<'a>(&self, v: &'a [f64]) -> &'a [f64] {
        &v[v.len().saturating_sub(3)..]
    }

    /// Rates `(u, T, p)` fitted on the finest three levels.
    pub fn rates(&self) -> Option<(f64, f64, f64)> {
        if self.h.len() < 3 {
            return None;
        }
        let h = self.tail(&self.h);
        Some((
            fitted_rate(h, self.tail(&self.err_u_h1)),
            fitted_rate(h, self.tail(&self.err_t_h1)),
            fitted_rate(h, self.tail(&self.err_p_l2)),
        ))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,err_u_h1,err_T_h1,err_p_l2\n");
        for i in 0..self.h.len() {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.h[i], self.err_u_h1[i], self.err_t_h1[i], self.err_p_l2[i]
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        match self.rates() {
            Some((u, t, p)) => format!("rates u_h1 {u:.4} T_h1 {t:.4} p_l2 {p:.4}"),
            None => format!("rates unavailable ({} levels)", self.h.len()),
        }
    }
}

/// Parameters of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct MmsStudy {
    pub levels: usize,
    /// Grid count of the coarsest mesh.
    pub base_resolution: usize,
    pub prandtl: f64,
    pub rayleigh: f64,
    pub ratios: PropertyRatios,
    pub quadrature_degree: usize,
    pub solver: SolverConfig,
}

impl MmsStudy {
    pub fn new(levels: usize, prandtl: f64, rayleigh: f64) -> Self {
        MmsStudy {
            levels,
            base_resolution: 8,
            prandtl,
            rayleigh,
            ratios: PropertyRatios::unity(),
            quadrature_degree: 7,
            solver: SolverConfig::default(),
        }
    }

    /// The mesh family: the coarse square mesh and its uniform refinements.
    pub fn meshes(&self) -> Result<Vec<Mesh>> {
        let mut out = vec![build_mesh(&GeometrySpec::square(), self.base_resolution)?];
        for _ in 1..self.levels {
            let next = uniform_refine(out.last().unwrap());
            out.push(next);
        }
        Ok(out)
    }

    pub fn run(&self, case: &ManufacturedCase) -> Result<ConvergenceReport> {
        if self.levels < 3 {
            return Err(Error::InvalidStudy(format!("at least 3 levels are required, got {}", self.levels)));
        }
        let forcing = case.forcing(self.ratios, self.prandtl, self.rayleigh);
        let mut report = ConvergenceReport::default();
        for mesh in self.meshes()? {
            let dofs = DofMap::with_policy(&mesh, TemperatureBoundary::AllDirichlet);
            let problem =
                StationaryProblem::new(&dofs, self.ratios, self.prandtl, self.rayleigh).with_forcing(&forcing);
            let (solution, solve) = match problem.solve_from(case.boundary_state(&dofs), &self.solver) {
                Ok(r) => r,
                Err(source) => {
                    return Err(Error::StudyAborted {
                        partial: Box::new(report),
                        source: Box::new(source),
                    })
                }
            };
            let (eu, et, ep) = discretization_errors(case, &solution, &dofs, self.quadrature_degree);
            report.h.push(1.0 / mesh.resolution as f64);
            report.err_u_h1.push(eu);
            report.err_t_h1.push(et);
            report.err_p_l2.push(ep);
            report.iterations.push(solve.total_iterations());
        }
        Ok(report)
    }
}

/// Runs `levels` refinements from `h = 1/8` with clear-fluid ratios.
pub fn run_mms_study(
    case: &ManufacturedCase,
    levels: usize,
    prandtl: f64,
    rayleigh: f64,
    ratios: PropertyRatios,
) -> Result<ConvergenceReport> {
    let mut study = MmsStudy::new(levels, prandtl, rayleigh);
    study.ratios = ratios;
    study.run(case)
}
