//! Stationary coupled solve: Picard warm-up, damped Newton, continuation in Ra.

use std::fmt::{self, Write as _};

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::linalg::LuError;
use faer::sparse::SparseColMat;
use faer::Mat;

use crate::error::{Error, Result};
use crate::fem::dofs::{DofMap, SystemLayout};
use crate::fem::newton::{check_state, AssembledSystem, BlockNorms, Forcing, Linearization, NewtonAssembler, Physics};
use crate::fem::sparse::csc_apply;
use crate::mesh::{Mesh, Point2};
use crate::properties::PropertyRatios;

/// Coefficient vectors of the discrete fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFields {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub multiplier: f64,
}

impl SolutionFields {
    /// Zero velocity and pressure, temperature zero except on Dirichlet walls.
    pub fn initial(dofs: &DofMap) -> Self {
        let n = dofs.n_p2();
        SolutionFields {
            u: vec![0.0; n],
            v: vec![0.0; n],
            t: dofs.temperature_dirichlet.iter().map(|d| d.unwrap_or(0.0)).collect(),
            p: vec![0.0; dofs.n_pressure()],
            multiplier: 0.0,
        }
    }

    /// Initial state whose Dirichlet entries hold the given boundary data.
    pub fn with_boundary_data(
        dofs: &DofMap,
        velocity: impl Fn(Point2) -> [f64; 2],
        temperature: impl Fn(Point2) -> f64,
    ) -> Self {
        let mut s = Self::initial(dofs);
        for (i, p) in dofs.node_points.iter().enumerate() {
            if dofs.velocity_dirichlet[i] {
                let [a, b] = velocity(*p);
                s.u[i] = a;
                s.v[i] = b;
            }
            if dofs.temperature_dirichlet[i].is_some() {
                s.t[i] = temperature(*p);
            }
        }
        s
    }

    /// Values at the free unknowns, in system order.
    pub fn unknowns(&self, dofs: &DofMap) -> Vec<f64> {
        let layout = dofs.layout();
        let mut x = vec![0.0; layout.size];
        for i in 0..dofs.n_p2() {
            if let Some(f) = dofs.velocity_free[i] {
                x[layout.u + f] = self.u[i];
                x[layout.v + f] = self.v[i];
            }
            if let Some(f) = dofs.temperature_free[i] {
                x[layout.t + f] = self.t[i];
            }
        }
        x[layout.p..layout.multiplier].copy_from_slice(&self.p);
        x[layout.multiplier] = self.multiplier;
        x
    }

    /// `state += scale * delta` on the free unknowns.
    pub fn add_scaled(&mut self, dofs: &DofMap, delta: &[f64], scale: f64) {
        let layout = dofs.layout();
        for i in 0..dofs.n_p2() {
            if let Some(f) = dofs.velocity_free[i] {
                self.u[i] += scale * delta[layout.u + f];
                self.v[i] += scale * delta[layout.v + f];
            }
            if let Some(f) = dofs.temperature_free[i] {
                self.t[i] += scale * delta[layout.t + f];
            }
        }
        for (k, p) in self.p.iter_mut().enumerate() {
            *p += scale * delta[layout.p + k];
        }
        self.multiplier += scale * delta[layout.multiplier];
    }

    /// Largest nodal velocity magnitude.
    pub fn max_speed(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
    }

    /// `∫ p` over the mesh (P1 exact).
    pub fn pressure_integral(&self, dofs: &DofMap) -> f64 {
        (0..dofs.n_elements())
            .map(|e| {
                let n = &dofs.element_nodes[e];
                dofs.geometry(e).area * (self.p[n[0]] + self.p[n[1]] + self.p[n[2]]) / 3.0
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_newton: usize,
    pub max_picard: usize,
    pub damping: f64,
    /// Rayleigh ladder ending at the target; empty means the default decade ladder.
    pub continuation: Vec<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-6,
            max_newton: 30,
            max_picard: 3,
            damping: 1.0,
            continuation: Vec::new(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidSolverConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidSolverConfig(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.max_newton == 0 {
            return Err(Error::InvalidSolverConfig("max_newton must be at least 1".into()));
        }
        if self.continuation.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidSolverConfig("continuation values must be finite and non-negative".into()));
        }
        if self.continuation.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSolverConfig("continuation must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Continuation ladder used for `target`.
    pub fn ladder(&self, target: f64) -> Result<Vec<f64>> {
        if self.continuation.is_empty() {
            return Ok(default_ladder(target));
        }
        let last = *self.continuation.last().unwrap();
        if last != target {
            return Err(Error::InvalidSolverConfig(format!(
                "continuation ends at {last}, target Rayleigh number is {target}"
            )));
        }
        Ok(self.continuation.clone())
    }
}

/// Decades from `min(target, 1e3)` up to the target.
pub fn default_ladder(target: f64) -> Vec<f64> {
    let mut ra = target.min(1e3);
    let mut out = vec![ra];
    while ra * 10.0 < target * (1.0 - 1e-12) {
        ra *= 10.0;
        out.push(ra);
    }
    if *out.last().unwrap() != target {
        out.push(target);
    }
    out
}

/// Decades strictly above `from` up to `target`, for warm starts from a
/// solution at `from`. Falls back to [`default_ladder`] when `from` is zero.
pub fn ladder_between(from: f64, target: f64) -> Vec<f64> {
    if from <= 0.0 || from >= target {
        return if from > 0.0 { vec![target] } else { default_ladder(target) };
    }
    let mut out = Vec::new();
    let mut ra = from * 10.0;
    while ra < target * (1.0 - 1e-12) {
        out.push(ra);
        ra *= 10.0;
    }
    out.push(target);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub rayleigh: f64,
    pub picard_iterations: usize,
    pub newton_iterations: usize,
    /// Residual norm after each step of the stage, starting with the initial one.
    pub history: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub tolerance: f64,
    pub stages: Vec<StageReport>,
    pub final_norms: BlockNorms,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.final_norms.total()
    }

    pub fn total_iterations(&self) -> usize {
        self.stages
            .iter()
            .map(|s| s.picard_iterations + s.newton_iterations)
            .sum()
    }

    pub fn newton_iterations(&self) -> usize {
        self.stages.iter().map(|s| s.newton_iterations).sum()
    }

    /// `key: value` lines, one block per stage.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "converged: {}", self.converged);
        let _ = writeln!(s, "tolerance: {:e}", self.tolerance);
        let _ = writeln!(s, "residual_norm: euclidean");
        let _ = writeln!(s, "stages: {}", self.stages.len());
        for (i, st) in self.stages.iter().enumerate() {
            let _ = writeln!(s, "stage.{i}.rayleigh: {:e}", st.rayleigh);
            let _ = writeln!(s, "stage.{i}.picard_iterations: {}", st.picard_iterations);
            let _ = writeln!(s, "stage.{i}.newton_iterations: {}", st.newton_iterations);
            let _ = writeln!(s, "stage.{i}.converged: {}", st.converged);
            let hist: Vec<String> = st.history.iter().map(|r| format!("{r:.6e}")).collect();
            let _ = writeln!(s, "stage.{i}.history: {}", hist.join(" "));
        }
        let n = &self.final_norms;
        let _ = writeln!(s, "final.momentum: {:.6e}", n.momentum);
        let _ = writeln!(s, "final.continuity: {:.6e}", n.continuity);
        let _ = writeln!(s, "final.energy: {:.6e}", n.energy);
        let _ = writeln!(s, "final.constraint: {:.6e}", n.constraint);
        let _ = writeln!(s, "final.total: {:.6e}", n.total());
        s
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Sparse LU with the symbolic analysis kept across factorizations of
/// matrices sharing one pattern.
#[derive(Default)]
pub struct LinearSolver {
    symbolic: Option<SymbolicLu<usize>>,
}

const LINEAR_RTOL: f64 = 1e-10;
const MAX_REFINEMENT: usize = 4;

impl LinearSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Solves `A x = b` to relative residual `1e-10`, refining iteratively if needed.
    pub fn solve(&mut self, a: &SparseColMat<usize, f64>, b: &[f64]) -> Result<Vec<f64>> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, right-hand side has length {}",
                a.nrows(),
                a.ncols(),
                b.len()
            )));
        }
        let symbolic = match &self.symbolic {
            Some(s) => s.clone(),
            None => {
                let s = SymbolicLu::try_new(a.symbolic())
                    .map_err(|e| Error::SingularLinearSystem(format!("symbolic analysis failed: {e:?}")))?;
                self.symbolic = Some(s.clone());
                s
            }
        };
        let lu = Lu::try_new_with_symbolic(symbolic, a.as_ref()).map_err(|e| match e {
            LuError::SymbolicSingular { index } => {
                Error::SingularLinearSystem(format!("no pivot available at column {index}"))
            }
            LuError::Generic(e) => Error::SingularLinearSystem(format!("{e:?}")),
        })?;

        let bnorm = norm(b);
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        for _ in 0..=MAX_REFINEMENT {
            let mut rhs = Mat::from_fn(n, 1, |i, _| r[i]);
            lu.solve_in_place(rhs.as_mut());
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += rhs[(i, 0)];
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularLinearSystem("factorization produced non-finite values".into()));
            }
            let ax = csc_apply(a, &x);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
            if norm(&r) <= LINEAR_RTOL * bnorm.max(f64::MIN_POSITIVE) || bnorm == 0.0 {
                return Ok(x);
            }
        }
        Err(Error::SingularLinearSystem(format!(
            "relative linear residual {:.3e} after refinement",
            norm(&r) / bnorm
        )))
    }
}

/// Newton update `x` with `J x = R` (the state moves by `-x`).
pub fn linear_solve(system: &AssembledSystem) -> Result<Vec<f64>> {
    LinearSolver::new().solve(&system.jacobian, &system.residual)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A stationary problem on a fixed discretization.
pub struct StationaryProblem<'a> {
    pub dofs: &'a DofMap,
    pub ratios: PropertyRatios,
    pub prandtl: f64,
    pub rayleigh: f64,
    pub forcing: Option<&'a dyn Forcing>,
}

impl<'a> StationaryProblem<'a> {
    pub fn new(dofs: &'a DofMap, ratios: PropertyRatios, prandtl: f64, rayleigh: f64) -> Self {
        StationaryProblem {
            dofs,
            ratios,
            prandtl,
            rayleigh,
            forcing: None,
        }
    }

    pub fn with_forcing(mut self, forcing: &'a dyn Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.prandtl.is_finite() && self.prandtl > 0.0) {
            return Err(Error::InvalidSolverConfig(format!("Pr must be positive, got {}", self.prandtl)));
        }
        if !(self.rayleigh.is_finite() && self.rayleigh >= 0.0) {
            return Err(Error::InvalidSolverConfig(format!("Ra must be non-negative, got {}", self.rayleigh)));
        }
        Ok(())
    }

    /// Solves from a conduction start (one linear solve at Ra = 0).
    pub fn solve(&self, config: &SolverConfig) -> Result<(SolutionFields, SolveReport)> {
        self.solve_from(SolutionFields::initial(self.dofs), config)
    }

    /// Solves starting from `initial`, whose Dirichlet entries are kept fixed.
    /// A state with zero velocity is first replaced by the Ra = 0 solution.
    pub fn solve_from(&self, initial: SolutionFields, config: &SolverConfig) -> Result<(SolutionFields, SolveReport)> {
        self.validate()?;
        config.validate()?;
        check_state(&initial, self.dofs)?;
        let ladder = config.ladder(self.rayleigh)?;
        let assembler = NewtonAssembler::new(self.dofs);
        let layout = assembler.layout();
        let mut linear = LinearSolver::new();
        let mut state = initial;

        if state.max_speed() == 0.0 {
            let physics = Physics::new(self.ratios, self.prandtl, 0.0);
            let sys = assembler.assemble(&state, &physics, self.forcing, Linearization::Newton);
            let dx = linear.solve(&sys.jacobian, &sys.residual)?;
            state.add_scaled(self.dofs, &dx, -1.0);
        }

        let mut stages = Vec::with_capacity(ladder.len());
        let mut all_converged = true;
        let mut final_norms = BlockNorms::default();
        for &ra in &ladder {
            let physics = Physics::new(self.ratios, self.prandtl, ra);
            let (stage, norms) = run_stage(&assembler, &mut linear, &mut state, &physics, self.forcing, config, layout)?;
            final_norms = norms;
            let ok = stage.converged;
            stages.push(stage);
            if !ok {
                all_converged = false;
                break;
            }
        }
        let report = SolveReport {
            converged: all_converged,
            tolerance: config.tolerance,
            stages,
            final_norms,
        };
        if report.converged {
            Ok((state, report))
        } else {
            Err(Error::NonConvergence {
                report: Box::new(report),
                fields: Box::new(state),
            })
        }
    }
}

fn run_stage(
    assembler: &NewtonAssembler,
    linear: &mut LinearSolver,
    state: &mut SolutionFields,
    physics: &Physics,
    forcing: Option<&dyn Forcing>,
    config: &SolverConfig,
    layout: SystemLayout,
) -> Result<(StageReport, BlockNorms)> {
    let dofs = assembler.dofs();
    let mut r = assembler.residual(state, physics, forcing);
    let mut rnorm = norm(&r);
    let mut stage = StageReport {
        rayleigh: physics.rayleigh,
        picard_iterations: 0,
        newton_iterations: 0,
        history: vec![rnorm],
        converged: rnorm <= config.tolerance,
    };

    for _ in 0..config.max_picard {
        if stage.converged {
            break;
        }
        let sys = assembler.assemble(state, physics, forcing, Linearization::Picard);
        let dx = linear.solve(&sys.jacobian, &sys.residual)?;
        let mut trial = state.clone();
        trial.add_scaled(dofs, &dx, -1.0);
        let r_trial = assembler.residual(&trial, physics, forcing);
        let n_trial = norm(&r_trial);
        stage.picard_iterations += 1;
        // a Picard step that increases the residual is discarded and Newton takes over
        if !(n_trial < rnorm) {
            break;
        }
        *state = trial;
        r = r_trial;
        rnorm = n_trial;
        stage.history.push(rnorm);
        stage.converged = rnorm <= config.tolerance;
    }

    while !stage.converged && stage.newton_iterations < config.max_newton {
        let sys = assembler.assemble(state, physics, forcing, Linearization::Newton);
        let dx = linear.solve(&sys.jacobian, &sys.residual)?;
        stage.newton_iterations += 1;
        let mut step = config.damping;
        let mut accepted = None;
        // backtracking on the residual norm; the smallest step is taken regardless
        for attempt in 0..8 {
            let mut trial = state.clone();
            trial.add_scaled(dofs, &dx, -step);
            let r_trial = assembler.residual(&trial, physics, forcing);
            let n_trial = norm(&r_trial);
            if n_trial <= (1.0 - 1e-4 * step) * rnorm || attempt == 7 {
                accepted = Some((trial, r_trial, n_trial));
                break;
            }
            step *= 0.5;
        }
        let (trial, r_trial, n_trial) = accepted.expect("line search always accepts");
        *state = trial;
        r = r_trial;
        rnorm = n_trial;
        stage.history.push(rnorm);
        stage.converged = rnorm <= config.tolerance;
        if !rnorm.is_finite() {
            break;
        }
    }
    Ok((stage, BlockNorms::of(&r, &layout)))
}

/// Solves the physical problem (no volume sources) on `dofs`.
pub fn solve_stationary(
    mesh: &Mesh,
    dofs: &DofMap,
    ratios: &PropertyRatios,
    prandtl: f64,
    rayleigh: f64,
    config: &SolverConfig,
) -> Result<(SolutionFields, SolveReport)> {
    if dofs.n_vertices != mesh.nodes.len() || dofs.n_elements() != mesh.triangles.len() {
        return Err(Error::DimensionMismatch(format!(
            "dof map built for {} vertices / {} triangles, mesh has {} / {}",
            dofs.n_vertices,
            dofs.n_elements(),
            mesh.nodes.len(),
            mesh.triangles.len()
        )));
    }
    StationaryProblem::new(dofs, *ratios, prandtl, rayleigh).solve(config)
}

/// Solves with warm start from a previous solution on the same discretization.
pub fn solve_stationary_from(
    dofs: &DofMap,
    ratios: &PropertyRatios,
    prandtl: f64,
    rayleigh: f64,
    config: &SolverConfig,
    initial: SolutionFields,
) -> Result<(SolutionFields, SolveReport)> {
    StationaryProblem::new(dofs, *ratios, prandtl, rayleigh).solve_from(initial, config)
}
