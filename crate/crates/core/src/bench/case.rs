use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::bench::config::CaseConfig;
use crate::error::{Error, Result};
use crate::fem::DofMap;
use crate::mesh::{build_mesh, BoundaryTag, Mesh};
use crate::post::export::{fmt17, write_file};
use crate::post::{
    energy_balance_with, export_fields, stream_function, wall_flux, FluxMethod, NusseltReport, NusseltWeighting,
    StreamFunctionField,
};
use crate::properties::{compute_ratios, default_materials, load_materials, MixtureSpec, PropertyRatios};
use crate::solver::{ladder_between, SolutionFields, SolveReport, StationaryProblem};

/// Mesh, dof map and property ratios of a case; shared by every Rayleigh
/// number of a warm-started chain.
pub struct PreparedCase {
    pub config: CaseConfig,
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub ratios: PropertyRatios,
}

impl PreparedCase {
    pub fn new(config: &CaseConfig) -> Result<Self> {
        config.validate()?;
        let materials = match &config.materials {
            Some(path) => load_materials(path)?,
            None => default_materials()?,
        };
        let ratios = compute_ratios(&MixtureSpec::new(materials, config.phi).with_split(config.split))?;
        let mesh = build_mesh(&config.geometry, config.grid)?;
        let dofs = DofMap::new(&mesh);
        Ok(PreparedCase {
            config: config.clone(),
            mesh,
            dofs,
            ratios,
        })
    }

    /// Solves at `rayleigh`, optionally continuing from a converged solution
    /// at a lower Rayleigh number. Non-convergence is not an error here: the
    /// last iterate comes back with `converged == false`.
    pub fn solve(&self, rayleigh: f64, warm: Option<(&SolutionFields, f64)>) -> Result<CaseSolution> {
        let problem = StationaryProblem::new(&self.dofs, self.ratios, self.config.prandtl, rayleigh);
        let mut solver = self.config.solver.clone();
        let initial = match warm {
            Some((fields, from)) if from < rayleigh && solver.continuation.is_empty() => {
                solver.continuation = ladder_between(from, rayleigh);
                fields.clone()
            }
            _ => SolutionFields::initial(&self.dofs),
        };
        match problem.solve_from(initial, &solver) {
            Ok((fields, report)) => Ok(CaseSolution { fields, report }),
            Err(Error::NonConvergence { report, fields }) => Ok(CaseSolution {
                fields: *fields,
                report: *report,
            }),
            Err(e) => Err(e),
        }
    }

    /// Post-processes `solution` and, when `out` is given, writes the
    /// selected artifacts under `out/<label>`.
    pub fn evaluate(&self, rayleigh: f64, solution: &CaseSolution, out: Option<&Path>) -> Result<CaseOutcome> {
        let fields = &solution.fields;
        let nusselt = wall_flux(fields, &self.mesh, &self.dofs, &self.ratios, BoundaryTag::HotWall, self.config.weighting)?;
        let unweighted = wall_flux(
            fields,
            &self.mesh,
            &self.dofs,
            &self.ratios,
            BoundaryTag::HotWall,
            NusseltWeighting::Unweighted,
        )?;
        let trace = energy_balance_with(fields, &self.mesh, &self.dofs, &self.ratios, FluxMethod::Trace)?;
        let variational = energy_balance_with(fields, &self.mesh, &self.dofs, &self.ratios, FluxMethod::Variational)?;
        let stream = stream_function(fields, &self.dofs)?;
        let mut config = self.config.clone();
        config.rayleigh = rayleigh;
        let outcome = CaseOutcome {
            label: config.label(),
            nu: nusselt.global_nu,
            nu_unweighted: unweighted.global_nu,
            nu_variational: variational.hot_flux,
            psi_max: stream.psi_max,
            psi_min: stream.psi_min,
            imbalance: trace.imbalance,
            imbalance_variational: variational.imbalance,
            iterations: solution.report.total_iterations(),
            converged: solution.report.converged,
            error: (!solution.report.converged).then(|| {
                format!("no convergence, residual {:.3e}", solution.report.final_residual())
            }),
            config,
        };
        if let Some(out) = out {
            self.write_artifacts(&outcome, solution, &nusselt, &stream, &out.join(&outcome.label))?;
        }
        Ok(outcome)
    }

    fn write_artifacts(
        &self,
        outcome: &CaseOutcome,
        solution: &CaseSolution,
        nusselt: &NusseltReport,
        stream: &StreamFunctionField,
        dir: &Path,
    ) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let o = &self.config.outputs;
        write_file(&dir.join("summary.txt"), |w| writeln!(w, "{}", outcome.summary_line()))?;
        if o.report {
            write_file(&dir.join("report.txt"), |w| {
                w.write_all(outcome.to_text().as_bytes())?;
                w.write_all(solution.report.to_text().as_bytes())
            })?;
        }
        if o.nusselt {
            write_file(&dir.join("nusselt.csv"), |w| {
                writeln!(w, "s,flux,weight")?;
                for p in &nusselt.local_profile {
                    writeln!(w, "{},{},{}", fmt17(p.s), fmt17(p.flux), fmt17(p.weight))?;
                }
                Ok(())
            })?;
        }
        if o.streamfunction {
            write_file(&dir.join("streamfunction.csv"), |w| {
                writeln!(w, "x,y,psi")?;
                for (pt, psi) in self.dofs.node_points.iter().zip(&stream.psi) {
                    writeln!(w, "{},{},{}", fmt17(pt.x), fmt17(pt.y), fmt17(*psi))?;
                }
                Ok(())
            })?;
        }
        if o.fields {
            export_fields(&solution.fields, &self.mesh, &self.dofs, stream, dir)?;
        }
        Ok(())
    }
}

pub struct CaseSolution {
    pub fields: SolutionFields,
    pub report: SolveReport,
}

/// Scalar results of one case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub label: String,
    pub config: CaseConfig,
    /// Hot-wall Nusselt number with the configured weighting.
    pub nu: f64,
    pub nu_unweighted: f64,
    /// Hot-wall heat from the discrete energy equation.
    pub nu_variational: f64,
    pub psi_max: f64,
    pub psi_min: f64,
    /// Hot/cold mismatch from gradient traces.
    pub imbalance: f64,
    pub imbalance_variational: f64,
    pub iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

impl CaseOutcome {
    /// A row for a case that failed before producing a solution.
    pub fn failed(config: &CaseConfig, error: &Error) -> Self {
        CaseOutcome {
            label: config.label(),
            config: config.clone(),
            nu: f64::NAN,
            nu_unweighted: f64::NAN,
            nu_variational: f64::NAN,
            psi_max: f64::NAN,
            psi_min: f64::NAN,
            imbalance: f64::NAN,
            imbalance_variational: f64::NAN,
            iterations: 0,
            converged: false,
            error: Some(error.to_string()),
        }
    }

    /// `geometry grid Pr Ra phi Nu psi_max psi_min iterations`
    pub fn summary_line(&self) -> String {
        let c = &self.config;
        format!(
            "{} {} {} {} {} {:.6} {:.6} {:.6} {}",
            c.geometry.shape.name(),
            c.grid,
            c.prandtl,
            c.rayleigh,
            c.phi,
            self.nu,
            self.psi_max,
            self.psi_min,
            self.iterations
        )
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let g = &c.geometry;
        let mut s = String::new();
        let _ = writeln!(s, "case: {}", self.label);
        let _ = writeln!(s, "geometry: {}", g.shape);
        let _ = writeln!(s, "arm_thickness: {}", g.arm_thickness);
        let _ = writeln!(s, "bridge_height: {}", g.bridge_height);
        let _ = writeln!(s, "heater_extent: {}", g.heater_extent);
        let _ = writeln!(s, "grid: {}", c.grid);
        let _ = writeln!(s, "pr: {}", c.prandtl);
        let _ = writeln!(s, "ra: {}", c.rayleigh);
        let _ = writeln!(s, "phi: {}", c.phi);
        let _ = writeln!(s, "nu: {}", fmt17(self.nu));
        let _ = writeln!(s, "nu_unweighted: {}", fmt17(self.nu_unweighted));
        let _ = writeln!(s, "nu_variational: {}", fmt17(self.nu_variational));
        let _ = writeln!(s, "psi_max: {}", fmt17(self.psi_max));
        let _ = writeln!(s, "psi_min: {}", fmt17(self.psi_min));
        let _ = writeln!(s, "energy_imbalance: {:.6e}", self.imbalance);
        let _ = writeln!(s, "energy_imbalance_variational: {:.6e}", self.imbalance_variational);
        let _ = writeln!(s, "iterations: {}", self.iterations);
        s
    }
}

/// Runs one case; artifacts go under `out/<label>` when `out` is given.
pub fn run_case(config: &CaseConfig, out: Option<&Path>) -> Result<CaseOutcome> {
    let prepared = PreparedCase::new(config)?;
    let solution = prepared.solve(config.rayleigh, None)?;
    prepared.evaluate(config.rayleigh, &solution, out)
}
