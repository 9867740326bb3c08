use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::bench::case::{CaseOutcome, PreparedCase};
use crate::bench::config::{CaseConfig, SweepAxes};
use crate::error::{Error, Result};
use crate::post::export::{fmt17, write_file};
use crate::post::strictly_increasing;

/// Runs `jobs` on up to `workers` threads; results come back in job order.
pub fn run_parallel<J: Sync, R: Send>(jobs: &[J], workers: usize, f: impl Fn(&J) -> R + Sync) -> Vec<R> {
    let workers = workers.clamp(1, jobs.len().max(1));
    if workers == 1 {
        return jobs.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let r = f(&jobs[i]);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every job ran"))
        .collect()
}

/// Solves `rayleighs` in the given order on one discretization, each
/// converged case seeding the next.
pub fn run_chain(base: &CaseConfig, rayleighs: &[f64], out: Option<&Path>) -> Vec<CaseOutcome> {
    let prepared = match PreparedCase::new(base) {
        Ok(p) => p,
        Err(e) => {
            return rayleighs
                .iter()
                .map(|&ra| CaseOutcome::failed(&CaseConfig { rayleigh: ra, ..base.clone() }, &e))
                .collect()
        }
    };
    let mut warm = None;
    let mut rows = Vec::with_capacity(rayleighs.len());
    for &ra in rayleighs {
        let cfg = CaseConfig { rayleigh: ra, ..base.clone() };
        let result = prepared
            .solve(ra, warm.as_ref().map(|(f, r)| (f, *r)))
            .and_then(|sol| prepared.evaluate(ra, &sol, out).map(|o| (o, sol)));
        match result {
            Ok((outcome, sol)) => {
                warm = outcome.converged.then_some((sol.fields, ra));
                rows.push(outcome);
            }
            Err(e) => {
                warm = None;
                rows.push(CaseOutcome::failed(&cfg, &e));
            }
        }
    }
    rows
}

/// Cartesian product of the axes around `base`. Empty axes take the base
/// value. Rows are ordered by heater extent, Pr, Ra, then φ.
pub fn run_sweep(base: &CaseConfig, axes: &SweepAxes, workers: usize, out: Option<&Path>) -> Result<SweepTable> {
    let or_base = |v: &Vec<f64>, b: f64| if v.is_empty() { vec![b] } else { v.clone() };
    let heaters = or_base(&axes.heater_extent, base.geometry.heater_extent);
    let prandtls = or_base(&axes.prandtl, base.prandtl);
    let phis = or_base(&axes.phi, base.phi);
    let rayleighs = or_base(&axes.rayleigh, base.rayleigh);
    let mut chains = Vec::new();
    for &h in &heaters {
        for &pr in &prandtls {
            for &phi in &phis {
                let mut cfg = base.clone();
                cfg.geometry.heater_extent = h;
                cfg.prandtl = pr;
                cfg.phi = phi;
                chains.push(cfg);
            }
        }
    }
    // warm starts need increasing Ra; rows are reordered afterwards anyway
    let mut ordered = rayleighs.clone();
    ordered.sort_by(f64::total_cmp);
    let results = run_parallel(&chains, workers, |cfg| run_chain(cfg, &ordered, out));

    let mut rows = Vec::with_capacity(chains.len() * rayleighs.len());
    let mut results = results.into_iter();
    for _ in &heaters {
        for _ in &prandtls {
            let block: Vec<Vec<CaseOutcome>> = (0..phis.len()).map(|_| results.next().unwrap()).collect();
            for &ra in &rayleighs {
                let k = ordered.iter().position(|r| *r == ra).unwrap();
                for chain in &block {
                    rows.push(chain[k].clone());
                }
            }
        }
    }
    let table = SweepTable { rows };
    if let Some(out) = out {
        table.write_csv(&out.join("sweep.csv"))?;
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<CaseOutcome>,
}

pub const TABLE_HEADER: &str =
    "geometry,grid,heater_extent,pr,ra,phi,nu,nu_unweighted,nu_variational,psi_max,psi_min,imbalance,imbalance_variational,iterations,converged,error";

impl SweepTable {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(TABLE_HEADER);
        s.push('\n');
        for r in &self.rows {
            let c = &r.config;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                c.geometry.shape.name(),
                c.grid,
                fmt17(c.geometry.heater_extent),
                fmt17(c.prandtl),
                fmt17(c.rayleigh),
                fmt17(c.phi),
                fmt17(r.nu),
                fmt17(r.nu_unweighted),
                fmt17(r.nu_variational),
                fmt17(r.psi_max),
                fmt17(r.psi_min),
                fmt17(r.imbalance),
                fmt17(r.imbalance_variational),
                r.iterations,
                r.converged,
                csv_field(r.error.as_deref().unwrap_or(""))
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let body = self.to_csv();
        write_file(path, |w| std::io::Write::write_all(w, body.as_bytes()))
    }

    /// Checks the Nusselt trends along every axis with more than one value:
    /// increasing in φ, Ra and Pr, decreasing as the heater shrinks. One line
    /// per checked group.
    pub fn monotonicity(&self) -> Vec<MonotonicityCheck> {
        let mut checks = Vec::new();
        let key = |r: &CaseOutcome| {
            let c = &r.config;
            [c.geometry.heater_extent, c.prandtl, c.rayleigh, c.phi]
        };
        for (axis, name) in [(3, "phi"), (2, "ra"), (1, "pr"), (0, "heater_extent")] {
            let mut groups: Vec<([f64; 4], Vec<(f64, f64)>)> = Vec::new();
            for r in self.rows.iter().filter(|r| r.converged) {
                let mut k = key(r);
                let x = k[axis];
                k[axis] = f64::NAN;
                let same = |a: &[f64; 4]| a.iter().zip(&k).all(|(p, q)| p.to_bits() == q.to_bits());
                match groups.iter_mut().find(|(g, _)| same(g)) {
                    Some((_, v)) => v.push((x, r.nu)),
                    None => groups.push((k, vec![(x, r.nu)])),
                }
            }
            for (k, mut pts) in groups.into_iter().filter(|(_, v)| v.len() > 1) {
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                let nu: Vec<f64> = pts.iter().map(|p| p.1).collect();
                // a shorter heater gives less heat, so Nu rises with the extent
                let passed = strictly_increasing(&nu);
                let fixed: Vec<String> = ["heater_extent", "pr", "ra", "phi"]
                    .iter()
                    .zip(k)
                    .filter(|(_, v)| !v.is_nan())
                    .map(|(n, v)| format!("{n}={v}"))
                    .collect();
                checks.push(MonotonicityCheck {
                    axis: name,
                    fixed: fixed.join(" "),
                    values: pts,
                    passed,
                });
            }
        }
        checks
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityCheck {
    pub axis: &'static str,
    pub fixed: String,
    /// `(axis value, Nu)` sorted by axis value.
    pub values: Vec<(f64, f64)>,
    pub passed: bool,
}

impl std::fmt::Display for MonotonicityCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "ok" } else { "VIOLATED" };
        write!(f, "monotone in {} at {}: {}", self.axis, self.fixed, verdict)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridStudy {
    pub rows: Vec<CaseOutcome>,
}

impl GridStudy {
    fn finest_pair(&self) -> Option<(&CaseOutcome, &CaseOutcome)> {
        let n = self.rows.len();
        (n >= 2).then(|| (&self.rows[n - 2], &self.rows[n - 1]))
    }

    /// Relative change of Nu between the two finest grids.
    pub fn nu_change(&self) -> f64 {
        self.finest_pair().map_or(0.0, |(a, b)| relative_change(a.nu, b.nu))
    }

    /// Largest relative change of Nu, ψ_max and ψ_min between the two finest grids.
    pub fn max_relative_change(&self) -> f64 {
        self.finest_pair().map_or(0.0, |(a, b)| {
            relative_change(a.nu, b.nu)
                .max(relative_change(a.psi_max, b.psi_max))
                .max(relative_change(a.psi_min, b.psi_min))
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("grid,nu,psi_max,psi_min,imbalance,iterations,converged\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.config.grid,
                fmt17(r.nu),
                fmt17(r.psi_max),
                fmt17(r.psi_min),
                fmt17(r.imbalance),
                r.iterations,
                r.converged
            );
        }
        let _ = writeln!(s, "# nu_change_finest,{}", fmt17(self.nu_change()));
        let _ = writeln!(s, "# max_change_finest,{}", fmt17(self.max_relative_change()));
        s
    }
}

/// `|b − a| / |b|`, zero when both vanish.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (b - a).abs() / b.abs()
    }
}

/// Runs `config` on each grid. Grids must be non-decreasing; a repeated grid
/// reuses the earlier result.
pub fn run_grid_study(config: &CaseConfig, grids: &[usize], workers: usize, out: Option<&Path>) -> Result<GridStudy> {
    if grids.is_empty() {
        return Err(Error::InvalidStudy("grid study needs at least one grid".into()));
    }
    if grids.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidStudy(format!("grids must be non-decreasing, got {grids:?}")));
    }
    let mut unique = grids.to_vec();
    unique.dedup();
    let outcomes = run_parallel(&unique, workers, |&n| {
        let cfg = CaseConfig { grid: n, ..config.clone() };
        run_chain(&cfg, &[cfg.rayleigh], out).pop().unwrap()
    });
    let rows = grids
        .iter()
        .map(|n| outcomes[unique.iter().position(|u| u == n).unwrap()].clone())
        .collect();
    let study = GridStudy { rows };
    if let Some(out) = out {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let body = study.to_csv();
        write_file(&out.join("gridstudy.csv"), |w| std::io::Write::write_all(w, body.as_bytes()))?;
    }
    Ok(study)
}
