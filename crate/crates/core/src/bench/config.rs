//! Plain-text run configuration: `[section]` headers and `key = value` lines.
//!
//! Any key can be overridden from the environment as `HNF_<SECTION>_<KEY>`,
//! e.g. `HNF_CASE_RA=1e4` or `HNF_SWEEP_PHI=0,0.01`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mesh::{GeometrySpec, Shape};
use crate::mms::CaseKind;
use crate::post::NusseltWeighting;
use crate::solver::SolverConfig;

pub const ENV_PREFIX: &str = "HNF_";

const KEYS: &[(&str, &[&str])] = &[
    (
        "geometry",
        &["shape", "outer_width", "outer_height", "arm_thickness", "bridge_height", "heater_extent"],
    ),
    ("case", &["grid", "pr", "ra", "phi", "split", "materials"]),
    ("solver", &["tolerance", "max_newton", "max_picard", "damping", "continuation"]),
    ("output", &["fields", "nusselt", "streamfunction", "report", "weighting"]),
    ("sweep", &["ra", "pr", "phi", "heater_extent"]),
    ("gridstudy", &["grids"]),
    ("tables", &["ids"]),
    ("mms", &["case", "levels", "pr", "ra"]),
];

/// Which artifacts a case writes besides its summary line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputSelection {
    pub fields: bool,
    pub nusselt: bool,
    pub streamfunction: bool,
    pub report: bool,
}

impl Default for OutputSelection {
    fn default() -> Self {
        OutputSelection {
            fields: false,
            nusselt: true,
            streamfunction: true,
            report: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub geometry: GeometrySpec,
    pub grid: usize,
    pub prandtl: f64,
    pub rayleigh: f64,
    pub phi: f64,
    /// Share of `phi` carried by the first particle species.
    pub split: f64,
    /// Material table; the bundled one when `None`.
    pub materials: Option<PathBuf>,
    pub solver: SolverConfig,
    pub outputs: OutputSelection,
    pub weighting: NusseltWeighting,
}

impl Default for CaseConfig {
    fn default() -> Self {
        CaseConfig {
            geometry: GeometrySpec::square(),
            grid: 32,
            prandtl: 0.71,
            rayleigh: 1e3,
            phi: 0.0,
            split: 0.5,
            materials: None,
            solver: SolverConfig::default(),
            outputs: OutputSelection::default(),
            weighting: NusseltWeighting::Conductivity,
        }
    }
}

impl CaseConfig {
    pub fn new(geometry: GeometrySpec, grid: usize, prandtl: f64, rayleigh: f64, phi: f64) -> Self {
        CaseConfig {
            geometry,
            grid,
            prandtl,
            rayleigh,
            phi,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.prandtl.is_finite() && self.prandtl > 0.0) {
            return Err(Error::InvalidStudy(format!("Pr must be positive, got {}", self.prandtl)));
        }
        if !(self.rayleigh.is_finite() && self.rayleigh >= 0.0) {
            return Err(Error::InvalidStudy(format!("Ra must be non-negative, got {}", self.rayleigh)));
        }
        self.solver.validate()
    }

    /// Directory name of the case, unique within a sweep.
    pub fn label(&self) -> String {
        let mut s = format!(
            "{}_n{}_pr{}_ra{}_phi{}",
            self.geometry.shape.name(),
            self.grid,
            compact(self.prandtl),
            compact(self.rayleigh),
            compact(self.phi)
        );
        if self.geometry.heater_extent != 1.0 {
            s.push_str(&format!("_heat{}", compact(self.geometry.heater_extent)));
        }
        s
    }
}

/// Shortest round-trip formatting, safe for file names.
fn compact(v: f64) -> String {
    let s = format!("{v}");
    if s.len() > 6 && v != 0.0 && v.abs() >= 1e3 {
        format!("{v:e}")
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepAxes {
    pub rayleigh: Vec<f64>,
    pub prandtl: Vec<f64>,
    pub phi: Vec<f64>,
    pub heater_extent: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsSettings {
    pub case: CaseKind,
    pub levels: usize,
    pub prandtl: f64,
    pub rayleigh: f64,
}

impl Default for MmsSettings {
    fn default() -> Self {
        MmsSettings {
            case: CaseKind::Trigonometric,
            levels: 4,
            prandtl: 1.0,
            rayleigh: 1e2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchConfig {
    pub case: CaseConfig,
    pub sweep: SweepAxes,
    pub grids: Vec<usize>,
    pub tables: Vec<u32>,
    pub mms: MmsSettings,
}

/// `(section, key) -> (value, line)`; line 0 marks an environment override.
type RawConfig = BTreeMap<(String, String), (String, usize)>;

fn config_error(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_raw(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::new();
    let mut section: Option<String> = None;
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| config_error(no, format!("unterminated section header `{line}`")))?
                .trim()
                .to_ascii_lowercase();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(config_error(no, format!("unknown section [{name}]")));
            }
            section = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_error(no, format!("expected `key = value`, got `{line}`")));
        };
        let Some(sec) = &section else {
            return Err(config_error(no, "key outside of any [section]"));
        };
        let key = key.trim().to_ascii_lowercase();
        check_key(sec, &key, no)?;
        if raw.insert((sec.clone(), key.clone()), (value.trim().to_string(), no)).is_some() {
            return Err(config_error(no, format!("duplicate key `{key}` in [{sec}]")));
        }
    }
    Ok(raw)
}

fn check_key(section: &str, key: &str, line: usize) -> Result<()> {
    let known = KEYS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
    if known.contains(&key) {
        Ok(())
    } else {
        Err(config_error(line, format!("unknown key `{key}` in [{section}]")))
    }
}

/// Applies `HNF_<SECTION>_<KEY>` variables. Variables with the prefix that
/// name no known key are rejected so typos do not pass silently.
fn apply_env(raw: &mut RawConfig, vars: impl IntoIterator<Item = (String, String)>) -> Result<()> {
    for (name, value) in vars {
        let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let rest = rest.to_ascii_lowercase();
        let found = KEYS.iter().find_map(|(sec, keys)| {
            let key = rest.strip_prefix(sec)?.strip_prefix('_')?;
            keys.contains(&key).then(|| (sec.to_string(), key.to_string()))
        });
        match found {
            Some(k) => {
                raw.insert(k, (value, 0));
            }
            None => return Err(config_error(0, format!("environment variable {name} names no config key"))),
        }
    }
    Ok(())
}

struct Reader {
    raw: RawConfig,
}

impl Reader {
    fn get(&self, section: &str, key: &str) -> Option<&(String, usize)> {
        self.raw.get(&(section.to_string(), key.to_string()))
    }

    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| config_error(*line, format!("{section}.{key} = `{v}`: {e}"))),
        }
    }

    fn list<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<T>()
                        .map_err(|e| config_error(*line, format!("{section}.{key} entry `{s}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn flag(&self, section: &str, key: &str) -> Result<Option<bool>> {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, line)) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(Some(true)),
                "false" | "no" | "off" | "0" => Ok(Some(false)),
                _ => Err(config_error(*line, format!("{section}.{key}: expected a boolean, got `{v}`"))),
            },
        }
    }

    fn line(&self, section: &str, key: &str) -> usize {
        self.get(section, key).map_or(0, |(_, l)| *l)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl BenchConfig {
    /// Parses `text`, then applies environment overrides from `vars`.
    pub fn parse_with_env(text: &str, vars: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let mut raw = parse_raw(text)?;
        apply_env(&mut raw, vars)?;
        Self::from_raw(Reader { raw })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_env(text, std::iter::empty())
    }

    /// Reads `path` (or starts from defaults when `None`) and applies the
    /// process environment.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
            None => String::new(),
        };
        Self::parse_with_env(&text, std::env::vars())
    }

    fn from_raw(r: Reader) -> Result<Self> {
        let mut cfg = BenchConfig::default();

        let shape: Option<Shape> = r.parse("geometry", "shape")?;
        let g = &mut cfg.case.geometry;
        if let Some(shape) = shape {
            *g = GeometrySpec::of_shape(shape);
        }
        set(&mut g.outer_width, r.parse("geometry", "outer_width")?);
        set(&mut g.outer_height, r.parse("geometry", "outer_height")?);
        set(&mut g.arm_thickness, r.parse("geometry", "arm_thickness")?);
        set(&mut g.bridge_height, r.parse("geometry", "bridge_height")?);
        set(&mut g.heater_extent, r.parse("geometry", "heater_extent")?);
        g.validate()
            .map_err(|e| config_error(r.line("geometry", "shape"), e.to_string()))?;

        let c = &mut cfg.case;
        set(&mut c.grid, r.parse("case", "grid")?);
        set(&mut c.prandtl, r.parse("case", "pr")?);
        set(&mut c.rayleigh, r.parse("case", "ra")?);
        set(&mut c.phi, r.parse("case", "phi")?);
        set(&mut c.split, r.parse("case", "split")?);
        c.materials = r.parse("case", "materials")?;
        if !(c.prandtl > 0.0) {
            return Err(config_error(r.line("case", "pr"), format!("pr must be positive, got {}", c.prandtl)));
        }
        if !(c.rayleigh >= 0.0) {
            return Err(config_error(r.line("case", "ra"), format!("ra must be non-negative, got {}", c.rayleigh)));
        }

        let s = &mut c.solver;
        set(&mut s.tolerance, r.parse("solver", "tolerance")?);
        set(&mut s.max_newton, r.parse("solver", "max_newton")?);
        set(&mut s.max_picard, r.parse("solver", "max_picard")?);
        set(&mut s.damping, r.parse("solver", "damping")?);
        set(&mut s.continuation, r.list("solver", "continuation")?);
        s.validate()
            .map_err(|e| config_error(r.line("solver", "tolerance"), e.to_string()))?;

        let o = &mut c.outputs;
        set(&mut o.fields, r.flag("output", "fields")?);
        set(&mut o.nusselt, r.flag("output", "nusselt")?);
        set(&mut o.streamfunction, r.flag("output", "streamfunction")?);
        set(&mut o.report, r.flag("output", "report")?);
        if let Some((w, line)) = r.get("output", "weighting") {
            c.weighting = match w.to_ascii_lowercase().as_str() {
                "conductivity" => NusseltWeighting::Conductivity,
                "unweighted" => NusseltWeighting::Unweighted,
                _ => return Err(config_error(*line, format!("weighting must be conductivity or unweighted, got `{w}`"))),
            };
        }

        set(&mut cfg.sweep.rayleigh, r.list("sweep", "ra")?);
        set(&mut cfg.sweep.prandtl, r.list("sweep", "pr")?);
        set(&mut cfg.sweep.phi, r.list("sweep", "phi")?);
        set(&mut cfg.sweep.heater_extent, r.list("sweep", "heater_extent")?);
        set(&mut cfg.grids, r.list("gridstudy", "grids")?);
        set(&mut cfg.tables, r.list("tables", "ids")?);

        if let Some((k, line)) = r.get("mms", "case") {
            cfg.mms.case = match k.to_ascii_lowercase().as_str() {
                "zero" => CaseKind::Zero,
                "polynomial" => CaseKind::Polynomial,
                "trigonometric" => CaseKind::Trigonometric,
                _ => return Err(config_error(*line, format!("mms.case must be zero, polynomial or trigonometric, got `{k}`"))),
            };
        }
        set(&mut cfg.mms.levels, r.parse("mms", "levels")?);
        set(&mut cfg.mms.prandtl, r.parse("mms", "pr")?);
        set(&mut cfg.mms.rayleigh, r.parse("mms", "ra")?);
        Ok(cfg)
    }
}
