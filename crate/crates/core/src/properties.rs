//! Thermophysical property model of the Cu–Al₂O₃/water hybrid nanofluid.
//!
//! Density, `ρβ` and `ρc_p` mix linearly by volume, viscosity follows
//! Brinkman and conductivity is obtained by applying the Maxwell model twice:
//! water with the Al₂O₃ fraction first, then that effective medium with the
//! Cu fraction.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

/// Upper guard on the total particle volume fraction.
pub const MAX_PHI: f64 = 0.05;

const BUNDLED_MATERIALS: &str = include_str!("../data/materials.txt");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSpec {
    pub density: f64,
    pub specific_heat: f64,
    pub conductivity: f64,
    pub expansion_coeff: f64,
}

impl MaterialSpec {
    fn validate(&self, name: &str) -> Result<()> {
        let fields = [
            ("density", self.density),
            ("specific_heat", self.specific_heat),
            ("conductivity", self.conductivity),
            ("expansion_coeff", self.expansion_coeff),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidMixture(format!(
                    "{name}.{field} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Base fluid and the two particle species, in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialTable {
    pub base: MaterialSpec,
    pub particle_a: MaterialSpec,
    pub particle_b: MaterialSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    pub base: MaterialSpec,
    pub particle_a: MaterialSpec,
    pub particle_b: MaterialSpec,
    pub phi_total: f64,
    /// Share of `phi_total` carried by `particle_a`.
    pub split_a: f64,
}

impl MixtureSpec {
    pub fn new(materials: MaterialTable, phi_total: f64) -> Self {
        MixtureSpec {
            base: materials.base,
            particle_a: materials.particle_a,
            particle_b: materials.particle_b,
            phi_total,
            split_a: 0.5,
        }
    }

    pub fn with_split(mut self, split_a: f64) -> Self {
        self.split_a = split_a;
        self
    }
}

/// Coefficient ratios of the nondimensional equations, plus `k_hnf/k_f` for wall fluxes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyRatios {
    /// ρ_f / ρ_hnf
    pub rho_ratio: f64,
    /// μ_hnf / μ_f
    pub mu_ratio: f64,
    /// (ρβ)_hnf / (ρ_hnf β_f)
    pub rhobeta_ratio: f64,
    /// α_hnf / α_f
    pub alpha_ratio: f64,
    /// k_hnf / k_f
    pub conductivity_ratio: f64,
}

impl PropertyRatios {
    /// Clear fluid: every ratio is one.
    pub const fn unity() -> Self {
        PropertyRatios {
            rho_ratio: 1.0,
            mu_ratio: 1.0,
            rhobeta_ratio: 1.0,
            alpha_ratio: 1.0,
            conductivity_ratio: 1.0,
        }
    }

    /// Coefficient of the viscous form: (ρ_f/ρ_hnf)(μ_hnf/μ_f) Pr.
    pub fn viscous_coefficient(&self, prandtl: f64) -> f64 {
        self.rho_ratio * self.mu_ratio * prandtl
    }

    /// Coefficient of the buoyancy form: (ρβ)_hnf/(ρ_hnf β_f) Pr Ra.
    pub fn buoyancy_coefficient(&self, prandtl: f64, rayleigh: f64) -> f64 {
        self.rhobeta_ratio * prandtl * rayleigh
    }
}

/// Maxwell effective conductivity of `fraction` spheres of `particle` in `matrix`.
fn maxwell(matrix: f64, particle: f64, fraction: f64) -> f64 {
    matrix * (particle + 2.0 * matrix - 2.0 * fraction * (matrix - particle))
        / (particle + 2.0 * matrix + fraction * (matrix - particle))
}

pub fn compute_ratios(mix: &MixtureSpec) -> Result<PropertyRatios> {
    let phi = mix.phi_total;
    if !(0.0..=MAX_PHI).contains(&phi) {
        return Err(Error::InvalidMixture(format!(
            "phi_total must lie in [0, {MAX_PHI}], got {phi}"
        )));
    }
    if !(0.0..=1.0).contains(&mix.split_a) {
        return Err(Error::InvalidMixture(format!(
            "split_a must lie in [0, 1], got {}",
            mix.split_a
        )));
    }
    mix.base.validate("base")?;
    mix.particle_a.validate("particle_a")?;
    mix.particle_b.validate("particle_b")?;

    let (f, a, b) = (&mix.base, &mix.particle_a, &mix.particle_b);
    let phi_a = mix.split_a * phi;
    let phi_b = phi - phi_a;
    let mix_linear = |qf: f64, qa: f64, qb: f64| (1.0 - phi) * qf + phi_a * qa + phi_b * qb;

    let rho = mix_linear(f.density, a.density, b.density);
    let rho_beta = mix_linear(
        f.density * f.expansion_coeff,
        a.density * a.expansion_coeff,
        b.density * b.expansion_coeff,
    );
    let rho_cp = mix_linear(
        f.density * f.specific_heat,
        a.density * a.specific_heat,
        b.density * b.specific_heat,
    );
    let k_mid = maxwell(f.conductivity, b.conductivity, phi_b);
    let k = maxwell(k_mid, a.conductivity, phi_a);

    let conductivity_ratio = k / f.conductivity;
    Ok(PropertyRatios {
        rho_ratio: f.density / rho,
        mu_ratio: (1.0 - phi).powf(-2.5),
        rhobeta_ratio: rho_beta / (rho * f.expansion_coeff),
        alpha_ratio: conductivity_ratio / (rho_cp / (f.density * f.specific_heat)),
        conductivity_ratio,
    })
}

/// Parses a material table: one `name density specific_heat conductivity
/// expansion_coeff` line per material, `#` starts a comment. The first three
/// entries are taken as base fluid, particle a and particle b.
pub fn parse_materials<R: BufRead>(reader: R) -> Result<Vec<(String, MaterialSpec)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::MaterialData {
            line: line_no,
            message: e.to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tok: Vec<&str> = content.split_whitespace().collect();
        if tok.len() != 5 {
            return Err(Error::MaterialData {
                line: line_no,
                message: format!("expected 5 fields, found {}", tok.len()),
            });
        }
        let mut v = [0.0; 4];
        for (slot, s) in v.iter_mut().zip(&tok[1..]) {
            *slot = s.parse().map_err(|_| Error::MaterialData {
                line: line_no,
                message: format!("`{s}` is not a number"),
            })?;
        }
        let spec = MaterialSpec {
            density: v[0],
            specific_heat: v[1],
            conductivity: v[2],
            expansion_coeff: v[3],
        };
        spec.validate(tok[0]).map_err(|e| Error::MaterialData {
            line: line_no,
            message: e.to_string(),
        })?;
        out.push((tok[0].to_string(), spec));
    }
    Ok(out)
}

fn table_from(entries: Vec<(String, MaterialSpec)>) -> Result<MaterialTable> {
    if entries.len() < 3 {
        return Err(Error::MaterialData {
            line: 0,
            message: format!("need base fluid and two particle species, found {}", entries.len()),
        });
    }
    Ok(MaterialTable {
        base: entries[0].1,
        particle_a: entries[1].1,
        particle_b: entries[2].1,
    })
}

/// Water, Cu and Al₂O₃ from the bundled data file.
pub fn default_materials() -> Result<MaterialTable> {
    table_from(parse_materials(BUNDLED_MATERIALS.as_bytes())?)
}

pub fn load_materials(path: &Path) -> Result<MaterialTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    table_from(parse_materials(std::io::BufReader::new(file))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mix(phi: f64) -> MixtureSpec {
        MixtureSpec::new(default_materials().unwrap(), phi)
    }

    #[test]
    fn clear_fluid_is_unity() {
        let r = compute_ratios(&mix(0.0)).unwrap();
        assert_eq!(r, PropertyRatios::unity());
    }

    #[test]
    fn brinkman_at_one_percent() {
        let r = compute_ratios(&mix(0.01)).unwrap();
        assert!((r.mu_ratio - 0.99f64.powf(-2.5)).abs() < 1e-15);
        assert!((r.mu_ratio - 1.02544).abs() < 1e-5);
    }

    #[test]
    fn dense_particles_lower_rho_ratio() {
        let r = compute_ratios(&mix(0.01)).unwrap();
        assert!(r.rho_ratio < 1.0);
        assert!(r.conductivity_ratio > 1.0);
    }

    #[test]
    fn equal_materials_only_change_viscosity() {
        let w = default_materials().unwrap().base;
        let m = MixtureSpec {
            base: w,
            particle_a: w,
            particle_b: w,
            phi_total: 0.03,
            split_a: 0.3,
        };
        let r = compute_ratios(&m).unwrap();
        for v in [r.rho_ratio, r.rhobeta_ratio, r.alpha_ratio, r.conductivity_ratio] {
            assert!((v - 1.0).abs() < 1e-14, "{v}");
        }
        assert!(r.mu_ratio > 1.0);
    }

    #[test]
    fn out_of_range_phi_rejected() {
        assert!(compute_ratios(&mix(-1e-3)).is_err());
        assert!(compute_ratios(&mix(0.051)).is_err());
        assert!(compute_ratios(&mix(0.01).with_split(1.2)).is_err());
    }

    #[test]
    fn bundled_table_positive() {
        let t = default_materials().unwrap();
        for m in [t.base, t.particle_a, t.particle_b] {
            for v in [m.density, m.specific_heat, m.conductivity, m.expansion_coeff] {
                assert!(v > 0.0);
            }
        }
    }

    #[test]
    fn malformed_table_reports_line() {
        let err = parse_materials("# c\nwater 1 2 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MaterialData { line: 2, .. }));
        let err = parse_materials("water 1 2 x 4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MaterialData { line: 1, .. }));
        let err = parse_materials("water 1 2 -3 4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MaterialData { line: 1, .. }));
        assert!(table_from(parse_materials("water 1 2 3 4\n".as_bytes()).unwrap()).is_err());
    }

    #[test]
    fn overriding_table_changes_output() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        std::fs::write(&path, "water 997.1 4179 0.613 21e-5\nCu 8933 385 401 1.67e-5\nAg 10500 235 429 1.89e-5\n").unwrap();
        let alt = load_materials(&path).unwrap();
        let a = compute_ratios(&mix(0.01)).unwrap();
        let b = compute_ratios(&MixtureSpec::new(alt, 0.01)).unwrap();
        assert_ne!(a.rho_ratio, b.rho_ratio);
        assert_ne!(a.conductivity_ratio, b.conductivity_ratio);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn monotone_in_phi(p in 0.0f64..0.049, dp in 1e-4f64..1e-3) {
                let lo = compute_ratios(&mix(p)).unwrap();
                let hi = compute_ratios(&mix((p + dp).min(MAX_PHI))).unwrap();
                prop_assert!(hi.mu_ratio > lo.mu_ratio);
                prop_assert!(hi.rho_ratio < lo.rho_ratio);
                prop_assert!(hi.conductivity_ratio > lo.conductivity_ratio);
            }

            #[test]
            fn pure_function(p in 0.0f64..MAX_PHI, s in 0.0f64..1.0) {
                let a = compute_ratios(&mix(p).with_split(s)).unwrap();
                let b = compute_ratios(&mix(p).with_split(s)).unwrap();
                prop_assert_eq!(a.rho_ratio.to_bits(), b.rho_ratio.to_bits());
                prop_assert_eq!(a.alpha_ratio.to_bits(), b.alpha_ratio.to_bits());
                prop_assert!(a.rho_ratio > 0.0 && a.mu_ratio > 0.0 && a.rhobeta_ratio > 0.0 && a.alpha_ratio > 0.0);
            }
        }
    }
}
