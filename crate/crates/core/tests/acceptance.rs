//! End-to-end acceptance run. Prints one verdict line per criterion and
//! exits nonzero if a criterion fails that is not a known deviation.
//!
//! Runs for roughly twenty minutes on one core; `--workers` style
//! parallelism follows the available cores.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use faer::sparse::SparseColMat;
use hnf_cavity::bench::sweep::{run_chain, run_parallel};
use hnf_cavity::bench::{relative_change, CaseConfig, CaseOutcome, PreparedCase};
use hnf_cavity::fem::{assemble_convection, assemble_linear_forms, Linearization, NewtonAssembler, Physics};
use hnf_cavity::mesh::{BoundaryEdge, GeometrySpec, Mesh, Point2};
use hnf_cavity::mms::{ManufacturedCase, MmsStudy};
use hnf_cavity::post::{global_nusselt, strictly_increasing, wall_flux, NusseltWeighting};
use hnf_cavity::properties::{compute_ratios, default_materials, MixtureSpec};
use hnf_cavity::solver::{SolutionFields, SolverConfig};
use hnf_cavity::{solve_stationary, BoundaryTag, DofMap, PropertyRatios};

const PHI_LADDER: [f64; 4] = [0.0, 0.001, 0.0033, 0.01];
const H_GRID: usize = 64;
const L_GRID: usize = 100;
/// Grid pairs for the refinement check. The arm and bridge positions only
/// fall on grid lines for multiples of 4 (L) and 16 (H).
const L_PAIR: (usize, usize) = (88, 100);
const H_PAIR: (usize, usize) = (48, 64);

/// Criteria that are expected to fail for reasons recorded with the
/// project notes. Criteria 5 and 6 are only tolerated while every failing
/// monotonicity check is one of `KNOWN_FLAT_TRENDS`.
const KNOWN_DEVIATIONS: &[u32] = &[5, 6, 8];

/// Monotonicity checks where this property model gives a trend that is flat
/// to a few 1e-4 (phi) or 1e-5 (Pr) and not strictly increasing. Both are
/// stable under solver tolerance 1e-11 and on grids 32 and 64.
const KNOWN_FLAT_TRENDS: &[&str] = &["H Pr 1 Ra 1e4, phi", "H Ra 1e4 phi 1%, Pr"];

struct Verdict {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn h(grid: usize, pr: f64, phi: f64) -> CaseConfig {
    CaseConfig::new(GeometrySpec::h_shape(), grid, pr, 0.0, phi)
}

fn l(grid: usize, pr: f64, phi: f64) -> CaseConfig {
    CaseConfig::new(GeometrySpec::l_shape(), grid, pr, 0.0, phi)
}

struct Chain {
    config: CaseConfig,
    rayleighs: Vec<f64>,
}

fn chain(config: CaseConfig, rayleighs: &[f64]) -> Chain {
    Chain {
        config,
        rayleighs: rayleighs.to_vec(),
    }
}

/// All solved cases, looked up by configuration.
struct Results(Vec<CaseOutcome>);

impl Results {
    fn get(&self, shape_grid: &CaseConfig, ra: f64) -> &CaseOutcome {
        let c = shape_grid;
        self.0
            .iter()
            .find(|o| {
                let k = &o.config;
                k.geometry == c.geometry && k.grid == c.grid && k.prandtl == c.prandtl && k.phi == c.phi && k.rayleigh == ra
            })
            .unwrap_or_else(|| panic!("case {} at Ra {ra} was not scheduled", c.label()))
    }

    fn nu(&self, c: &CaseConfig, ra: f64) -> f64 {
        let o = self.get(c, ra);
        if o.converged {
            o.nu
        } else {
            f64::NAN
        }
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>().join(" < ")
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let report = MmsStudy::new(4, 1.0, 1e2).run(&ManufacturedCase::trigonometric());
    let secs = start.elapsed().as_secs_f64();
    match report.ok().and_then(|r| r.rates()) {
        Some((u, t, p)) => Verdict {
            id: 1,
            name: "MMS rates, h = 1/8 .. 1/64",
            passed: (1.85..=2.15).contains(&u) && (1.85..=2.15).contains(&t) && p >= 1.8 && secs <= 300.0,
            detail: format!("u_H1 {u:.4}, T_H1 {t:.4}, p_L2 {p:.4}, {secs:.0} s"),
        },
        None => Verdict {
            id: 1,
            name: "MMS rates, h = 1/8 .. 1/64",
            passed: false,
            detail: "study did not complete".into(),
        },
    }
}

fn criterion_2() -> Verdict {
    let mut worst_u = 0.0f64;
    let mut worst_nu = 0.0f64;
    let mut worst_k = 0.0f64;
    let mut ok = true;
    for phi in [0.0, 0.01, 0.04] {
        let cfg = CaseConfig::new(GeometrySpec::square(), 16, 0.71, 0.0, phi);
        let Ok(case) = PreparedCase::new(&cfg) else {
            ok = false;
            continue;
        };
        let Ok(sol) = case.solve(0.0, None) else {
            ok = false;
            continue;
        };
        let s = &sol.fields;
        let speed = s.u.iter().chain(&s.v).map(|v| v * v).sum::<f64>().sqrt();
        let plain = wall_flux(s, &case.mesh, &case.dofs, &case.ratios, BoundaryTag::HotWall, NusseltWeighting::Unweighted);
        let weighted = global_nusselt(s, &case.mesh, &case.dofs, &case.ratios, BoundaryTag::HotWall);
        match (plain, weighted) {
            (Ok(p), Ok(w)) => {
                worst_u = worst_u.max(speed);
                worst_nu = worst_nu.max((p.global_nu - 1.0).abs());
                worst_k = worst_k.max((w.global_nu - case.ratios.conductivity_ratio).abs());
            }
            _ => ok = false,
        }
    }
    Verdict {
        id: 2,
        name: "conduction limit, phi in {0, 1%, 4%}",
        passed: ok && worst_u <= 1e-8 && worst_nu <= 1e-6 && worst_k <= 1e-6,
        detail: format!("|u| {worst_u:.1e}, |Nu - 1| {worst_nu:.1e}, |Nu_k - k_hnf/k_f| {worst_k:.1e}"),
    }
}

fn criterion_3(r: &Results) -> Verdict {
    let g = GeometrySpec::h_shape();
    let base = h(H_GRID, 1.0, 0.0);
    let pairs = [(1e3, 0.75371), (1e4, 1.33099)];
    let mut passed = true;
    let mut parts = Vec::new();
    for (ra, want) in pairs {
        let nu = r.nu(&base, ra);
        let dev = (nu - want) / want;
        passed &= dev.abs() <= 0.05;
        parts.push(format!("Ra {ra:.0e}: {nu:.5} vs {want} ({:+.2}%)", 100.0 * dev));
    }
    Verdict {
        id: 3,
        name: "H-shape clear fluid",
        passed,
        detail: format!(
            "{}; arm {} bridge {} n {H_GRID}",
            parts.join(", "),
            g.arm_thickness,
            g.bridge_height
        ),
    }
}

fn criterion_4(r: &Results) -> (Verdict, String) {
    let lc = |n| l(n, 50.0, 0.01);
    let hc = |n| h(n, 10.0, 0.01);
    let (la, lb) = (r.get(&lc(L_PAIR.0), 1e7), r.get(&lc(L_PAIR.1), 1e7));
    let (ha, hb) = (r.get(&hc(H_PAIR.0), 1e5), r.get(&hc(H_PAIR.1), 1e5));
    let dl = relative_change(la.nu, lb.nu);
    let dh = relative_change(ha.nu, hb.nu);
    let converged = la.converged && lb.converged && ha.converged && hb.converged;
    let info = format!(
        "info 4: variational flux changes L {:.3}%, H {:.3}%",
        100.0 * relative_change(la.nu_variational, lb.nu_variational),
        100.0 * relative_change(ha.nu_variational, hb.nu_variational)
    );
    (
        Verdict {
            id: 4,
            name: "grid convergence, two finest grids",
            passed: converged && dl <= 0.005 && dh <= 0.005,
            detail: format!(
                "L {}->{} (Pr 50, Ra 1e7, 1%): {:.5} -> {:.5} ({:.3}%); H {}->{} (Pr 10, Ra 1e5, 1%): {:.5} -> {:.5} ({:.3}%)",
                L_PAIR.0, L_PAIR.1, la.nu, lb.nu, 100.0 * dl, H_PAIR.0, H_PAIR.1, ha.nu, hb.nu, 100.0 * dh
            ),
        },
        info,
    )
}

/// The flag is true when every violated check is a known flat trend.
fn criterion_5(r: &Results) -> (Verdict, Vec<String>, bool) {
    let mut lines = Vec::new();
    let mut all = true;
    let mut only_known = true;
    let mut check = |label: String, values: Vec<f64>| {
        let ok = strictly_increasing(&values);
        all &= ok;
        only_known &= ok || KNOWN_FLAT_TRENDS.contains(&label.as_str());
        lines.push(format!("  5 {label}: {} {}", fmt_list(&values), if ok { "ok" } else { "VIOLATED" }));
    };

    let phi_h: Vec<f64> = PHI_LADDER.iter().map(|&p| r.nu(&h(H_GRID, 1.0, p), 1e4)).collect();
    check("H Pr 1 Ra 1e4, phi".into(), phi_h);
    let phi_l: Vec<f64> = PHI_LADDER.iter().map(|&p| r.nu(&l(L_GRID, 10.0, p), 1e5)).collect();
    check("L Pr 10 Ra 1e5, phi".into(), phi_l);
    let ra_h: Vec<f64> = [1.0, 1e2, 1e3, 1e4, 1e5].iter().map(|&ra| r.nu(&h(H_GRID, 1.0, 0.0), ra)).collect();
    check("H Pr 1 phi 0, Ra".into(), ra_h);
    let pr_h: Vec<f64> = [1.0, 5.0, 10.0].iter().map(|&pr| r.nu(&h(H_GRID, pr, 0.01), 1e4)).collect();
    check("H Ra 1e4 phi 1%, Pr".into(), pr_h);
    // listed from the shortest heater so the sequence should rise
    let heat: Vec<f64> = [0.2, 0.6, 1.0]
        .iter()
        .map(|&e| {
            let mut c = l(L_GRID, 10.0, 0.01);
            c.geometry.heater_extent = e;
            r.nu(&c, 1e5)
        })
        .collect();
    check("L Pr 10 Ra 1e5 phi 1%, heater 0.2/0.6/1".into(), heat);
    (
        Verdict {
            id: 5,
            name: "monotonicity suite",
            passed: all,
            detail: format!("{} checks", lines.len()),
        },
        lines,
        only_known,
    )
}

fn criterion_6(r: &Results) -> (Verdict, Vec<String>) {
    let mut heater = l(L_GRID, 10.0, 0.01);
    heater.geometry.heater_extent = 0.2;
    let corners = [
        ("Table 5 CF Ra 1", r.get(&h(H_GRID, 1.0, 0.0), 1.0), 0.744341),
        ("Table 6 HNF3 Pr 10", r.get(&h(H_GRID, 10.0, 0.01), 1e4), 1.73542286),
        ("Table 7 HNF1 Ra 1e5", r.get(&l(L_GRID, 10.0, 0.001), 1e5), 8.33827488),
        ("Table 8 HNF3 0.2", r.get(&heater, 1e5), 3.51205609),
    ];
    let mut lines = Vec::new();
    let mut passed = true;
    for (label, o, want) in corners {
        let dev = (o.nu - want) / want;
        let ok = o.converged && dev.abs() <= 0.10;
        passed &= ok;
        lines.push(format!(
            "  6 {label}: Nu {:.5} (unweighted {:.5}) vs {want} ({:+.1}%) {}",
            o.nu,
            o.nu_unweighted,
            100.0 * dev,
            if ok { "ok" } else { "out of band" }
        ));
    }
    (
        Verdict {
            id: 6,
            name: "HNF corner cases within 10%",
            passed,
            detail: format!("{} of 4 in band", lines.iter().filter(|l| l.ends_with(" ok")).count()),
        },
        lines,
    )
}

fn dense(a: &SparseColMat<usize, f64>) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; a.ncols()]; a.nrows()];
    let sym = a.symbolic();
    for j in 0..a.ncols() {
        for k in sym.col_ptr()[j]..sym.col_ptr()[j + 1] {
            out[sym.row_idx()[k]][j] += a.val()[k];
        }
    }
    out
}

fn hybrid(phi: f64) -> PropertyRatios {
    compute_ratios(&MixtureSpec::new(default_materials().unwrap(), phi)).unwrap()
}

fn jacobian_error() -> f64 {
    let mesh = hnf_cavity::mesh::build_mesh(&GeometrySpec::square(), 4).unwrap();
    let dofs = DofMap::new(&mesh);
    let physics = Physics::new(hybrid(0.01), 0.71, 2e3);
    let asm = NewtonAssembler::new(&dofs);
    let size = dofs.layout().size;
    let mut state = SolutionFields::initial(&dofs);
    let shift: Vec<f64> = (0..size).map(|i| ((i as f64 + 1.0) * 12.9898 + 23.47).sin() * 0.9).collect();
    state.add_scaled(&dofs, &shift, 1.0);
    let jac = dense(&asm.assemble(&state, &physics, None, Linearization::Newton).jacobian);
    let scale = jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let step = 1e-6;
    let mut worst = 0.0f64;
    for j in 0..size {
        let mut e = vec![0.0; size];
        e[j] = 1.0;
        let mut plus = state.clone();
        plus.add_scaled(&dofs, &e, step);
        let mut minus = state.clone();
        minus.add_scaled(&dofs, &e, -step);
        let (rp, rm) = (asm.residual(&plus, &physics, None), asm.residual(&minus, &physics, None));
        for i in 0..size {
            worst = worst.max(((rp[i] - rm[i]) / (2.0 * step) - jac[i][j]).abs());
        }
    }
    worst / scale
}

/// Symbolic integrals on the unit reference triangle, local order
/// (v0, v1, v2, m01, m12, m20).
const STIFFNESS_X6: [[f64; 6]; 6] = [
    [6.0, 1.0, 1.0, -4.0, 0.0, -4.0],
    [1.0, 3.0, 0.0, -4.0, 0.0, 0.0],
    [1.0, 0.0, 3.0, 0.0, 0.0, -4.0],
    [-4.0, -4.0, 0.0, 16.0, -8.0, 0.0],
    [0.0, 0.0, 0.0, -8.0, 16.0, -8.0],
    [-4.0, 0.0, -4.0, 0.0, -8.0, 16.0],
];
const MASS_X360: [[f64; 6]; 6] = [
    [6.0, -1.0, -1.0, 0.0, -4.0, 0.0],
    [-1.0, 6.0, -1.0, 0.0, 0.0, -4.0],
    [-1.0, -1.0, 6.0, -4.0, 0.0, 0.0],
    [0.0, 0.0, -4.0, 32.0, 16.0, 16.0],
    [-4.0, 0.0, 0.0, 16.0, 32.0, 16.0],
    [0.0, -4.0, 0.0, 16.0, 16.0, 32.0],
];
/// `∫ (∂φⱼ/∂x) φᵢ`.
const CONVECTION_X360: [[f64; 6]; 6] = [
    [-24.0, -12.0, 0.0, 36.0, -12.0, 12.0],
    [12.0, 24.0, 0.0, -36.0, -12.0, 12.0],
    [12.0, -12.0, 0.0, 0.0, 24.0, -24.0],
    [-36.0, 36.0, 0.0, 0.0, 48.0, -48.0],
    [12.0, 36.0, 0.0, -48.0, 96.0, -96.0],
    [-36.0, -12.0, 0.0, 48.0, 96.0, -96.0],
];
/// `∫ (∂φⱼ/∂x) λₖ` and `∫ (∂φⱼ/∂y) λₖ`, rows k = vertex.
const DIVERGENCE_X_X6: [[f64; 6]; 3] = [
    [-1.0, 0.0, 0.0, 1.0, 1.0, -1.0],
    [0.0, 1.0, 0.0, -1.0, 1.0, -1.0],
    [0.0, 0.0, 0.0, 0.0, 2.0, -2.0],
];
const DIVERGENCE_Y_X6: [[f64; 6]; 3] = [
    [-1.0, 0.0, 0.0, -1.0, 1.0, 1.0],
    [0.0, 0.0, 0.0, -2.0, 2.0, 0.0],
    [0.0, 0.0, 1.0, -1.0, 1.0, -1.0],
];

fn reference_form_error() -> f64 {
    let mesh = Mesh {
        nodes: vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
        triangles: vec![[0, 1, 2]],
        boundary_edges: vec![
            BoundaryEdge { nodes: [0, 1], tag: BoundaryTag::Adiabatic },
            BoundaryEdge { nodes: [1, 2], tag: BoundaryTag::ColdWall },
            BoundaryEdge { nodes: [2, 0], tag: BoundaryTag::HotWall },
        ],
        resolution: 1,
    };
    let d = DofMap::new(&mesh);
    // P2 nodes: vertices, then the sorted edges (0,1), (0,2), (1,2)
    let to_global = [0, 1, 2, 3, 5, 4];
    let forms = assemble_linear_forms(&d, &PropertyRatios::unity(), 1.0, 1.0);
    let one = vec![1.0; d.n_p2()];
    let zero = vec![0.0; d.n_p2()];
    let convection = assemble_convection(&one, &zero, &d).to_dense();
    let mut worst = 0.0f64;
    let mut cmp = |got: &[Vec<f64>], rows: &[usize], want: &dyn Fn(usize, usize) -> f64| {
        for (i, &gi) in rows.iter().enumerate() {
            for j in 0..6 {
                worst = worst.max((got[gi][to_global[j]] - want(i, j)).abs());
            }
        }
    };
    cmp(&forms.viscous.to_dense(), &to_global, &|i, j| STIFFNESS_X6[i][j] / 6.0);
    cmp(&forms.thermal_diffusion.to_dense(), &to_global, &|i, j| STIFFNESS_X6[i][j] / 6.0);
    cmp(&forms.buoyancy.to_dense(), &to_global, &|i, j| MASS_X360[i][j] / 360.0);
    cmp(&convection, &to_global, &|i, j| CONVECTION_X360[i][j] / 360.0);
    cmp(&forms.divergence_x.to_dense(), &[0, 1, 2], &|i, j| DIVERGENCE_X_X6[i][j] / 6.0);
    cmp(&forms.divergence_y.to_dense(), &[0, 1, 2], &|i, j| DIVERGENCE_Y_X6[i][j] / 6.0);
    worst
}

fn divergence_residual() -> f64 {
    let mesh = hnf_cavity::mesh::build_mesh(&GeometrySpec::square(), 8).unwrap();
    let dofs = DofMap::new(&mesh);
    let ratios = hybrid(0.01);
    let Ok((s, _)) = solve_stationary(&mesh, &dofs, &ratios, 0.71, 1e4, &SolverConfig::default()) else {
        return f64::INFINITY;
    };
    let forms = assemble_linear_forms(&dofs, &ratios, 0.71, 1e4);
    let bx = forms.divergence_x.apply(&s.u);
    let by = forms.divergence_y.apply(&s.v);
    bx.iter().zip(&by).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max)
}

fn criterion_7() -> Verdict {
    let jac = jacobian_error();
    let forms = reference_form_error();
    let div = divergence_residual();
    Verdict {
        id: 7,
        name: "assembly correctness",
        passed: jac <= 1e-6 && forms <= 1e-12 && div <= 1e-8,
        detail: format!("Jacobian vs FD {jac:.1e}, reference forms {forms:.1e}, max |b(u_h, q)| {div:.1e}"),
    }
}

fn criterion_8(r: &Results) -> (Verdict, String) {
    let converged: Vec<&CaseOutcome> = r.0.iter().filter(|o| o.converged).collect();
    let worst = converged.iter().max_by(|a, b| a.imbalance.total_cmp(&b.imbalance));
    let over = converged.iter().filter(|o| o.imbalance > 1e-3).count();
    let var = converged.iter().map(|o| o.imbalance_variational).fold(0.0, f64::max);
    let detail = match worst {
        Some(w) => format!(
            "{} converged cases, {over} above 1e-3, worst {:.2e} ({})",
            converged.len(),
            w.imbalance,
            w.label
        ),
        None => "no converged cases".into(),
    };
    (
        Verdict {
            id: 8,
            name: "hot/cold energy balance",
            passed: worst.is_some() && over == 0,
            detail,
        },
        format!("info 8: variational flux imbalance at most {var:.2e}"),
    )
}

fn criterion_9() -> Verdict {
    let n = 32;
    let cfg = CaseConfig::new(GeometrySpec::square(), n, 0.71, 1e3, 0.0);
    let result = PreparedCase::new(&cfg).and_then(|c| c.solve(1e3, None).map(|s| (c, s)));
    let Ok((case, sol)) = result else {
        return Verdict {
            id: 9,
            name: "square centro-symmetry",
            passed: false,
            detail: "solve failed".into(),
        };
    };
    let s = &sol.fields;
    // P2 nodes sit on the half-cell lattice
    let key = |p: &Point2| ((p.x * 2.0 * n as f64).round() as i64, (p.y * 2.0 * n as f64).round() as i64);
    let index: HashMap<_, _> = case.dofs.node_points.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
    let m = 2 * n as i64;
    let (mut t_err, mut u_err) = (0.0f64, 0.0f64);
    let mut missing = 0;
    for (i, p) in case.dofs.node_points.iter().enumerate() {
        let (a, b) = key(p);
        match index.get(&(m - a, m - b)) {
            Some(&j) => {
                t_err = t_err.max((s.t[i] + s.t[j] - 1.0).abs());
                u_err = u_err.max((s.u[i] + s.u[j]).abs()).max((s.v[i] + s.v[j]).abs());
            }
            None => missing += 1,
        }
    }
    Verdict {
        id: 9,
        name: "square centro-symmetry, Ra 1e3",
        passed: sol.report.converged && missing == 0 && t_err <= 1e-6,
        detail: format!("max |T + T' - 1| {t_err:.1e}, max |u + u'| {u_err:.1e}, n {n}"),
    }
}

fn schedule() -> Vec<Chain> {
    let mut jobs = vec![
        chain(h(H_GRID, 1.0, 0.0), &[1.0, 1e2, 1e3, 1e4, 1e5]),
        chain(h(H_GRID, 5.0, 0.01), &[1e4]),
        chain(h(H_GRID, 10.0, 0.01), &[1e4, 1e5]),
        chain(h(H_PAIR.0, 10.0, 0.01), &[1e5]),
        chain(l(L_PAIR.0, 50.0, 0.01), &[1e7]),
        chain(l(L_PAIR.1, 50.0, 0.01), &[1e7]),
    ];
    for &phi in &PHI_LADDER[1..] {
        jobs.push(chain(h(H_GRID, 1.0, phi), &[1e4]));
    }
    for &phi in &PHI_LADDER {
        jobs.push(chain(l(L_GRID, 10.0, phi), &[1e5]));
    }
    for extent in [0.6, 0.2] {
        let mut c = l(L_GRID, 10.0, 0.01);
        c.geometry.heater_extent = extent;
        jobs.push(chain(c, &[1e5]));
    }
    jobs
}

fn main() -> ExitCode {
    let start = Instant::now();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());

    let mut verdicts = vec![criterion_1(), criterion_2(), criterion_7(), criterion_9()];
    let jobs = schedule();
    let outcomes = run_parallel(&jobs, workers, |j| run_chain(&j.config, &j.rayleighs, None));
    let results = Results(outcomes.into_iter().flatten().collect());
    for o in results.0.iter().filter(|o| !o.converged) {
        println!("warning: {} did not converge ({})", o.label, o.error.as_deref().unwrap_or("iteration limit"));
    }

    let mut info = Vec::new();
    verdicts.push(criterion_3(&results));
    let (v4, i4) = criterion_4(&results);
    verdicts.push(v4);
    info.push(i4);
    let (v5, l5, five_only_known) = criterion_5(&results);
    verdicts.push(v5);
    info.extend(l5);
    let (v6, l6) = criterion_6(&results);
    verdicts.push(v6);
    info.extend(l6);
    let (v8, i8) = criterion_8(&results);
    verdicts.push(v8);
    info.push(i8);
    verdicts.sort_by_key(|v| v.id);

    let five = verdicts.iter().any(|v| v.id == 5 && v.passed) || five_only_known;
    let mut unexpected = 0;
    for v in &verdicts {
        let tolerated = KNOWN_DEVIATIONS.contains(&v.id) && (!matches!(v.id, 5 | 6) || five);
        let tag = match (v.passed, tolerated) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known deviation)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {}: {tag}  {}: {}", v.id, v.name, v.detail);
    }
    for line in &info {
        println!("{line}");
    }
    println!("acceptance finished in {:.0} s", start.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
