//! Structured triangulations of the square, L-shaped and H-shaped cavities.
//!
//! Every mesh is cut from an `n x n` background grid over the bounding box of
//! the cavity. Each kept cell is split into two right triangles; the diagonal
//! direction alternates by quadrant so that the triangulation is symmetric
//! under reflection about both centre lines and under point reflection about
//! the centre of the box.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative tolerance used when testing whether outline breakpoints land on grid lines.
const GRID_ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    HotWall,
    ColdWall,
    Adiabatic,
}

impl BoundaryTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::HotWall => "HotWall",
            BoundaryTag::ColdWall => "ColdWall",
            BoundaryTag::Adiabatic => "Adiabatic",
        }
    }

    /// Tag of the wall obtained by mirroring the cavity about its vertical centre line.
    pub fn mirrored(self) -> BoundaryTag {
        match self {
            BoundaryTag::HotWall => BoundaryTag::ColdWall,
            BoundaryTag::ColdWall => BoundaryTag::HotWall,
            BoundaryTag::Adiabatic => BoundaryTag::Adiabatic,
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hotwall" | "hot" => Ok(BoundaryTag::HotWall),
            "coldwall" | "cold" => Ok(BoundaryTag::ColdWall),
            "adiabatic" => Ok(BoundaryTag::Adiabatic),
            _ => Err(Error::InvalidMesh(format!("unknown boundary tag `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Square,
    LShape,
    HShape,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Square => "square",
            Shape::LShape => "lshape",
            Shape::HShape => "hshape",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "square" => Ok(Shape::Square),
            "lshape" | "l" => Ok(Shape::LShape),
            "hshape" | "h" => Ok(Shape::HShape),
            _ => Err(Error::InvalidGeometry(format!("unknown shape `{s}`"))),
        }
    }
}

/// Parametric description of a cavity.
///
/// * L-shape: the box minus its upper-right block, leaving a vertical arm of
///   width `arm_thickness` along the left wall and a horizontal arm of height
///   `arm_thickness` along the bottom wall.
/// * H-shape: two vertical arms of width `arm_thickness` joined by a
///   horizontal bridge of height `bridge_height` centred vertically.
///
/// The hot wall is the extreme left vertical wall (`x = 0`); only its lower
/// `heater_extent` fraction is heated, the rest is adiabatic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySpec {
    pub shape: Shape,
    pub outer_width: f64,
    pub outer_height: f64,
    pub arm_thickness: f64,
    pub bridge_height: f64,
    pub heater_extent: f64,
}

impl GeometrySpec {
    pub fn square() -> Self {
        GeometrySpec {
            shape: Shape::Square,
            outer_width: 1.0,
            outer_height: 1.0,
            arm_thickness: 0.25,
            bridge_height: 0.25,
            heater_extent: 1.0,
        }
    }

    pub fn l_shape() -> Self {
        GeometrySpec {
            shape: Shape::LShape,
            ..Self::square()
        }
    }

    /// H-cavity with the arm and bridge proportions used for all H-shape studies.
    pub fn h_shape() -> Self {
        GeometrySpec {
            shape: Shape::HShape,
            arm_thickness: 0.3125,
            bridge_height: 0.625,
            ..Self::square()
        }
    }

    pub fn of_shape(shape: Shape) -> Self {
        match shape {
            Shape::Square => Self::square(),
            Shape::LShape => Self::l_shape(),
            Shape::HShape => Self::h_shape(),
        }
    }

    pub fn with_heater_extent(mut self, extent: f64) -> Self {
        self.heater_extent = extent;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidGeometry(m));
        let (w, h) = (self.outer_width, self.outer_height);
        if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
            return fail(format!("outer dimensions must be positive, got {w} x {h}"));
        }
        if !(self.heater_extent > 0.0 && self.heater_extent <= 1.0) {
            return fail(format!(
                "heater_extent must lie in (0, 1], got {}",
                self.heater_extent
            ));
        }
        let a = self.arm_thickness;
        match self.shape {
            Shape::Square => {}
            Shape::LShape => {
                if !(a > 0.0 && a < w.min(h)) {
                    return fail(format!("arm_thickness {a} must lie in (0, {})", w.min(h)));
                }
            }
            Shape::HShape => {
                if !(a > 0.0 && 2.0 * a < w && a < h) {
                    return fail(format!(
                        "arm_thickness {a} must be positive and leave room for the bridge"
                    ));
                }
                let b = self.bridge_height;
                if !(b > 0.0 && b < h) {
                    return fail(format!("bridge_height {b} must lie in (0, {h})"));
                }
            }
        }
        Ok(())
    }

    /// Counterclockwise outline polygon.
    pub fn outline(&self) -> Vec<Point2> {
        let (w, h, a) = (self.outer_width, self.outer_height, self.arm_thickness);
        let p = Point2::new;
        match self.shape {
            Shape::Square => vec![p(0.0, 0.0), p(w, 0.0), p(w, h), p(0.0, h)],
            Shape::LShape => vec![
                p(0.0, 0.0),
                p(w, 0.0),
                p(w, a),
                p(a, a),
                p(a, h),
                p(0.0, h),
            ],
            Shape::HShape => {
                let (y0, y1) = self.bridge_span();
                vec![
                    p(0.0, 0.0),
                    p(a, 0.0),
                    p(a, y0),
                    p(w - a, y0),
                    p(w - a, 0.0),
                    p(w, 0.0),
                    p(w, h),
                    p(w - a, h),
                    p(w - a, y1),
                    p(a, y1),
                    p(a, h),
                    p(0.0, h),
                ]
            }
        }
    }

    /// Area of the outline polygon.
    pub fn area(&self) -> f64 {
        let pts = self.outline();
        let n = pts.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
    }

    fn bridge_span(&self) -> (f64, f64) {
        let y0 = 0.5 * (self.outer_height - self.bridge_height);
        (y0, y0 + self.bridge_height)
    }

    /// Closed-set membership test (union of axis-aligned rectangles).
    pub fn contains(&self, p: Point2) -> bool {
        let (w, h, a) = (self.outer_width, self.outer_height, self.arm_thickness);
        let in_rect = |x0: f64, x1: f64, y0: f64, y1: f64| {
            p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1
        };
        match self.shape {
            Shape::Square => in_rect(0.0, w, 0.0, h),
            Shape::LShape => in_rect(0.0, a, 0.0, h) || in_rect(0.0, w, 0.0, a),
            Shape::HShape => {
                let (y0, y1) = self.bridge_span();
                in_rect(0.0, a, 0.0, h) || in_rect(w - a, w, 0.0, h) || in_rect(a, w - a, y0, y1)
            }
        }
    }

    /// Interior x and y coordinates of outline corners, each paired with a label.
    fn breakpoints(&self) -> (Vec<(&'static str, f64)>, Vec<(&'static str, f64)>) {
        let (w, a) = (self.outer_width, self.arm_thickness);
        match self.shape {
            Shape::Square => (vec![], vec![]),
            Shape::LShape => (vec![("arm_thickness", a)], vec![("arm_thickness", a)]),
            Shape::HShape => {
                let (y0, y1) = self.bridge_span();
                (
                    vec![("arm_thickness", a), ("arm_thickness", w - a)],
                    vec![("bridge edge", y0), ("bridge edge", y1)],
                )
            }
        }
    }

    /// Length of the heated part of the hot wall, measured upward from `y = 0`.
    pub fn heated_length(&self) -> f64 {
        self.heater_extent * self.outer_height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    /// Oriented as in the owning triangle, so the domain lies to the left.
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Point2>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Background grid count `n`; doubles on each uniform refinement.
    pub resolution: usize,
}

fn signed_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_aligned(label: &str, value: f64, cell: f64) -> Result<()> {
    let ratio = value / cell;
    if (ratio - ratio.round()).abs() > GRID_ALIGN_TOL * ratio.abs().max(1.0) {
        return Err(Error::InvalidGeometry(format!(
            "{label} {value} is not an integer multiple of the cell size {cell}"
        )));
    }
    Ok(())
}

/// Builds the cut-cell triangulation of `spec` on an `n x n` background grid.
pub fn build_mesh(spec: &GeometrySpec, n: usize) -> Result<Mesh> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::InvalidGeometry(format!("grid count must be at least 2, got {n}")));
    }
    let dx = spec.outer_width / n as f64;
    let dy = spec.outer_height / n as f64;
    let (xs, ys) = spec.breakpoints();
    for (label, x) in xs {
        check_aligned(label, x, dx)?;
    }
    for (label, y) in ys {
        check_aligned(label, y, dy)?;
    }

    let grid_x = |i: usize| spec.outer_width * i as f64 / n as f64;
    let grid_y = |j: usize| spec.outer_height * j as f64 / n as f64;

    let mut keep = vec![false; n * n];
    let mut used = vec![false; (n + 1) * (n + 1)];
    let gid = |i: usize, j: usize| j * (n + 1) + i;
    for j in 0..n {
        for i in 0..n {
            let centre = Point2::new(0.5 * (grid_x(i) + grid_x(i + 1)), 0.5 * (grid_y(j) + grid_y(j + 1)));
            if spec.contains(centre) {
                keep[j * n + i] = true;
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    used[gid(i + di, j + dj)] = true;
                }
            }
        }
    }

    let mut number = vec![usize::MAX; (n + 1) * (n + 1)];
    let mut nodes = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            if used[gid(i, j)] {
                number[gid(i, j)] = nodes.len();
                nodes.push(Point2::new(grid_x(i), grid_y(j)));
            }
        }
    }

    let mut triangles = Vec::with_capacity(2 * keep.iter().filter(|k| **k).count());
    for j in 0..n {
        for i in 0..n {
            if !keep[j * n + i] {
                continue;
            }
            let p00 = number[gid(i, j)];
            let p10 = number[gid(i + 1, j)];
            let p01 = number[gid(i, j + 1)];
            let p11 = number[gid(i + 1, j + 1)];
            let left = 2 * i + 1 < n;
            let bottom = 2 * j + 1 < n;
            if left == bottom {
                triangles.push([p00, p10, p11]);
                triangles.push([p00, p11, p01]);
            } else {
                triangles.push([p00, p10, p01]);
                triangles.push([p10, p11, p01]);
            }
        }
    }

    let heated = spec.heated_length();
    let eps = 1e-9 * spec.outer_width.max(spec.outer_height);
    let tag_of = |a: Point2, b: Point2| {
        if a.x.abs() < eps && b.x.abs() < eps {
            if 0.5 * (a.y + b.y) <= heated + eps {
                BoundaryTag::HotWall
            } else {
                BoundaryTag::Adiabatic
            }
        } else if (a.x - spec.outer_width).abs() < eps && (b.x - spec.outer_width).abs() < eps {
            BoundaryTag::ColdWall
        } else {
            BoundaryTag::Adiabatic
        }
    };

    let boundary_edges = free_edges(&triangles)
        .into_iter()
        .map(|[a, b]| BoundaryEdge {
            nodes: [a, b],
            tag: tag_of(nodes[a], nodes[b]),
        })
        .collect();

    Ok(Mesh {
        nodes,
        triangles,
        boundary_edges,
        resolution: n,
    })
}

/// Edges used by exactly one triangle, oriented as in that triangle and sorted by node pair.
fn free_edges(triangles: &[[usize; 3]]) -> Vec<[usize; 2]> {
    let mut count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
    for tri in triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            count.entry(edge_key(a, b)).or_insert((0, [a, b])).0 += 1;
        }
    }
    let mut edges: Vec<_> = count
        .into_iter()
        .filter(|(_, (c, _))| *c == 1)
        .map(|(key, (_, oriented))| (key, oriented))
        .collect();
    edges.sort_unstable_by_key(|(key, _)| *key);
    edges.into_iter().map(|(_, e)| e).collect()
}

/// Splits every triangle into four similar children through its edge midpoints.
///
/// Nodes of the refined mesh are renumbered row-major (by `y`, then `x`).
pub fn uniform_refine(mesh: &Mesh) -> Mesh {
    let mut nodes = mesh.nodes.clone();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid = |a: usize, b: usize, nodes: &mut Vec<Point2>| -> usize {
        *midpoint.entry(edge_key(a, b)).or_insert_with(|| {
            let (lo, hi) = edge_key(a, b);
            nodes.push(nodes[lo].midpoint(nodes[hi]));
            nodes.len() - 1
        })
    };

    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let ab = mid(a, b, &mut nodes);
        let bc = mid(b, c, &mut nodes);
        let ca = mid(c, a, &mut nodes);
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    let mut boundary_edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let [a, b] = e.nodes;
        let m = mid(a, b, &mut nodes);
        boundary_edges.push(BoundaryEdge { nodes: [a, m], tag: e.tag });
        boundary_edges.push(BoundaryEdge { nodes: [m, b], tag: e.tag });
    }

    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&i, &j| {
        nodes[i]
            .y
            .total_cmp(&nodes[j].y)
            .then(nodes[i].x.total_cmp(&nodes[j].x))
    });
    let mut renumber = vec![0; nodes.len()];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    let nodes = order.iter().map(|&old| nodes[old]).collect();
    for t in &mut triangles {
        for v in t.iter_mut() {
            *v = renumber[*v];
        }
    }
    for e in &mut boundary_edges {
        for v in e.nodes.iter_mut() {
            *v = renumber[*v];
        }
    }
    boundary_edges.sort_unstable_by_key(|e| edge_key(e.nodes[0], e.nodes[1]));

    Mesh {
        nodes,
        triangles,
        boundary_edges,
        resolution: 2 * mesh.resolution,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshCheck {
    FiniteCoordinates,
    PositiveArea,
    Conforming,
    BoundaryClosure,
    BoundaryEdgeOwnership,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshEntity {
    Node(usize),
    Triangle(usize),
    Edge([usize; 2]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub check: MeshCheck,
    /// `None` when the check passed.
    pub failure: Option<(MeshEntity, String)>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl MeshReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::passed)
    }

    pub fn outcome(&self, check: MeshCheck) -> &CheckOutcome {
        self.outcomes
            .iter()
            .find(|o| o.check == check)
            .expect("every check is reported")
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| !o.passed())
    }
}

/// Checks every structural invariant of a [`Mesh`], reporting the first offender per check.
pub fn validate_mesh(mesh: &Mesh) -> MeshReport {
    let mut outcomes = Vec::new();
    let nn = mesh.nodes.len();

    let bad_node = mesh.nodes.iter().position(|p| !p.is_finite());
    outcomes.push(CheckOutcome {
        check: MeshCheck::FiniteCoordinates,
        failure: bad_node.map(|i| (MeshEntity::Node(i), "non-finite coordinate".to_string())),
    });

    let out_of_range = mesh.triangles.iter().position(|t| t.iter().any(|&v| v >= nn));
    let tri_area = |t: &[usize; 3]| signed_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
    let area_failure = match out_of_range {
        Some(k) => Some((MeshEntity::Triangle(k), "node index out of range".to_string())),
        None => mesh.triangles.iter().enumerate().find_map(|(k, t)| {
            let a = tri_area(t);
            (!(a > 0.0)).then(|| (MeshEntity::Triangle(k), format!("signed area {a:e}")))
        }),
    };
    outcomes.push(CheckOutcome {
        check: MeshCheck::PositiveArea,
        failure: area_failure,
    });
    if out_of_range.is_some() {
        for check in [
            MeshCheck::Conforming,
            MeshCheck::BoundaryClosure,
            MeshCheck::BoundaryEdgeOwnership,
        ] {
            outcomes.push(CheckOutcome {
                check,
                failure: Some((MeshEntity::Triangle(out_of_range.unwrap()), "skipped".into())),
            });
        }
        return MeshReport { outcomes };
    }

    // edge -> (uses in a->b direction, uses in b->a direction) keyed by sorted pair
    let mut uses: HashMap<(usize, usize), [usize; 2]> = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let slot = usize::from(a > b);
            uses.entry(edge_key(a, b)).or_default()[slot] += 1;
        }
    }
    let mut keys: Vec<_> = uses.keys().copied().collect();
    keys.sort_unstable();

    let mut conforming = None;
    for key in &keys {
        let [fwd, bwd] = uses[key];
        if fwd + bwd > 2 || fwd > 1 || bwd > 1 {
            conforming = Some((
                MeshEntity::Edge([key.0, key.1]),
                format!("edge used {fwd}+{bwd} times (overlapping or folded triangles)"),
            ));
            break;
        }
    }
    let once: Vec<(usize, usize)> = keys
        .iter()
        .copied()
        .filter(|k| uses[k][0] + uses[k][1] == 1)
        .collect();
    if conforming.is_none() {
        'edges: for &(a, b) in &once {
            let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
            let len = pa.distance(pb);
            let (xlo, xhi) = (pa.x.min(pb.x), pa.x.max(pb.x));
            let (ylo, yhi) = (pa.y.min(pb.y), pa.y.max(pb.y));
            let tol = 1e-10 * len;
            for (i, p) in mesh.nodes.iter().enumerate() {
                if i == a || i == b || p.x < xlo - tol || p.x > xhi + tol || p.y < ylo - tol || p.y > yhi + tol {
                    continue;
                }
                let cross = (pb.x - pa.x) * (p.y - pa.y) - (pb.y - pa.y) * (p.x - pa.x);
                if cross.abs() <= tol * len {
                    conforming = Some((
                        MeshEntity::Edge([a, b]),
                        format!("hanging node {i} lies on the edge"),
                    ));
                    break 'edges;
                }
            }
        }
    }
    outcomes.push(CheckOutcome {
        check: MeshCheck::Conforming,
        failure: conforming,
    });

    let listed: HashMap<(usize, usize), usize> = mesh
        .boundary_edges
        .iter()
        .enumerate()
        .map(|(i, e)| (edge_key(e.nodes[0], e.nodes[1]), i))
        .collect();
    let mut closure = once
        .iter()
        .find(|k| !listed.contains_key(k))
        .map(|k| (MeshEntity::Edge([k.0, k.1]), "topological boundary edge is not listed".to_string()));
    if closure.is_none() {
        let total: f64 = mesh.triangles.iter().map(tri_area).sum();
        let enclosed: f64 = mesh
            .boundary_edges
            .iter()
            .filter(|e| e.nodes.iter().all(|&v| v < nn))
            .map(|e| {
                let (a, b) = (mesh.nodes[e.nodes[0]], mesh.nodes[e.nodes[1]]);
                0.5 * (a.x * b.y - b.x * a.y)
            })
            .sum();
        if (total - enclosed).abs() > 1e-10 * total.abs().max(1e-300) {
            closure = Some((
                MeshEntity::Triangle(0),
                format!("triangle area {total:e} differs from boundary-enclosed area {enclosed:e}"),
            ));
        }
    }
    outcomes.push(CheckOutcome {
        check: MeshCheck::BoundaryClosure,
        failure: closure,
    });

    let mut seen = HashMap::new();
    let ownership = mesh.boundary_edges.iter().find_map(|e| {
        let [a, b] = e.nodes;
        let key = edge_key(a, b);
        if a >= nn || b >= nn {
            return Some((MeshEntity::Edge(e.nodes), "node index out of range".to_string()));
        }
        if seen.insert(key, ()).is_some() {
            return Some((MeshEntity::Edge(e.nodes), "edge listed twice".to_string()));
        }
        match uses.get(&key) {
            Some(u) if u[0] + u[1] == 1 => None,
            Some(u) => Some((MeshEntity::Edge(e.nodes), format!("edge belongs to {} triangles", u[0] + u[1]))),
            None => Some((MeshEntity::Edge(e.nodes), "edge belongs to no triangle".to_string())),
        }
    });
    outcomes.push(CheckOutcome {
        check: MeshCheck::BoundaryEdgeOwnership,
        failure: ownership,
    });

    MeshReport { outcomes }
}

impl Mesh {
    pub fn triangle_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.triangles[k];
        signed_area(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|k| self.triangle_area(k)).sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .map(|(a, b)| self.nodes[a].distance(self.nodes[b]))
            .fold(0.0, f64::max)
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.boundary_edges.iter().any(|e| e.tag == tag)
    }

    /// Writes the plain-text exchange format.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "nodes {} triangles {} edges {}",
            self.nodes.len(),
            self.triangles.len(),
            self.boundary_edges.len()
        )?;
        for p in &self.nodes {
            writeln!(w, "{:?} {:?}", p.x, p.y)?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        for e in &self.boundary_edges {
            writeln!(w, "{} {} {}", e.nodes[0], e.nodes[1], e.tag)?;
        }
        Ok(())
    }

    /// Reads the plain-text exchange format. The resolution is recovered from the
    /// shortest horizontal edge.
    pub fn read_text<R: BufRead>(r: R) -> Result<Mesh> {
        let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = || -> Result<(usize, String)> {
            loop {
                match lines.next() {
                    Some((_, Ok(l))) if l.trim().is_empty() => continue,
                    Some((no, Ok(l))) => return Ok((no, l)),
                    Some((no, Err(e))) => {
                        return Err(Error::Parse {
                            line: no,
                            message: e.to_string(),
                        })
                    }
                    None => {
                        return Err(Error::Parse {
                            line: 0,
                            message: "unexpected end of input".into(),
                        })
                    }
                }
            }
        };
        let perr = |line: usize, message: String| Error::Parse { line, message };

        let (no, header) = next()?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() != 6 || tok[0] != "nodes" || tok[2] != "triangles" || tok[4] != "edges" {
            return Err(perr(no, format!("malformed header `{header}`")));
        }
        let count = |s: &str| s.parse::<usize>().map_err(|e| perr(no, e.to_string()));
        let (nn, nt, ne) = (count(tok[1])?, count(tok[3])?, count(tok[5])?);

        let mut nodes = Vec::with_capacity(nn);
        for _ in 0..nn {
            let (no, l) = next()?;
            let v: Vec<f64> = l
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|e| perr(no, e.to_string())))
                .collect::<Result<_>>()?;
            if v.len() != 2 {
                return Err(perr(no, "expected `x y`".into()));
            }
            nodes.push(Point2::new(v[0], v[1]));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (no, l) = next()?;
            let v: Vec<usize> = l
                .split_whitespace()
                .map(|s| s.parse::<usize>().map_err(|e| perr(no, e.to_string())))
                .collect::<Result<_>>()?;
            if v.len() != 3 {
                return Err(perr(no, "expected three node indices".into()));
            }
            triangles.push([v[0], v[1], v[2]]);
        }
        let mut boundary_edges = Vec::with_capacity(ne);
        for _ in 0..ne {
            let (no, l) = next()?;
            let tok: Vec<&str> = l.split_whitespace().collect();
            if tok.len() != 3 {
                return Err(perr(no, "expected `a b Tag`".into()));
            }
            let a = tok[0].parse::<usize>().map_err(|e| perr(no, e.to_string()))?;
            let b = tok[1].parse::<usize>().map_err(|e| perr(no, e.to_string()))?;
            let tag = tok[2].parse::<BoundaryTag>().map_err(|e| perr(no, e.to_string()))?;
            boundary_edges.push(BoundaryEdge { nodes: [a, b], tag });
        }

        let width = nodes.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max)
            - nodes.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let dx = triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .filter_map(|(a, b)| {
                let (pa, pb) = (nodes.get(a)?, nodes.get(b)?);
                let d = (pa.x - pb.x).abs();
                (d > 0.0).then_some(d)
            })
            .fold(f64::INFINITY, f64::min);
        let resolution = if dx.is_finite() && width > 0.0 {
            (width / dx).round() as usize
        } else {
            0
        };

        Ok(Mesh {
            nodes,
            triangles,
            boundary_edges,
            resolution,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_text(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Mesh> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Mesh::read_text(std::io::BufReader::new(file))
    }
}
