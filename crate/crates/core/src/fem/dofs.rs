//! Degree-of-freedom numbering for the Taylor–Hood pair.
//!
//! P2 nodes are the mesh vertices followed by the edge midpoints in sorted
//! edge order; the P1 pressure lives on the vertices, so pressure dof `k` is
//! vertex `k`. Velocity is prescribed (zero) on every boundary node.
//! Temperature is prescribed on hot and cold walls and free on adiabatic walls.

use std::collections::HashMap;

use crate::fem::element::{TriangleGeometry, LOCAL_EDGES};
use crate::mesh::{BoundaryTag, Mesh, Point2};

/// Which boundary temperature nodes carry Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemperatureBoundary {
    /// Hot walls fixed at 1, cold walls at 0, adiabatic walls natural.
    FromTags,
    /// Every boundary node is prescribed (manufactured-solution studies).
    AllDirichlet,
}

/// Offsets of the unknown blocks `[U | V | T | p | multiplier]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemLayout {
    pub u: usize,
    pub v: usize,
    pub t: usize,
    pub p: usize,
    pub multiplier: usize,
    pub size: usize,
}

#[derive(Debug, Clone)]
pub struct DofMap {
    pub n_vertices: usize,
    /// Sorted vertex pairs; edge `e` carries P2 node `n_vertices + e`.
    pub edges: Vec<[usize; 2]>,
    /// Coordinates of every P2 node.
    pub node_points: Vec<Point2>,
    /// Global P2 node of each local node, per triangle.
    pub element_nodes: Vec<[usize; 6]>,
    pub velocity_dirichlet: Vec<bool>,
    /// Prescribed temperature per P2 node, `None` when free.
    pub temperature_dirichlet: Vec<Option<f64>>,
    /// Free-index of each P2 node in the U (and V) block.
    pub velocity_free: Vec<Option<usize>>,
    pub temperature_free: Vec<Option<usize>>,
    pub n_velocity_free: usize,
    pub n_temperature_free: usize,
    /// `(triangle, local edge)` owning each mesh boundary edge, in mesh order.
    pub boundary_owner: Vec<(usize, usize)>,
    pub boundary_tags: Vec<BoundaryTag>,
    pub temperature_policy: TemperatureBoundary,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        Self::with_policy(mesh, TemperatureBoundary::FromTags)
    }

    pub fn with_policy(mesh: &Mesh, policy: TemperatureBoundary) -> Self {
        let nv = mesh.nodes.len();
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut keys: Vec<(usize, usize)> = mesh
            .triangles
            .iter()
            .flat_map(|t| LOCAL_EDGES.iter().map(move |[a, b]| key(t[*a], t[*b])))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        for (i, k) in keys.iter().enumerate() {
            edge_ids.insert(*k, i);
        }
        let edges: Vec<[usize; 2]> = keys.iter().map(|&(a, b)| [a, b]).collect();

        let mut node_points = mesh.nodes.clone();
        node_points.extend(edges.iter().map(|[a, b]| mesh.nodes[*a].midpoint(mesh.nodes[*b])));

        let mut owner: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let element_nodes: Vec<[usize; 6]> = mesh
            .triangles
            .iter()
            .enumerate()
            .map(|(e, t)| {
                let mut n = [t[0], t[1], t[2], 0, 0, 0];
                for (k, [a, b]) in LOCAL_EDGES.iter().enumerate() {
                    let kk = key(t[*a], t[*b]);
                    n[3 + k] = nv + edge_ids[&kk];
                    owner.insert(kk, (e, k));
                }
                n
            })
            .collect();

        let np2 = node_points.len();
        let mut velocity_dirichlet = vec![false; np2];
        let mut hot = vec![false; np2];
        let mut cold = vec![false; np2];
        let mut boundary_owner = Vec::with_capacity(mesh.boundary_edges.len());
        for be in &mesh.boundary_edges {
            let [a, b] = be.nodes;
            let kk = key(a, b);
            let mid = nv + edge_ids[&kk];
            boundary_owner.push(owner[&kk]);
            for n in [a, b, mid] {
                velocity_dirichlet[n] = true;
                match (policy, be.tag) {
                    (TemperatureBoundary::AllDirichlet, _) => cold[n] = true,
                    (_, BoundaryTag::HotWall) => hot[n] = true,
                    (_, BoundaryTag::ColdWall) => cold[n] = true,
                    (_, BoundaryTag::Adiabatic) => {}
                }
            }
        }
        let temperature_dirichlet: Vec<Option<f64>> = (0..np2)
            .map(|n| {
                if hot[n] {
                    Some(1.0)
                } else if cold[n] {
                    Some(0.0)
                } else {
                    None
                }
            })
            .collect();

        let (velocity_free, n_velocity_free) = number_free(velocity_dirichlet.iter().map(|d| !*d));
        let (temperature_free, n_temperature_free) =
            number_free(temperature_dirichlet.iter().map(Option::is_none));

        DofMap {
            n_vertices: nv,
            edges,
            node_points,
            element_nodes,
            velocity_dirichlet,
            temperature_dirichlet,
            velocity_free,
            temperature_free,
            n_velocity_free,
            n_temperature_free,
            boundary_owner,
            boundary_tags: mesh.boundary_edges.iter().map(|e| e.tag).collect(),
            temperature_policy: policy,
        }
    }

    /// Number of P2 nodes (dofs per scalar P2 field).
    pub fn n_p2(&self) -> usize {
        self.node_points.len()
    }

    /// Number of P1 pressure dofs.
    pub fn n_pressure(&self) -> usize {
        self.n_vertices
    }

    pub fn n_elements(&self) -> usize {
        self.element_nodes.len()
    }

    pub fn layout(&self) -> SystemLayout {
        let u = 0;
        let v = u + self.n_velocity_free;
        let t = v + self.n_velocity_free;
        let p = t + self.n_temperature_free;
        let multiplier = p + self.n_vertices;
        SystemLayout {
            u,
            v,
            t,
            p,
            multiplier,
            size: multiplier + 1,
        }
    }

    pub fn geometry(&self, e: usize) -> TriangleGeometry {
        let n = &self.element_nodes[e];
        TriangleGeometry::new([
            self.node_points[n[0]],
            self.node_points[n[1]],
            self.node_points[n[2]],
        ])
    }

    /// Global unknown index of each of the 21 local element dofs
    /// (`U0..5, V0..5, T0..5, p0..2`), `None` for prescribed values.
    pub fn element_unknowns(&self, e: usize, layout: &SystemLayout) -> [Option<usize>; 21] {
        let n = &self.element_nodes[e];
        let mut out = [None; 21];
        for i in 0..6 {
            out[i] = self.velocity_free[n[i]].map(|f| layout.u + f);
            out[6 + i] = self.velocity_free[n[i]].map(|f| layout.v + f);
            out[12 + i] = self.temperature_free[n[i]].map(|f| layout.t + f);
        }
        for k in 0..3 {
            out[18 + k] = Some(layout.p + n[k]);
        }
        out
    }

    /// Row-permutation-free check used by tests: number of boundary P2 nodes.
    pub fn n_boundary_nodes(&self) -> usize {
        self.velocity_dirichlet.iter().filter(|d| **d).count()
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn number_free(free: impl Iterator<Item = bool>) -> (Vec<Option<usize>>, usize) {
    let mut next = 0;
    let map = free
        .map(|f| {
            f.then(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    (map, next)
}
