//! Affine triangle geometry and the P1 / P2 Lagrange bases.
//!
//! Local P2 node order: the three vertices, then the midpoints of edges
//! (0,1), (1,2) and (2,0). Local edge `k` joins vertices `k` and `k+1 mod 3`
//! and carries midpoint node `3 + k`.

use crate::mesh::Point2;

/// Local vertex pairs of the three edges; edge `k` has P2 midpoint node `3 + k`.
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

#[derive(Debug, Clone, Copy)]
pub struct TriangleGeometry {
    pub vertices: [Point2; 3],
    pub area: f64,
    /// Constant gradients of the barycentric coordinates.
    pub grad_lambda: [[f64; 2]; 3],
}

impl TriangleGeometry {
    pub fn new(vertices: [Point2; 3]) -> Self {
        let [p0, p1, p2] = vertices;
        let det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
        let inv = 1.0 / det;
        TriangleGeometry {
            vertices,
            area: 0.5 * det,
            grad_lambda: [
                [(p1.y - p2.y) * inv, (p2.x - p1.x) * inv],
                [(p2.y - p0.y) * inv, (p0.x - p2.x) * inv],
                [(p0.y - p1.y) * inv, (p1.x - p0.x) * inv],
            ],
        }
    }

    /// Physical point at barycentric coordinates `l`.
    pub fn map(&self, l: [f64; 3]) -> Point2 {
        let [p0, p1, p2] = self.vertices;
        Point2::new(
            l[0] * p0.x + l[1] * p1.x + l[2] * p2.x,
            l[0] * p0.y + l[1] * p1.y + l[2] * p2.y,
        )
    }

    /// Barycentric coordinates of a physical point.
    pub fn barycentric(&self, p: Point2) -> [f64; 3] {
        let v0 = self.vertices[0];
        let g = &self.grad_lambda;
        let dx = p.x - v0.x;
        let dy = p.y - v0.y;
        let l1 = g[1][0] * dx + g[1][1] * dy;
        let l2 = g[2][0] * dx + g[2][1] * dy;
        [1.0 - l1 - l2, l1, l2]
    }
}

pub fn p2_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

pub fn p2_gradients(l: [f64; 3], g: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let mut out = [[0.0; 2]; 6];
    for i in 0..3 {
        let s = 4.0 * l[i] - 1.0;
        out[i] = [s * g[i][0], s * g[i][1]];
    }
    for (k, [a, b]) in LOCAL_EDGES.iter().copied().enumerate() {
        out[3 + k] = [
            4.0 * (l[a] * g[b][0] + l[b] * g[a][0]),
            4.0 * (l[a] * g[b][1] + l[b] * g[a][1]),
        ];
    }
    out
}

/// Barycentric coordinates of the six P2 nodes.
pub const P2_NODES: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.5, 0.5, 0.0],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
];
