//! Quadrature on the reference triangle `{(ξ, η) : ξ, η ≥ 0, ξ + η ≤ 1}` and on segments.

/// A rule on the reference triangle with points in barycentric coordinates
/// `(1 - ξ - η, ξ, η)` and weights summing to the reference area `1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    /// Symmetric 7-point rule of degree 5 (Radon).
    pub fn seven_point() -> Self {
        let s15 = 15f64.sqrt();
        let a1 = (6.0 - s15) / 21.0;
        let a2 = (6.0 + s15) / 21.0;
        let w0 = 9.0 / 40.0;
        let w1 = (155.0 - s15) / 1200.0;
        let w2 = (155.0 + s15) / 1200.0;
        let mut points = vec![[1.0 / 3.0; 3]];
        let mut weights = vec![w0];
        for (a, w) in [(a1, w1), (a2, w2)] {
            let b = 1.0 - 2.0 * a;
            for p in [[b, a, a], [a, b, a], [a, a, b]] {
                points.push(p);
                weights.push(w);
            }
        }
        for w in &mut weights {
            *w *= 0.5;
        }
        QuadratureRule {
            points,
            weights,
            degree: 5,
        }
    }

    /// Collapsed (Duffy) tensor-product Gauss rule exact for total degree `degree`.
    pub fn collapsed_gauss(degree: usize) -> Self {
        // the collapsed integrand has degree `degree + 1` in the first variable
        let n = (degree + 3) / 2;
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            let u = x[i];
            for j in 0..n {
                let xi = u;
                let eta = (1.0 - u) * x[j];
                points.push([1.0 - xi - eta, xi, eta]);
                weights.push(w[i] * w[j] * (1.0 - u));
            }
        }
        QuadratureRule {
            points,
            weights,
            degree,
        }
    }

    /// Cheapest available rule of at least the requested degree.
    pub fn of_degree(degree: usize) -> Self {
        if degree <= 5 {
            Self::seven_point()
        } else {
            Self::collapsed_gauss(degree)
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Newton iteration on P_n from the Chebyshev-like initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (nodes, weights)
}
