//! Quadrature rules shared by the tomography schemes.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&t| half * t).collect(),
    )
}

/// Uniformly spaced closed grid (both endpoints included).
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl UniformGrid {
    pub fn new(start: f64, end: f64, points: usize) -> Self {
        Self { start, end, points }
    }

    /// Default position grid: 256 points on [-8, 8].
    pub fn default_position() -> Self {
        Self::new(-8.0, 8.0, 256)
    }

    pub fn step(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            (self.end - self.start) / (self.points - 1) as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|i| self.start + h * i as f64).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.points];
        if let Some(first) = w.first_mut() {
            *first *= 0.5;
        }
        if let Some(last) = w.last_mut() {
            *last *= 0.5;
        }
        w
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights().iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Product quadrature over the unit sphere of Euler angles (α, β): uniform
/// trapezoid in α on [0, 2π) and Gauss–Legendre in cos β.
///
/// The weights integrate `dα d(cosβ)` so that `Σ w f = ∫ dα sinβ dβ f`. The
/// γ integral of the full rotation-group measure contributes a constant 2π
/// and is applied by [`SphereGrid::group_average`].
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    alpha_weight: f64,
    beta_weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_alpha: usize, n_beta: usize) -> Self {
        let alphas = (0..n_alpha)
            .map(|k| 2.0 * PI * k as f64 / n_alpha as f64)
            .collect();
        let (cos_nodes, beta_weights) = gauss_legendre(n_beta);
        // Ascending β means descending cos β.
        let betas: Vec<f64> = cos_nodes.iter().rev().map(|c| c.acos()).collect();
        let beta_weights = beta_weights.into_iter().rev().collect();
        Self {
            alphas,
            betas,
            alpha_weight: 2.0 * PI / n_alpha as f64,
            beta_weights,
        }
    }

    pub fn n_alpha(&self) -> usize {
        self.alphas.len()
    }

    pub fn n_beta(&self) -> usize {
        self.betas.len()
    }

    pub fn len(&self) -> usize {
        self.alphas.len() * self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Weight of node (ia, ib) for `∫ dα sinβ dβ`.
    #[inline]
    pub fn weight(&self, _ia: usize, ib: usize) -> f64 {
        self.alpha_weight * self.beta_weights[ib]
    }

    /// Weight of node (ia, ib) for the normalized group measure `dΩ/(8π²)`
    /// with the γ integral done analytically.
    #[inline]
    pub fn group_weight(&self, ia: usize, ib: usize) -> f64 {
        self.weight(ia, ib) * 2.0 * PI / (8.0 * PI * PI)
    }

    /// `∫ dΩ/(8π²) f(α, β)` for a γ-independent integrand.
    pub fn group_average<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = 0.0;
        for (ia, &a) in self.alphas.iter().enumerate() {
            for (ib, &b) in self.betas.iter().enumerate() {
                acc += self.group_weight(ia, ib) * f(a, b);
            }
        }
        acc
    }
}

impl Default for SphereGrid {
    fn default() -> Self {
        Self::new(16, 16)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        for k in 0..16 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-14, "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn odd_rule_has_center_node() {
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_measure_is_normalized() {
        let g = SphereGrid::new(16, 16);
        assert!((g.group_average(|_, _| 1.0) - 1.0).abs() < 1e-14);
        let total: f64 = (0..16)
            .flat_map(|a| (0..16).map(move |b| (a, b)))
            .map(|(a, b)| g.weight(a, b))
            .sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
    }
}
