//! Marginals of a charged particle in a uniform magnetic field: coherent
//! states, their multivariate-Hermite expansion, and Landau-level marginals.

use serde::{Deserialize, Serialize};

use crate::qstate::LandauCoherentParams;
use crate::specfun::{HermiteMatrixParam, HermiteTable};
use crate::symtomo::SymplecticFrame;
use crate::{c, Complex64, Error, Result, I};

/// Frames `(μ1, ν1)` and `(μ2, ν2)` of the two transverse modes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoModeFrame {
    pub mu1: f64,
    pub nu1: f64,
    pub mu2: f64,
    pub nu2: f64,
}

impl TwoModeFrame {
    pub fn new(mu1: f64, nu1: f64, mu2: f64, nu2: f64) -> Result<Self> {
        SymplecticFrame::new(mu1, nu1)?;
        SymplecticFrame::new(mu2, nu2)?;
        Ok(Self { mu1, nu1, mu2, nu2 })
    }

    pub fn modes(&self) -> [SymplecticFrame; 2] {
        [
            SymplecticFrame { mu: self.mu1, nu: self.nu1 },
            SymplecticFrame { mu: self.mu2, nu: self.nu2 },
        ]
    }
}

/// `w_{αβ}` as an analytic function of independent `u = (α, α*, β, β*)`.
fn coherent_marginal_analytic(u: [Complex64; 4], x1: f64, x2: f64, f: TwoModeFrame) -> Complex64 {
    let [a, ac, b, bc] = u;
    let (m1, n1, m2, n2) = (f.mu1, f.nu1, f.mu2, f.nu2);
    let s1 = m1 * m1 + n1 * n1;
    let s2 = m2 * m2 + n2 * n2;
    let pre = (-a * ac - b * bc - I * (a * b - ac * bc)).exp() / (std::f64::consts::PI * (s1 * s2).sqrt());
    // The second square carries `-iα*ν1 + β*ν1`; dropping the '+' (reading
    // the two terms as a product) fails the chirp-quadrature comparison.
    let t1 = (c(n1, m1) * (I * a * n1 + b * n1 - I * x1).powi(2)
        + c(n1, -m1) * (-I * ac * n1 + bc * n1 + I * x1).powi(2))
        / (2.0 * n1 * s1);
    let t2 = (c(n2, m2) * (a * n2 + I * b * n2 - I * x2).powi(2)
        + c(n2, -m2) * (ac * n2 - I * bc * n2 + I * x2).powi(2))
        / (2.0 * n2 * s2);
    pre * (t1 + t2).exp()
}

/// Closed-form marginal `w_{αβ}(x1, x2, μ1, ν1, μ2, ν2)` of the coherent
/// state `Ψ_{αβ}`. Requires `ν1, ν2 ≠ 0`.
pub fn coherent_marginal(params: LandauCoherentParams, x1: f64, x2: f64, frame: TwoModeFrame) -> Result<f64> {
    for (mu, nu) in [(frame.mu1, frame.nu1), (frame.mu2, frame.nu2)] {
        if nu == 0.0 {
            return Err(Error::DegenerateFrame { mu, nu, reason: "closed form divides by nu" });
        }
    }
    let u = [params.alpha, params.alpha.conj(), params.beta_c, params.beta_c.conj()];
    Ok(coherent_marginal_analytic(u, x1, x2, frame).re)
}

/// Matrix parameter `M` of the Hermite expansion, index order `(α, α*, β, β*)`.
///
/// With `e_k = e^{-2iθ_k}`, `θ_k = atan2(ν_k, μ_k)`, the only nonzero
/// entries are `M00 = -M22 = (e2 - e1)/2`, `M02 = M20 = i(e1 + e2)/2` and
/// their conjugates in the `(α*, β*)` block.
pub fn m_matrix(frame: TwoModeFrame) -> HermiteMatrixParam {
    let [f1, f2] = frame.modes();
    let e1 = Complex64::from_polar(1.0, -2.0 * f1.theta());
    let e2 = Complex64::from_polar(1.0, -2.0 * f2.theta());
    let zero = c(0.0, 0.0);
    let mut m = [[zero; 4]; 4];
    m[0][0] = 0.5 * (e2 - e1);
    m[2][2] = 0.5 * (e1 - e2);
    m[0][2] = 0.5 * I * (e1 + e2);
    m[2][0] = m[0][2];
    m[1][1] = m[0][0].conj();
    m[3][3] = m[2][2].conj();
    m[1][3] = m[0][2].conj();
    m[3][1] = m[1][3];
    HermiteMatrixParam::new(m)
}

/// Arguments `(ζ1, ζ1*, ζ2, ζ2*)` of the Hermite polynomials, with
/// `u_k = x_k/σ_k`, `ζ1 = u2 e^{iθ2} - i u1 e^{iθ1}` and
/// `ζ2 = u1 e^{iθ1} - i u2 e^{iθ2}`.
///
/// `θ_k = atan2(ν_k, μ_k)` is continuous through `ν_k = 0`, so position
/// frames need no separate branch.
pub fn zeta_args(x1: f64, x2: f64, frame: TwoModeFrame) -> [Complex64; 4] {
    let [f1, f2] = frame.modes();
    let p1 = Complex64::from_polar(x1 / f1.sigma(), f1.theta());
    let p2 = Complex64::from_polar(x2 / f2.sigma(), f2.theta());
    let z1 = p2 - I * p1;
    let z2 = p1 - I * p2;
    [z1, z1.conj(), z2, z2.conj()]
}

fn gaussian_prefactor(x1: f64, x2: f64, frame: TwoModeFrame) -> f64 {
    let [f1, f2] = frame.modes();
    let (s1, s2) = (f1.sigma(), f2.sigma());
    (-(x1 / s1).powi(2) - (x2 / s2).powi(2)).exp() / (std::f64::consts::PI * s1 * s2)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Expansion coefficient `w_{n1 n2 n1' n2'}` of `w_{αβ} e^{|α|²+|β|²}` in
/// `α^{n1} α*^{n2} β^{n1'} β*^{n2'} / √(n1! n2! n1'! n2'!)`.
///
/// Equals `A_{n1 n1'} A*_{n2 n2'}` where `A_{nn'}` is the tomographic
/// amplitude of the Landau level `Ψ_{nn'}`.
pub fn fock_marginal_components(orders: [usize; 4], x1: f64, x2: f64, frame: TwoModeFrame) -> Result<Complex64> {
    let table = HermiteTable::new(&m_matrix(frame), orders, &zeta_args(x1, x2, frame))?;
    Ok(component_from_table(&table, orders, x1, x2, frame))
}

fn component_from_table(table: &HermiteTable, orders: [usize; 4], x1: f64, x2: f64, frame: TwoModeFrame) -> Complex64 {
    let norm: f64 = orders.iter().map(|&n| factorial(n)).product();
    table.get(orders) * (gaussian_prefactor(x1, x2, frame) / norm.sqrt())
}

/// All components with every index `≤ max_order`, from one Hermite table.
pub fn fock_marginal_table(max_order: usize, x1: f64, x2: f64, frame: TwoModeFrame) -> Result<ComponentTable> {
    let table = HermiteTable::new(&m_matrix(frame), [max_order; 4], &zeta_args(x1, x2, frame))?;
    Ok(ComponentTable { table, x1, x2, frame })
}

/// Cached Hermite values at one `(x1, x2, frame)`.
#[derive(Clone, Debug)]
pub struct ComponentTable {
    table: HermiteTable,
    x1: f64,
    x2: f64,
    frame: TwoModeFrame,
}

impl ComponentTable {
    pub fn component(&self, orders: [usize; 4]) -> Complex64 {
        component_from_table(&self.table, orders, self.x1, self.x2, self.frame)
    }
}

/// Marginal `w_{nn'}` of the Landau level `Ψ_{nn'}`.
pub fn landau_level_marginal(n: usize, np: usize, x1: f64, x2: f64, frame: TwoModeFrame) -> Result<f64> {
    Ok(fock_marginal_components([n, n, np, np], x1, x2, frame)?.re)
}
