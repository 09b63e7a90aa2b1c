use crate::{Complex64, Error, Result};

/// Default cap on each index of the multivariate Hermite polynomials.
pub const DEFAULT_MAX_HERMITE_ORDER: usize = 16;

/// The symmetric 4×4 complex matrix parameter `M` of the generating function
/// `exp(-½ uᵀMu + uᵀMζ) = Σ_n u^n/n! H_n^{M}(ζ)`.
///
/// Only the symmetric part of `M` enters the generating function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermiteMatrixParam {
    pub m: [[Complex64; 4]; 4],
}

impl HermiteMatrixParam {
    pub fn new(m: [[Complex64; 4]; 4]) -> Self {
        Self { m }
    }

    /// Assemble from 2×2 blocks laid out as `[[b1, b2], [b4, b3]]`.
    pub fn from_blocks(
        b1: [[Complex64; 2]; 2],
        b2: [[Complex64; 2]; 2],
        b4: [[Complex64; 2]; 2],
        b3: [[Complex64; 2]; 2],
    ) -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for k in 0..2 {
            for l in 0..2 {
                m[k][l] = b1[k][l];
                m[k][l + 2] = b2[k][l];
                m[k + 2][l] = b4[k][l];
                m[k + 2][l + 2] = b3[k][l];
            }
        }
        Self { m }
    }

    /// The `δ_{k+l, even}` selector: entries with odd `k + l` vanish.
    pub fn satisfies_selector(&self, tol: f64) -> bool {
        (0..4).all(|k| (0..4).all(|l| (k + l) % 2 == 0 || self.m[k][l].norm() <= tol))
    }

    pub fn apply(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|l| self.m[k][l] * v[l]).sum();
        }
        out
    }

    /// `exp(-½ uᵀMu + uᵀMζ)`.
    pub fn generating_function(&self, u: &[Complex64; 4], zeta: &[Complex64; 4]) -> Complex64 {
        let mu = self.apply(u);
        let mz = self.apply(zeta);
        let quad: Complex64 = (0..4).map(|k| u[k] * mu[k]).sum();
        let lin: Complex64 = (0..4).map(|k| u[k] * mz[k]).sum();
        (-0.5 * quad + lin).exp()
    }
}

/// All `H_n^{M}(ζ)` for `n` in the box `0 ≤ n_k ≤ orders_k`.
#[derive(Clone, Debug)]
pub struct HermiteTable {
    dims: [usize; 4],
    values: Vec<Complex64>,
}

impl HermiteTable {
    pub fn new(m: &HermiteMatrixParam, orders: [usize; 4], zeta: &[Complex64; 4]) -> Result<Self> {
        Self::with_max(m, orders, zeta, DEFAULT_MAX_HERMITE_ORDER)
    }

    pub fn with_max(m: &HermiteMatrixParam, orders: [usize; 4], zeta: &[Complex64; 4], max: usize) -> Result<Self> {
        if let Some(&order) = orders.iter().find(|&&o| o > max) {
            return Err(Error::OrderOverflow { order, max });
        }
        let dims = orders.map(|o| o + 1);
        let len = dims.iter().product();
        let mut table = Self { dims, values: vec![Complex64::new(0.0, 0.0); len] };
        let mz = m.apply(zeta);

        // Lexicographic order visits every predecessor n - e_k first.
        for flat in 0..len {
            let n = table.unflatten(flat);
            let value = match n.iter().position(|&x| x > 0) {
                None => Complex64::new(1.0, 0.0),
                Some(k) => {
                    let mut prev = n;
                    prev[k] -= 1;
                    let mut v = mz[k] * table.get(prev);
                    for l in 0..4 {
                        if prev[l] > 0 {
                            let mut pp = prev;
                            pp[l] -= 1;
                            v -= m.m[k][l] * prev[l] as f64 * table.get(pp);
                        }
                    }
                    v
                }
            };
            table.values[flat] = value;
        }
        Ok(table)
    }

    fn unflatten(&self, mut flat: usize) -> [usize; 4] {
        let mut n = [0; 4];
        for k in (0..4).rev() {
            n[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        n
    }

    fn flatten(&self, n: [usize; 4]) -> usize {
        n.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// `H_n`; panics if `n` lies outside the computed box.
    pub fn get(&self, n: [usize; 4]) -> Complex64 {
        assert!(n.iter().zip(&self.dims).all(|(&x, &d)| x < d), "index {n:?} outside table");
        self.values[self.flatten(n)]
    }

    pub fn orders(&self) -> [usize; 4] {
        self.dims.map(|d| d - 1)
    }
}

/// Single multivariate Hermite polynomial `H^{M}_{n1 n2 n3 n4}(ζ)`.
pub fn hermite_multivar(m: &HermiteMatrixParam, orders: [usize; 4], zeta: &[Complex64; 4]) -> Result<Complex64> {
    Ok(HermiteTable::new(m, orders, zeta)?.get(orders))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_symmetric(rng: &mut ChaCha8Rng, scale: f64) -> HermiteMatrixParam {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for k in 0..4 {
            for l in k..4 {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
                m[k][l] = z;
                m[l][k] = z;
            }
        }
        HermiteMatrixParam::new(m)
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).fold(1.0, |a, k| a * k as f64)
    }

    #[test]
    fn trivial_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_symmetric(&mut rng, 0.5);
        let zeta = [c(0.3, 0.1), c(-0.2, 0.4), c(0.0, 1.0), c(0.5, 0.0)];
        assert_eq!(hermite_multivar(&m, [0, 0, 0, 0], &zeta).unwrap(), c(1.0, 0.0));

        let mut diag = [[c(0.0, 0.0); 4]; 4];
        for k in 0..4 {
            diag[k][k] = c(0.5 + k as f64, -0.1 * k as f64);
        }
        let md = HermiteMatrixParam::new(diag);
        let h = hermite_multivar(&md, [1, 0, 0, 0], &zeta).unwrap();
        assert!((h - md.apply(&zeta)[0]).norm() < 1e-15);
    }

    /// Taylor coefficient of the generating function by a discrete Cauchy
    /// integral on a polydisc of radius r (a complex-stencil finite
    /// difference), multiplied by n!.
    fn cauchy_coefficient(m: &HermiteMatrixParam, zeta: &[Complex64; 4], n: [usize; 4]) -> Complex64 {
        let pts = 20;
        let r = 0.35;
        let mut acc = c(0.0, 0.0);
        for a in 0..pts {
            for b in 0..pts {
                for cc in 0..pts {
                    for d in 0..pts {
                        let idx = [a, b, cc, d];
                        let mut u = [c(0.0, 0.0); 4];
                        let mut phase = 0.0;
                        for k in 0..4 {
                            let th = 2.0 * PI * idx[k] as f64 / pts as f64;
                            u[k] = Complex64::from_polar(r, th);
                            phase -= n[k] as f64 * th;
                        }
                        acc += m.generating_function(&u, zeta) * Complex64::from_polar(1.0, phase);
                    }
                }
            }
        }
        let norm = (pts as f64).powi(4) * n.iter().map(|&k| r.powi(k as i32)).product::<f64>();
        acc / norm * n.iter().map(|&k| factorial(k)).product::<f64>()
    }

    #[test]
    fn matches_cauchy_stencil_coefficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_symmetric(&mut rng, 0.4);
        let zeta = [c(0.2, -0.1), c(0.4, 0.3), c(-0.3, 0.2), c(0.1, 0.1)];
        let got = hermite_multivar(&m, [2, 1, 0, 1], &zeta).unwrap();
        let want = cauchy_coefficient(&m, &zeta, [2, 1, 0, 1]);
        assert!((got - want).norm() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn order_cap_is_enforced() {
        let m = HermiteMatrixParam::new([[c(1.0, 0.0); 4]; 4]);
        let z = [c(0.0, 0.0); 4];
        assert!(matches!(
            hermite_multivar(&m, [17, 0, 0, 0], &z),
            Err(Error::OrderOverflow { order: 17, max: 16 })
        ));
    }

    #[test]
    fn truncated_series_reproduces_generating_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let m = random_symmetric(&mut rng, 0.2);
            let zeta: [Complex64; 4] = std::array::from_fn(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)));
            let u: [Complex64; 4] = std::array::from_fn(|_| c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)));
            let table = HermiteTable::new(&m, [12; 4], &zeta).unwrap();
            let mut sum = c(0.0, 0.0);
            for a in 0..=12 {
                for b in 0..=12 {
                    for cc in 0..=12 {
                        for d in 0..=12 {
                            let n = [a, b, cc, d];
                            let mut term = table.get(n);
                            for k in 0..4 {
                                term *= u[k].powu(n[k] as u32) / factorial(n[k]);
                            }
                            sum += term;
                        }
                    }
                }
            }
            let want = m.generating_function(&u, &zeta);
            assert!((sum - want).norm() < 1e-8, "{sum} vs {want}");
        }
    }
}
