//! Criteria that need no time evolution.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{report, worst, CriterionReport, ToleranceProfile};
use crate::qstate::{random_density, BasisDescriptor, DensityMatrix};
use crate::quadrature::{SphereGrid, UniformGrid};
use crate::specfun::{wigner_3j, wigner_big_d_matrix, wigner_d_matrix, HalfInt, HermiteMatrixParam, HermiteTable};
use crate::spintomo::{reconstruct_spin_density, spin_marginal, spin_marginals_at, EulerFrame, SpinMarginal};
use crate::symtomo::{marginal_1d, reconstruct_density, sample_circle, CircleLattice, SymplecticFrame};
use crate::{c, max_abs, CMatrix, Complex64, Result};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spin-up marginal against `cos²(β/2)` and `sin²(β/2)`.
pub fn criterion_1(p: ToleranceProfile) -> Vec<CriterionReport> {
    let tol = 1e-12 * p.scale();
    let measured = (|| -> Result<f64> {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.0, 0.0);
        let rho = DensityMatrix::new(BasisDescriptor::spin_half(), m)?;
        let up = HalfInt::HALF;
        let down = HalfInt::from_twice(-1);
        worst((0..32).map(|k| {
            let beta = PI * k as f64 / 31.0;
            let frame = EulerFrame::direction(0.37 * k as f64, beta);
            let a = (spin_marginal(&rho, up, frame)? - (beta / 2.0).cos().powi(2)).abs();
            let b = (spin_marginal(&rho, down, frame)? - (beta / 2.0).sin().powi(2)).abs();
            Ok(a.max(b))
        }))
    })();
    vec![report("1", "spin-1/2 up marginal vs cos^2, sin^2", tol, measured)]
}

/// Number states 0 and 1 against their Gaussian closed forms.
pub fn criterion_2(p: ToleranceProfile) -> Vec<CriterionReport> {
    let tol = 1e-6 * p.scale();
    let measured = (|| -> Result<f64> {
        let basis = BasisDescriptor::fock(2);
        let states = (0..2).map(|n| {
            let mut m = CMatrix::zeros(2, 2);
            m[(n, n)] = c(1.0, 0.0);
            m
        });
        let xs = UniformGrid::new(-6.0, 6.0, 64).nodes();
        let mut err = 0.0f64;
        for (n, m) in states.into_iter().enumerate() {
            let rho = DensityMatrix::new(basis.clone(), m)?;
            for k in 0..16 {
                let frame = SymplecticFrame::from_polar(1.3, 2.0 * PI * k as f64 / 16.0)?;
                let s2 = frame.mu * frame.mu + frame.nu * frame.nu;
                for &x in &xs {
                    let vac = (-x * x / s2).exp() / (PI * s2).sqrt();
                    let want = if n == 0 { vac } else { 2.0 * x * x / s2 * vac };
                    err = err.max((marginal_1d(&rho, x, frame)? - want).abs());
                }
            }
        }
        Ok(err)
    })();
    vec![report("2", "Fock 0,1 marginals vs closed forms", tol, measured)]
}

/// Spin round trip for `j = 1/2 .. 2`.
pub fn criterion_3(p: ToleranceProfile) -> Vec<CriterionReport> {
    let tol = 1e-8 * p.scale();
    let mut r = rng(3);
    let measured = worst((1..=4).flat_map(|twice| {
        let j = HalfInt::from_twice(twice);
        let grid = SphereGrid::new(2 * twice as usize + 2, twice as usize + 2);
        (0..50)
            .map(|_| {
                let rho = random_density(BasisDescriptor::spin(j), &mut r)?;
                let w = SpinMarginal::sample(&rho, &grid)?;
                Ok(reconstruct_spin_density(&w)?.rho.distance(rho.matrix()))
            })
            .collect::<Vec<_>>()
    }));
    vec![report("3", "spin reconstruction round trip, j <= 2", tol, measured)]
}

/// Symplectic round trip on the default circle lattice.
pub fn criterion_4(p: ToleranceProfile) -> Vec<CriterionReport> {
    let tol = 1e-3 * p.scale();
    let mut r = rng(4);
    let lattice = CircleLattice::default();
    let measured = worst((0..10).map(|_| {
        let rho = random_density(BasisDescriptor::fock(6), &mut r)?;
        let w = sample_circle(&rho, &lattice)?;
        Ok(reconstruct_density(&w, 6)?.rho.distance(rho.matrix()))
    }));
    vec![report("4", "symplectic reconstruction round trip, Fock 6", tol, measured)]
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

fn random_angles(r: &mut ChaCha8Rng) -> (f64, f64, f64) {
    (r.gen_range(0.0..2.0 * PI), r.gen_range(0.0..PI), r.gen_range(0.0..2.0 * PI))
}

fn d_unitarity(r: &mut ChaCha8Rng) -> Result<f64> {
    worst((0..=6).flat_map(|twice| {
        let (a, b, g) = random_angles(r);
        let j = HalfInt::from_twice(twice);
        [wigner_big_d_matrix(j, a, b, g).map(|d| {
            let n = d.nrows();
            max_abs(&(&d * d.adjoint() - CMatrix::identity(n, n)))
        })]
    }))
}

fn d_composition(r: &mut ChaCha8Rng) -> Result<f64> {
    worst((0..=6).map(|twice| {
        let j = HalfInt::from_twice(twice);
        let (b1, b2) = (r.gen_range(0.0..PI), r.gen_range(0.0..PI));
        let lhs = wigner_d_matrix(j, b1)? * wigner_d_matrix(j, b2)?;
        let rhs = wigner_d_matrix(j, b1 + b2)?;
        Ok((lhs - rhs).amax())
    }))
}

fn d_conjugation(r: &mut ChaCha8Rng) -> Result<f64> {
    worst((0..=6).map(|twice| {
        let j = HalfInt::from_twice(twice);
        let (a, b, g) = random_angles(r);
        let d = wigner_big_d_matrix(j, a, b, g)?;
        let n = d.nrows();
        let mut err = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                // Row/column i ↔ m' = j - i; flipping m → -m reverses the index.
                let sign = if (i + k) % 2 == 0 { 1.0 } else { -1.0 };
                err = err.max((d[(i, k)].conj() - d[(n - 1 - i, n - 1 - k)] * sign).norm());
            }
        }
        Ok(err)
    }))
}

fn threej_orthogonality() -> f64 {
    let mut err = 0.0f64;
    for t1 in 0..=3 {
        for t2 in 0..=3 {
            let (j1, j2) = (HalfInt::from_twice(t1), HalfInt::from_twice(t2));
            for t3 in ((t1 - t2).abs()..=t1 + t2).step_by(2) {
                for t3p in ((t1 - t2).abs()..=t1 + t2).step_by(2) {
                    for m3 in (-t3..=t3).step_by(2) {
                        for m3p in (-t3p..=t3p).step_by(2) {
                            let mut acc = 0.0;
                            for m1 in (-t1..=t1).step_by(2) {
                                for m2 in (-t2..=t2).step_by(2) {
                                    let h = HalfInt::from_twice;
                                    acc += wigner_3j(j1, j2, h(t3), h(m1), h(m2), h(m3))
                                        * wigner_3j(j1, j2, h(t3p), h(m1), h(m2), h(m3p));
                                }
                            }
                            let want = if t3 == t3p && m3 == m3p { 1.0 / (t3 + 1) as f64 } else { 0.0 };
                            err = err.max((acc - want).abs());
                        }
                    }
                }
            }
        }
    }
    err
}

fn hermite_series(r: &mut ChaCha8Rng) -> Result<f64> {
    worst((0..3).map(|_| {
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for k in 0..4 {
            for l in k..4 {
                let z = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * 0.2;
                m[k][l] = z;
                m[l][k] = z;
            }
        }
        let m = HermiteMatrixParam::new(m);
        let zeta: [Complex64; 4] = std::array::from_fn(|_| c(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5)));
        let u: [Complex64; 4] = std::array::from_fn(|_| c(r.gen_range(-0.3..0.3), r.gen_range(-0.3..0.3)));
        let order = 12;
        let table = HermiteTable::new(&m, [order; 4], &zeta)?;
        let powers: Vec<Vec<Complex64>> =
            u.iter().map(|uk| (0..=order).map(|n| uk.powu(n as u32) / factorial(n)).collect()).collect();
        let mut sum = c(0.0, 0.0);
        for a in 0..=order {
            for b in 0..=order {
                for cc in 0..=order {
                    for d in 0..=order {
                        sum += table.get([a, b, cc, d]) * powers[0][a] * powers[1][b] * powers[2][cc] * powers[3][d];
                    }
                }
            }
        }
        Ok((sum - m.generating_function(&u, &zeta)).norm())
    }))
}

/// Special-function invariants.
pub fn criterion_8(p: ToleranceProfile) -> Vec<CriterionReport> {
    let s = p.scale();
    let mut r = rng(8);
    vec![
        report("8a", "D^j unitarity, j <= 3", 1e-12 * s, d_unitarity(&mut r)),
        report("8b", "d^j(b1) d^j(b2) = d^j(b1 + b2)", 1e-10 * s, d_composition(&mut r)),
        report("8c", "D^j conjugation symmetry", 1e-12 * s, d_conjugation(&mut r)),
        report("8d", "3j orthogonality", 1e-12 * s, Ok(threej_orthogonality())),
        report("8e", "Hermite series vs generating function", 1e-8 * s, hermite_series(&mut r)),
    ]
}

fn random_frame(r: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> Result<SymplecticFrame> {
    SymplecticFrame::from_polar(r.gen_range(rmin..rmax), r.gen_range(0.0..2.0 * PI))
}

fn homogeneity(r: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_density(BasisDescriptor::fock(4), r)?;
    worst((0..200).map(|k| {
        let kappa = [0.5, 2.0, 3.0][k % 3];
        let f = random_frame(r, 0.3, 2.0)?;
        let x = r.gen_range(-3.0..3.0);
        let scaled = SymplecticFrame::new(kappa * f.mu, kappa * f.nu)?;
        let lhs = marginal_1d(&rho, kappa * x, scaled)?;
        let rhs = marginal_1d(&rho, x, f)? / kappa;
        Ok((lhs - rhs).abs())
    }))
}

fn normalization(r: &mut ChaCha8Rng) -> Result<f64> {
    let grid = UniformGrid::new(-8.0, 8.0, 256);
    let nodes = grid.nodes();
    let rho = random_density(BasisDescriptor::fock(4), r)?;
    worst((0..200).map(|_| {
        let f = random_frame(r, 0.5, 1.5)?;
        let values = nodes.iter().map(|&x| marginal_1d(&rho, x, f)).collect::<Result<Vec<_>>>()?;
        Ok((grid.integrate(&values) - 1.0).abs())
    }))
}

fn spin_normalization(r: &mut ChaCha8Rng) -> Result<f64> {
    worst((0..200).map(|k| {
        let j = HalfInt::from_twice(1 + k % 4);
        let rho = random_density(BasisDescriptor::spin(j), r)?;
        let (a, b, g) = random_angles(r);
        let total: f64 = spin_marginals_at(&rho, EulerFrame::new(a, b, g))?.iter().sum();
        Ok((total - 1.0).abs())
    }))
}

/// Randomized marginal invariants.
pub fn criterion_9(p: ToleranceProfile) -> Vec<CriterionReport> {
    let s = p.scale();
    let mut r = rng(9);
    vec![
        report("9a", "homogeneity w(kx, kmu, knu) = w/|k|", 1e-8 * s, homogeneity(&mut r)),
        report("9b", "symplectic normalization", 1e-6 * s, normalization(&mut r)),
        report("9c", "spin normalization", 1e-12 * s, spin_normalization(&mut r)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_criteria_pass() {
        for reports in [1, 2, 3, 4, 8, 9].map(|id| super::super::run_criterion(id, ToleranceProfile::Default)) {
            for r in reports {
                println!("{}", r.line());
                assert!(r.passed, "{}", r.line());
            }
        }
    }
}
