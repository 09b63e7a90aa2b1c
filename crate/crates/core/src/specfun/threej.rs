use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::HalfInt;

fn big_factorial(n: i32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Wigner 3j symbol by the Racah sum.
///
/// The sum and the square-root argument are accumulated as exact rationals;
/// only the final `sign · sqrt(S² P)` is taken in floating point. Returns 0
/// whenever a selection rule fails.
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> f64 {
    let js = [j1, j2, j3];
    let ms = [m1, m2, m3];
    if js.iter().any(|j| j.twice() < 0) {
        return 0.0;
    }
    if (m1 + m2 + m3).twice() != 0 {
        return 0.0;
    }
    for (j, m) in js.iter().zip(&ms) {
        if m.abs() > *j || !j.same_parity(*m) {
            return 0.0;
        }
    }
    if !(j1 + j2 + j3).is_integer() {
        return 0.0;
    }
    if j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return 0.0;
    }

    let int = |h: HalfInt| h.twice() / 2;
    let a = int(j1 + j2 - j3);
    let b = int(j1 - m1);
    let c = int(j2 + m2);
    let d = int(j3 - j2 + m1);
    let e = int(j3 - j1 - m2);
    let kmin = 0.max(-d).max(-e);
    let kmax = a.min(b).min(c);

    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = big_factorial(k)
            * big_factorial(a - k)
            * big_factorial(b - k)
            * big_factorial(c - k)
            * big_factorial(d + k)
            * big_factorial(e + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }

    let triangle = BigRational::new(
        big_factorial(int(j1 + j2 - j3)) * big_factorial(int(j1 - j2 + j3)) * big_factorial(int(-j1 + j2 + j3)),
        big_factorial(int(j1 + j2 + j3) + 1),
    );
    let projections = js
        .iter()
        .zip(&ms)
        .fold(BigInt::one(), |acc, (j, m)| acc * big_factorial(int(*j + *m)) * big_factorial(int(*j - *m)));
    let radicand = triangle * BigRational::from_integer(projections) * &sum * &sum;
    let magnitude = radicand.to_f64().unwrap_or(f64::NAN).sqrt();

    let phase_exp = int(j1 - j2 - m3);
    let mut sign = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    if sum.is_negative() {
        sign = -sign;
    }
    sign * magnitude
}
