/// Jacobi polynomial `P_n^{(a,b)}(x)`.
///
/// Uses the standard three-term recurrence in `n`. When a recurrence
/// denominator vanishes (possible for negative integer parameters) the
/// explicit binomial sum is used instead.
pub fn jacobi_poly(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    if n == 1 {
        return p1;
    }
    let mut prev = 1.0;
    let mut cur = p1;
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let denom = 2.0 * (kf + 1.0) * (kf + a + b + 1.0) * s;
        if denom.abs() < 1e-300 || s.abs() < 1e-12 {
            return jacobi_binomial_sum(n, a, b, x);
        }
        let c1 = (s + 1.0) * ((s + 2.0) * s * x + a * a - b * b);
        let c2 = 2.0 * (kf + a) * (kf + b) * (s + 2.0);
        let next = (c1 * cur - c2 * prev) / denom;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Σ_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s)` with generalized
/// binomial coefficients.
fn jacobi_binomial_sum(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let lo = 0.5 * (x - 1.0);
    let hi = 0.5 * (x + 1.0);
    (0..=n)
        .map(|s| {
            binom(n as f64 + a, n - s)
                * binom(n as f64 + b, s)
                * lo.powi(s as i32)
                * hi.powi((n - s) as i32)
        })
        .sum()
}

fn binom(z: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (z - i as f64) / (i as f64 + 1.0);
    }
    acc
}
