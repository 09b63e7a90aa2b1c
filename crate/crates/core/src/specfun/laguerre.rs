/// Generalized Laguerre polynomial `L_n^{(k)}(x)` by upward recurrence.
pub fn laguerre(n: usize, k: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for i in 1..n {
        let fi = i as f64;
        let next = ((2.0 * fi + 1.0 + k - x) * cur - (fi + k) * prev) / (fi + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Explicit sum `Σ_i (-1)^i C(n+k, n-i) x^i / i!`.
    fn explicit(n: usize, k: usize, x: f64) -> f64 {
        let binom = |a: usize, b: usize| (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64);
        let fact = |a: usize| (1..=a).fold(1.0, |acc, i| acc * i as f64);
        (0..=n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * binom(n + k, n - i) * x.powi(i as i32) / fact(i)
            })
            .sum()
    }

    #[test]
    fn matches_explicit_sum() {
        for n in 0..10 {
            for k in 0..5 {
                for &x in &[0.0, 0.3, 1.7, 5.0] {
                    let got = laguerre(n, k as f64, x);
                    let want = explicit(n, k, x);
                    assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "n={n} k={k} x={x}");
                }
            }
        }
    }
}
