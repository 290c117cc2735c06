/// `L_n(x)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1−x) L_k − k L_{k−1}`.
pub fn laguerre(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `[L_0(x), …, L_nmax(x)]`.
pub fn laguerre_table(nmax: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax as usize + 1);
    out.push(1.0);
    if nmax == 0 {
        return out;
    }
    out.push(1.0 - x);
    for k in 1..nmax as usize {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `L_n'(x) = −Σ_{k<n} L_k(x)`.
pub fn laguerre_derivative(n: u32, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    -laguerre_table(n - 1, x).iter().sum::<f64>()
}

/// Monomial coefficients of `L_n`: `Σ_k (−1)^k C(n,k) x^k / k!`.
pub fn laguerre_coefficients(n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut c = 1.0;
    for k in 0..=n {
        out.push(c);
        // c_{k+1} = −c_k (n−k) / (k+1)²
        let kf = k as f64;
        c = -c * (n as f64 - kf) / ((kf + 1.0) * (kf + 1.0));
    }
    out
}

/// `Σ_k |coefficient_k| x^k`, an upper bound on `|L_n(x)|` for `x ≥ 0`.
pub fn laguerre_abs_bound(n: u32, x: f64) -> f64 {
    laguerre_coefficients(n)
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * x + c.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        for x in [-1.0, 0.0, 0.3, 7.0] {
            assert_eq!(laguerre(0, x), 1.0);
        }
        assert_eq!(laguerre(1, 2.5), -1.5);
        assert!((laguerre(3, 1.0) + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn coefficients_match_recurrence() {
        for n in 0..12 {
            let c = laguerre_coefficients(n);
            for x in [0.0, 0.5, 2.0, 9.0] {
                let horner = c.iter().rev().fold(0.0, |acc, v| acc * x + v);
                assert!((horner - laguerre(n, x)).abs() < 1e-9 * (1.0 + horner.abs()));
            }
        }
    }

    #[test]
    fn derivative_identity() {
        // L_n' = L_{n−1}' − L_{n−1}, derivatives by 4th-order central differences
        let h = 1e-3;
        let fd = |m: u32, x: f64| {
            (laguerre(m, x - 2.0 * h) - 8.0 * laguerre(m, x - h) + 8.0 * laguerre(m, x + h)
                - laguerre(m, x + 2.0 * h))
                / (12.0 * h)
        };
        for n in 1..=10 {
            for x in [0.2, 1.0, 3.5, 8.0] {
                let lhs = fd(n, x);
                let rhs = fd(n - 1, x) - laguerre(n - 1, x);
                assert!((lhs - rhs).abs() < 1e-9, "n={n} x={x}: {lhs} vs {rhs}");
                assert!((laguerre_derivative(n, x) - lhs).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn high_order_stays_accurate() {
        // L_n(0) = 1 for all n
        assert!((laguerre(60, 0.0) - 1.0).abs() < 1e-12);
        let t = laguerre_table(60, 3.0);
        assert_eq!(t.len(), 61);
        assert!((t[60] - laguerre(60, 3.0)).abs() < 1e-15);
    }
}
