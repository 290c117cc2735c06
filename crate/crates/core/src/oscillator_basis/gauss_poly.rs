use std::collections::BTreeMap;

use num_complex::Complex64;

/// `Σ c_ij q^i p^j · exp(−α q² − β p²)` with complex coefficients.
///
/// The class is closed under multiplication by `q`, `p` and under `∂_q`,
/// `∂_p`, so Bopp-shift operators act on it without discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussPoly {
    alpha: f64,
    beta: f64,
    coeffs: BTreeMap<(u32, u32), Complex64>,
}

impl GaussPoly {
    pub fn new(alpha: f64, beta: f64) -> Self {
        GaussPoly {
            alpha,
            beta,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn gaussian(alpha: f64, beta: f64) -> Self {
        let mut g = Self::new(alpha, beta);
        g.add_monomial(0, 0, Complex64::new(1.0, 0.0));
        g
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn add_monomial(&mut self, i: u32, j: u32, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        *self.coeffs.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn monomials(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    fn check_envelope(&self, other: &GaussPoly) {
        assert!(
            self.alpha == other.alpha && self.beta == other.beta,
            "GaussPoly envelopes differ"
        );
    }

    pub fn add(&self, other: &GaussPoly) -> GaussPoly {
        self.check_envelope(other);
        let mut out = self.clone();
        for (&(i, j), &c) in &other.coeffs {
            out.add_monomial(i, j, c);
        }
        out
    }

    pub fn sub(&self, other: &GaussPoly) -> GaussPoly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> GaussPoly {
        let mut out = Self::new(self.alpha, self.beta);
        for (&(i, j), &c) in &self.coeffs {
            out.add_monomial(i, j, c * s);
        }
        out
    }

    pub fn times_q(&self) -> GaussPoly {
        let mut out = Self::new(self.alpha, self.beta);
        for (&(i, j), &c) in &self.coeffs {
            out.add_monomial(i + 1, j, c);
        }
        out
    }

    pub fn times_p(&self) -> GaussPoly {
        let mut out = Self::new(self.alpha, self.beta);
        for (&(i, j), &c) in &self.coeffs {
            out.add_monomial(i, j + 1, c);
        }
        out
    }

    /// `∂_q (q^i e^{−αq²}) = (i q^{i−1} − 2α q^{i+1}) e^{−αq²}`
    pub fn d_q(&self) -> GaussPoly {
        let mut out = Self::new(self.alpha, self.beta);
        for (&(i, j), &c) in &self.coeffs {
            if i > 0 {
                out.add_monomial(i - 1, j, c * i as f64);
            }
            out.add_monomial(i + 1, j, c * (-2.0 * self.alpha));
        }
        out
    }

    pub fn d_p(&self) -> GaussPoly {
        let mut out = Self::new(self.alpha, self.beta);
        for (&(i, j), &c) in &self.coeffs {
            if j > 0 {
                out.add_monomial(i, j - 1, c * j as f64);
            }
            out.add_monomial(i, j + 1, c * (-2.0 * self.beta));
        }
        out
    }

    pub fn eval(&self, q: f64, p: f64) -> Complex64 {
        let deg_q = self.coeffs.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let deg_p = self.coeffs.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let qp: Vec<f64> = std::iter::successors(Some(1.0), |x| Some(x * q)).take(deg_q + 1).collect();
        let pp: Vec<f64> = std::iter::successors(Some(1.0), |x| Some(x * p)).take(deg_p + 1).collect();
        let poly: Complex64 = self
            .coeffs
            .iter()
            .map(|(&(i, j), &c)| c * (qp[i as usize] * pp[j as usize]))
            .sum();
        poly * (-self.alpha * q * q - self.beta * p * p).exp()
    }

    /// Largest coefficient magnitude; zero for the zero function.
    pub fn max_coefficient(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_finite_difference() {
        let mut f = GaussPoly::new(0.7, 1.3);
        f.add_monomial(2, 1, Complex64::new(1.0, 0.5));
        f.add_monomial(0, 3, Complex64::new(-0.25, 0.0));
        let h = 1e-5;
        let (q, p) = (0.4, -0.9);
        let fdq = (f.eval(q + h, p) - f.eval(q - h, p)) / (2.0 * h);
        let fdp = (f.eval(q, p + h) - f.eval(q, p - h)) / (2.0 * h);
        assert!((f.d_q().eval(q, p) - fdq).norm() < 1e-8);
        assert!((f.d_p().eval(q, p) - fdp).norm() < 1e-8);
    }
}
