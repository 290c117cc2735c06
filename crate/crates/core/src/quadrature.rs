//! Quadrature rules: tensor Gauss rules on phase-space rectangles and an
//! adaptive Gauss–Kronrod integrator on intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use gauss_quad::{GaussHermite, GaussLegendre};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Nodes and weights on one axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    /// `n`-point Gauss–Legendre on `[lo, hi]`; exact for degree `2n − 1`.
    pub fn gauss_legendre(lo: f64, hi: f64, n: usize) -> Self {
        let rule = GaussLegendre::new(n.max(2)).expect("degree >= 2");
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut pairs: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (mid + half * x, half * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        AxisRule { nodes, weights }
    }

    /// Gauss–Hermite with the weight folded back in, for `∫ g(x) dx` where
    /// `g` has a Gaussian envelope of width `scale`.
    pub fn gauss_hermite(scale: f64, n: usize) -> Self {
        let rule = GaussHermite::new(n.max(1)).expect("degree >= 1");
        let mut pairs: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (scale * x, scale * w * (x * x).exp()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        AxisRule { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        par::pairwise_sum(&terms)
    }
}

/// Tensor-product rule over `[q_lo, q_hi] × [p_lo, p_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub q: AxisRule,
    pub p: AxisRule,
    /// `[q_lo, q_hi, p_lo, p_hi]`
    pub bounds: [f64; 4],
    /// Nodes per axis; polynomial exactness is `2·order − 1` per axis for
    /// the Legendre family.
    pub order: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_legendre([-8.0, 8.0, -8.0, 8.0], 160)
    }
}

impl QuadratureRule {
    pub fn gauss_legendre(bounds: [f64; 4], order: usize) -> Self {
        QuadratureRule {
            q: AxisRule::gauss_legendre(bounds[0], bounds[1], order),
            p: AxisRule::gauss_legendre(bounds[2], bounds[3], order),
            bounds,
            order,
        }
    }

    /// Hermite nodes per axis; the bounds reported are the extreme nodes.
    pub fn gauss_hermite(q_scale: f64, p_scale: f64, order: usize) -> Self {
        let q = AxisRule::gauss_hermite(q_scale, order);
        let p = AxisRule::gauss_hermite(p_scale, order);
        let bounds = [q.nodes[0], q.nodes[order - 1], p.nodes[0], p.nodes[order - 1]];
        QuadratureRule { q, p, bounds, order }
    }

    pub fn integrate<F>(&self, exec: Execution, f: F) -> f64
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let rows = par::map_range(exec, self.q.nodes.len(), |i| {
            let q = self.q.nodes[i];
            self.q.weights[i] * self.p.integrate(|p| f(q, p))
        });
        par::pairwise_sum(&rows)
    }

    /// Largest `|f|` on the rectangle's edges relative to the largest `|f|`
    /// over the interior nodes.
    pub fn boundary_ratio<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let [q_lo, q_hi, p_lo, p_hi] = self.bounds;
        let mut peak = 0.0f64;
        for &q in &self.q.nodes {
            for &p in &self.p.nodes {
                peak = peak.max(f(q, p).abs());
            }
        }
        let mut edge = 0.0f64;
        for &q in &self.q.nodes {
            edge = edge.max(f(q, p_lo).abs()).max(f(q, p_hi).abs());
        }
        for &p in &self.p.nodes {
            edge = edge.max(f(q_lo, p).abs()).max(f(q_hi, p).abs());
        }
        if peak == 0.0 {
            0.0
        } else {
            edge / peak
        }
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// Globally adaptive Gauss–Kronrod (7/15) on `[a, b]`: the panel with the
/// largest error estimate is bisected until the summed estimate is below
/// `tol` (absolute).
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
) -> Result<AdaptiveResult> {
    let mut heap = BinaryHeap::new();
    heap.push(gk15(&f, a, b));
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= tol {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::ToleranceNotMet {
                estimate: total_err,
                tolerance: tol,
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::ToleranceNotMet {
                estimate: total_err,
                tolerance: tol,
            });
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    Ok(AdaptiveResult {
        value: par::pairwise_sum(&values),
        error_estimate: panels.iter().map(|p| p.error).sum(),
        panels: panels.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = AxisRule::gauss_legendre(-1.0, 2.0, 5);
        let v = r.integrate(|x| x.powi(9));
        assert!((v - (2f64.powi(10) - 1.0) / 10.0).abs() < 1e-11);
    }

    #[test]
    fn tensor_gaussian() {
        let rule = QuadratureRule::default();
        let v = rule.integrate(Execution::Sequential, |q, p| (-(q * q + p * p)).exp());
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn hermite_gaussian() {
        let rule = QuadratureRule::gauss_hermite(1.0, 0.5, 40);
        let v = rule.integrate(Execution::Sequential, |q, p| (-(q * q + 4.0 * p * p)).exp() * (1.0 + q * q));
        // ∫e^{-q²}(1+q²) dq · ∫e^{-4p²} dp = (3√π/2)(√π/2)
        assert!((v - 0.75 * PI).abs() < 1e-10);
    }

    #[test]
    fn kronrod_smooth_and_kinked() {
        let r = adaptive_gauss_kronrod(|x| x.exp(), 0.0, 1.0, 1e-13, 100).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-13);
        let r = adaptive_gauss_kronrod(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 200).unwrap();
        assert!((r.value - 0.29).abs() < 1e-12);
    }

    #[test]
    fn kronrod_reports_stall() {
        let r = adaptive_gauss_kronrod(|x: f64| 1.0 / x.sqrt().max(1e-300), 0.0, 1.0, 1e-15, 8);
        assert!(matches!(r, Err(Error::ToleranceNotMet { .. })));
    }

    #[test]
    fn boundary_ratio_detects_wide_function() {
        let rule = QuadratureRule::gauss_legendre([-2.0, 2.0, -2.0, 2.0], 20);
        assert!(rule.boundary_ratio(|q, p| (-(q * q + p * p) / 2.0).exp()) > 1e-12);
    }
}
