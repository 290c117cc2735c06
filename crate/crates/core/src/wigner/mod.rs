//! Wigner functions of two-mode Fock superpositions, their slices, marginals
//! and negativity.
//!
//! With the diagonal basis, `ψ⋆ψ†` collapses by the projector identity
//! `φ_m⋆φ_n = κ δ_mn φ_n` to the mixture `Σ |c|² f̂_{n1} f̂_{n2}` of unit-integral
//! kernels `f̂_n = κ φ_n = ((−1)ⁿ/π) e^{−u/2} L_n(u)`. [`moyal`] recomputes the
//! same quantities from sampled fields without using that identity.

pub mod moyal;
pub mod negativity;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock_algebra::FockLabel;
use crate::grid::{Field2D, GridSpec};
use crate::oscillator_basis::laguerre_table;
use crate::par::{self, Execution};
use crate::perturbation::FockState;
use crate::quadrature::AxisRule;

pub use moyal::{
    moyal_grid_oracle, projector_audit, slice_cross_check, star_product_1mode, MoyalMethod, MoyalOptions, MoyalProduct, ProjectorAudit, SliceCrossCheck,
    StarProduct, WeylOperator, KAPPA,
};
pub use negativity::{negativity, negativity_slice, NegativityForm, NegativityOptions, NegativityResult};

/// `f̂_n(q, p)` for frequency `w`.
pub fn kernel(n: u32, w: f64, q: f64, p: f64) -> f64 {
    kernel_u(n, 2.0 * (w * q * q + p * p / w))
}

/// `f̂_n` as a function of `u = 2(Wq² + p²/W)`.
pub fn kernel_u(n: u32, u: f64) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign / PI * (-0.5 * u).exp() * crate::oscillator_basis::laguerre(n, u)
}

fn kernels_u(nmax: u32, u: f64) -> Vec<f64> {
    let env = (-0.5 * u).exp() / PI;
    laguerre_table(nmax, u)
        .into_iter()
        .enumerate()
        .map(|(n, l)| if n % 2 == 0 { env * l } else { -env * l })
        .collect()
}

/// Normalized mixture weights `|c|²/Σ|c|²` of a Fock superposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpaceState {
    pub weights: BTreeMap<FockLabel, f64>,
    pub w: f64,
}

impl PhaseSpaceState {
    pub fn from_fock(state: &FockState) -> Result<Self> {
        let norm = state.norm_sqr();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter("state has zero or non-finite norm".into()));
        }
        if !(state.w > 0.0 && state.w.is_finite()) {
            return Err(Error::InvalidParameter(format!("W must be positive, got {}", state.w)));
        }
        let weights = state
            .coefficients
            .iter()
            .filter(|(_, c)| **c != 0.0)
            .map(|(l, c)| (*l, c * c / norm))
            .collect();
        Ok(PhaseSpaceState { weights, w: state.w })
    }

    pub fn pure(label: FockLabel, w: f64) -> Self {
        PhaseSpaceState {
            weights: BTreeMap::from([(label, 1.0)]),
            w,
        }
    }

    pub fn weight(&self, label: FockLabel) -> f64 {
        self.weights.get(&label).copied().unwrap_or(0.0)
    }

    pub fn max_occupation(&self) -> (u32, u32) {
        self.weights.keys().fold((0, 0), |(a, b), l| (a.max(l.n1), b.max(l.n2)))
    }

    /// Reduced weights of one mode (`1` or `2`).
    pub fn mode_weights(&self, mode: u8) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for (l, w) in &self.weights {
            let n = if mode == 1 { l.n1 } else { l.n2 };
            *out.entry(n).or_insert(0.0) += w;
        }
        out
    }

    pub fn swapped(&self) -> Self {
        PhaseSpaceState {
            weights: self.weights.iter().map(|(l, w)| (l.swapped(), *w)).collect(),
            w: self.w,
        }
    }

    /// `Σ_{n2} w_{n1,n2} f̂_{n2}(u2)` as a dense vector over `n1`.
    pub(crate) fn contract_mode2(&self, u2: f64) -> Vec<f64> {
        let (m1, m2) = self.max_occupation();
        let k2 = kernels_u(m2, u2);
        let mut out = vec![0.0; m1 as usize + 1];
        for (l, w) in &self.weights {
            out[l.n1 as usize] += w * k2[l.n2 as usize];
        }
        out
    }
}

/// `f_W(q1, p1, q2, p2)` of a [`PhaseSpaceState`].
#[derive(Debug, Clone)]
pub struct WignerFunction {
    state: PhaseSpaceState,
}

pub fn wigner_function(state: &PhaseSpaceState) -> WignerFunction {
    WignerFunction { state: state.clone() }
}

impl WignerFunction {
    pub fn state(&self) -> &PhaseSpaceState {
        &self.state
    }

    pub fn eval(&self, q1: f64, p1: f64, q2: f64, p2: f64) -> f64 {
        let w = self.state.w;
        let u1 = 2.0 * (w * q1 * q1 + p1 * p1 / w);
        let u2 = 2.0 * (w * q2 * q2 + p2 * p2 / w);
        self.eval_u(u1, u2)
    }

    /// Value in terms of the two radial variables.
    pub fn eval_u(&self, u1: f64, u2: f64) -> f64 {
        let s = self.state.contract_mode2(u2);
        let k1 = kernels_u(s.len() as u32 - 1, u1);
        s.iter().zip(&k1).map(|(a, b)| a * b).sum()
    }
}

/// Samples `f_W` on a grid with the second mode frozen at the grid's slice
/// coordinates.
pub fn wigner_slice(state: &PhaseSpaceState, grid: &GridSpec, exec: Execution) -> Result<Field2D> {
    grid.validate()?;
    let w = state.w;
    let u2 = 2.0 * (w * grid.slice_q2 * grid.slice_q2 + grid.slice_p2 * grid.slice_p2 / w);
    let s = state.contract_mode2(u2);
    let nmax = s.len() as u32 - 1;
    let rows = par::map_range(exec, grid.nq, |i| {
        let q = grid.q(i);
        (0..grid.np)
            .map(|j| {
                let p = grid.p(j);
                let k = kernels_u(nmax, 2.0 * (w * q * q + p * p / w));
                s.iter().zip(&k).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect::<Vec<f64>>()
    });
    let mut metadata = BTreeMap::new();
    metadata.insert("W".into(), format!("{w}"));
    metadata.insert("slice_q2".into(), format!("{}", grid.slice_q2));
    metadata.insert("slice_p2".into(), format!("{}", grid.slice_p2));
    metadata.insert("schema_version".into(), crate::SCHEMA_VERSION.into());
    Ok(Field2D {
        grid: *grid,
        values: rows.into_iter().flatten().collect(),
        metadata,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    Q,
    P,
}

/// One-dimensional marginal of `f_W`, integrating out the other three
/// variables by Gauss–Legendre quadrature of the kernels.
#[derive(Debug, Clone)]
pub struct Marginal {
    weights: BTreeMap<u32, f64>,
    w: f64,
    axis: Axis,
}

pub fn marginal(state: &PhaseSpaceState, axis: Axis, mode: u8) -> Result<Marginal> {
    if mode != 1 && mode != 2 {
        return Err(Error::InvalidParameter(format!("mode must be 1 or 2, got {mode}")));
    }
    Ok(Marginal {
        weights: state.mode_weights(mode),
        w: state.w,
        axis,
    })
}

impl Marginal {
    /// Half-width of the integrated-out variable's range.
    fn complementary_half_width(&self, n: u32) -> f64 {
        let s = (30.0 + 2.0 * n as f64).sqrt();
        match self.axis {
            Axis::Q => s * self.w.sqrt(),
            Axis::P => s / self.w.sqrt(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let nmax = self.weights.keys().max().copied().unwrap_or(0);
        let half = self.complementary_half_width(nmax);
        let rule = AxisRule::gauss_legendre(-half, half, 200);
        let w = self.w;
        self.weights
            .iter()
            .map(|(&n, &wt)| {
                wt * rule.integrate(|y| match self.axis {
                    Axis::Q => kernel(n, w, x, y),
                    Axis::P => kernel(n, w, y, x),
                })
            })
            .sum()
    }

    /// Range outside which the marginal is below double precision.
    pub fn support(&self) -> f64 {
        let nmax = self.weights.keys().max().copied().unwrap_or(0);
        let s = (30.0 + 2.0 * nmax as f64).sqrt();
        match self.axis {
            Axis::Q => s / self.w.sqrt(),
            Axis::P => s * self.w.sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureRule;

    fn l(a: u32, b: u32) -> FockLabel {
        FockLabel::new(a, b)
    }

    #[test]
    fn kernel_values() {
        assert!((kernel(0, 1.0, 0.0, 0.0) - 1.0 / PI).abs() < 1e-15);
        assert!((kernel(1, 1.0, 0.0, 0.0) + 1.0 / PI).abs() < 1e-15);
        let rule = QuadratureRule::default();
        for n in 0..5 {
            for w in [0.5, 2.0] {
                let v = rule.integrate(Execution::default(), |q, p| kernel(n, w, q, p));
                assert!((v - 1.0).abs() < 1e-9, "n={n} w={w} {v}");
            }
        }
    }

    #[test]
    fn state_weights() {
        let mut f = FockState::new(1.0, 4);
        f.insert(l(0, 0), 3.0).unwrap();
        f.insert(l(1, 2), -4.0).unwrap();
        let s = PhaseSpaceState::from_fock(&f).unwrap();
        assert!((s.weight(l(0, 0)) - 0.36).abs() < 1e-15);
        assert!((s.weight(l(1, 2)) - 0.64).abs() < 1e-15);
        assert!((s.weights.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(PhaseSpaceState::from_fock(&FockState::new(1.0, 3)).is_err());
    }

    #[test]
    fn pure_states_on_slices() {
        let grid = GridSpec::square(6.0, 61);
        let s0 = wigner_slice(&PhaseSpaceState::pure(l(0, 0), 1.0), &grid, Execution::default()).unwrap();
        assert!(s0.values.iter().all(|v| *v > 0.0));
        let f = wigner_function(&PhaseSpaceState::pure(l(1, 0), 1.0));
        assert!(f.eval(0.0, 0.0, 1.0, 1.0) < 0.0);
    }

    #[test]
    fn slice_is_reflection_symmetric() {
        let mut f = FockState::new(1.3, 8);
        for (lab, c) in [(l(0, 0), 1.0), (l(2, 0), -0.3), (l(0, 2), 0.2), (l(4, 2), 0.05)] {
            f.insert(lab, c).unwrap();
        }
        let s = PhaseSpaceState::from_fock(&f).unwrap();
        let field = wigner_slice(&s, &GridSpec::square(5.0, 101), Execution::default()).unwrap();
        assert!(field.reflection_defect() < 1e-12);
    }

    #[test]
    fn parallel_and_sequential_slices_identical() {
        let s = PhaseSpaceState::pure(l(2, 1), 0.8);
        let g = GridSpec::square(6.0, 81);
        let a = wigner_slice(&s, &g, Execution::Sequential).unwrap();
        let b = wigner_slice(&s, &g, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    fn hermite(n: u32, x: f64) -> f64 {
        let (mut a, mut b) = (1.0, 2.0 * x);
        if n == 0 {
            return a;
        }
        for k in 1..n {
            let c = 2.0 * x * b - 2.0 * k as f64 * a;
            a = b;
            b = c;
        }
        b
    }

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn marginals_match_oscillator_densities() {
        let w = 1.7;
        for n in 0..5 {
            let s = PhaseSpaceState::pure(l(n, 0), w);
            let mq = marginal(&s, Axis::Q, 1).unwrap();
            let mp = marginal(&s, Axis::P, 1).unwrap();
            for x in [0.0, 0.3, -0.9, 1.6] {
                let dq = (w / PI).sqrt() / (2f64.powi(n as i32) * factorial(n)) * hermite(n, w.sqrt() * x).powi(2) * (-w * x * x).exp();
                let y = x * w.sqrt();
                let dp = (1.0 / (PI * w)).sqrt() / (2f64.powi(n as i32) * factorial(n)) * hermite(n, y / w.sqrt()).powi(2) * (-y * y / w).exp();
                assert!((mq.eval(x) - dq).abs() < 1e-10, "n={n} x={x}");
                assert!((mp.eval(y) - dp).abs() < 1e-10, "n={n} p={y}");
                assert!(mq.eval(x) > -1e-9);
            }
            let rule = AxisRule::gauss_legendre(-mq.support(), mq.support(), 200);
            assert!((rule.integrate(|x| mq.eval(x)) - 1.0).abs() < 1e-8);
        }
        let mixed = PhaseSpaceState::pure(l(0, 3), w);
        let m2 = marginal(&mixed, Axis::Q, 2).unwrap();
        assert!(m2.eval(0.0).abs() < 1e-12);
        assert!(marginal(&mixed, Axis::Q, 3).is_err());
    }
}
