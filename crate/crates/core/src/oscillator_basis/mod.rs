//! Phase-space realization of the oscillator Fock basis.
//!
//! The one-mode functions are `φ_n(q,p) = N_n e^{−u/2} L_n(u)` with
//! `u = 2(W q² + p²/W)`. They follow from the star-annihilation condition
//! `â⋆φ₀ = 0` and unit `L²` normalization; `N_n = (−1)ⁿ √(2/π)`, so `φ_n(0,0)`
//! carries the sign `(−1)ⁿ`.

mod gauss_poly;
pub mod laguerre;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

pub use gauss_poly::GaussPoly;
pub use laguerre::{laguerre, laguerre_coefficients, laguerre_derivative, laguerre_table};

use crate::error::{Error, Result};
pub use crate::grid::PhasePoint;
use crate::grid::{ComplexField2D, GridSpec};
use crate::par::{self, Execution};
use crate::quadrature::{AxisRule, QuadratureRule};

/// Which closed form a basis function uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum BasisForm {
    /// `e^{−(Wq²+p²/W)} L_n(2(Wq²+p²/W))`, consistent with the ladder construction.
    #[default]
    Derived,
    /// `e^{−(Wq²+p²)} L_n(Wq²+p²)` as printed for the ground state; only
    /// star-annihilated at `W = 1`. Normalized numerically.
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisFunction {
    pub n: u32,
    pub w: f64,
    pub form: BasisForm,
    norm: f64,
}

fn paper_literal_norm(n: u32, w: f64) -> f64 {
    // ∫ e^{−2(Wq²+p²)} L_n(Wq²+p²)² dq dp = (π/√W) ∫₀^∞ e^{−2v} L_n(v)² dv
    let rule = AxisRule::gauss_legendre(0.0, 40.0 + 4.0 * n as f64, 200);
    let radial = rule.integrate(|v| (-2.0 * v).exp() * laguerre(n, v).powi(2));
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign / (PI / w.sqrt() * radial).sqrt()
}

impl BasisFunction {
    pub fn new(n: u32, w: f64) -> Self {
        Self::with_form(n, w, BasisForm::Derived)
    }

    pub fn with_form(n: u32, w: f64, form: BasisForm) -> Self {
        assert!(w > 0.0 && w.is_finite(), "oscillator frequency must be positive");
        let norm = match form {
            BasisForm::Derived => {
                let s = (2.0 / PI).sqrt();
                if n % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
            BasisForm::PaperLiteral => paper_literal_norm(n, w),
        };
        BasisFunction { n, w, form, norm }
    }

    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// Laguerre argument at `(q, p)`.
    pub fn argument(&self, q: f64, p: f64) -> f64 {
        match self.form {
            BasisForm::Derived => 2.0 * (self.w * q * q + p * p / self.w),
            BasisForm::PaperLiteral => self.w * q * q + p * p,
        }
    }

    pub fn eval(&self, pt: PhasePoint) -> f64 {
        let u = self.argument(pt.q, pt.p);
        let envelope = match self.form {
            BasisForm::Derived => (-0.5 * u).exp(),
            BasisForm::PaperLiteral => (-u).exp(),
        };
        self.norm * envelope * laguerre(self.n, u)
    }

    /// The same function as a [`GaussPoly`], for exact Bopp-operator action.
    pub fn to_gauss_poly(&self) -> GaussPoly {
        let (alpha, beta, cq, cp) = match self.form {
            BasisForm::Derived => (self.w, 1.0 / self.w, 2.0 * self.w, 2.0 / self.w),
            BasisForm::PaperLiteral => (self.w, 1.0, self.w, 1.0),
        };
        let mut out = GaussPoly::new(alpha, beta);
        // L_n(cq q² + cp p²) expanded binomially
        for (k, lk) in laguerre_coefficients(self.n).into_iter().enumerate() {
            let k = k as u32;
            let mut binom = 1.0;
            for j in 0..=k {
                let c = self.norm * lk * binom * cq.powi((k - j) as i32) * cp.powi(j as i32);
                out.add_monomial(2 * (k - j), 2 * j, Complex64::new(c, 0.0));
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        out
    }
}

/// Anything that can be sampled on phase space.
pub trait PhaseFunction: Sync {
    fn value(&self, pt: PhasePoint) -> Complex64;
}

impl PhaseFunction for BasisFunction {
    fn value(&self, pt: PhasePoint) -> Complex64 {
        Complex64::new(self.eval(pt), 0.0)
    }
}

impl PhaseFunction for GaussPoly {
    fn value(&self, pt: PhasePoint) -> Complex64 {
        self.eval(pt.q, pt.p)
    }
}

/// Star operators realized as Bopp shifts (`ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoppOp {
    /// `q⋆ = q + (i/2)∂_p`
    Q,
    /// `p⋆ = p − (i/2)∂_q`
    P,
    /// `â⋆ = √(W/2) q⋆ + i/√(2W) p⋆`
    A { w: f64 },
    /// `â†⋆ = √(W/2) q⋆ − i/√(2W) p⋆`
    ADag { w: f64 },
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn ladder_weights(w: f64, dagger: bool) -> (Complex64, Complex64) {
    let cq = Complex64::new((w / 2.0).sqrt(), 0.0);
    let cp = I * (1.0 / (2.0 * w)).sqrt();
    if dagger {
        (cq, -cp)
    } else {
        (cq, cp)
    }
}

/// Applies a star operator to a closed-form function.
pub fn bopp_apply(op: BoppOp, f: &GaussPoly) -> GaussPoly {
    match op {
        BoppOp::Q => f.times_q().add(&f.d_p().scale(I * 0.5)),
        BoppOp::P => f.times_p().sub(&f.d_q().scale(I * 0.5)),
        BoppOp::A { w } | BoppOp::ADag { w } => {
            let (cq, cp) = ladder_weights(w, matches!(op, BoppOp::ADag { .. }));
            bopp_apply(BoppOp::Q, f)
                .scale(cq)
                .add(&bopp_apply(BoppOp::P, f).scale(cp))
        }
    }
}

/// Minimum nodes per axis for the five-point stencils.
pub const MIN_STENCIL_NODES: usize = 5;

/// Fourth-order first derivative along one axis of a sampled sequence.
pub(crate) fn stencil_derivative(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let s = 1.0 / (12.0 * h);
    for i in 0..n {
        out[i] = if i >= 2 && i + 2 < n {
            (f[i - 2] - f[i - 1] * 8.0 + f[i + 1] * 8.0 - f[i + 2]) * s
        } else if i == 0 {
            (f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) * s
        } else if i == 1 {
            (f[0] * -3.0 - f[1] * 10.0 + f[2] * 18.0 - f[3] * 6.0 + f[4]) * s
        } else if i == n - 2 {
            (f[n - 1] * 3.0 + f[n - 2] * 10.0 - f[n - 3] * 18.0 + f[n - 4] * 6.0 - f[n - 5]) * s
        } else {
            (f[n - 1] * 25.0 - f[n - 2] * 48.0 + f[n - 3] * 36.0 - f[n - 4] * 16.0 + f[n - 5] * 3.0) * s
        };
    }
    out
}

/// `(∂_q f, ∂_p f)` on a grid, fourth order in the spacing (one-sided
/// five-point stencils at the two outermost nodes).
pub fn grid_gradient(f: &ComplexField2D) -> Result<(ComplexField2D, ComplexField2D)> {
    let g = f.grid;
    if g.nq < MIN_STENCIL_NODES {
        return Err(Error::NonDifferentiable {
            axis: "q",
            nodes: g.nq,
            required: MIN_STENCIL_NODES,
        });
    }
    if g.np < MIN_STENCIL_NODES {
        return Err(Error::NonDifferentiable {
            axis: "p",
            nodes: g.np,
            required: MIN_STENCIL_NODES,
        });
    }
    let mut dq = f.clone();
    let mut dp = f.clone();
    for i in 0..g.nq {
        let row: Vec<Complex64> = (0..g.np).map(|j| f.at(i, j)).collect();
        for (j, v) in stencil_derivative(&row, g.dp()).into_iter().enumerate() {
            dp.values[g.index(i, j)] = v;
        }
    }
    for j in 0..g.np {
        let col: Vec<Complex64> = (0..g.nq).map(|i| f.at(i, j)).collect();
        for (i, v) in stencil_derivative(&col, g.dq()).into_iter().enumerate() {
            dq.values[g.index(i, j)] = v;
        }
    }
    Ok((dq, dp))
}

/// Applies a star operator to a sampled field with finite differences.
pub fn bopp_apply_sampled(op: BoppOp, f: &ComplexField2D) -> Result<ComplexField2D> {
    let (dq, dp) = grid_gradient(f)?;
    let g = f.grid;
    let mut out = f.clone();
    for i in 0..g.nq {
        let q = g.q(i);
        for j in 0..g.np {
            let p = g.p(j);
            let k = g.index(i, j);
            let qstar = f.values[k] * q + I * 0.5 * dp.values[k];
            let pstar = f.values[k] * p - I * 0.5 * dq.values[k];
            out.values[k] = match op {
                BoppOp::Q => qstar,
                BoppOp::P => pstar,
                BoppOp::A { w } | BoppOp::ADag { w } => {
                    let (cq, cp) = ladder_weights(w, matches!(op, BoppOp::ADag { .. }));
                    cq * qstar + cp * pstar
                }
            };
        }
    }
    Ok(out)
}

/// Threshold on `|f* g|` at the rule's boundary relative to its peak.
pub const DOMAIN_THRESHOLD: f64 = 1e-12;

/// `∫ f*(q,p) g(q,p) dq dp` by tensor quadrature.
pub fn inner_product<F, G>(f: &F, g: &G, rule: &QuadratureRule) -> Result<Complex64>
where
    F: PhaseFunction + ?Sized,
    G: PhaseFunction + ?Sized,
{
    let integrand = |q: f64, p: f64| {
        let pt = PhasePoint::new(q, p);
        f.value(pt).conj() * g.value(pt)
    };
    let ratio = rule.boundary_ratio(|q, p| integrand(q, p).norm());
    if ratio > DOMAIN_THRESHOLD {
        return Err(Error::DomainTooSmall {
            boundary: ratio,
            threshold: DOMAIN_THRESHOLD,
        });
    }
    let exec = Execution::default();
    let rows = par::map_range(exec, rule.q.nodes.len(), |i| {
        let q = rule.q.nodes[i];
        let wq = rule.q.weights[i];
        let vals: Vec<Complex64> = rule
            .p
            .nodes
            .iter()
            .zip(&rule.p.weights)
            .map(|(&p, &wp)| integrand(q, p) * (wq * wp))
            .collect();
        let re: Vec<f64> = vals.iter().map(|v| v.re).collect();
        let im: Vec<f64> = vals.iter().map(|v| v.im).collect();
        (par::pairwise_sum(&re), par::pairwise_sum(&im))
    });
    let re: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let im: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(Complex64::new(par::pairwise_sum(&re), par::pairwise_sum(&im)))
}

/// `G_mn = ⟨φ_m, φ_n⟩` for `m, n ≤ nmax`.
pub fn gram_matrix(nmax: u32, w: f64, form: BasisForm, rule: &QuadratureRule) -> Result<Vec<Vec<f64>>> {
    let basis: Vec<BasisFunction> = (0..=nmax).map(|n| BasisFunction::with_form(n, w, form)).collect();
    basis
        .iter()
        .map(|fm| basis.iter().map(|fn_| inner_product(fm, fn_, rule).map(|z| z.re)).collect())
        .collect()
}

/// `max |G − I|`.
pub fn gram_defect(gram: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (m, row) in gram.iter().enumerate() {
        for (n, &v) in row.iter().enumerate() {
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarAnnihilationResidual {
    /// `‖â⋆φ₀‖₂ / ‖φ₀‖₂` by quadrature.
    pub l2_ratio: f64,
    /// Largest `|â⋆φ₀|` over the sample grid.
    pub max_norm: f64,
}

/// How far `φ₀` is from being annihilated by `â⋆`, using exact Bopp action.
pub fn star_annihilation_residual(w: f64, form: BasisForm, grid: &GridSpec, rule: &QuadratureRule) -> Result<StarAnnihilationResidual> {
    let phi0 = BasisFunction::with_form(0, w, form);
    let image = bopp_apply(BoppOp::A { w }, &phi0.to_gauss_poly());
    let num = inner_product(&image, &image, rule)?.re.max(0.0).sqrt();
    let den = inner_product(&phi0, &phi0, rule)?.re.sqrt();
    let mut max_norm = 0.0f64;
    for i in 0..grid.nq {
        for j in 0..grid.np {
            max_norm = max_norm.max(image.eval(grid.q(i), grid.p(j)).norm());
        }
    }
    Ok(StarAnnihilationResidual {
        l2_ratio: num / den,
        max_norm,
    })
}

/// `⟨φ_m, â†⋆φ_n⟩` as a concrete phase-space integral. Reported beside the
/// formal ladder value `√(n+1) δ_{m,n+1}`; the two need not coincide.
pub fn raising_pairing(m: u32, n: u32, w: f64, rule: &QuadratureRule) -> Result<Complex64> {
    let phi_m = BasisFunction::new(m, w);
    let raised = bopp_apply(BoppOp::ADag { w }, &BasisFunction::new(n, w).to_gauss_poly());
    inner_product(&phi_m, &raised, rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_peak() {
        let f = BasisFunction::new(0, 1.0);
        let v = f.eval(PhasePoint::new(0.0, 0.0));
        assert!((v - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((v - 0.797_884_560_802_865_4).abs() < 1e-12);
    }

    #[test]
    fn evenness() {
        for n in 0..6 {
            let f = BasisFunction::new(n, 1.7);
            let a = f.eval(PhasePoint::new(0.3, -1.1));
            for (q, p) in [(-0.3, 1.1), (-0.3, -1.1), (0.3, 1.1)] {
                assert!((a - f.eval(PhasePoint::new(q, p))).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gauss_poly_matches_direct_eval() {
        for form in [BasisForm::Derived, BasisForm::PaperLiteral] {
            for n in 0..7 {
                let f = BasisFunction::with_form(n, 0.8, form);
                let g = f.to_gauss_poly();
                for (q, p) in [(0.0, 0.0), (0.5, -0.2), (1.3, 2.1)] {
                    let a = f.eval(PhasePoint::new(q, p));
                    let b = g.eval(q, p);
                    assert!((a - b.re).abs() < 1e-10 && b.im == 0.0, "n={n} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn normalization_by_quadrature() {
        let rule = QuadratureRule::default();
        for n in 0..=6 {
            let f = BasisFunction::new(n, 1.0);
            let v = inner_product(&f, &f, &rule).unwrap();
            assert!((v.re - 1.0).abs() < 1e-8, "n={n}: {}", v.re);
        }
    }

    #[test]
    fn orthonormal_for_several_frequencies() {
        let rule = QuadratureRule::default();
        for w in [0.5, 1.0, 2.0] {
            let g = gram_matrix(5, w, BasisForm::Derived, &rule).unwrap();
            assert!(gram_defect(&g) < 1e-6, "W={w}");
        }
    }

    #[test]
    fn star_annihilates_ground_state() {
        let rule = QuadratureRule::default();
        let grid = GridSpec::square(6.0, 61);
        for w in [0.5, 1.0, 2.0] {
            let r = star_annihilation_residual(w, BasisForm::Derived, &grid, &rule).unwrap();
            assert!(r.l2_ratio < 1e-8 && r.max_norm < 1e-8, "{r:?}");
        }
        let paper = star_annihilation_residual(2.0, BasisForm::PaperLiteral, &grid, &rule).unwrap();
        assert!(paper.l2_ratio > 1e-3);
    }

    #[test]
    fn heisenberg_commutator_on_gaussian() {
        let mut f = GaussPoly::gaussian(0.6, 1.4);
        f.add_monomial(1, 1, Complex64::new(0.3, 0.0));
        let qp = bopp_apply(BoppOp::Q, &bopp_apply(BoppOp::P, &f));
        let pq = bopp_apply(BoppOp::P, &bopp_apply(BoppOp::Q, &f));
        let comm = qp.sub(&pq);
        for (q, p) in [(0.0, 0.0), (0.7, -0.4), (-1.5, 2.0)] {
            let lhs = comm.eval(q, p);
            let rhs = I * f.eval(q, p);
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn q_star_at_origin() {
        // real even function: q⋆f(0,0) = (i/2)∂_p f(0,0) = 0
        let f = GaussPoly::gaussian(1.0, 1.0);
        let v = bopp_apply(BoppOp::Q, &f).eval(0.0, 0.0);
        assert!(v.norm() < 1e-15);
        // shifted: q⋆(p e^{..}) at 0 = i/2
        let g = f.times_p();
        let v = bopp_apply(BoppOp::Q, &g).eval(0.0, 0.0);
        assert!((v - I * 0.5).norm() < 1e-15);
    }

    #[test]
    fn sampled_bopp_matches_closed_form() {
        let w = 1.3;
        let phi = BasisFunction::new(2, w);
        let exact = bopp_apply(BoppOp::ADag { w }, &phi.to_gauss_poly());
        let err = |n: usize| {
            let grid = GridSpec::square(5.0, n);
            let sampled = ComplexField2D::from_fn(grid, |q, p| Complex64::new(phi.eval(PhasePoint::new(q, p)), 0.0));
            let approx = bopp_apply_sampled(BoppOp::ADag { w }, &sampled).unwrap();
            let mut worst = 0.0f64;
            for i in 0..grid.nq {
                for j in 0..grid.np {
                    worst = worst.max((approx.at(i, j) - exact.eval(grid.q(i), grid.p(j))).norm());
                }
            }
            worst
        };
        let coarse = err(201);
        let fine = err(401);
        assert!(coarse < 1e-3, "{coarse}");
        // fourth order: halving h cuts the error by ~16
        assert!(coarse / fine > 12.0, "{coarse} {fine}");
    }

    #[test]
    fn sampled_bopp_rejects_tiny_grid() {
        let grid = GridSpec::square(1.0, 4);
        let f = ComplexField2D::from_fn(grid, |_, _| Complex64::new(1.0, 0.0));
        assert!(matches!(bopp_apply_sampled(BoppOp::Q, &f), Err(Error::NonDifferentiable { .. })));
    }

    #[test]
    fn inner_product_flags_small_domain() {
        let rule = QuadratureRule::gauss_legendre([-2.0, 2.0, -2.0, 2.0], 40);
        let f = BasisFunction::new(3, 1.0);
        assert!(matches!(inner_product(&f, &f, &rule), Err(Error::DomainTooSmall { .. })));
    }

    #[test]
    fn inner_product_conjugate_symmetric() {
        let rule = QuadratureRule::default();
        let f = bopp_apply(BoppOp::ADag { w: 1.0 }, &BasisFunction::new(1, 1.0).to_gauss_poly());
        let g = BasisFunction::new(2, 1.0);
        let a = inner_product(&f, &g, &rule).unwrap();
        let b = inner_product(&g, &f, &rule).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }
}
