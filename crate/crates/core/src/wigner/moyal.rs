//! Grid realizations of the Moyal product, used to audit the closed-form
//! projector algebra.
//!
//! The default route goes through the Weyl correspondence: a symbol `f(q,p)`
//! on a uniform grid becomes the kernel
//! `K(x,y) = (1/2π) ∫ f((x+y)/2, p) e^{ip(x−y)} dp`, kernels compose by
//! `∫ K_f(x,z) K_g(z,y) dz`, and the Wigner transform
//! `∫ K(q+s/2, q−s/2) e^{−ips} ds` brings the result back. The `x` lattice has
//! spacing `2h` so that every midpoint lands on a grid node, and is padded on
//! both sides so that kernels of decaying symbols are not clipped.
//!
//! The truncated Bopp series is offered as well. It terminates for
//! polynomials but sits on its radius of convergence for the Gaussian
//! projectors, where it reports non-convergence.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, GridSpec, PhasePoint};
use crate::oscillator_basis::{stencil_derivative, BasisFunction};
use crate::par::{self, Execution};
use crate::perturbation::FockState;

use super::{wigner_slice, PhaseSpaceState};

/// `κ = 1/√(2π)` in `φ_m⋆φ_n = κ δ_mn φ_n`.
pub const KAPPA: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum StarProduct {
    Scaled { kappa: f64, function: BasisFunction },
    Zero,
}

impl StarProduct {
    pub fn eval(&self, pt: PhasePoint) -> f64 {
        match self {
            StarProduct::Scaled { kappa, function } => kappa * function.eval(pt),
            StarProduct::Zero => 0.0,
        }
    }
}

/// `φ_m ⋆ φ_n` in closed form.
pub fn star_product_1mode(m: u32, n: u32, w: f64) -> StarProduct {
    if m == n {
        StarProduct::Scaled {
            kappa: KAPPA,
            function: BasisFunction::new(n, w),
        }
    } else {
        StarProduct::Zero
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MoyalMethod {
    /// Kernel composition; `pad` extra `x` nodes per side (default `(M0−1)/2`
    /// with `M0 = (N+1)/2`).
    WeylKernel { pad: Option<usize> },
    /// Bopp series truncated at `order`, derivatives by fourth-order stencils.
    BoppSeries { order: usize },
}

impl Default for MoyalMethod {
    fn default() -> Self {
        MoyalMethod::WeylKernel { pad: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MoyalOptions {
    pub method: MoyalMethod,
    #[serde(skip)]
    pub exec: Execution,
}

/// Threshold on the relative size of successive Bopp-series terms.
pub const SERIES_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MoyalProduct {
    pub field: ComplexField2D,
    pub max_imag: f64,
    pub method: MoyalMethod,
    /// Series terms summed (Bopp) or zero.
    pub terms: usize,
}

/// A symbol carried over to its discretized Weyl kernel.
#[derive(Debug, Clone)]
pub struct WeylOperator {
    grid: GridSpec,
    pad: usize,
    m: usize,
    kernel: Vec<Complex64>,
    exec: Execution,
}

struct PhaseTable {
    m: usize,
    // e^{i p_j 2h d} for d in −(m−1)..=(m−1), row-major in d
    values: Vec<Complex64>,
    np: usize,
}

impl PhaseTable {
    fn new(grid: &GridSpec, m: usize) -> Self {
        let h = grid.dq();
        let np = grid.np;
        let mut values = Vec::with_capacity((2 * m - 1) * np);
        for d in -(m as i64 - 1)..=(m as i64 - 1) {
            for j in 0..np {
                values.push(Complex64::from_polar(1.0, grid.p(j) * 2.0 * h * d as f64));
            }
        }
        PhaseTable { m, values, np }
    }

    fn row(&self, d: i64) -> &[Complex64] {
        let r = (d + self.m as i64 - 1) as usize;
        &self.values[r * self.np..(r + 1) * self.np]
    }
}

fn trapezoid_weights(grid: &GridSpec) -> Vec<f64> {
    let dp = grid.dp();
    let mut w = vec![dp; grid.np];
    w[0] = dp / 2.0;
    w[grid.np - 1] = dp / 2.0;
    w
}

fn check_weyl_grid(grid: &GridSpec) -> Result<()> {
    grid.validate()?;
    if grid.nq % 2 == 0 || grid.nq < 3 {
        return Err(Error::InvalidParameter(format!(
            "kernel composition needs an odd number of q nodes, got {}",
            grid.nq
        )));
    }
    Ok(())
}

impl WeylOperator {
    pub fn from_field(f: &ComplexField2D, pad: Option<usize>, exec: Execution) -> Result<Self> {
        let grid = f.grid;
        check_weyl_grid(&grid)?;
        let n = grid.nq;
        let m0 = (n + 1) / 2;
        let pad = pad.unwrap_or((m0 - 1) / 2);
        let m = m0 + 2 * pad;
        let table = PhaseTable::new(&grid, m);
        let pw = trapezoid_weights(&grid);
        let rows = par::map_range(exec, m, |a| {
            let mut row = vec![Complex64::new(0.0, 0.0); m];
            for (b, slot) in row.iter_mut().enumerate() {
                let s = a as i64 + b as i64 - 2 * pad as i64;
                if s < 0 || s >= n as i64 {
                    continue;
                }
                let e = table.row(a as i64 - b as i64);
                let base = s as usize * grid.np;
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..grid.np {
                    acc += f.values[base + j] * e[j] * pw[j];
                }
                *slot = acc / (2.0 * PI);
            }
            row
        });
        Ok(WeylOperator {
            grid,
            pad,
            m,
            kernel: rows.into_iter().flatten().collect(),
            exec,
        })
    }

    fn at(&self, a: usize, b: usize) -> Complex64 {
        self.kernel[a * self.m + b]
    }

    /// Kernel of `self ⋆ other`.
    pub fn compose(&self, other: &WeylOperator) -> Result<WeylOperator> {
        if !self.grid.same_lattice(&other.grid) || self.pad != other.pad {
            return Err(Error::GridMismatch);
        }
        let m = self.m;
        let dz = 2.0 * self.grid.dq();
        let rows = par::map_range(self.exec, m, |a| {
            let mut row = vec![Complex64::new(0.0, 0.0); m];
            for z in 0..m {
                let k = self.at(a, z);
                if k == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let other_row = &other.kernel[z * m..(z + 1) * m];
                for (slot, v) in row.iter_mut().zip(other_row) {
                    *slot += k * v;
                }
            }
            row.iter_mut().for_each(|v| *v *= dz);
            row
        });
        Ok(WeylOperator {
            grid: self.grid,
            pad: self.pad,
            m,
            kernel: rows.into_iter().flatten().collect(),
            exec: self.exec,
        })
    }

    /// `∫ K(q+s/2, q−s/2) e^{−ips} ds` at node `(i, j)`, with `K = self`
    /// or, when `right` is given, `K = self·right` formed along the needed
    /// anti-diagonal only.
    fn symbol_node(&self, right: Option<&WeylOperator>, i: usize, table: &PhaseTable) -> Vec<Complex64> {
        let m = self.m;
        let h = self.grid.dq();
        let t = i + 2 * self.pad;
        let lo = t.saturating_sub(m - 1);
        let hi = t.min(m - 1);
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.np];
        for a in lo..=hi {
            let c = t - a;
            let k = match right {
                None => self.at(a, c),
                Some(r) => {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for z in 0..m {
                        acc += self.at(a, z) * r.at(z, c);
                    }
                    acc * (2.0 * h)
                }
            };
            if k == Complex64::new(0.0, 0.0) {
                continue;
            }
            let e = table.row(a as i64 - c as i64);
            for (slot, ej) in out.iter_mut().zip(e) {
                *slot += k * ej.conj();
            }
        }
        out.iter_mut().for_each(|v| *v *= 4.0 * h);
        out
    }

    /// The symbol of this kernel on the original grid.
    pub fn to_field(&self) -> ComplexField2D {
        let table = PhaseTable::new(&self.grid, self.m);
        let rows = par::map_range(self.exec, self.grid.nq, |i| self.symbol_node(None, i, &table));
        ComplexField2D {
            grid: self.grid,
            values: rows.into_iter().flatten().collect(),
        }
    }

    /// `(self ⋆ right)(q_i, p_j)` without forming the full product kernel.
    pub fn product_at(&self, right: &WeylOperator, i: usize, j: usize) -> Result<Complex64> {
        if !self.grid.same_lattice(&right.grid) || self.pad != right.pad {
            return Err(Error::GridMismatch);
        }
        let table = PhaseTable::new(&self.grid, self.m);
        Ok(self.symbol_node(Some(right), i, &table)[j])
    }
}

fn axis_derivative(f: &ComplexField2D, along_q: bool) -> ComplexField2D {
    let g = f.grid;
    let mut out = f.clone();
    if along_q {
        for j in 0..g.np {
            let col: Vec<Complex64> = (0..g.nq).map(|i| f.at(i, j)).collect();
            for (i, v) in stencil_derivative(&col, g.dq()).into_iter().enumerate() {
                out.values[g.index(i, j)] = v;
            }
        }
    } else {
        for i in 0..g.nq {
            let row = &f.values[g.index(i, 0)..g.index(i, 0) + g.np];
            let d = stencil_derivative(row, g.dp());
            out.values[g.index(i, 0)..g.index(i, 0) + g.np].copy_from_slice(&d);
        }
    }
    out
}

/// Next derivative level: entry `a` of the result is `∂_q^a ∂_p^{k−a}`.
fn next_level(level: &[ComplexField2D]) -> Vec<ComplexField2D> {
    let k = level.len();
    let mut out = Vec::with_capacity(k + 1);
    out.push(axis_derivative(&level[0], false));
    for item in level.iter().take(k) {
        out.push(axis_derivative(item, true));
    }
    out
}

fn bopp_series(f: &ComplexField2D, g: &ComplexField2D, order: usize) -> Result<(ComplexField2D, usize)> {
    let grid = f.grid;
    if grid.nq < crate::oscillator_basis::MIN_STENCIL_NODES || grid.np < crate::oscillator_basis::MIN_STENCIL_NODES {
        return Err(Error::NonDifferentiable {
            axis: if grid.nq < grid.np { "q" } else { "p" },
            nodes: grid.nq.min(grid.np),
            required: crate::oscillator_basis::MIN_STENCIL_NODES,
        });
    }
    let mut sum: Vec<Complex64> = f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect();
    let mut fl = vec![f.clone()];
    let mut gl = vec![g.clone()];
    let mut quiet = 0;
    let mut ratio = 0.0;
    let mut binom = vec![1.0f64];
    let mut factor = Complex64::new(1.0, 0.0);
    for k in 1..=order {
        fl = next_level(&fl);
        gl = next_level(&gl);
        binom = (0..=k)
            .map(|j| if j == 0 || j == k { 1.0 } else { binom[j - 1] + binom[j] })
            .collect();
        factor *= Complex64::new(0.0, 0.5) / k as f64;
        let mut term = vec![Complex64::new(0.0, 0.0); sum.len()];
        for j in 0..=k {
            // f: ∂_q^{k−j} ∂_p^{j}, g: ∂_q^{j} ∂_p^{k−j}
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let c = factor * binom[j] * sign;
            let fa = &fl[k - j];
            let ga = &gl[j];
            for (t, (x, y)) in term.iter_mut().zip(fa.values.iter().zip(&ga.values)) {
                *t += c * x * y;
            }
        }
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        let tmax = term.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let smax = sum.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        ratio = if smax > 0.0 { tmax / smax } else { tmax };
        if ratio < SERIES_TOLERANCE {
            quiet += 1;
            if quiet == 2 {
                return Ok((ComplexField2D { grid, values: sum }, k + 1));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { order, ratio })
}

/// `f ⋆ g` from sampled fields on a shared grid.
pub fn moyal_grid_oracle(f: &ComplexField2D, g: &ComplexField2D, opts: &MoyalOptions) -> Result<MoyalProduct> {
    if !f.grid.same_lattice(&g.grid) {
        return Err(Error::GridMismatch);
    }
    let (field, terms) = match opts.method {
        MoyalMethod::WeylKernel { pad } => {
            let kf = WeylOperator::from_field(f, pad, opts.exec)?;
            let kg = WeylOperator::from_field(g, pad, opts.exec)?;
            (kf.compose(&kg)?.to_field(), 0)
        }
        MoyalMethod::BoppSeries { order } => bopp_series(f, g, order)?,
    };
    Ok(MoyalProduct {
        max_imag: field.max_imag(),
        field,
        method: opts.method,
        terms,
    })
}

/// Agreement between the closed-form slice and `ψ⋆ψ` assembled on grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceCrossCheck {
    pub mode1_grid: GridSpec,
    pub mode2_grid: GridSpec,
    pub points: usize,
    pub pairs: usize,
    pub max_imag: f64,
    pub max_abs_deviation: f64,
    pub relative_deviation: f64,
}

/// Envelope exponent at the edge of the auto-sized oracle grids.
const CROSS_CHECK_EDGE: f64 = 40.0;

/// Rebuilds the slice of `ψ = Σ c φ_{n1} φ_{n2}` at `(q2, p2)` as
/// `Σ (A_{n2}⋆A_{m2})(q1,p1)·(φ_{n2}⋆φ_{m2})(q2,p2)`, with
/// `A_{n2} = Σ_{n1} c φ_{n1}`, every product taken by kernel composition, and
/// compares it with [`wigner_slice`] on the same nodes.
pub fn slice_cross_check(state: &FockState, slice: (f64, f64), nodes: usize, exec: Execution) -> Result<SliceCrossCheck> {
    let psi = state.normalized();
    let w = psi.w;
    let (m1, m2) = psi.max_occupation();
    let edge = CROSS_CHECK_EDGE + 2.0 * m1.max(m2) as f64;
    let (qh, ph) = ((edge / w).sqrt(), (edge * w).sqrt());
    let nodes = if nodes % 2 == 0 { nodes + 1 } else { nodes };
    let mut g1 = GridSpec::square(1.0, nodes);
    (g1.q_min, g1.q_max, g1.p_min, g1.p_max) = (-qh, qh, -ph, ph);
    (g1.slice_q2, g1.slice_p2) = slice;
    let mut g2 = g1;
    let (rq, rp) = (qh + slice.0.abs(), ph + slice.1.abs());
    (g2.q_min, g2.q_max, g2.p_min, g2.p_max) = (slice.0 - rq, slice.0 + rq, slice.1 - rp, slice.1 + rp);
    let centre = (nodes - 1) / 2;

    let mut n2s: Vec<u32> = psi.coefficients.keys().map(|l| l.n2).collect();
    n2s.sort();
    n2s.dedup();
    let a_ops = n2s
        .iter()
        .map(|&n2| {
            let field = ComplexField2D::from_fn(g1, |q, p| {
                let v: f64 = psi
                    .coefficients
                    .iter()
                    .filter(|(l, _)| l.n2 == n2)
                    .map(|(l, c)| c * BasisFunction::new(l.n1, w).eval(PhasePoint::new(q, p)))
                    .sum();
                Complex64::new(v, 0.0)
            });
            WeylOperator::from_field(&field, None, exec)
        })
        .collect::<Result<Vec<_>>>()?;
    let g_ops = n2s
        .iter()
        .map(|&n2| {
            let phi = BasisFunction::new(n2, w);
            let field = ComplexField2D::from_fn(g2, |q, p| Complex64::new(phi.eval(PhasePoint::new(q, p)), 0.0));
            WeylOperator::from_field(&field, None, exec)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = vec![Complex64::new(0.0, 0.0); g1.len()];
    let mut pairs = 0;
    for (x, ax) in a_ops.iter().enumerate() {
        for (y, ay) in a_ops.iter().enumerate() {
            let mode2 = g_ops[x].product_at(&g_ops[y], centre, centre)?;
            if mode2.norm() < 1e-300 {
                continue;
            }
            let mode1 = ax.compose(ay)?.to_field();
            for (t, v) in total.iter_mut().zip(&mode1.values) {
                *t += v * mode2;
            }
            pairs += 1;
        }
    }

    let closed = wigner_slice(&PhaseSpaceState::from_fock(&psi)?, &g1, exec)?;
    let max_abs_deviation = total
        .iter()
        .zip(&closed.values)
        .fold(0.0f64, |m, (a, b)| m.max((a.re - b).abs()));
    let peak = closed.max_abs();
    Ok(SliceCrossCheck {
        mode1_grid: g1,
        mode2_grid: g2,
        points: g1.len(),
        pairs,
        max_imag: total.iter().fold(0.0f64, |m, v| m.max(v.im.abs())),
        max_abs_deviation,
        relative_deviation: if peak > 0.0 { max_abs_deviation / peak } else { max_abs_deviation },
    })
}

/// Worst deviation of grid products `φ_m⋆φ_n` from the closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectorAudit {
    pub grid: GridSpec,
    pub nmax: u32,
    pub frequencies: Vec<f64>,
    pub products: usize,
    /// `max |oracle − closed form|` over the grid, relative to `κ·max|φ|`.
    pub worst_relative: f64,
    pub worst_case: (u32, u32, f64),
    pub max_imag: f64,
}

/// Runs every `φ_m⋆φ_n` with `m, n ≤ nmax` through the kernel-composition
/// oracle for each frequency.
pub fn projector_audit(nmax: u32, frequencies: &[f64], grid: &GridSpec, exec: Execution) -> Result<ProjectorAudit> {
    let scale = KAPPA * (2.0 / PI).sqrt();
    let mut audit = ProjectorAudit {
        grid: *grid,
        nmax,
        frequencies: frequencies.to_vec(),
        products: 0,
        worst_relative: 0.0,
        worst_case: (0, 0, frequencies.first().copied().unwrap_or(1.0)),
        max_imag: 0.0,
    };
    for &w in frequencies {
        let ops = (0..=nmax)
            .map(|n| {
                let phi = BasisFunction::new(n, w);
                let f = ComplexField2D::from_fn(*grid, |q, p| Complex64::new(phi.eval(PhasePoint::new(q, p)), 0.0));
                WeylOperator::from_field(&f, None, exec)
            })
            .collect::<Result<Vec<_>>>()?;
        for m in 0..=nmax {
            for n in 0..=nmax {
                let prod = ops[m as usize].compose(&ops[n as usize])?.to_field();
                let exact = star_product_1mode(m, n, w);
                let mut worst = 0.0f64;
                for i in 0..grid.nq {
                    for j in 0..grid.np {
                        let v = exact.eval(PhasePoint::new(grid.q(i), grid.p(j)));
                        worst = worst.max((prod.at(i, j) - v).norm());
                    }
                }
                audit.products += 1;
                audit.max_imag = audit.max_imag.max(prod.max_imag());
                if worst / scale > audit.worst_relative {
                    audit.worst_relative = worst / scale;
                    audit.worst_case = (m, n, w);
                }
            }
        }
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64, f64) -> f64, grid: GridSpec) -> ComplexField2D {
        ComplexField2D::from_fn(grid, |q, p| Complex64::new(f(q, p), 0.0))
    }

    #[test]
    fn kappa_value() {
        assert!((KAPPA - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn polynomial_products_terminate() {
        let grid = GridSpec::square(2.0, 21);
        let q = sampled(|q, _| q, grid);
        let p = sampled(|_, p| p, grid);
        let opts = MoyalOptions {
            method: MoyalMethod::BoppSeries { order: 12 },
            ..Default::default()
        };
        let qq = moyal_grid_oracle(&q, &q, &opts).unwrap();
        for i in 0..grid.nq {
            for j in 0..grid.np {
                assert!((qq.field.at(i, j) - Complex64::new(grid.q(i).powi(2), 0.0)).norm() < 1e-12);
            }
        }
        assert!(qq.terms <= 3);
        let qp = moyal_grid_oracle(&q, &p, &opts).unwrap();
        let pq = moyal_grid_oracle(&p, &q, &opts).unwrap();
        for (a, b) in qp.field.values.iter().zip(&pq.field.values) {
            assert!((a - b - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn bopp_series_flags_gaussian_projectors() {
        let grid = GridSpec::square(6.0, 121);
        let phi = BasisFunction::new(0, 1.0);
        let f = sampled(|q, p| phi.eval(PhasePoint::new(q, p)), grid);
        let opts = MoyalOptions {
            method: MoyalMethod::BoppSeries { order: 12 },
            ..Default::default()
        };
        assert!(matches!(moyal_grid_oracle(&f, &f, &opts), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn weyl_route_reproduces_projectors() {
        let a = projector_audit(2, &[1.0], &GridSpec::square(6.0, 201), Execution::default()).unwrap();
        assert_eq!(a.products, 9);
        assert!(a.worst_relative < 1e-6, "{a:?}");
        assert!(a.max_imag < 1e-10);
    }

    #[test]
    fn product_at_matches_full_product() {
        let grid = GridSpec::square(5.0, 81);
        let a = sampled(|q, p| (-(q * q) - p * p).exp() * (1.0 + 0.3 * q), grid);
        let b = sampled(|q, p| (-(q * q) - 0.5 * p * p).exp(), grid);
        let ka = WeylOperator::from_field(&a, None, Execution::default()).unwrap();
        let kb = WeylOperator::from_field(&b, None, Execution::default()).unwrap();
        let full = ka.compose(&kb).unwrap().to_field();
        for (i, j) in [(40, 40), (10, 55), (70, 3)] {
            assert!((ka.product_at(&kb, i, j).unwrap() - full.at(i, j)).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_mismatched_or_even_grids() {
        let a = sampled(|_, _| 1.0, GridSpec::square(1.0, 11));
        let b = sampled(|_, _| 1.0, GridSpec::square(1.0, 13));
        assert_eq!(moyal_grid_oracle(&a, &b, &MoyalOptions::default()), Err(Error::GridMismatch));
        let c = sampled(|_, _| 1.0, GridSpec::square(1.0, 10));
        assert!(moyal_grid_oracle(&c, &c, &MoyalOptions::default()).is_err());
    }

    #[test]
    fn slice_cross_check_on_superposition() {
        use crate::fock_algebra::FockLabel;
        let mut psi = FockState::new(1.3, 6);
        for (l, c) in [(FockLabel::new(0, 0), 1.0), (FockLabel::new(2, 0), -0.2), (FockLabel::new(0, 2), 0.15), (FockLabel::new(2, 2), 0.05)] {
            psi.insert(l, c).unwrap();
        }
        let r = slice_cross_check(&psi, (1.0, 1.0), 121, Execution::default()).unwrap();
        assert_eq!(r.pairs, 4);
        assert!(r.max_imag < 1e-10, "{}", r.max_imag);
        assert!(r.relative_deviation < 1e-8, "{}", r.relative_deviation);
    }
}
