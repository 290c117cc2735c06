//! Negativity `η = ∫|f_W| dΩ − 1`.
//!
//! Per mode the phase-space measure reduces to `dq dp = (π/2) du`. For fixed
//! `u1` the integrand in `u2` is `e^{−u2/2} P(u2)` with `P` a Laguerre
//! combination, so `∫|·| du2` is done exactly: the real roots of `P` are
//! isolated through its derivative chain and the pieces are integrated with
//! the closed-form antiderivative `e^{−u/2} Σ b_k L_k(u)`. Only the outer `u1`
//! integral is numerical.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator_basis::{laguerre_coefficients, laguerre_table};
use crate::par::{self, Execution};
use crate::quadrature::adaptive_gauss_kronrod;

use super::{kernels_u, PhaseSpaceState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum NegativityForm {
    /// `∫|f_W| − 1`.
    #[default]
    Volume,
    /// `(∫|f_W| − 1)/2`, the integrated negative part alone.
    Halved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityOptions {
    /// Absolute tolerance on the outer integral.
    pub tol: f64,
    /// Smallest outer cutoff in `u1`; extended when the tail bound demands it.
    pub u_max: f64,
    pub form: NegativityForm,
    /// Initial outer panels, each refined independently.
    pub panels: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for NegativityOptions {
    fn default() -> Self {
        NegativityOptions {
            tol: 1e-11,
            u_max: 80.0,
            form: NegativityForm::Volume,
            panels: 32,
            exec: Execution::default(),
        }
    }
}

/// Tail bound below which the outer range stops growing.
pub const TAIL_TARGET: f64 = 1e-14;
const MAX_PANELS_PER_SEGMENT: usize = 4000;
const PROBE_SPACING: f64 = 0.05;
const PROBE_SAFETY: f64 = 2.0;
const MIN_PROBE_WIDTH: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityResult {
    pub eta: f64,
    /// `∫|f_W|` over the truncated range.
    pub abs_integral: f64,
    /// `∫f_W` over the same range (should be 1).
    pub integral: f64,
    pub error_estimate: f64,
    /// Upper bound on `∫|f_W|` beyond `u_max`.
    pub tail_bound: f64,
    pub u_max: f64,
    pub panels: usize,
    pub form: NegativityForm,
    /// `(q2, p2)` for the slice variant.
    pub slice: Option<(f64, f64)>,
}

fn eval(c: &[f64], u: f64) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    laguerre_table(c.len() as u32 - 1, u)
        .iter()
        .zip(c)
        .map(|(l, a)| l * a)
        .sum()
}

fn trimmed(c: &[f64]) -> &[f64] {
    let end = c.iter().rposition(|v| *v != 0.0).map_or(0, |i| i + 1);
    &c[..end]
}

/// Laguerre coefficients of `P'`.
fn derivative(c: &[f64]) -> Vec<f64> {
    let d = c.len();
    let mut out = vec![0.0; d.saturating_sub(1)];
    let mut tail = 0.0;
    for j in (0..d.saturating_sub(1)).rev() {
        tail += c[j + 1];
        out[j] = -tail;
    }
    out
}

/// Coefficients `b` of the antiderivative `e^{−u/2} Σ b_k L_k` of
/// `e^{−u/2} Σ c_k L_k`.
fn antiderivative(c: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0; c.len()];
    let mut tail = 0.0;
    for j in (0..c.len()).rev() {
        b[j] = -2.0 * (c[j] + tail);
        tail += b[j];
    }
    b
}

fn bisect(c: &[f64], mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = eval(c, m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Sign changes of `Σ c_k L_k` in `(lo, hi)`, ascending.
fn roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trimmed(c);
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut nodes = vec![lo];
    nodes.extend(roots(&derivative(c), lo, hi));
    nodes.push(hi);
    let mut out = Vec::new();
    for pair in nodes.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (fa, fb) = (eval(c, a), eval(c, b));
        if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            out.push(bisect(c, a, b, fa));
        }
    }
    out
}

/// Cauchy bound on the positive roots of `Σ c_k L_k`.
fn root_bound(c: &[f64]) -> f64 {
    let c = trimmed(c);
    let d = c.len();
    if d <= 1 {
        return 0.0;
    }
    let mut mono = vec![0.0; d];
    for (k, ck) in c.iter().enumerate() {
        for (i, a) in laguerre_coefficients(k as u32).iter().enumerate() {
            mono[i] += ck * a;
        }
    }
    let lead = mono[d - 1];
    if lead == 0.0 {
        return f64::INFINITY;
    }
    1.0 + mono[..d - 1].iter().fold(0.0f64, |m, a| m.max((a / lead).abs()))
}

/// `(∫_0^∞ |g|, ∫_0^∞ g)` for `g = e^{−u/2} Σ c_k L_k(u)`. Roots beyond `cap`
/// are ignored.
fn half_line_integrals(c: &[f64], cap: f64) -> (f64, f64) {
    let b = antiderivative(c);
    let anti = |u: f64| (-0.5 * u).exp() * eval(&b, u);
    let hi = root_bound(c).min(cap);
    let mut prev = anti(0.0);
    let signed = -prev;
    let mut abs = 0.0;
    if hi > 0.0 {
        for r in roots(c, 0.0, hi) {
            let cur = anti(r);
            abs += (cur - prev).abs();
            prev = cur;
        }
    }
    abs += prev.abs();
    (abs, signed)
}

/// `∫_U^∞ e^{−u/2} Σ_i |a_i| u^i du` for the monomial coefficients of `L_n`.
fn laguerre_tail(n: u32, u: f64) -> f64 {
    // ∫_U^∞ u^i e^{−u/2} du = 2^{i+1} i! e^{−U/2} Σ_{j≤i} (U/2)^j / j!
    let x = 0.5 * u;
    let env = (-x).exp();
    let mut partial = 0.0;
    let mut term = 1.0;
    let mut fact_pow = 2.0;
    let mut total = 0.0;
    for (i, a) in laguerre_coefficients(n).iter().enumerate() {
        if i > 0 {
            term *= x / i as f64;
            fact_pow *= 2.0 * i as f64;
        }
        partial += term;
        total += a.abs() * fact_pow * env * partial;
    }
    total
}

const HALF_PI_SQ: f64 = std::f64::consts::FRAC_PI_2 * std::f64::consts::FRAC_PI_2;

/// Rigorous bound on `(π/2)² ∫_{u1>U} ∫ |f_W|`.
fn tail_bound(state: &PhaseSpaceState, u: f64) -> f64 {
    let pi = std::f64::consts::PI;
    state
        .weights
        .iter()
        .map(|(l, w)| w * laguerre_tail(l.n1, u) / pi * laguerre_tail(l.n2, 0.0) / pi)
        .sum::<f64>()
        * HALF_PI_SQ
}

fn finish(abs: f64, form: NegativityForm) -> f64 {
    let eta = abs - 1.0;
    match form {
        NegativityForm::Volume => eta,
        NegativityForm::Halved => 0.5 * eta,
    }
}

fn check_options(opts: &NegativityOptions) -> Result<()> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if !(opts.u_max > 0.0 && opts.u_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("u_max must be positive, got {}", opts.u_max)));
    }
    if opts.panels == 0 {
        return Err(Error::InvalidParameter("at least one outer panel is needed".into()));
    }
    Ok(())
}

/// Root count of `Σ c_k L_k` on `(0, cap)` and the margin
/// `min e^{−u/2}|P(u)|` over `u = 0` and the critical points of `P`, which
/// vanishes wherever the count can change.
fn probe(c: &[f64], cap: f64) -> (usize, f64) {
    let c = trimmed(c);
    let hi = root_bound(c).min(cap);
    if c.len() <= 1 || hi <= 0.0 {
        return (0, c.first().map_or(0.0, |v| v.abs()));
    }
    let count = roots(c, 0.0, hi).len();
    let margin = std::iter::once(0.0)
        .chain(roots(&derivative(c), 0.0, hi))
        .map(|u| (-0.5 * u).exp() * eval(c, u).abs())
        .fold(f64::INFINITY, f64::min);
    (count, margin)
}

fn scan<F: Fn(f64) -> (usize, f64)>(probe: &F, a: (f64, (usize, f64)), b: (f64, (usize, f64)), cuts: &mut Vec<f64>) {
    let (ua, (ca, ma)) = a;
    let (ub, (cb, mb)) = b;
    let h = ub - ua;
    if h <= MIN_PROBE_WIDTH * ua.abs().max(1.0) {
        if ca != cb {
            cuts.push(0.5 * (ua + ub));
        }
        return;
    }
    let um = 0.5 * (ua + ub);
    let pm = probe(um);
    let (cm, mm) = pm;
    let slope = ((ma - mm).abs()).max((mm - mb).abs()) / (0.5 * h);
    let flat = ma.min(mm).min(mb) >= PROBE_SAFETY * slope * 0.5 * h;
    if ca == cm && cm == cb && flat {
        return;
    }
    scan(probe, a, (um, pm), cuts);
    scan(probe, (um, pm), b, cuts);
}

/// Four-dimensional negativity of a state.
pub fn negativity(state: &PhaseSpaceState, opts: &NegativityOptions) -> Result<NegativityResult> {
    check_options(opts)?;
    if state.weights.is_empty() {
        return Err(Error::InvalidParameter("empty state".into()));
    }
    let mut u_max = opts.u_max;
    while tail_bound(state, u_max) > TAIL_TARGET && u_max < 4000.0 {
        u_max += 10.0;
    }
    let cap = u_max;
    let (_, m2) = state.max_occupation();
    let signs: Vec<f64> = (0..=m2).map(|n| (if n % 2 == 0 { 1.0 } else { -1.0 }) / std::f64::consts::PI).collect();

    let coefficients = |u1: f64| -> Vec<f64> {
        let k1 = kernels_u(state.max_occupation().0, u1);
        let mut c = vec![0.0; m2 as usize + 1];
        for (l, w) in &state.weights {
            c[l.n2 as usize] += w * k1[l.n1 as usize];
        }
        c.iter().zip(&signs).map(|(a, s)| a * s).collect()
    };
    let probe = |u1: f64| probe(&coefficients(u1), cap);

    // the outer integrand is smooth between changes of the inner root count;
    // a change needs the margin to reach zero, so every probe interval where
    // the margin could get there at its observed slope is refined
    let n = opts.panels;
    let width = u_max / n as f64;
    let mut cuts: Vec<f64> = (0..=n).map(|i| if i == n { u_max } else { i as f64 * width }).collect();
    let base = (u_max / PROBE_SPACING).ceil() as usize;
    let nodes: Vec<f64> = (0..=base).map(|i| (i as f64 * PROBE_SPACING).min(u_max)).collect();
    let probes = par::map_slice(opts.exec, &nodes, |&u| probe(u));
    let found = par::map_range(opts.exec, base, |i| {
        let mut out = Vec::new();
        scan(&probe, (nodes[i], probes[i]), (nodes[i + 1], probes[i + 1]), &mut out);
        out
    });
    cuts.extend(found.into_iter().flatten());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let segments: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect();
    let seg_tol = opts.tol / HALF_PI_SQ / segments.len() as f64;
    let inner = |u1: f64| half_line_integrals(&coefficients(u1), cap);
    let outer = par::map_slice(opts.exec, &segments, |&(a, b)| {
        let abs = adaptive_gauss_kronrod(|u| inner(u).0, a, b, seg_tol, MAX_PANELS_PER_SEGMENT)?;
        let signed = adaptive_gauss_kronrod(|u| inner(u).1, a, b, seg_tol, MAX_PANELS_PER_SEGMENT)?;
        Ok((abs, signed))
    });
    let outer: Vec<_> = outer.into_iter().collect::<Result<Vec<_>>>()?;
    let abs_values: Vec<f64> = outer.iter().map(|(a, _)| a.value).collect();
    let signed_values: Vec<f64> = outer.iter().map(|(_, s)| s.value).collect();
    let abs_integral = HALF_PI_SQ * par::pairwise_sum(&abs_values);
    Ok(NegativityResult {
        eta: finish(abs_integral, opts.form),
        abs_integral,
        integral: HALF_PI_SQ * par::pairwise_sum(&signed_values),
        error_estimate: HALF_PI_SQ * outer.iter().map(|(a, _)| a.error_estimate).sum::<f64>(),
        tail_bound: tail_bound(state, u_max),
        u_max,
        panels: outer.iter().map(|(a, _)| a.panels).sum(),
        form: opts.form,
        slice: None,
    })
}

/// Negativity of the normalized two-dimensional slice at `(q2, p2)`:
/// `∫|f_s| / |∫f_s| − 1`. Exact up to rounding.
pub fn negativity_slice(state: &PhaseSpaceState, slice: (f64, f64), form: NegativityForm) -> Result<NegativityResult> {
    if state.weights.is_empty() {
        return Err(Error::InvalidParameter("empty state".into()));
    }
    let w = state.w;
    let u2 = 2.0 * (w * slice.0 * slice.0 + slice.1 * slice.1 / w);
    let c: Vec<f64> = state
        .contract_mode2(u2)
        .iter()
        .enumerate()
        .map(|(n, s)| (if n % 2 == 0 { *s } else { -*s }) / std::f64::consts::PI)
        .collect();
    let (abs, signed) = half_line_integrals(&c, f64::INFINITY);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let (abs, signed) = (half_pi * abs, half_pi * signed);
    if signed.abs() < 1e-300 {
        return Err(Error::InvalidParameter("slice integrates to zero".into()));
    }
    let ratio = abs / signed.abs();
    Ok(NegativityResult {
        eta: finish(ratio, form),
        abs_integral: abs,
        integral: signed,
        error_estimate: 0.0,
        tail_bound: 0.0,
        u_max: f64::INFINITY,
        panels: 0,
        form,
        slice: Some(slice),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_algebra::FockLabel;
    use crate::oscillator_basis::laguerre;

    #[test]
    fn antiderivative_differentiates_back() {
        let c = [0.3, -1.2, 0.7, 0.05];
        let b = antiderivative(&c);
        let f = |u: f64| (-0.5 * u).exp() * eval(&b, u);
        for u in [0.0, 0.7, 3.0, 11.0] {
            let h = 1e-5;
            let d = (f(u + h) - f(u - h)) / (2.0 * h);
            let g = (-0.5 * u).exp() * eval(&c, u);
            assert!((d - g).abs() < 1e-8, "u={u}");
        }
    }

    #[test]
    fn finds_laguerre_zeros() {
        for n in 1..9u32 {
            let mut c = vec![0.0; n as usize + 1];
            c[n as usize] = 1.0;
            let r = roots(&c, 0.0, root_bound(&c));
            assert_eq!(r.len(), n as usize);
            for x in r {
                assert!(laguerre(n, x).abs() < 1e-9 * laguerre_coefficients(n).iter().map(|a| a.abs() * x.powi(n as i32)).sum::<f64>().max(1.0));
            }
        }
    }

    #[test]
    fn abs_integral_of_single_laguerre_term() {
        // 8/√e − 2
        let c = [0.0, 1.0];
        let (abs, signed) = half_line_integrals(&c, f64::INFINITY);
        let rule = crate::quadrature::AxisRule::gauss_legendre(0.0, 1.0, 60);
        let rule2 = crate::quadrature::AxisRule::gauss_legendre(1.0, 200.0, 400);
        let g = |u: f64| ((-0.5 * u).exp() * (1.0 - u)).abs();
        assert!((abs - rule.integrate(g) - rule2.integrate(g)).abs() < 1e-12);
        assert!((abs - (8.0 * (-0.5f64).exp() - 2.0)).abs() < 1e-14);
        assert!((signed + 2.0).abs() < 1e-14);
    }

    #[test]
    fn pure_ground_state_is_positive() {
        let s = PhaseSpaceState::pure(FockLabel::new(0, 0), 1.0);
        let r = negativity(&s, &NegativityOptions::default()).unwrap();
        assert!(r.eta.abs() < 1e-8);
        assert!((r.integral - 1.0).abs() < 1e-10);
        assert!(r.tail_bound < 1e-14);
    }

    #[test]
    fn pure_excited_states() {
        let s = PhaseSpaceState::pure(FockLabel::new(1, 0), 2.0);
        let r = negativity(&s, &NegativityOptions::default()).unwrap();
        // (π/2)∫|f̂_1| du = 4/√e − 1
        let single = 4.0 * (-0.5f64).exp() - 2.0;
        assert!((r.eta - single).abs() < 1e-9, "{} vs {single}", r.eta);
        let h = negativity(&s, &NegativityOptions { form: NegativityForm::Halved, ..Default::default() }).unwrap();
        assert!((2.0 * h.eta - r.eta).abs() < 1e-14);
        let swapped = negativity(&s.swapped(), &NegativityOptions::default()).unwrap();
        assert!((swapped.eta - r.eta).abs() < 1e-10);
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut s = PhaseSpaceState::pure(FockLabel::new(2, 1), 1.3);
        s.weights.insert(FockLabel::new(0, 0), 0.5);
        let a = negativity(&s, &NegativityOptions { exec: Execution::Sequential, ..Default::default() }).unwrap();
        let b = negativity(&s, &NegativityOptions { exec: Execution::Parallel, ..Default::default() }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn slice_of_product_state() {
        let s = PhaseSpaceState::pure(FockLabel::new(1, 3), 1.0);
        let r = negativity_slice(&s, (1.0, 1.0), NegativityForm::Volume).unwrap();
        let single = 4.0 * (-0.5f64).exp() - 2.0;
        assert!((r.eta - single).abs() < 1e-12);
        assert!(negativity(&s, &NegativityOptions { tol: -1.0, ..Default::default() }).is_err());
    }

    fn first_order_eta(n1: u32, n2: u32, b: f64) -> f64 {
        use crate::perturbation::{first_order_state, StateMode};
        let (psi, _) = first_order_state(FockLabel::new(n1, n2), 2f64.sqrt(), b, StateMode::Oracle, None).unwrap();
        negativity(&PhaseSpaceState::from_fock(&psi).unwrap(), &NegativityOptions::default()).unwrap().eta
    }

    #[test]
    fn first_order_levels_match_brute_force_grid() {
        // trapezoid on u ∈ [0,140]² at 7001/14001/28001 nodes, Richardson on the last two
        let reference = [
            ((0, 0), 1.0, 0.347_644_747_2),
            ((1, 0), 1.0, 0.712_369_891_2),
            ((1, 1), 1.0, 1.227_399_299_7),
            ((2, 0), 1.0, 0.917_853_348_3),
            ((1, 0), 0.1, 0.414_366_697_9),
            ((1, 1), 0.1, 0.955_068_560_6),
            ((2, 0), 0.1, 0.617_471_223_2),
        ];
        for ((n1, n2), b, eta) in reference {
            let got = first_order_eta(n1, n2, b);
            assert!((got - eta).abs() < 3e-6, "({n1},{n2}) B={b}: {got} vs {eta}");
        }
    }

    #[test]
    fn swapped_levels_agree_to_rounding() {
        for b in [0.05, 0.1, 1.0] {
            let d = first_order_eta(1, 0, b) - first_order_eta(0, 1, b);
            assert!(d.abs() < 1e-10, "B={b}: {d}");
            let d = first_order_eta(2, 0, b) - first_order_eta(0, 2, b);
            assert!(d.abs() < 1e-10, "B={b}: {d}");
        }
    }
}
