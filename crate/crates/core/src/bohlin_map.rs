//! The squaring map `x + iy = (q1 + iq2)²` between the planar Coulomb problem
//! and a pair of oscillators, with canonicity and consistency checks.
//!
//! Two momentum lifts are available. [`MomentumLift::Printed`] is
//! `Px + iPy = (p1 + ip2) / (2(q1 + iq2))`, which is the form used by
//! [`to_cartesian`]. [`MomentumLift::Canonical`] is the cotangent lift
//! `Px + iPy = (p1 + ip2) / (2(q1 − iq2))`, i.e. `Px = (q1p1 − q2p2)/2r`,
//! `Py = (q2p1 + q1p2)/2r`. Only the canonical lift
//! preserves the Poisson brackets; the printed one gives `{x,Px} = (q1²−q2²)/r`.
//! Both produce the same `|P|² = (p1² + p2²)/4r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CartesianState {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParabolicState {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl ParabolicState {
    pub const fn new(q1: f64, q2: f64, p1: f64, p2: f64) -> Self {
        ParabolicState { q1, q2, p1, p2 }
    }

    /// `q1² + q2²`, which equals the Cartesian radius.
    pub fn radius(&self) -> f64 {
        self.q1 * self.q1 + self.q2 * self.q2
    }

    pub fn negated(&self) -> Self {
        ParabolicState::new(-self.q1, -self.q2, -self.p1, -self.p2)
    }
}

/// Field strength `B`, energy parameter `E` and Coulomb coupling `k`.
///
/// Figure captions use positive `E`; the oscillator frequency is taken as
/// `W = √(2|E|)` so both signs are usable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub b: f64,
    pub e: f64,
    pub k: f64,
}

impl ModelParams {
    pub fn new(b: f64, e: f64, k: f64) -> Result<Self> {
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::InvalidParameter(format!("B must be finite and non-negative, got {b}")));
        }
        if !e.is_finite() {
            return Err(Error::InvalidParameter(format!("E must be finite, got {e}")));
        }
        if !k.is_finite() {
            return Err(Error::InvalidParameter(format!("k must be finite, got {k}")));
        }
        Ok(ModelParams { b, e, k })
    }

    pub fn w(&self) -> f64 {
        (2.0 * self.e.abs()).sqrt()
    }

    /// Larmor frequency `ω = B/2`.
    pub fn omega(&self) -> f64 {
        self.b / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum MomentumLift {
    #[default]
    Printed,
    Canonical,
}

const ORIGIN_EPS: f64 = 1e-300;

fn checked_radius(s: &ParabolicState) -> Result<f64> {
    let r = s.radius();
    if r < ORIGIN_EPS {
        return Err(Error::SingularOrigin { q1: s.q1, q2: s.q2 });
    }
    Ok(r)
}

/// Maps with the printed momentum lift.
pub fn to_cartesian(s: ParabolicState) -> Result<CartesianState> {
    to_cartesian_with(s, MomentumLift::Printed)
}

pub fn to_cartesian_with(s: ParabolicState, lift: MomentumLift) -> Result<CartesianState> {
    let r = checked_radius(&s)?;
    let ParabolicState { q1, q2, p1, p2 } = s;
    let (nx, ny) = match lift {
        MomentumLift::Printed => (p1 * q1 + p2 * q2, p2 * q1 - p1 * q2),
        MomentumLift::Canonical => (p1 * q1 - p2 * q2, p1 * q2 + p2 * q1),
    };
    Ok(CartesianState {
        x: q1 * q1 - q2 * q2,
        y: 2.0 * q1 * q2,
        px: nx / (2.0 * r),
        py: ny / (2.0 * r),
    })
}

/// `|P|²/2 − k/ρ + (ω²/2)ρ²`, without the `ωL_z` term.
pub fn cartesian_hamiltonian(s: CartesianState, params: ModelParams) -> Result<f64> {
    let rho2 = s.x * s.x + s.y * s.y;
    if rho2 < ORIGIN_EPS {
        return Err(Error::SingularOrigin { q1: s.x, q2: s.y });
    }
    let w = params.omega();
    Ok(0.5 * (s.px * s.px + s.py * s.py) - params.k / rho2.sqrt() + 0.5 * w * w * rho2)
}

/// `(p1² + p2²)/2 + (B²/8) r³ − E r − k`, zero on the physical shell.
pub fn parabolic_constraint(s: ParabolicState, params: ModelParams) -> f64 {
    let r = s.radius();
    0.5 * (s.p1 * s.p1 + s.p2 * s.p2) + params.b * params.b / 8.0 * r * r * r - params.e * r - params.k
}

/// Rows `x, y, Px, Py`; columns `∂/∂q1, ∂/∂q2, ∂/∂p1, ∂/∂p2`.
pub fn jacobian(s: ParabolicState, lift: MomentumLift) -> Result<[[f64; 4]; 4]> {
    let r = checked_radius(&s)?;
    let ParabolicState { q1, q2, p1, p2 } = s;
    // P = N / (2r); ∂P = (∂N − N·2q_i/r)/(2r) for the q columns
    let quotient = |n: f64, dn: [f64; 4]| -> [f64; 4] {
        [
            (dn[0] - n * 2.0 * q1 / r) / (2.0 * r),
            (dn[1] - n * 2.0 * q2 / r) / (2.0 * r),
            dn[2] / (2.0 * r),
            dn[3] / (2.0 * r),
        ]
    };
    let (px, py) = match lift {
        MomentumLift::Printed => (
            quotient(p1 * q1 + p2 * q2, [p1, p2, q1, q2]),
            quotient(p2 * q1 - p1 * q2, [p2, -p1, -q2, q1]),
        ),
        MomentumLift::Canonical => (
            quotient(p1 * q1 - p2 * q2, [p1, -p2, q1, -q2]),
            quotient(p1 * q2 + p2 * q1, [p2, p1, q2, q1]),
        ),
    };
    Ok([
        [2.0 * q1, -2.0 * q2, 0.0, 0.0],
        [2.0 * q2, 2.0 * q1, 0.0, 0.0],
        px,
        py,
    ])
}

fn bracket(f: &[f64; 4], g: &[f64; 4]) -> f64 {
    f[0] * g[2] + f[1] * g[3] - f[2] * g[0] - f[3] * g[1]
}

/// The six independent brackets of the Cartesian variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketTable {
    pub x_px: f64,
    pub y_py: f64,
    pub x_y: f64,
    pub px_py: f64,
    pub x_py: f64,
    pub y_px: f64,
}

impl BracketTable {
    /// Deviations from the canonical values `(1, 1, 0, 0, 0, 0)`.
    pub fn residuals(&self) -> [f64; 6] {
        [
            self.x_px - 1.0,
            self.y_py - 1.0,
            self.x_y,
            self.px_py,
            self.x_py,
            self.y_px,
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Brackets by the chain rule through [`jacobian`].
pub fn poisson_check(s: ParabolicState, lift: MomentumLift) -> Result<BracketTable> {
    let [x, y, px, py] = jacobian(s, lift)?;
    Ok(BracketTable {
        x_px: bracket(&x, &px),
        y_py: bracket(&y, &py),
        x_y: bracket(&x, &y),
        px_py: bracket(&px, &py),
        x_py: bracket(&x, &py),
        y_px: bracket(&y, &px),
    })
}

pub const DEFAULT_SEED: u64 = 0x5eed_b0_1115;

/// Uniform points with `|q| ∈ [0.1, 3]` and `|p| ≤ 3`.
pub fn sample_points(count: usize, seed: u64) -> Vec<ParabolicState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let rq = rng.gen_range(0.1..=3.0);
            let tq = rng.gen_range(0.0..std::f64::consts::TAU);
            let rp = 3.0 * rng.gen::<f64>().sqrt();
            let tp = rng.gen_range(0.0..std::f64::consts::TAU);
            ParabolicState::new(rq * tq.cos(), rq * tq.sin(), rp * tp.cos(), rp * tp.sin())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicityReport {
    pub lift: MomentumLift,
    pub seed: u64,
    pub samples: usize,
    pub bracket_residual_max: f64,
    pub bracket_residual_mean: f64,
    pub radius_identity_max: f64,
}

/// Bracket residuals and `x² + y² = r²` over seeded random points.
pub fn canonicity_sweep(lift: MomentumLift, samples: usize, seed: u64, exec: Execution) -> Result<CanonicityReport> {
    let points = sample_points(samples, seed);
    let rows = par::map_slice(exec, &points, |s| -> Result<(f64, f64)> {
        let table = poisson_check(*s, lift)?;
        let c = to_cartesian_with(*s, lift)?;
        let r = s.radius();
        let radius_err = ((c.x * c.x + c.y * c.y) - r * r).abs() / r.max(1.0).powi(2);
        Ok((table.max_residual(), radius_err))
    });
    let rows: Vec<(f64, f64)> = rows.into_iter().collect::<Result<_>>()?;
    let maxes: Vec<f64> = rows.iter().map(|r| r.0).collect();
    Ok(CanonicityReport {
        lift,
        seed,
        samples,
        bracket_residual_max: maxes.iter().fold(0.0, |m, v| m.max(*v)),
        bracket_residual_mean: if samples == 0 { 0.0 } else { par::pairwise_sum(&maxes) / samples as f64 },
        radius_identity_max: rows.iter().fold(0.0, |m, r| m.max(r.1)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub params: ModelParams,
    pub w: f64,
    pub seed: u64,
    pub samples: usize,
    /// `max |(H − E)r − constraint|` at zero momentum.
    pub coulomb_energy_residual: f64,
    /// `max |(ω²/2)ρ²·r − (B²/8)r³| / r³`.
    pub magnetic_relative_residual: f64,
    pub kinetic_ratio_mean: f64,
    pub kinetic_ratio_min: f64,
    pub kinetic_ratio_max: f64,
    /// Least-squares `λ` such that mapping `P → λP` reproduces the kinetic term.
    pub momentum_rescaling: f64,
    /// Statistics of `(H − E)r − constraint` at general points.
    pub full_residual_max: f64,
    pub full_residual_mean: f64,
    pub notes: Vec<String>,
}

/// Maps the Cartesian Hamiltonian through the printed lift and compares
/// `(H − E)·r` term by term with [`parabolic_constraint`].
pub fn check_consistency(params: ModelParams, samples: usize, seed: u64) -> Result<ConsistencyReport> {
    let points = sample_points(samples, seed);
    let mut coulomb = 0.0f64;
    let mut magnetic = 0.0f64;
    let mut ratios = Vec::with_capacity(samples);
    let (mut num, mut den) = (0.0, 0.0);
    let mut full = Vec::with_capacity(samples);
    let pure = |b: f64, e: f64, k: f64| ModelParams { b, e, k };
    for s in &points {
        let r = s.radius();
        let zero_p = ParabolicState::new(s.q1, s.q2, 0.0, 0.0);
        let mapped = (cartesian_hamiltonian(to_cartesian(zero_p)?, params)? - params.e) * r;
        coulomb = coulomb.max((mapped - parabolic_constraint(zero_p, params)).abs());

        let c = to_cartesian(*s)?;
        let rho2 = c.x * c.x + c.y * c.y;
        let w = params.omega();
        magnetic = magnetic.max((0.5 * w * w * rho2 * r - params.b * params.b / 8.0 * r.powi(3)).abs() / r.powi(3));

        let free = pure(0.0, 0.0, 0.0);
        let km = cartesian_hamiltonian(c, free)? * r;
        let kc = parabolic_constraint(*s, free);
        if km > 1e-12 {
            ratios.push(kc / km);
        }
        num += km * kc;
        den += km * km;

        let mapped = (cartesian_hamiltonian(c, params)? - params.e) * r;
        full.push((mapped - parabolic_constraint(*s, params)).abs());
    }
    let n = ratios.len().max(1) as f64;
    let mut notes = vec![
        "kinetic term: the constraint carries (p1²+p2²)/2 while the mapped Hamiltonian gives (p1²+p2²)/8".to_string(),
        "the intermediate Hamiltonian multiplies the magnetic term r³ by r once more; the constraint keeps r³".to_string(),
    ];
    if params.e > 0.0 {
        notes.push(format!("E = {} treated as |E| when forming W = √(2|E|)", params.e));
    }
    Ok(ConsistencyReport {
        params,
        w: params.w(),
        seed,
        samples,
        coulomb_energy_residual: coulomb,
        magnetic_relative_residual: magnetic,
        kinetic_ratio_mean: par::pairwise_sum(&ratios) / n,
        kinetic_ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        kinetic_ratio_max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        momentum_rescaling: if den > 0.0 { (num / den).sqrt() } else { f64::NAN },
        full_residual_max: full.iter().fold(0.0, |m, v| m.max(*v)),
        full_residual_mean: if full.is_empty() { 0.0 } else { par::pairwise_sum(&full) / full.len() as f64 },
        notes,
    })
}
