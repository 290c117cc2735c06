//! First-order Rayleigh–Schrödinger theory for the field term in the two-mode
//! Fock space.
//!
//! Coefficients are kept in units of `B²/(8W)`: with `Ĥ₁ = (B²/8)R` and
//! `k⁰ = (n1+n2+1)W`, the correction to `|n⟩` along `|m⟩` is
//! `(B²/8W)·⟨m|R|n⟩ / (N_n − N_m)` where `N = n1 + n2`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Exact, Scalar};
use crate::fock_algebra::dense::dense_h1_bracket;
use crate::fock_algebra::{h1_bracket, matrix_element, FockLabel, LadderExpression};
use crate::par::{self, Execution};
use crate::printed;

/// Degree of the field operator in the ladder operators.
pub const H1_DEGREE: u32 = 6;

fn bracket() -> &'static LadderExpression<Exact> {
    static CELL: OnceLock<LadderExpression<Exact>> = OnceLock::new();
    CELL.get_or_init(h1_bracket::<Exact>)
}

/// `k⁰ = (n1 + n2 + 1)W`.
pub fn k0(n1: u32, n2: u32, w: f64) -> f64 {
    (n1 + n2 + 1) as f64 * w
}

/// The article's closed-form `δ`, substituted term by term (29 terms).
pub fn delta_paper<C: Scalar>(n1: u32, n2: u32) -> C {
    let i = |v: i64| C::from_i64(v);
    let (a, b) = (n1 as i64, n2 as i64);
    let root = |f: &[i64]| -> C {
        if f.iter().any(|&v| v < 0) {
            // only reached for factors like (n−1) at n = 0 inside products that vanish
            return C::zero();
        }
        C::sqrt_of_product(&f.iter().map(|&v| v as u64).collect::<Vec<_>>())
    };
    let terms: Vec<C> = vec![
        i((a + 1) * (a + 2) * (a + 3)),
        i((a + 1) * (a + 2) * (a + 2)),
        i((a - 1) * a * (a + 1) * (a + 1)),
        i((a + 1) * a * (a + 1)),
        root(&[a, a, a, a + 1, a + 1, a + 1]),
        i((a + 1) * a * a),
        i((a + 1) * a * (a - 1)),
        i(a * (a - 1) * (a - 1)),
        i(a * (a - 1) * (a - 2)),
        i(3 * (a + 1) * a * (b + 1)),
        i(3 * (a + 1) * a * b),
        i(3 * a * a * (b + 1)),
        i(3 * a * a * b),
        i(3 * (a - 1) * a * (b + 1)),
        i(3 * (a - 1) * a * b),
        i(3 * (b + 1) * b * (a + 1)),
        i(3 * (b + 1) * b * a),
        i(3 * b * b * (a + 1)),
        i(3 * b * b * a),
        i(3 * (b - 1) * b * (a + 1)),
        i(3 * (b - 1) * b * a),
        i((b + 1) * (b + 2) * (b + 3)),
        i((b + 1) * (b + 2) * (b + 2)),
        i((b - 1) * b * (b + 1) * (b + 1)),
        root(&[b, b, b, b + 1, b + 1, b + 1]),
        root(&[b + 1, b + 1, b, b, b, b]),
        i((b + 1) * b * (b - 1)),
        i(b * (b - 1) * (b - 1)),
        i(b * (b - 1) * (b - 2)),
    ];
    terms.into_iter().fold(C::zero(), |acc, t| acc + t)
}

/// Number of terms in [`delta_paper`].
pub const DELTA_PAPER_TERMS: usize = 29;

/// `⟨n|[(a+a†)² + (b+b†)²]³|n⟩` from the normal-ordered ladder expansion.
pub fn delta_oracle(n1: u32, n2: u32) -> Exact {
    let l = FockLabel::new(n1, n2);
    matrix_element(l, l, bracket())
}

/// The same diagonal element from the literal truncated-matrix product.
pub fn delta_oracle_dense(n1: u32, n2: u32, cutoff: u32) -> Result<Exact> {
    let l = FockLabel::new(n1, n2);
    dense_h1_bracket::<Exact>(cutoff).element(l, l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DeltaSource {
    Paper,
    #[default]
    Oracle,
}

fn delta_f64(n1: u32, n2: u32, source: DeltaSource) -> f64 {
    match source {
        DeltaSource::Paper => delta_paper::<f64>(n1, n2),
        DeltaSource::Oracle => delta_oracle(n1, n2).to_f64(),
    }
}

/// `k¹ = (n1 + n2 + 1)W + (B²/8)δ`.
pub fn k1(n1: u32, n2: u32, w: f64, b: f64, source: DeltaSource) -> f64 {
    k0(n1, n2, w) + b * b / 8.0 * delta_f64(n1, n2, source)
}

/// `E = −½[(k − (B²/8)δ)/N]²` with `N = n1 + n2 + 1`.
pub fn energy(n1: u32, n2: u32, b: f64, k: f64, source: DeltaSource) -> f64 {
    let n = (n1 + n2 + 1) as f64;
    let bare = (k - b * b / 8.0 * delta_f64(n1, n2, source)) / n;
    -0.5 * bare * bare
}

/// Sparse two-mode state with real coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockState {
    pub coefficients: BTreeMap<FockLabel, f64>,
    pub w: f64,
    pub cutoff: u32,
}

impl FockState {
    pub fn new(w: f64, cutoff: u32) -> Self {
        FockState {
            coefficients: BTreeMap::new(),
            w,
            cutoff,
        }
    }

    pub fn basis(label: FockLabel, w: f64, cutoff: u32) -> Result<Self> {
        let mut s = Self::new(w, cutoff);
        s.insert(label, 1.0)?;
        Ok(s)
    }

    pub fn insert(&mut self, label: FockLabel, c: f64) -> Result<()> {
        if label.n1 > self.cutoff || label.n2 > self.cutoff {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff,
                needed: label.n1.max(label.n2),
                degree: 0,
            });
        }
        if c != 0.0 {
            *self.coefficients.entry(label).or_insert(0.0) += c;
        }
        Ok(())
    }

    pub fn get(&self, label: FockLabel) -> f64 {
        self.coefficients.get(&label).copied().unwrap_or(0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        let sq: Vec<f64> = self.coefficients.values().map(|c| c * c).collect();
        par::pairwise_sum(&sq)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        let mut out = self.clone();
        for c in out.coefficients.values_mut() {
            *c /= n;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn max_occupation(&self) -> (u32, u32) {
        self.coefficients
            .keys()
            .fold((0, 0), |(a, b), l| (a.max(l.n1), b.max(l.n2)))
    }
}

/// Exchanges the two modes.
pub fn mode_swap(state: &FockState) -> FockState {
    FockState {
        coefficients: state.coefficients.iter().map(|(l, c)| (l.swapped(), *c)).collect(),
        w: state.w,
        cutoff: state.cutoff,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum StateMode {
    #[default]
    Oracle,
    PaperLiteral,
}

/// One target of the first-order sum; coefficients in units of `B²/(8W)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub m1: u32,
    pub m2: u32,
    pub paper_coefficient: Option<f64>,
    pub paper_exact: Option<String>,
    pub oracle_coefficient: f64,
    pub oracle_exact: String,
    pub abs_diff: Option<f64>,
}

/// Nonzero `⟨m|R|n⟩` with `m ≠ n` on the same unperturbed level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateCoupling {
    pub m1: u32,
    pub m2: u32,
    pub element: f64,
    pub element_exact: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub schema_version: String,
    pub level: FockLabel,
    pub w: f64,
    pub b: f64,
    pub mode: StateMode,
    pub cutoff: u32,
    /// `B²/(8W)`, the unit of every coefficient in `rows`.
    pub coefficient_unit: f64,
    pub k0: f64,
    pub delta_paper: f64,
    pub delta_paper_exact: String,
    pub delta_oracle: f64,
    pub delta_oracle_exact: String,
    pub k1_paper: f64,
    pub k1_oracle: f64,
    pub energy_paper: f64,
    pub energy_oracle: f64,
    pub rows: Vec<CoefficientRow>,
    pub degenerate_coupling_present: bool,
    pub degenerate_couplings: Vec<DegenerateCoupling>,
}

impl PerturbationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m1,m2,paper_coefficient,oracle_coefficient,abs_diff\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.16e},{}",
                r.m1,
                r.m2,
                opt(r.paper_coefficient),
                r.oracle_coefficient,
                opt(r.abs_diff)
            );
        }
        out
    }
}

/// Labels reachable from `level` by the degree-6 field operator.
fn reachable(level: FockLabel, cutoff: u32) -> Vec<FockLabel> {
    let mut out = Vec::new();
    let lo1 = level.n1.saturating_sub(H1_DEGREE);
    let lo2 = level.n2.saturating_sub(H1_DEGREE);
    for m1 in lo1..=(level.n1 + H1_DEGREE).min(cutoff) {
        for m2 in lo2..=(level.n2 + H1_DEGREE).min(cutoff) {
            let parity = (m1 + level.n1) % 2 == 0 && (m2 + level.n2) % 2 == 0;
            if parity && m1 + m2 <= level.total() + H1_DEGREE {
                out.push(FockLabel::new(m1, m2));
            }
        }
    }
    out
}

/// Exact first-order coefficients in units of `B²/(8W)`, plus same-level
/// couplings.
pub fn oracle_coefficients(level: FockLabel, cutoff: u32) -> (BTreeMap<FockLabel, Exact>, Vec<(FockLabel, Exact)>) {
    let targets = reachable(level, cutoff);
    let elements = par::map_slice(Execution::default(), &targets, |m| matrix_element(*m, level, bracket()));
    let mut coeffs = BTreeMap::new();
    let mut degenerate = Vec::new();
    for (m, elem) in targets.into_iter().zip(elements) {
        if m == level || elem.is_zero() {
            continue;
        }
        let gap = level.total() as i64 - m.total() as i64;
        if gap == 0 {
            degenerate.push((m, elem));
        } else {
            coeffs.insert(m, elem / gap);
        }
    }
    (coeffs, degenerate)
}

/// `ψ⁽¹⁾ = ψ⁽⁰⁾ + Σ_m ⟨m|Ĥ₁|n⟩/(k⁰_n − k⁰_m) ψ⁽⁰⁾_m` over all `m` off the
/// unperturbed level, with the side-by-side report.
pub fn first_order_state(
    level: FockLabel,
    w: f64,
    b: f64,
    mode: StateMode,
    cutoff: Option<u32>,
) -> Result<(FockState, PerturbationReport)> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidParameter(format!("W must be positive, got {w}")));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("B must be non-negative, got {b}")));
    }
    let needed = level.total() + H1_DEGREE + 1;
    let cutoff = cutoff.unwrap_or(level.total() + H1_DEGREE + 2);
    if cutoff < needed {
        return Err(Error::CutoffTooSmall {
            cutoff,
            needed,
            degree: H1_DEGREE,
        });
    }
    let unit = b * b / (8.0 * w);
    let (oracle, degenerate) = oracle_coefficients(level, cutoff);
    let paper: BTreeMap<FockLabel, Exact> = printed::first_order_coefficients(level)
        .map(|v| v.into_iter().collect())
        .unwrap_or_default();

    let mut labels: Vec<FockLabel> = oracle.keys().chain(paper.keys()).copied().collect();
    labels.sort();
    labels.dedup();
    let rows = labels
        .iter()
        .map(|m| {
            let o = oracle.get(m).cloned().unwrap_or_default();
            let p = paper.get(m);
            let pf = p.map(|v| v.to_f64());
            CoefficientRow {
                m1: m.n1,
                m2: m.n2,
                paper_coefficient: pf,
                paper_exact: p.map(|v| v.to_string()),
                oracle_coefficient: o.to_f64(),
                oracle_exact: o.to_string(),
                abs_diff: pf.map(|v| (v - o.to_f64()).abs()),
            }
        })
        .collect();

    let mut state = FockState::basis(level, w, cutoff)?;
    if unit != 0.0 {
        let source = match mode {
            StateMode::Oracle => &oracle,
            StateMode::PaperLiteral => {
                if paper.is_empty() {
                    return Err(Error::NoPrintedCoefficients {
                        n1: level.n1,
                        n2: level.n2,
                    });
                }
                &paper
            }
        };
        for (m, c) in source {
            if m.n1 > cutoff || m.n2 > cutoff {
                return Err(Error::CutoffTooSmall {
                    cutoff,
                    needed: m.n1.max(m.n2),
                    degree: H1_DEGREE,
                });
            }
            state.insert(*m, unit * c.to_f64())?;
        }
    } else if mode == StateMode::PaperLiteral && paper.is_empty() {
        return Err(Error::NoPrintedCoefficients {
            n1: level.n1,
            n2: level.n2,
        });
    }

    let (n1, n2) = (level.n1, level.n2);
    let dp = delta_paper::<Exact>(n1, n2);
    let dor = delta_oracle(n1, n2);
    let k1p = k1(n1, n2, w, b, DeltaSource::Paper);
    let k1o = k1(n1, n2, w, b, DeltaSource::Oracle);
    let report = PerturbationReport {
        schema_version: crate::SCHEMA_VERSION.to_string(),
        level,
        w,
        b,
        mode,
        cutoff,
        coefficient_unit: unit,
        k0: k0(n1, n2, w),
        delta_paper: dp.to_f64(),
        delta_paper_exact: dp.to_string(),
        delta_oracle: dor.to_f64(),
        delta_oracle_exact: dor.to_string(),
        k1_paper: k1p,
        k1_oracle: k1o,
        energy_paper: energy(n1, n2, b, k1p, DeltaSource::Paper),
        energy_oracle: energy(n1, n2, b, k1o, DeltaSource::Oracle),
        rows,
        degenerate_coupling_present: !degenerate.is_empty(),
        degenerate_couplings: degenerate
            .into_iter()
            .map(|(m, e)| DegenerateCoupling {
                m1: m.n1,
                m2: m.n2,
                element: e.to_f64(),
                element_exact: e.to_string(),
            })
            .collect(),
    };
    Ok((state, report))
}

/// Brute-force first-order coefficients (units of `B²/(8W)`) from the literal
/// truncated matrix of the field operator. Only entries the truncation cannot
/// reach are used.
pub fn dense_first_order(level: FockLabel, cutoff: u32) -> Result<BTreeMap<FockLabel, f64>> {
    let dense = dense_h1_bracket::<f64>(cutoff);
    let mut out = BTreeMap::new();
    for m1 in 0..=cutoff {
        for m2 in 0..=cutoff {
            let m = FockLabel::new(m1, m2);
            if m.total() == level.total() {
                continue;
            }
            let far = m1.abs_diff(level.n1) > H1_DEGREE || m2.abs_diff(level.n2) > H1_DEGREE;
            if far {
                continue;
            }
            let elem = dense.element(m, level)?;
            if elem != 0.0 {
                out.insert(m, elem / (level.total() as f64 - m.total() as f64));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn l(a: u32, b: u32) -> FockLabel {
        FockLabel::new(a, b)
    }

    #[test]
    fn zeroth_order_eigenvalue() {
        assert_eq!(k0(0, 0, 2.0), 2.0);
        assert_eq!(k0(1, 2, 1.0), 4.0);
        assert_eq!(k0(3, 5, 0.7), k0(5, 3, 0.7));
    }

    #[test]
    fn paper_delta_values() {
        assert_eq!(delta_paper::<Exact>(0, 0), Exact::integer(20));
        let d10 = delta_paper::<Exact>(1, 0);
        assert_eq!(d10, Exact::integer(67) + Exact::surd(Ratio::from_integer(2), 2));
        assert!((d10.to_f64() - 69.828_427_124_746_19).abs() < 1e-12);
        assert_eq!(delta_paper::<Exact>(0, 1), Exact::integer(63) + Exact::surd(Ratio::from_integer(2), 2));
        assert_ne!(delta_paper::<Exact>(1, 0), delta_paper::<Exact>(0, 1));
        for (a, b) in [(0, 0), (1, 0), (2, 3), (4, 1)] {
            assert!((delta_paper::<f64>(a, b) - delta_paper::<Exact>(a, b).to_f64()).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_delta_values() {
        assert_eq!(delta_oracle(0, 0), Exact::integer(48));
        assert_eq!(delta_oracle_dense(0, 0, 10).unwrap(), Exact::integer(48));
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(delta_oracle(a, b), delta_oracle(b, a));
            }
        }
        let mut prev = 0.0;
        for n in 0..6 {
            let worst = (0..=n).map(|a| delta_oracle(a, n - a).to_f64()).fold(f64::INFINITY, f64::min);
            let best = (0..=n).map(|a| delta_oracle(a, n - a).to_f64()).fold(0.0, f64::max);
            assert!(worst > prev, "level {n}");
            prev = best;
        }
    }

    #[test]
    fn k1_examples() {
        assert_eq!(k1(2, 1, 1.3, 0.0, DeltaSource::Oracle), k0(2, 1, 1.3));
        assert_eq!(k1(0, 0, 1.0, 1.0, DeltaSource::Oracle), 7.0);
        assert_eq!(k1(0, 0, 1.0, 1.0, DeltaSource::Paper), 3.5);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(0, 0, 0.0, 1.0, DeltaSource::Oracle), -0.5);
        assert_eq!(energy(1, 0, 0.0, 1.0, DeltaSource::Oracle), -0.125);
        // the bracket strips the field part again, leaving −W²/2
        let k = k1(1, 0, 1.5, 0.4, DeltaSource::Paper);
        assert!((energy(1, 0, 0.4, k, DeltaSource::Paper) + 0.5 * 1.5 * 1.5).abs() < 1e-12);
        assert_eq!(energy(2, 0, 0.0, 3.0, DeltaSource::Oracle), energy(1, 1, 0.0, 3.0, DeltaSource::Oracle));
    }

    #[test]
    fn ground_level_coefficients() {
        let (coeffs, _) = oracle_coefficients(l(0, 0), 8);
        assert_eq!(coeffs[&l(2, 0)], Exact::surd(Ratio::from_integer(-36), 2));
        assert_eq!(coeffs[&l(6, 0)], Exact::surd(Ratio::from_integer(-2), 5));
        assert_eq!(coeffs[&l(2, 2)], Exact::integer(-18));
        assert_eq!(coeffs[&l(0, 2)], coeffs[&l(2, 0)]);
    }

    #[test]
    fn report_contents() {
        let (state, rep) = first_order_state(l(0, 0), 1.0, 1.0, StateMode::Oracle, None).unwrap();
        assert_eq!(rep.cutoff, 8);
        assert_eq!(rep.k0, 1.0);
        assert_eq!(rep.delta_paper, 20.0);
        assert_eq!(rep.delta_oracle, 48.0);
        let row = rep.rows.iter().find(|r| (r.m1, r.m2) == (2, 0)).unwrap();
        assert_eq!(row.oracle_exact, "-36√2");
        assert!(row.paper_coefficient.is_some() && row.abs_diff.unwrap() > 1.0);
        assert!((state.get(l(2, 0)) + 36.0 * 2f64.sqrt() / 8.0).abs() < 1e-12);
        let csv = rep.to_csv();
        assert!(csv.starts_with("m1,m2,paper_coefficient,oracle_coefficient,abs_diff\n"));
        assert_eq!(csv.lines().count(), rep.rows.len() + 1);
    }

    #[test]
    fn paper_targets_outside_reach_are_zero_in_oracle() {
        let (_, rep) = first_order_state(l(1, 0), 1.0, 1.0, StateMode::Oracle, None).unwrap();
        let row = rep.rows.iter().find(|r| (r.m1, r.m2) == (5, 4)).unwrap();
        assert_eq!(row.oracle_coefficient, 0.0);
        assert_eq!(row.paper_coefficient, Some(-10.31));
    }

    #[test]
    fn paper_literal_state() {
        let (s, _) = first_order_state(l(1, 0), 2.0, 1.0, StateMode::PaperLiteral, None).unwrap();
        assert!((s.get(l(1, 2)) - 89.30 / 16.0).abs() < 1e-12);
        assert!(matches!(
            first_order_state(l(2, 0), 1.0, 1.0, StateMode::PaperLiteral, None),
            Err(Error::NoPrintedCoefficients { .. })
        ));
    }

    #[test]
    fn zero_field_is_unperturbed() {
        let (s, _) = first_order_state(l(1, 1), 1.5, 0.0, StateMode::Oracle, None).unwrap();
        assert_eq!(s, FockState::basis(l(1, 1), 1.5, 10).unwrap());
    }

    #[test]
    fn cutoff_guard() {
        assert!(matches!(
            first_order_state(l(1, 0), 1.0, 1.0, StateMode::Oracle, Some(7)),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn selection_rules_and_scaling() {
        for level in [l(0, 0), l(1, 0), l(1, 1), l(2, 0)] {
            let (s1, _) = first_order_state(level, 1.0, 0.5, StateMode::Oracle, None).unwrap();
            let (s2, _) = first_order_state(level, 1.0, 1.0, StateMode::Oracle, None).unwrap();
            let (s3, _) = first_order_state(level, 2.0, 1.0, StateMode::Oracle, None).unwrap();
            for (m, c) in &s2.coefficients {
                if *m == level {
                    continue;
                }
                assert_eq!((m.n1 + level.n1) % 2, 0);
                assert_eq!((m.n2 + level.n2) % 2, 0);
                assert!(m.n1.abs_diff(level.n1) <= 6 && m.n2.abs_diff(level.n2) <= 6);
                assert!(m.total() <= level.total() + 6);
                assert!((c - 4.0 * s1.get(*m)).abs() < 1e-12 * c.abs());
                assert!((c - 2.0 * s3.get(*m)).abs() < 1e-12 * c.abs());
            }
        }
    }

    #[test]
    fn mode_swap_symmetry() {
        let (a, _) = first_order_state(l(1, 0), 1.0, 1.0, StateMode::Oracle, None).unwrap();
        let (b, _) = first_order_state(l(0, 1), 1.0, 1.0, StateMode::Oracle, None).unwrap();
        assert_eq!(mode_swap(&a), b);
        assert_eq!(mode_swap(&mode_swap(&a)), a);
        let (c, _) = first_order_state(l(1, 1), 1.0, 1.0, StateMode::Oracle, None).unwrap();
        assert_eq!(mode_swap(&c), c);
    }

    #[test]
    fn degenerate_couplings_reported() {
        let (_, rep) = first_order_state(l(2, 0), 1.0, 1.0, StateMode::Oracle, None).unwrap();
        assert!(rep.degenerate_coupling_present);
        assert!(rep.degenerate_couplings.iter().any(|d| (d.m1, d.m2) == (0, 2)));
        let (_, rep) = first_order_state(l(0, 0), 1.0, 1.0, StateMode::Oracle, None).unwrap();
        assert!(!rep.degenerate_coupling_present);
    }

    #[test]
    fn dense_brute_force_agrees() {
        for level in [l(0, 0), l(1, 0), l(0, 1), l(1, 1), l(2, 0)] {
            let dense = dense_first_order(level, 16).unwrap();
            let (exact, _) = oracle_coefficients(level, 16);
            assert_eq!(dense.len(), exact.len(), "{level}");
            for (m, c) in &exact {
                assert!((dense[m] - c.to_f64()).abs() < 1e-10, "{level} {m}");
            }
        }
    }
}
