//! Two-mode bosonic ladder algebra.
//!
//! Expressions are kept normal ordered: every monomial is
//! `(a†)^r a^s (b†)^t b^u` with a coefficient from a [`Scalar`] ring. Products
//! are re-ordered with `[a, a†] = 1`, `[b, b†] = 1` and commuting modes.

pub mod dense;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::exact::{Exact, Rational, Scalar};

pub use dense::{dense_h1_bracket, dense_matrix, TruncatedOperator};

/// Occupation numbers `(n1, n2)` of the two oscillator modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FockLabel {
    pub n1: u32,
    pub n2: u32,
}

impl FockLabel {
    pub const fn new(n1: u32, n2: u32) -> Self {
        FockLabel { n1, n2 }
    }

    /// `n1 + n2`, the level index of the unperturbed spectrum.
    pub fn total(self) -> u32 {
        self.n1 + self.n2
    }

    pub fn swapped(self) -> Self {
        FockLabel::new(self.n2, self.n1)
    }
}

impl fmt::Display for FockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n1, self.n2)
    }
}

/// One elementary ladder factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    A,
    ADag,
    B,
    BDag,
}

/// Exponents of the normal-ordered monomial `(a†)^r a^s (b†)^t b^u`.
/// Ordering is lexicographic in field order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Exponents {
    pub a_create: u32,
    pub a_annihilate: u32,
    pub b_create: u32,
    pub b_annihilate: u32,
}

impl Exponents {
    pub const fn new(a_create: u32, a_annihilate: u32, b_create: u32, b_annihilate: u32) -> Self {
        Exponents {
            a_create,
            a_annihilate,
            b_create,
            b_annihilate,
        }
    }

    pub fn degree(self) -> u32 {
        self.a_create + self.a_annihilate + self.b_create + self.b_annihilate
    }

    pub fn adjoint(self) -> Self {
        Exponents::new(self.a_annihilate, self.a_create, self.b_annihilate, self.b_create)
    }

    /// The word spelled out as elementary factors, leftmost first.
    pub fn to_factors(self) -> Vec<Ladder> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        out.extend(std::iter::repeat(Ladder::ADag).take(self.a_create as usize));
        out.extend(std::iter::repeat(Ladder::A).take(self.a_annihilate as usize));
        out.extend(std::iter::repeat(Ladder::BDag).take(self.b_create as usize));
        out.extend(std::iter::repeat(Ladder::B).take(self.b_annihilate as usize));
        out
    }
}

/// A normal-ordered monomial with its coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderWord<C> {
    pub exponents: Exponents,
    pub coefficient: C,
}

#[derive(Clone, PartialEq)]
pub struct LadderExpression<C> {
    terms: BTreeMap<Exponents, C>,
}

type Reordered = Vec<(u32, u32, i64)>;

thread_local! {
    static REORDER_MEMO: RefCell<HashMap<(u32, u32), Reordered>> = RefCell::new(HashMap::new());
}

/// Normal form of `a^s (a†)^t` in one mode, as `(r, q, c)` triples meaning
/// `Σ c (a†)^r a^q`. Built by moving one annihilator at a time through the
/// creators, `a (a†)^t = (a†)^t a + t (a†)^(t-1)`, memoized on `(s, t)`.
fn reorder(s: u32, t: u32) -> Reordered {
    if s == 0 || t == 0 {
        return vec![(t, s, 1)];
    }
    if let Some(hit) = REORDER_MEMO.with(|m| m.borrow().get(&(s, t)).cloned()) {
        return hit;
    }
    // a^s a†^t = (a^(s-1) a†^t) a + t a^(s-1) a†^(t-1)
    let mut acc: BTreeMap<(u32, u32), i64> = BTreeMap::new();
    for (r, q, c) in reorder(s - 1, t) {
        *acc.entry((r, q + 1)).or_default() += c;
    }
    for (r, q, c) in reorder(s - 1, t - 1) {
        *acc.entry((r, q)).or_default() += c * t as i64;
    }
    let out: Reordered = acc
        .into_iter()
        .filter(|&(_, c)| c != 0)
        .map(|((r, q), c)| (r, q, c))
        .collect();
    REORDER_MEMO.with(|m| m.borrow_mut().insert((s, t), out.clone()));
    out
}

impl<C: Scalar> LadderExpression<C> {
    pub fn zero() -> Self {
        LadderExpression {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::word(Exponents::default(), C::one())
    }

    pub fn word(exponents: Exponents, coefficient: C) -> Self {
        let mut e = Self::zero();
        e.add_term(exponents, coefficient);
        e
    }

    pub fn ladder(op: Ladder) -> Self {
        let exps = match op {
            Ladder::ADag => Exponents::new(1, 0, 0, 0),
            Ladder::A => Exponents::new(0, 1, 0, 0),
            Ladder::BDag => Exponents::new(0, 0, 1, 0),
            Ladder::B => Exponents::new(0, 0, 0, 1),
        };
        Self::word(exps, C::one())
    }

    fn add_term(&mut self, exponents: Exponents, coefficient: C) {
        if coefficient.is_zero() {
            return;
        }
        match self.terms.remove(&exponents) {
            Some(existing) => {
                let sum = existing + coefficient;
                if !sum.is_zero() {
                    self.terms.insert(exponents, sum);
                }
            }
            None => {
                self.terms.insert(exponents, coefficient);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (lexicographic exponent) order.
    pub fn words(&self) -> impl Iterator<Item = LadderWord<C>> + '_ {
        self.terms.iter().map(|(&exponents, c)| LadderWord {
            exponents,
            coefficient: c.clone(),
        })
    }

    pub fn coefficient(&self, exponents: Exponents) -> Option<&C> {
        self.terms.get(&exponents)
    }

    /// Largest total degree over all words; 0 for the zero expression.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (&e, v) in &self.terms {
            out.add_term(e, v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| multiply(&acc, self))
    }

    /// Formal adjoint; coefficients are real in every ring used here.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (&e, v) in &self.terms {
            out.add_term(e.adjoint(), v.clone());
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn to_f64(&self) -> LadderExpression<f64> {
        let mut out = LadderExpression::zero();
        for (&e, v) in &self.terms {
            out.add_term(e, v.to_f64());
        }
        out
    }
}

impl<C: Scalar> Add for LadderExpression<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (e, v) in rhs.terms {
            self.add_term(e, v);
        }
        self
    }
}

impl<C: Scalar> Sub for LadderExpression<C> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (e, v) in rhs.terms {
            self.add_term(e, -v);
        }
        self
    }
}

impl<C: Scalar> Mul for &LadderExpression<C> {
    type Output = LadderExpression<C>;
    fn mul(self, rhs: Self) -> LadderExpression<C> {
        multiply(self, rhs)
    }
}

impl<C: Scalar + fmt::Display> fmt::Display for LadderExpression<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (name, p) in [
                ("a†", e.a_create),
                ("a", e.a_annihilate),
                ("b†", e.b_create),
                ("b", e.b_annihilate),
            ] {
                match p {
                    0 => {}
                    1 => write!(f, "·{name}")?,
                    _ => write!(f, "·{name}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

impl<C: Scalar> fmt::Debug for LadderExpression<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// Normal-ordered product `x·y`.
pub fn multiply<C: Scalar>(x: &LadderExpression<C>, y: &LadderExpression<C>) -> LadderExpression<C> {
    let mut out = LadderExpression::zero();
    for (ex, cx) in &x.terms {
        for (ey, cy) in &y.terms {
            let mode_a = reorder(ex.a_annihilate, ey.a_create);
            let mode_b = reorder(ex.b_annihilate, ey.b_create);
            let base = cx.clone() * cy.clone();
            for &(ra, qa, ca) in &mode_a {
                for &(rb, qb, cb) in &mode_b {
                    let exps = Exponents::new(
                        ex.a_create + ra,
                        qa + ey.a_annihilate,
                        ex.b_create + rb,
                        qb + ey.b_annihilate,
                    );
                    out.add_term(exps, base.clone() * C::from_i64(ca * cb));
                }
            }
        }
    }
    out
}

/// Normal-ordered expansion of a raw product of ladder factors (leftmost first).
pub fn normal_order<C: Scalar>(factors: &[Ladder]) -> LadderExpression<C> {
    factors
        .iter()
        .fold(LadderExpression::one(), |acc, &op| multiply(&acc, &LadderExpression::ladder(op)))
}

/// Re-expands every word into raw factors and normal orders again.
pub fn normal_order_expression<C: Scalar>(expr: &LadderExpression<C>) -> LadderExpression<C> {
    expr.words().fold(LadderExpression::zero(), |acc, w| {
        acc + normal_order::<C>(&w.exponents.to_factors()).scale(&w.coefficient)
    })
}

/// `(a + a†)` or `(b + b†)`.
pub fn quadrature_sum<C: Scalar>(mode_b: bool) -> LadderExpression<C> {
    if mode_b {
        LadderExpression::ladder(Ladder::B) + LadderExpression::ladder(Ladder::BDag)
    } else {
        LadderExpression::ladder(Ladder::A) + LadderExpression::ladder(Ladder::ADag)
    }
}

/// `[(a + a†)² + (b + b†)²]³` without the field prefactor.
pub fn h1_bracket<C: Scalar>() -> LadderExpression<C> {
    let xa = quadrature_sum::<C>(false);
    let xb = quadrature_sum::<C>(true);
    let r = multiply(&xa, &xa) + multiply(&xb, &xb);
    r.pow(3)
}

/// `(B²/8)·[(a + a†)² + (b + b†)²]³`.
pub fn build_h1(b: f64) -> LadderExpression<f64> {
    h1_bracket::<f64>().scale(&(b * b / 8.0))
}

/// Exact variant of [`build_h1`] for rational field strengths.
pub fn build_h1_exact(b: Rational) -> LadderExpression<Exact> {
    h1_bracket::<Exact>().scale(&Exact::rational(b * b / Rational::from_integer(8)))
}

/// `W(a†a + b†b + 1)`, whose spectrum is `(n1 + n2 + 1)W`.
pub fn build_h0(w: f64) -> LadderExpression<f64> {
    let n_a = normal_order::<f64>(&[Ladder::ADag, Ladder::A]);
    let n_b = normal_order::<f64>(&[Ladder::BDag, Ladder::B]);
    (n_a + n_b + LadderExpression::one()).scale(&w)
}

/// `W(a a† + b b† + 1)` exactly as printed alongside the unperturbed
/// Hamiltonian; its spectrum is `(n1 + n2 + 3)W`, kept for the discrepancy
/// report.
pub fn build_h0_printed_order(w: f64) -> LadderExpression<f64> {
    let aad = normal_order::<f64>(&[Ladder::A, Ladder::ADag]);
    let bbd = normal_order::<f64>(&[Ladder::B, Ladder::BDag]);
    (aad + bbd + LadderExpression::one()).scale(&w)
}

fn falling_factors(n: u32, k: u32, out: &mut Vec<u64>) {
    out.extend((0..k).map(|i| (n - i) as u64));
}

/// `⟨bra| expr |ket⟩` from the ladder actions `a|n⟩ = √n|n−1⟩`,
/// `a†|n⟩ = √(n+1)|n+1⟩`.
pub fn matrix_element<C: Scalar>(bra: FockLabel, ket: FockLabel, expr: &LadderExpression<C>) -> C {
    let mut total = C::zero();
    let mut factors = Vec::new();
    for (e, c) in &expr.terms {
        if ket.n1 < e.a_annihilate || ket.n2 < e.b_annihilate {
            continue;
        }
        if ket.n1 - e.a_annihilate + e.a_create != bra.n1 || ket.n2 - e.b_annihilate + e.b_create != bra.n2 {
            continue;
        }
        factors.clear();
        falling_factors(ket.n1, e.a_annihilate, &mut factors);
        falling_factors(bra.n1, e.a_create, &mut factors);
        falling_factors(ket.n2, e.b_annihilate, &mut factors);
        falling_factors(bra.n2, e.b_create, &mut factors);
        total = total + c.clone() * C::sqrt_of_product(&factors);
    }
    total
}

/// Agreement of [`matrix_element`] with dense truncated matrices for the
/// field bracket, over all label pairs up to `max_occupation`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorAudit {
    pub max_occupation: u32,
    pub cutoff: u32,
    pub pairs: usize,
    pub nonzero: usize,
    /// Pairs where the exact symbolic value differs from either dense route.
    pub exact_mismatches: usize,
    pub float_max_abs_diff: f64,
}

pub fn operator_audit(max_occupation: u32, cutoff: u32) -> crate::Result<OperatorAudit> {
    let sym = h1_bracket::<Exact>();
    let sym_f = h1_bracket::<f64>();
    let literal = dense::dense_matrix(&sym, cutoff);
    let quadratures = dense::dense_h1_bracket::<Exact>(cutoff);
    let literal_f = dense::dense_matrix(&sym_f, cutoff);
    let labels: Vec<FockLabel> = (0..=max_occupation)
        .flat_map(|a| (0..=max_occupation).map(move |b| FockLabel::new(a, b)))
        .collect();
    let rows = crate::par::map_slice(crate::par::Execution::default(), &labels, |&bra| -> crate::Result<(usize, usize, f64)> {
        let (mut nonzero, mut bad, mut worst) = (0, 0, 0.0f64);
        for &ket in &labels {
            let s = matrix_element(bra, ket, &sym);
            if !s.is_zero() {
                nonzero += 1;
            }
            if s != literal.element(bra, ket)? || s != quadratures.element(bra, ket)? {
                bad += 1;
            }
            let f = matrix_element(bra, ket, &sym_f);
            worst = worst.max((f - literal_f.element(bra, ket)?).abs());
        }
        Ok((nonzero, bad, worst))
    });
    let mut audit = OperatorAudit {
        max_occupation,
        cutoff,
        pairs: labels.len() * labels.len(),
        nonzero: 0,
        exact_mismatches: 0,
        float_max_abs_diff: 0.0,
    };
    for r in rows {
        let (n, b, w) = r?;
        audit.nonzero += n;
        audit.exact_mismatches += b;
        audit.float_max_abs_diff = audit.float_max_abs_diff.max(w);
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(r: u32, s: u32, t: u32, u: u32) -> Exponents {
        Exponents::new(r, s, t, u)
    }

    #[test]
    fn audit_small_range() {
        let a = operator_audit(3, 9).unwrap();
        assert_eq!(a.pairs, 256);
        assert_eq!(a.exact_mismatches, 0);
        assert!(a.nonzero > 0);
        assert!(a.float_max_abs_diff < 1e-9);
        assert!(operator_audit(4, 9).is_err());
    }

    #[test]
    fn a_adag_is_number_plus_one() {
        let x = normal_order::<Exact>(&[Ladder::A, Ladder::ADag]);
        let expect = LadderExpression::word(e(1, 1, 0, 0), Exact::one()) + LadderExpression::one();
        assert_eq!(x, expect);
    }

    #[test]
    fn quadrature_squared() {
        let x = quadrature_sum::<Exact>(false);
        let sq = multiply(&x, &x);
        let expect = LadderExpression::word(e(2, 0, 0, 0), Exact::one())
            + LadderExpression::word(e(0, 2, 0, 0), Exact::one())
            + LadderExpression::word(e(1, 1, 0, 0), Exact::integer(2))
            + LadderExpression::one();
        assert_eq!(sq, expect);
    }

    #[test]
    fn modes_commute() {
        let x = normal_order::<Exact>(&[Ladder::A, Ladder::BDag]);
        assert_eq!(x, LadderExpression::word(e(0, 1, 1, 0), Exact::one()));
        let y = normal_order::<Exact>(&[Ladder::BDag, Ladder::A]);
        assert_eq!(x, y);
    }

    #[test]
    fn number_operator_squared() {
        let n = normal_order::<Exact>(&[Ladder::ADag, Ladder::A]);
        let nn = multiply(&n, &n);
        let expect = LadderExpression::word(e(2, 2, 0, 0), Exact::one()) + n.clone();
        assert_eq!(nn, expect);
    }

    #[test]
    fn identity_is_neutral() {
        let x = h1_bracket::<Exact>();
        assert_eq!(multiply(&LadderExpression::one(), &x), x);
        assert_eq!(multiply(&x, &LadderExpression::one()), x);
    }

    #[test]
    fn separate_modes_concatenate() {
        let xa = normal_order::<Exact>(&[Ladder::ADag, Ladder::A, Ladder::A]);
        let xb = normal_order::<Exact>(&[Ladder::B, Ladder::BDag]);
        let prod = multiply(&xa, &xb);
        let expect = LadderExpression::word(e(1, 2, 1, 1), Exact::one())
            + LadderExpression::word(e(1, 2, 0, 0), Exact::one());
        assert_eq!(prod, expect);
    }

    #[test]
    fn zero_field_gives_zero_h1() {
        assert!(build_h1(0.0).is_zero());
        assert!(build_h1_exact(Rational::from_integer(0)).is_zero());
    }

    #[test]
    fn h1_vacuum_diagonal() {
        let v = FockLabel::new(0, 0);
        assert_eq!(matrix_element(v, v, &h1_bracket::<Exact>()), Exact::integer(48));
        let h1 = build_h1(1.0);
        assert!((matrix_element(v, v, &h1) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn h1_is_hermitian_and_degree_six() {
        let h = h1_bracket::<Exact>();
        assert!(h.is_hermitian());
        assert_eq!(h.degree(), 6);
    }

    #[test]
    fn h0_spectrum() {
        let h0 = build_h0(1.0);
        let l00 = FockLabel::new(0, 0);
        let l12 = FockLabel::new(1, 2);
        assert_eq!(matrix_element(l00, l00, &h0), 1.0);
        assert_eq!(matrix_element(l12, l12, &h0), 4.0);
        assert_eq!(matrix_element(FockLabel::new(1, 0), FockLabel::new(0, 1), &h0), 0.0);
        // printed ordering is shifted by 2W
        let printed = build_h0_printed_order(1.0);
        assert_eq!(matrix_element(l12, l12, &printed), 6.0);
    }

    #[test]
    fn single_mode_elements() {
        let x = quadrature_sum::<Exact>(false);
        let vac = FockLabel::new(0, 0);
        assert_eq!(matrix_element(FockLabel::new(1, 0), vac, &x), Exact::one());
        let x2 = x.pow(2);
        assert_eq!(matrix_element(FockLabel::new(2, 0), vac, &x2), Exact::sqrt_of_product(&[2]));
        let x6 = x.pow(6);
        assert_eq!(
            matrix_element(FockLabel::new(2, 0), vac, &x6),
            Exact::surd(Rational::from_integer(45), 2)
        );
        assert_eq!(
            matrix_element(FockLabel::new(6, 0), vac, &x6),
            Exact::surd(Rational::from_integer(12), 5)
        );
    }

    #[test]
    fn canonical_commutators() {
        let a = LadderExpression::<Exact>::ladder(Ladder::A);
        let ad = LadderExpression::<Exact>::ladder(Ladder::ADag);
        let b = LadderExpression::<Exact>::ladder(Ladder::B);
        let bd = LadderExpression::<Exact>::ladder(Ladder::BDag);
        assert_eq!(multiply(&a, &ad) - multiply(&ad, &a), LadderExpression::one());
        assert_eq!(multiply(&b, &bd) - multiply(&bd, &b), LadderExpression::one());
        assert!((multiply(&a, &bd) - multiply(&bd, &a)).is_zero());
        assert!((multiply(&a, &b) - multiply(&b, &a)).is_zero());
        assert!((multiply(&ad, &bd) - multiply(&bd, &ad)).is_zero());
    }

    #[test]
    fn reorder_matches_closed_form() {
        // a^s a†^t = Σ_k k! C(s,k) C(t,k) a†^(t−k) a^(s−k)
        fn binom(n: u32, k: u32) -> i64 {
            (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
        }
        for s in 0..7 {
            for t in 0..7 {
                let mut got = reorder(s, t);
                got.sort();
                let mut want: Vec<(u32, u32, i64)> = (0..=s.min(t))
                    .map(|k| {
                        let fact: i64 = (1..=k as i64).product();
                        (t - k, s - k, fact * binom(s, k) * binom(t, k))
                    })
                    .collect();
                want.sort();
                assert_eq!(got, want, "s={s} t={t}");
            }
        }
    }

    #[test]
    fn display_is_readable() {
        let x = normal_order::<Exact>(&[Ladder::A, Ladder::ADag]);
        assert_eq!(x.to_string(), "(1) + (1)·a†·a");
    }
}
