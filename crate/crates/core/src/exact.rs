//! Exact arithmetic in the field generated by square roots of integers.
//!
//! An [`Exact`] value is a finite sum `Σ c_r √r` with rational `c_r` and
//! squarefree radicands `r`. Ladder matrix elements are always of this form,
//! so operator-algebra results can be compared for exact equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;

pub type Rational = Ratio<i128>;

/// Coefficient ring used by the ladder algebra and the truncated-matrix oracle.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `√(f₁·f₂·…)`.
    fn sqrt_of_product(factors: &[u64]) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn sqrt_of_product(factors: &[u64]) -> Self {
        factors.iter().map(|&f| (f as f64).sqrt()).product()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Exact {
    // squarefree radicand -> nonzero rational coefficient
    terms: BTreeMap<u64, Rational>,
}

/// Splits `Π factors` into `(a, b)` with `Π factors = a²·b` and `b` squarefree.
fn square_split(factors: &[u64]) -> (i128, u64) {
    let mut exps: BTreeMap<u64, u32> = BTreeMap::new();
    for &f in factors {
        if f == 0 {
            return (0, 1);
        }
        let mut m = f;
        let mut p = 2u64;
        while p * p <= m {
            while m % p == 0 {
                *exps.entry(p).or_default() += 1;
                m /= p;
            }
            p += 1;
        }
        if m > 1 {
            *exps.entry(m).or_default() += 1;
        }
    }
    let mut outside: i128 = 1;
    let mut inside: u64 = 1;
    for (p, e) in exps {
        outside *= (p as i128).pow(e / 2);
        if e % 2 == 1 {
            inside *= p;
        }
    }
    (outside, inside)
}

impl Exact {
    pub fn rational(r: Rational) -> Self {
        Self::surd(r, 1)
    }

    pub fn integer(v: i128) -> Self {
        Self::rational(Rational::from_integer(v))
    }

    /// `c·√n` for any non-negative `n` (reduced to squarefree form).
    pub fn surd(c: Rational, n: u64) -> Self {
        let (outside, inside) = square_split(&[n]);
        let coeff = c * Rational::from_integer(outside);
        let mut terms = BTreeMap::new();
        if coeff != Rational::from_integer(0) {
            terms.insert(inside, coeff);
        }
        Exact { terms }
    }

    /// Parses a printed decimal such as `"89,30"` or `"-13.47"` exactly.
    /// A comma is read as the decimal point.
    pub fn from_decimal_str(s: &str) -> Option<Self> {
        let s = s.trim().replace(',', ".");
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.as_str()),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let num: i128 = digits.parse().ok()?;
        let den = 10i128.checked_pow(frac_part.len() as u32)?;
        let r = Rational::new(if neg { -num } else { num }, den);
        Some(Self::rational(r))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(&r, c)| (r, c))
    }

    /// Rational part when the value has no irrational component.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::from_integer(0)),
            1 => self.terms.get(&1).copied(),
            _ => None,
        }
    }

    pub fn scale(&self, r: Rational) -> Self {
        if r == Rational::from_integer(0) {
            return Exact::default();
        }
        Exact {
            terms: self.terms.iter().map(|(&k, &c)| (k, c * r)).collect(),
        }
    }

    fn add_term(&mut self, radicand: u64, c: Rational) {
        let zero = Rational::from_integer(0);
        if c == zero {
            return;
        }
        let entry = self.terms.entry(radicand).or_insert(zero);
        *entry += c;
        if *entry == zero {
            self.terms.remove(&radicand);
        }
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        Exact::default()
    }
    fn one() -> Self {
        Exact::integer(1)
    }
    fn from_i64(v: i64) -> Self {
        Exact::integer(v as i128)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn sqrt_of_product(factors: &[u64]) -> Self {
        let (outside, inside) = square_split(factors);
        let mut terms = BTreeMap::new();
        if outside != 0 {
            terms.insert(inside, Rational::from_integer(outside));
        }
        Exact { terms }
    }
    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&r, c)| (*c.numer() as f64 / *c.denom() as f64) * (r as f64).sqrt())
            .sum()
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(mut self, rhs: Exact) -> Exact {
        for (r, c) in rhs.terms {
            self.add_term(r, c);
        }
        self
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        self + (-rhs)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            terms: self.terms.into_iter().map(|(r, c)| (r, -c)).collect(),
        }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        let mut out = Exact::default();
        for (&r1, &c1) in &self.terms {
            for (&r2, &c2) in &rhs.terms {
                // r1, r2 squarefree: √(r1 r2) = g √((r1/g)(r2/g)) with the
                // cofactors coprime and squarefree
                let g = r1.gcd(&r2);
                let radicand = (r1 / g) * (r2 / g);
                out.add_term(radicand, c1 * c2 * Rational::from_integer(g as i128));
            }
        }
        out
    }
}

impl Div<i64> for Exact {
    type Output = Exact;
    fn div(self, rhs: i64) -> Exact {
        self.scale(Rational::new(1, rhs as i128))
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&r, c)) in self.terms.iter().enumerate() {
            let neg = *c < Rational::from_integer(0);
            let mag = if neg { -*c } else { *c };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let one = Rational::from_integer(1);
            match (r, mag == one) {
                (1, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "√{r}")?,
                (_, false) if mag.is_integer() => write!(f, "{mag}√{r}")?,
                (_, false) => write!(f, "({mag})√{r}")?,
            }
        }
        Ok(())
    }
}
