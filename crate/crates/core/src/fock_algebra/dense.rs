//! Truncated-basis matrix oracle.
//!
//! Builds raising and lowering matrices on `{(n1, n2) : n1, n2 ≤ cutoff}` and
//! multiplies them literally. Nothing here uses the commutation relations, so
//! it is an independent check of the normal-ordering pipeline.

use std::collections::BTreeMap;

use super::{FockLabel, Ladder, LadderExpression};
use crate::error::{Error, Result};
use crate::exact::Scalar;

/// Operator on the truncated two-mode Fock space, stored by rows.
///
/// `degree` counts how many elementary ladder factors went into the product;
/// an element is trusted only if its largest occupation plus `degree` stays
/// within the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator<C> {
    cutoff: u32,
    degree: u32,
    rows: Vec<BTreeMap<usize, C>>,
}

impl<C: Scalar> TruncatedOperator<C> {
    fn dim_for(cutoff: u32) -> usize {
        let side = cutoff as usize + 1;
        side * side
    }

    pub fn index(&self, label: FockLabel) -> usize {
        label.n1 as usize * (self.cutoff as usize + 1) + label.n2 as usize
    }

    pub fn label(&self, index: usize) -> FockLabel {
        let side = self.cutoff as usize + 1;
        FockLabel::new((index / side) as u32, (index % side) as u32)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn zero(cutoff: u32) -> Self {
        TruncatedOperator {
            cutoff,
            degree: 0,
            rows: vec![BTreeMap::new(); Self::dim_for(cutoff)],
        }
    }

    pub fn identity(cutoff: u32) -> Self {
        let mut m = Self::zero(cutoff);
        for (i, row) in m.rows.iter_mut().enumerate() {
            row.insert(i, C::one());
        }
        m
    }

    pub fn elementary(op: Ladder, cutoff: u32) -> Self {
        let mut m = Self::zero(cutoff);
        m.degree = 1;
        for col in 0..m.dim() {
            let ket = m.label(col);
            let (target, amp) = match op {
                Ladder::A if ket.n1 > 0 => (FockLabel::new(ket.n1 - 1, ket.n2), ket.n1),
                Ladder::B if ket.n2 > 0 => (FockLabel::new(ket.n1, ket.n2 - 1), ket.n2),
                Ladder::ADag if ket.n1 < cutoff => (FockLabel::new(ket.n1 + 1, ket.n2), ket.n1 + 1),
                Ladder::BDag if ket.n2 < cutoff => (FockLabel::new(ket.n1, ket.n2 + 1), ket.n2 + 1),
                _ => continue,
            };
            let row = m.index(target);
            m.rows[row].insert(col, C::sqrt_of_product(&[amp as u64]));
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.cutoff, other.cutoff);
        let mut out = self.clone();
        out.degree = self.degree.max(other.degree);
        for (row, other_row) in out.rows.iter_mut().zip(&other.rows) {
            for (&j, v) in other_row {
                accumulate(row, j, v.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.cutoff);
        out.degree = self.degree;
        if c.is_zero() {
            return out;
        }
        for (dst, src) in out.rows.iter_mut().zip(&self.rows) {
            *dst = src.iter().map(|(&j, v)| (j, v.clone() * c.clone())).collect();
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cutoff, other.cutoff);
        let mut out = Self::zero(self.cutoff);
        out.degree = self.degree + other.degree;
        for (dst, row) in out.rows.iter_mut().zip(&self.rows) {
            for (&j, a) in row {
                for (&k, b) in &other.rows[j] {
                    accumulate(dst, k, a.clone() * b.clone());
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.cutoff), |acc, _| acc.matmul(self))
    }

    /// Raw stored entry, no truncation check.
    pub fn raw_entry(&self, row: usize, col: usize) -> C {
        self.rows[row].get(&col).cloned().unwrap_or_else(C::zero)
    }

    /// `⟨bra|M|ket⟩`, refused when truncation could have reached it.
    pub fn element(&self, bra: FockLabel, ket: FockLabel) -> Result<C> {
        let needed = bra.n1.max(bra.n2).max(ket.n1).max(ket.n2) + self.degree;
        if needed > self.cutoff {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff,
                needed,
                degree: self.degree,
            });
        }
        Ok(self.raw_entry(self.index(bra), self.index(ket)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter().all(|(&j, v)| self.rows[j].get(&i).map_or(v.is_zero(), |w| w == v))
        })
    }

    /// Row-major dense copy in `f64`.
    pub fn to_dense_f64(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n * n];
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, v) in row {
                out[i * n + j] = v.to_f64();
            }
        }
        out
    }
}

fn accumulate<C: Scalar>(row: &mut BTreeMap<usize, C>, j: usize, v: C) {
    if v.is_zero() {
        return;
    }
    match row.remove(&j) {
        Some(old) => {
            let s = old + v;
            if !s.is_zero() {
                row.insert(j, s);
            }
        }
        None => {
            row.insert(j, v);
        }
    }
}

/// Materializes a normal-ordered expression by literal products of the
/// elementary truncated matrices.
pub fn dense_matrix<C: Scalar>(expr: &LadderExpression<C>, cutoff: u32) -> TruncatedOperator<C> {
    let elementary = |op| TruncatedOperator::<C>::elementary(op, cutoff);
    let (a, ad, b, bd) = (
        elementary(Ladder::A),
        elementary(Ladder::ADag),
        elementary(Ladder::B),
        elementary(Ladder::BDag),
    );
    let mut out = TruncatedOperator::zero(cutoff);
    for w in expr.words() {
        let e = w.exponents;
        let word = ad
            .pow(e.a_create)
            .matmul(&a.pow(e.a_annihilate))
            .matmul(&bd.pow(e.b_create))
            .matmul(&b.pow(e.b_annihilate));
        out = out.add(&word.scale(&w.coefficient));
    }
    out
}

/// `[(a + a†)² + (b + b†)²]³` assembled from quadrature matrices without any
/// symbolic expansion.
pub fn dense_h1_bracket<C: Scalar>(cutoff: u32) -> TruncatedOperator<C> {
    let elementary = |op| TruncatedOperator::<C>::elementary(op, cutoff);
    let xa = elementary(Ladder::A).add(&elementary(Ladder::ADag));
    let xb = elementary(Ladder::B).add(&elementary(Ladder::BDag));
    let r = xa.matmul(&xa).add(&xb.matmul(&xb));
    r.matmul(&r).matmul(&r)
}
