//! Values as printed in the source article, kept verbatim for side-by-side
//! reports. Nothing here is used to drive a computation.

use num_rational::Ratio;

use crate::exact::Exact;
use crate::fock_algebra::FockLabel;

/// Printed first-order coefficients, in units of `B²/(8W)`, for the levels
/// where the article lists them.
pub fn first_order_coefficients(level: FockLabel) -> Option<Vec<(FockLabel, Exact)>> {
    let l = FockLabel::new;
    let dec = |s: &str| Exact::from_decimal_str(s).expect("printed decimal");
    let surd = |c: i128, n: u64| Exact::surd(Ratio::from_integer(c), n);
    match (level.n1, level.n2) {
        (0, 0) => Some(vec![
            (l(2, 0), surd(-21, 2) + Exact::integer(-18) + surd(-25, 10)),
            (l(2, 2), Exact::surd(Ratio::new(-3, 2), 2) + Exact::integer(-3)),
            (l(4, 0), surd(-30, 21) + surd(-3, 6)),
            (l(4, 2), surd(4, 3)),
            (l(6, 0), surd(-8, 1155)),
        ]),
        (1, 0) => Some(vec![
            (l(1, 2), dec("89,30")),
            (l(1, 4), dec("13,47")),
            (l(1, 6), dec("6,32")),
            (l(3, 0), dec("-89,43")),
            (l(3, 2), dec("-19,33")),
            (l(5, 0), dec("-23,51")),
            (l(5, 4), dec("-10,31")),
            (l(7, 0), dec("-11,83")),
        ]),
        (0, 1) => Some(vec![
            (l(2, 1), dec("-89,30")),
            (l(4, 1), dec("-13,47")),
            (l(6, 1), dec("-6,32")),
            (l(0, 3), dec("89,43")),
            (l(2, 3), dec("19,33")),
            (l(0, 5), dec("23,51")),
            (l(4, 5), dec("10,31")),
            (l(0, 7), dec("11,83")),
        ]),
        _ => None,
    }
}

/// Printed negativity at `B = 1`.
pub const NEGATIVITY_B1: [((u32, u32), f64); 6] = [
    ((0, 0), 0.14345),
    ((0, 1), 0.32645),
    ((1, 0), 0.32645),
    ((1, 1), 0.45786),
    ((2, 0), 0.45786),
    ((0, 2), 0.45786),
];

/// Printed negativity at `B = 0.1`.
pub const NEGATIVITY_B01: [((u32, u32), f64); 6] = [
    ((0, 0), 0.0034),
    ((1, 0), 0.0562),
    ((0, 1), 0.0562),
    ((1, 1), 0.0635),
    ((2, 0), 0.0635),
    ((0, 2), 0.0635),
];

/// Printed negativity for a level at one of the two tabulated fields.
pub fn negativity(level: FockLabel, b: f64) -> Option<f64> {
    let table: &[((u32, u32), f64)] = if b == 1.0 {
        &NEGATIVITY_B1
    } else if b == 0.1 {
        &NEGATIVITY_B01
    } else {
        return None;
    };
    table
        .iter()
        .find(|(k, _)| *k == (level.n1, level.n2))
        .map(|(_, v)| *v)
}

/// One published Wigner-slice figure.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FigureSpec {
    pub figure: u32,
    pub order: u32,
    pub e: f64,
    pub b: f64,
}

pub const FIGURES: [FigureSpec; 8] = [
    FigureSpec { figure: 1, order: 0, e: 1.0, b: 1.0 },
    FigureSpec { figure: 2, order: 0, e: 1.0, b: 0.1 },
    FigureSpec { figure: 3, order: 1, e: 10.0, b: 1.0 },
    FigureSpec { figure: 4, order: 1, e: 10.0, b: 0.1 },
    FigureSpec { figure: 5, order: 1, e: 1.0, b: 1.0 },
    FigureSpec { figure: 6, order: 1, e: 1.0, b: 0.1 },
    FigureSpec { figure: 7, order: 1, e: 1.0, b: 0.5 },
    FigureSpec { figure: 8, order: 1, e: 10.0, b: 0.5 },
];

/// Slice coordinates of the second mode used by every figure.
pub const FIGURE_SLICE: (f64, f64) = (1.0, 1.0);
