use proptest::prelude::*;

use zeeman_core::fock_algebra::{build_h1, dense_matrix, h1_bracket, matrix_element, FockLabel};
use zeeman_core::grid::{Field2D, GridSpec};
use zeeman_core::perturbation::{energy, first_order_state, k0, k1, mode_swap, DeltaSource, FockState, StateMode};
use zeeman_core::wigner::{kernel, negativity_slice, wigner_slice, NegativityForm, PhaseSpaceState};
use zeeman_core::{Exact, Execution};

fn label() -> impl Strategy<Value = FockLabel> {
    (0u32..6, 0u32..6).prop_map(|(a, b)| FockLabel::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_hermitian(bra in label(), ket in label()) {
        let op = h1_bracket::<Exact>();
        prop_assert_eq!(matrix_element(bra, ket, &op), matrix_element(ket, bra, &op));
    }

    #[test]
    fn symbolic_matches_dense(bra in label(), ket in label()) {
        let op = build_h1(0.7);
        let dense = dense_matrix(&op, 14);
        let d = dense.element(bra, ket).unwrap();
        prop_assert!((matrix_element(bra, ket, &op) - d).abs() < 1e-9);
    }

    #[test]
    fn zero_field_leaves_k_unshifted(n1 in 0u32..8, n2 in 0u32..8, w in 0.1f64..5.0) {
        prop_assert_eq!(k1(n1, n2, w, 0.0, DeltaSource::Oracle), k0(n1, n2, w));
        let n = (n1 + n2 + 1) as f64;
        prop_assert!((energy(n1, n2, 0.0, 1.0, DeltaSource::Paper) + 0.5 / (n * n)).abs() < 1e-15);
    }

    #[test]
    fn swap_covariance(l in label(), b in 0.0f64..2.0, w in 0.3f64..4.0) {
        let (s, _) = first_order_state(l, w, b, StateMode::Oracle, None).unwrap();
        let (t, _) = first_order_state(l.swapped(), w, b, StateMode::Oracle, None).unwrap();
        let swapped = mode_swap(&s);
        for (k, c) in &t.coefficients {
            prop_assert!((swapped.get(*k) - c).abs() < 1e-12 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn kernels_bounded(n in 0u32..12, w in 0.2f64..5.0, q in -4.0f64..4.0, p in -4.0f64..4.0) {
        prop_assert!(kernel(n, w, q, p).abs() <= 1.0 / std::f64::consts::PI + 1e-12);
    }

    #[test]
    fn slices_reflect_and_round_trip(l in label(), b in 0.0f64..1.5, q2 in -2.0f64..2.0, p2 in -2.0f64..2.0) {
        let (s, _) = first_order_state(l, 1.3, b, StateMode::Oracle, None).unwrap();
        let mut grid = GridSpec::square(3.0, 21);
        (grid.slice_q2, grid.slice_p2) = (q2, p2);
        let f = wigner_slice(&PhaseSpaceState::from_fock(&s).unwrap(), &grid, Execution::Sequential).unwrap();
        prop_assert!(f.reflection_defect() < 1e-12);
        let back = Field2D::from_csv(&f.to_csv()).unwrap();
        prop_assert_eq!(back.values, f.values);
    }

    #[test]
    fn slice_negativity_nonnegative(l in label(), q2 in -2.0f64..2.0, p2 in -2.0f64..2.0) {
        let state = FockState::basis(l, 1.0, 12).unwrap();
        let r = negativity_slice(&PhaseSpaceState::from_fock(&state).unwrap(), (q2, p2), NegativityForm::Volume);
        if let Ok(r) = r {
            prop_assert!(r.eta > -1e-12);
        }
    }
}
