use proptest::prelude::*;
use rug::Float;
use srf_core::acceptance::exhaustive_l0;
use srf_core::hp::{real, rel_diff, HpComplex};
use srf_core::linalg::symmetric_eigen;
use srf_core::recovery::{direct_residual_sqr, l0_solve};
use srf_core::spectral::sigma_min;
use srf_core::szego::{leading_coeffs, phi_inverse, phi_map};
use srf_core::{build_gram, measurement_norm, synthesize, CoefficientVector, MeasurementVector, SupportSet, SystemParams};

const BITS: u32 = 128;

fn support_strategy(max_len: usize, max_offset: i64) -> impl Strategy<Value = SupportSet> {
    prop::collection::btree_set(-max_offset..=max_offset, 1..=max_len)
        .prop_map(|s| SupportSet::new(s.into_iter().collect()).unwrap())
}

fn y_strategy() -> impl Strategy<Value = f64> {
    0.02f64..0.49
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gram_is_symmetric_unit_diagonal_and_bounded(y in y_strategy(), t in support_strategy(6, 20)) {
        let p = SystemParams::new(y, BITS).unwrap();
        let g = build_gram(&p, &t, BITS).entries;
        prop_assert!(g.is_symmetric());
        for i in 0..t.len() {
            prop_assert_eq!(&g[(i, i)], &real(BITS, 1.0));
            for j in 0..t.len() {
                prop_assert!(g[(i, j)].clone().abs() <= 1);
            }
        }
        let eig = symmetric_eigen(&g).unwrap();
        prop_assert!(*eig.min_value() > 0);
    }

    #[test]
    fn sigma_min_is_translation_and_reflection_invariant(y in y_strategy(), t in support_strategy(4, 10), shift in -50i64..50) {
        let p = SystemParams::new(y, BITS).unwrap();
        let base = sigma_min(&p, &t).unwrap();
        let moved = sigma_min(&p, &t.translate(shift)).unwrap();
        let mirrored = sigma_min(&p, &t.reflect()).unwrap();
        prop_assert!(rel_diff(&base, &moved) < 1e-25);
        prop_assert!(rel_diff(&base, &mirrored) < 1e-25);
    }

    #[test]
    fn adding_an_atom_never_increases_sigma_min(y in y_strategy(), t in support_strategy(4, 8), extra in 9i64..20) {
        let p = SystemParams::new(y, BITS).unwrap();
        let mut bigger = t.offsets().to_vec();
        bigger.push(extra);
        let bigger = SupportSet::new(bigger).unwrap();
        prop_assert!(sigma_min(&p, &bigger).unwrap() <= sigma_min(&p, &t).unwrap());
    }

    #[test]
    fn measurement_norm_is_the_gram_norm(y in y_strategy(), vals in prop::collection::vec(-2.0f64..2.0, 3)) {
        let p = SystemParams::new(y, BITS).unwrap();
        let support = SupportSet::new(vec![0, 2, 5]).unwrap();
        let x = CoefficientVector::from_real(support.clone(), vals.iter().map(|v| real(BITS, *v)).collect()).unwrap();
        let f = synthesize(&p, &x, &support).unwrap();
        let g = build_gram(&p, &support, BITS).entries;
        let expected = g.quadratic_form(&vals.iter().map(|v| real(BITS, *v)).collect::<Vec<_>>()).sqrt();
        let got = measurement_norm(&p, &f, BITS).unwrap();
        prop_assert!((Float::with_val(BITS, &got - &expected).abs()).to_f64() < 1e-30);
    }

    #[test]
    fn leading_coefficient_bracket_holds(y in y_strategy(), n in 0usize..8) {
        let p = SystemParams::new(y, 256).unwrap();
        let v = leading_coeffs(&p, n, 256).unwrap().inv_k_sq(n).to_f64();
        let c = p.c.to_f64();
        let c2n = c.powi(2 * n as i32);
        prop_assert!(c / (2.0 * y) * c2n < v);
        prop_assert!(v < 4.0 * (1.0 + 2.0 * y).powi(2) * c2n);
    }

    #[test]
    fn exterior_map_round_trips(y in y_strategy(), r in 1.001f64..20.0, t in -std::f64::consts::PI..std::f64::consts::PI) {
        let p = SystemParams::new(y, BITS).unwrap();
        let w = HpComplex::from_polar(&real(BITS, r), &real(BITS, t));
        let z = phi_map(&p.c, &w).unwrap();
        let back = phi_inverse(&p.c, &z).unwrap();
        prop_assert!((&back - &w).abs().to_f64() < 1e-25 * r);
        prop_assert!(back.abs() > 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn l0_agrees_with_exhaustive_direct_search(
        y in 0.05f64..0.45,
        vals in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
        frac in 0.05f64..0.9,
    ) {
        let p = SystemParams::new(y, BITS).unwrap();
        let coeffs = vals.iter().map(|(a, b)| HpComplex::from_f64(BITS, *a, *b)).collect();
        let f = MeasurementVector::new(SupportSet::contiguous(5), coeffs, real(BITS, 0.0)).unwrap();
        let sigma = Float::with_val(BITS, measurement_norm(&p, &f, BITS).unwrap() * frac);
        let fast = l0_solve(&p, &f, &sigma, 5).unwrap();
        let slow = exhaustive_l0(&p, &f, &sigma, 5).unwrap().unwrap();
        prop_assert_eq!(fast.sparsity, slow.0.len());
        let direct = direct_residual_sqr(&p, &f, &fast.estimate, BITS).unwrap().sqrt();
        prop_assert!(direct <= Float::with_val(BITS, &sigma * (1.0 + 1e-15)));
    }
}
