use nalgebra::DVector;
use proptest::prelude::*;

use projsq::fock::{
    self, displacement, displacement_block, expectation, fidelity, parity, rotation, squeeze,
    FockState, C64,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn displacement_is_unitary(re in -3.0..3.0f64, im in -3.0..3.0f64, dim in 20usize..80) {
        let d = displacement(c(re, im), dim).unwrap();
        prop_assert!(d.unitarity_defect() < 1e-10);
    }

    #[test]
    fn displacement_inverse_is_adjoint(re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let d = displacement(c(re, im), 60).unwrap();
        let m = displacement(c(-re, -im), 60).unwrap();
        prop_assert!(d.adjoint().max_diff(&m) < 1e-10);
    }

    #[test]
    fn exact_block_matches_converged_expm(re in -1.5..1.5f64, im in -1.5..1.5f64) {
        let big = displacement(c(re, im), 120).unwrap();
        let blk = displacement_block(c(re, im), 30, 30);
        for m in 0..30 {
            for n in 0..30 {
                prop_assert!((big.get(m, n) - blk[(m, n)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rotation_and_squeeze_are_unitary(theta in -7.0..7.0f64, r in -0.8..0.8f64, dim in 20usize..60) {
        prop_assert!(rotation(theta, dim).unwrap().unitarity_defect() < 1e-12);
        prop_assert!(squeeze(c(r, 0.0), dim).unwrap().unitarity_defect() < 1e-10);
    }

    #[test]
    fn quadratures_are_hermitian(dim in 2usize..100) {
        let (x, p) = fock::quadratures(dim).unwrap();
        prop_assert!(x.hermiticity_defect() < 1e-14);
        prop_assert!(p.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn states_are_normalized(v in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..40)) {
        prop_assume!(v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3));
        let amp = DVector::from_iterator(v.len(), v.iter().map(|&(a, b)| c(a, b)));
        let s = FockState::pure(amp).unwrap();
        let (n, _, _) = s.invariant_defects();
        prop_assert!(n < 1e-12);
        let m = s.to_mixed();
        let (tr, herm, min) = m.invariant_defects();
        prop_assert!(tr < 1e-12 && herm < 1e-14 && min > -1e-12);
        prop_assert!((fidelity(&s, &m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_expectation_is_bounded(v in prop::collection::vec(-1.0..1.0f64, 2..30)) {
        prop_assume!(v.iter().any(|a| a.abs() > 1e-3));
        let s = FockState::pure(DVector::from_iterator(v.len(), v.iter().map(|&a| c(a, 0.0)))).unwrap();
        let e = expectation(&s, &parity(v.len()).unwrap()).unwrap();
        prop_assert!(e.re.abs() <= 1.0 + 1e-12 && e.im.abs() < 1e-14);
    }
}

#[test]
fn truncation_probe_converges_for_small_displacements() {
    for dim in [100usize, 150, 200] {
        let delta = fock::truncation_delta(|d| displacement(c(0.7, -0.4), d), dim).unwrap();
        assert!(delta < 1e-10, "dim {dim}: {delta}");
    }
}

#[test]
fn invalid_dimensions_are_rejected() {
    assert!(displacement(c(1.0, 0.0), 1).is_err());
    assert!(FockState::vacuum(0).is_err());
    assert!(rotation(f64::NAN, 10).is_err());
}
