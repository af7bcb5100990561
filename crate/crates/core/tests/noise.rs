use proptest::prelude::*;

use projsq::codes::{magic_state, squeezed_coherent, Code, ScParams};
use projsq::noise::{mean_photons, photon_loss_kraus, photon_loss_rk4, trace_distance, LossParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn rk4_agrees_with_kraus(gt in 0.0..0.3f64) {
        let s = magic_state(&Code::Sc(ScParams::new(1.0, 0.8).unwrap()), 150).unwrap();
        let p = LossParams::new(gt).unwrap();
        let a = photon_loss_kraus(&s, &p).unwrap();
        let b = photon_loss_rk4(&s, &p).unwrap();
        prop_assert!(trace_distance(&a.density_matrix(), &b.density_matrix()) < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn loss_preserves_state_invariants(gt in 0.0..1.0f64, z in 0.0..0.8f64) {
        let s = squeezed_coherent(1.2, z, 60).unwrap();
        let out = photon_loss_kraus(&s, &LossParams::new(gt).unwrap()).unwrap();
        let (tr, herm, min) = out.invariant_defects();
        prop_assert!(tr < 1e-12 && herm < 1e-12 && min > -1e-12);
        let want = mean_photons(&s) * (-gt).exp();
        prop_assert!((mean_photons(&out) - want).abs() < 1e-9);
    }
}

#[test]
fn negative_loss_is_rejected() {
    assert!(LossParams::new(-0.1).is_err());
}
