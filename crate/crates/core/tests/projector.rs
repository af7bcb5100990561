use std::f64::consts::PI;

use proptest::prelude::*;

use projsq::codes::{magic_state, squeezed_coherent, Code, GkpParams, ScParams};
use projsq::fock::FockState;
use projsq::projector::{
    assemble, gkp_spec_for, project, projection_probability, q_analytic_sc, sc_spec_for,
    vacuum_dz, vacuum_project, ProjectorSpec,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sc_spec_weights_are_normalized(xi in 0.5..2.0f64, z in 0.2..1.5f64, dz in 0.1..1.2f64) {
        let spec = sc_spec_for(xi, z, dz).unwrap();
        let (norm, sym) = spec.invariant_defects();
        prop_assert!(norm < 1e-12 && sym < 1e-12);
    }

    #[test]
    fn gkp_spec_weights_are_normalized(d in 0.05..0.3f64, s in 1.2..4.0f64) {
        let spec = gkp_spec_for((PI / 2.0).sqrt(), d, s).unwrap();
        let (norm, sym) = spec.invariant_defects();
        prop_assert!(norm < 1e-12 && sym < 1e-12);
    }

    #[test]
    fn assembled_projector_is_hermitian(xi in 0.6..1.6f64, z in 0.3..1.0f64, dz in 0.2..1.0f64) {
        let p = assemble(&sc_spec_for(xi, z, dz).unwrap(), 60).unwrap();
        prop_assert!(p.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn probability_is_in_unit_interval(z in 0.3..1.2f64, dz in 0.05..1.0f64) {
        let s = squeezed_coherent(1.0, z, 80).unwrap();
        let q = projection_probability(&s, &sc_spec_for(1.0, z, dz).unwrap());
        prop_assert!(q > 0.0 && q <= 1.0 + 1e-12);
    }
}

#[test]
fn identity_spec_is_a_no_op() {
    let s = squeezed_coherent(1.0, 0.5, 60).unwrap();
    let o = project(&s, &ProjectorSpec::identity(), 60).unwrap();
    assert!((o.q - 1.0).abs() < 1e-12);
    assert!((projsq::fock::fidelity(&o.state, &s).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn squeezed_coherent_probability_matches_closed_form() {
    let (xi, z) = (1.2, 0.8);
    let s = squeezed_coherent(xi, z, 200).unwrap();
    for dz in [0.2, 0.5, 1.0] {
        let q = projection_probability(&s, &sc_spec_for(xi, z, dz).unwrap());
        assert!((q / q_analytic_sc(dz) - 1.0).abs() < 0.02, "dz {dz}: {q}");
    }
}

#[test]
fn projection_result_is_normalized_and_hermitian() {
    let code = Code::Gkp(GkpParams::square(0.15).unwrap());
    let m = magic_state(&code, 120).unwrap().to_mixed();
    let o = project(&m, &gkp_spec_for((PI / 2.0).sqrt(), 0.15, 2.0).unwrap(), 240).unwrap();
    let (tr, herm, min) = o.state.invariant_defects();
    assert!(tr < 1e-12 && herm < 1e-12 && min > -1e-10, "{tr} {herm} {min}");
    assert!(o.retained > 1.0 - 1e-6);
}

#[test]
fn small_output_truncation_overflows() {
    let code = Code::Sc(ScParams::new((PI / 2.0).sqrt(), 1.5).unwrap());
    let m = magic_state(&code, 150).unwrap();
    let spec = sc_spec_for((PI / 2.0).sqrt(), 1.5, 1.0).unwrap();
    assert!(matches!(
        project(&m, &spec, 150),
        Err(projsq::Error::TruncationOverflow { .. })
    ));
}

#[test]
fn vacuum_projector_hits_closed_form_at_every_dim() {
    for dim in [100usize, 150, 200] {
        let s = squeezed_coherent(0.0, 0.5, dim).unwrap();
        let o = vacuum_project(&s, 1.0, 128, dim).unwrap();
        assert!((o.q - (-vacuum_dz(0.5, 1.0)).exp()).abs() < 1e-9, "dim {dim}");
        let v = FockState::vacuum(dim).unwrap();
        assert!(vacuum_project(&v, 0.0, 128, dim).unwrap().q == 1.0);
    }
}
