//! Gaussian-weighted displacement-sum projectors, their probabilities and
//! the lattice-sum approximations.

mod apply;
mod spec;
mod sums;
mod vacuum;

pub use apply::{
    assemble, assemble_block, project, projection_probability, rotation_spec, spec_expectation,
    ProjectionOutcome, RotationSpec, Q_FLOOR, RETAIN_TOL,
};
pub use spec::{
    binomial_gkp_spec, binomial_sc_spec, gamma0_from_s, gamma_from_dz, gkp_spec, gkp_spec_for,
    sc_spec, sc_spec_for, ProjectorKind, ProjectorMeta, ProjectorSpec, Term, TAIL_TOL,
};
pub use sums::{
    envelope_by_displacements, gkp_validity, lattice_cutoff, q_analytic_gkp, q_analytic_sc,
    q_sum_gkp, q_sum_gkp_rect, q_sum_sc, validity, Validity,
};
pub use vacuum::{vacuum_dz, vacuum_probability, vacuum_project, MIN_QUAD_POINTS, QUAD_TOL};
