//! Lifts `F = (R, X)` into `G ⋉ R^n`, the τ-eigenspace splitting of their
//! Maurer–Cartan forms and the λ-family flatness checks.

mod bundle;
mod frames;
mod tau;

pub use bundle::{
    alpha_lambda, beta_flatness_residual, beta_lambda2, curvature_split_residual, decompose_alpha, flatness_laurent,
    flatness_residual, homogeneous, lift_condition_residual, Components, CurvatureSplitResidual, LaurentResidual,
    LiftBundle,
};
pub use frames::{
    complex_determinant, hopf_rotors, hsl_reduction_check, identity_frame, lift_frame, lift_hopf, lift_hopf_octonion,
    lift_u2, octonion_hopf_of_bundle, random_smooth_frame, rotor_frame, smooth_rotors, u2_frames, ReductionReport,
};
pub use tau::{build_tau, spin7_algebra, Group, TauAction, GRADES};
