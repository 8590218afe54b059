//! Second variation of volume for `ξ(M)` and its variation fields.

pub mod fiber;
pub mod field;
pub mod integrand;
pub mod quadrature;
pub mod verdict;
pub mod witness;

pub use fiber::{propagate_fiber_frame, FiberFrame, FrameExtension};
pub use field::{
    horizontal_constant_field, quaternion_structures, stable_s3_field, HopfFrameCombination,
    HorizontalConstant, TrigPolynomial, VariationField,
};
pub use integrand::{
    duschek_integrand_general, hopf_connection_term, reduced_integrand, s3_stable_form, DuschekTerms,
    ReducedTerms,
};
pub use quadrature::{integrate_over_sphere, Quadrature, QuadratureEstimate};
pub use verdict::{stability_verdict, StabilityMode, StabilityOptions, RATIO_TOL};
pub use witness::{destabilizing_field, witness_residuals, WitnessResiduals};
