//! The unit tangent bundle with the Sasaki metric and the submanifold `ξ(M)`.

pub mod bundle;
pub mod connection;
pub mod curvature;
pub mod frames;
pub mod second_form;

pub use bundle::{
    horizontal_lift, sasaki_inner, tangency_decomposition, tangential_lift, vertical_lift,
    xi_normal_lift, xi_tangential_lift, BundleVector, TangencySplit,
};
pub use connection::{normal_connection, normal_lift_derivative, NormalConnection};
pub use curvature::{
    bundle_sectional_curvature, lifted_plane_curvature, submanifold_plane_curvature, BundleCurvature,
};
pub use frames::SubmanifoldFrames;
pub use second_form::{
    geodesic_field_obstruction, obstruction_entries, second_form_direct, second_form_lemma,
    SecondFormTensor,
};
