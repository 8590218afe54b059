//! Unit vector fields on spheres and their first-order invariants.

pub mod curvature;
pub mod library;
pub mod predicates;
pub mod shape;
pub mod svd;

pub use curvature::{
    codazzi_residual, geodesic_identity_residual, half_curvature, half_curvature_with,
    killing_identity_residual,
};
pub use library::{
    complex_structure, complex_structure_matrix, hopf_field, meridian_field, FieldDescriptor,
    UnitVectorField,
};
pub use predicates::{
    is_geodesic, is_killing, is_normal, is_strongly_normal, jacobi_relation_residual,
    sasakian_identity_residual, PredicateResult, SasakianResidual,
};
pub use shape::{conjugate_shape_operator, shape_operator, shape_operator_rep, ShapeOperatorRep};
pub use svd::{killing_canonical_frames, singular_decomposition, SingularData};
