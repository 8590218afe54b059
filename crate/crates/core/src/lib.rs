//! Numerical geometry of unit vector fields on round spheres, viewed as
//! submanifolds of the unit tangent bundle with the Sasaki metric.

pub mod error;
pub mod fields;
pub mod manifold;
pub mod report;
pub mod rng;
pub mod sasaki;
pub mod variation;

pub use error::{GeometryError, Result};
pub use fields::{hopf_field, meridian_field, FieldDescriptor, SingularData, UnitVectorField};
pub use manifold::{Frame, Matrix, Sphere, SpherePoint, TangentVector, Vector, VectorField};
pub use report::{CheckResult, Verdict, VerificationReport};
pub use sasaki::{BundleVector, SecondFormTensor, SubmanifoldFrames};
pub use variation::{FiberFrame, Quadrature, VariationField};
