//! Sectional curvature of `T₁M` over a round sphere, and of planes tangent
//! to `ξ(M)` for the Hopf field.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::fields::shape::shape_operator_rep;
use crate::fields::UnitVectorField;
use crate::manifold::{Sphere, TangentVector, Vector, DEGENERATE_PLANE};
use crate::sasaki::bundle::{tau_lift, BundleVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundleCurvature {
    pub value: f64,
    /// Largest `|⟨vert, u⟩|` removed when projecting the inputs onto `T(T₁M)`.
    pub projection_residual: f64,
}

/// Sectional curvature of `T₁M` along the plane spanned by `a`, `b`.
///
/// The pair is first projected onto `T(T₁M)` and orthonormalized in the
/// Sasaki metric. The `∇R` terms vanish on a constant-curvature base and are
/// omitted.
pub fn bundle_sectional_curvature(
    sphere: &Sphere,
    a: &BundleVector,
    b: &BundleVector,
) -> Result<BundleCurvature> {
    let u = a.anchor();
    let d = (u - b.anchor()).norm() + (a.base().coords() - b.base().coords()).norm();
    if d > 1e-9 {
        return Err(GeometryError::BasePointMismatch(d));
    }
    let residual = a.vertical_defect().max(b.vertical_defect());
    let fix = |v: &BundleVector| v.with_parts(v.horiz().clone(), v.vert() - u * u.dot(v.vert()));
    let (a, b) = (fix(a), fix(b));
    let gram = a.dot(&a) * b.dot(&b) - a.dot(&b).powi(2);
    if gram < DEGENERATE_PLANE {
        return Err(GeometryError::DegeneratePlane(gram));
    }
    let a = &a * (1.0 / a.norm());
    let b = &b - &(&a * a.dot(&b));
    let b = &b * (1.0 / b.norm());
    let value = sec_formula(sphere, u, a.horiz(), a.vert(), b.horiz(), b.vert());
    Ok(BundleCurvature { value, projection_residual: residual })
}

/// Sectional curvature of `T₁M` for an orthonormal pair `X̃ = X₁ʰ + X₂ᵛ`,
/// `Ỹ = Y₁ʰ + Y₂ᵛ` at `(p, u)` with `X₂, Y₂ ⊥ u`.
pub fn sec_formula(s: &Sphere, u: &Vector, x1: &Vector, x2: &Vector, y1: &Vector, y2: &Vector) -> f64 {
    let r = |a: &Vector, b: &Vector, c: &Vector| s.curvature_vec(a, b, c);
    let t1 = r(x1, y1, y1).dot(x1);
    let t2 = -0.75 * r(x1, y1, u).norm_squared();
    let t3 = 0.25 * (r(u, y2, x1) + r(u, x2, y1)).norm_squared();
    let t4 = x2.norm_squared() * y2.norm_squared() - x2.dot(y2).powi(2);
    let t5 = 3.0 * r(x1, y1, y2).dot(x2);
    let t6 = -r(u, x2, x1).dot(&r(u, y2, y1));
    // (∇R) terms: zero on a space of constant curvature
    t1 + t2 + t3 + t4 + t5 + t6
}

/// Closed form for the Hopf field on a unit sphere:
/// `(1 − ¾s + (3/2)⟨AX,Y⟩²)/(2 − s)` with `s = ⟨ξ,X⟩² + ⟨ξ,Y⟩²`.
pub fn submanifold_plane_curvature(
    field: &UnitVectorField,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64> {
    if !field.is_hopf() || (field.sphere().radius() - 1.0).abs() > 1e-12 {
        return Err(GeometryError::Precondition(
            "plane curvature closed form needs the Hopf field on a unit sphere".into(),
        ));
    }
    let (xv, yv) = (x.vec(), y.vec());
    let defect = (xv.norm_squared() - 1.0)
        .abs()
        .max((yv.norm_squared() - 1.0).abs())
        .max(xv.dot(yv).abs());
    if defect > 1e-9 {
        return Err(GeometryError::Precondition(format!("X, Y not orthonormal (defect {defect:e})")));
    }
    let xi = field.at(x.base())?;
    let rep = shape_operator_rep(field, x.base())?;
    let s = xi.vec().dot(xv).powi(2) + xi.vec().dot(yv).powi(2);
    let c = rep.apply(xv).dot(yv);
    Ok((1.0 - 0.75 * s + 1.5 * c * c) / (2.0 - s))
}

/// Sectional curvature of `T₁M` along the plane `X^τ_ξ ∧ Y^τ_ξ`.
pub fn lifted_plane_curvature(
    field: &UnitVectorField,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<f64> {
    let rep = shape_operator_rep(field, x.base())?;
    let a = tau_lift(&rep, x.vec());
    let b = tau_lift(&rep, y.vec());
    Ok(bundle_sectional_curvature(field.sphere(), &a, &b)?.value)
}
