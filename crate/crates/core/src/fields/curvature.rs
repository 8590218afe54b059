//! The half curvature tensor `r(X,Y)ξ = −(∇_X A_ξ)Y` and the identities it
//! satisfies.

use crate::error::Result;
use crate::fields::shape::shape_operator_rep;
use crate::fields::UnitVectorField;
use crate::manifold::{SpherePoint, TangentVector, Vector, VectorField};
use crate::rng::{self, Rng};

/// `r(X,Y)ξ`, with `Y` extended to `q ↦ P_q Y`.
pub fn half_curvature(
    field: &UnitVectorField,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<TangentVector> {
    let yv = y.vec().clone();
    half_curvature_with(field, x, move |_q: &Vector| yv.clone())
}

/// `r(X,Y)ξ` for an arbitrary extension `q ↦ Y(q)` of `Y = ext(p)`. The
/// extension is projected to `T_q` before use, so any ambient field works.
pub fn half_curvature_with<F>(field: &UnitVectorField, x: &TangentVector, ext: F) -> Result<TangentVector>
where
    F: Fn(&Vector) -> Vector,
{
    let s = field.sphere();
    let p = x.base().coords();
    let y_tilde = |q: &Vector| s.project_vec(q, &ext(q));
    // q ↦ A_q Ỹ(q) = −∇_{Ỹ(q)} ξ
    let a_y = |q: &Vector| -> Result<Vector> {
        let w = s.covariant_derivative_vec(field, q, &y_tilde(q))?;
        Ok(-w)
    };
    let d_ay = s.fd_derivative(p, x.vec(), a_y)?;
    let d_y = s.fd_derivative(p, x.vec(), |q| Ok(y_tilde(q)))?;
    let a_dy = -s.covariant_derivative_vec(field, p, &d_y)?;
    // r(X,Y)ξ = ∇_X∇_Y ξ − ∇_{∇_X Y} ξ = −∇_X(AỸ) + A(∇_X Ỹ)
    Ok(x.with_vec(a_dy - d_ay))
}

/// Random unit tangent vector orthogonal to `ξ(p)`.
pub(crate) fn random_horizontal(
    field: &UnitVectorField,
    p: &SpherePoint,
    xi: &Vector,
    rng: &mut Rng,
) -> TangentVector {
    let s = field.sphere();
    loop {
        let t = s.random_tangent_with(p, rng);
        let w = t.vec() - xi * xi.dot(t.vec());
        let n = w.norm();
        if n > 1e-6 {
            return t.with_vec(w / n);
        }
    }
}

/// Largest `‖r(X,Y)ξ − r(Y,X)ξ − R(X,Y)ξ‖` over random unit pairs.
pub fn codazzi_residual(field: &UnitVectorField, p: &SpherePoint, samples: usize, seed: u64) -> Result<f64> {
    let s = field.sphere();
    let xi = field.value(p.coords())?;
    let mut rng = rng::stream(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = s.random_unit_tangent_with(p, &mut rng);
        let y = s.random_unit_tangent_with(p, &mut rng);
        let rxy = half_curvature(field, &x, &y)?;
        let ryx = half_curvature(field, &y, &x)?;
        let big = s.curvature_vec(x.vec(), y.vec(), &xi);
        worst = worst.max((rxy.vec() - ryx.vec() - big).norm());
    }
    Ok(worst)
}

/// Largest `‖r(X,Y)ξ − R(X,ξ)Y‖` over random unit pairs; zero for Killing fields.
pub fn killing_identity_residual(
    field: &UnitVectorField,
    p: &SpherePoint,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let s = field.sphere();
    let xi = field.value(p.coords())?;
    let mut rng = rng::stream(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = s.random_unit_tangent_with(p, &mut rng);
        let y = s.random_unit_tangent_with(p, &mut rng);
        let r = half_curvature(field, &x, &y)?;
        let big = s.curvature_vec(x.vec(), &xi, y.vec());
        worst = worst.max((r.vec() - big).norm());
    }
    Ok(worst)
}

/// Largest `‖r(X,ξ)ξ + A²X‖` over random unit `X`; zero for geodesic fields.
pub fn geodesic_identity_residual(
    field: &UnitVectorField,
    p: &SpherePoint,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let s = field.sphere();
    let xi = field.at(p)?;
    let rep = shape_operator_rep(field, p)?;
    let mut rng = rng::stream(seed, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = s.random_unit_tangent_with(p, &mut rng);
        let r = half_curvature(field, &x, &xi)?;
        let a2x = rep.apply(&rep.apply(x.vec()));
        worst = worst.max((r.vec() + a2x).norm());
    }
    Ok(worst)
}
