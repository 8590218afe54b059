//! Levi-Civita connection of the Sasaki metric on lifted fields, and the
//! induced connection in the normal bundle of `ξ(M)`.

use crate::error::{GeometryError, Result};
use crate::fields::shape::{ambient_shape_matrix, shape_operator_rep};
use crate::fields::{ShapeOperatorRep, UnitVectorField};
use crate::manifold::{Sphere, TangentVector, Vector, VectorField};
use crate::sasaki::bundle::{nu_lift, tangency_decomposition_with, BundleVector};

fn tangential(u: &Vector, x: &Vector) -> Vector {
    x - u * u.dot(x)
}

/// `∇̄_{Xʰ+Vᵗ}(Z₁ʰ + Z₂ᵗ)` at `(p, u)` from the values and the base
/// covariant derivatives `dz1 = ∇_X Z₁`, `dz2 = ∇_X Z₂`:
///
/// ```text
/// ∇̄_{Xʰ}Yʰ = (∇_X Y)ʰ − ½(R(X,Y)u)ᵗ     ∇̄_{Xʰ}Yᵗ = (∇_X Y)ᵗ + ½(R(u,Y)X)ʰ
/// ∇̄_{Xᵗ}Yʰ = ½(R(u,X)Y)ʰ                ∇̄_{Xᵗ}Yᵗ = −⟨Y,u⟩Xᵗ
/// ```
#[allow(clippy::too_many_arguments)]
pub fn lifted_derivative(
    sphere: &Sphere,
    u: &Vector,
    x: &Vector,
    v: &Vector,
    z1: &Vector,
    dz1: &Vector,
    z2: &Vector,
    dz2: &Vector,
) -> (Vector, Vector) {
    let horiz = dz1 + sphere.curvature_vec(u, z2, x) * 0.5 + sphere.curvature_vec(u, v, z1) * 0.5;
    let vert = tangential(u, dz2) - tangential(u, &sphere.curvature_vec(x, z1, u)) * 0.5
        - tangential(u, v) * z2.dot(u);
    (horiz, vert)
}

/// `∇̄_{X^τ} η^ν` for a base field `η`, where `η^ν = (A*η)ʰ + ηᵗ`.
pub fn normal_lift_derivative<E: VectorField + ?Sized>(
    field: &UnitVectorField,
    rep: &ShapeOperatorRep,
    x: &Vector,
    eta: &E,
) -> Result<BundleVector> {
    let s = field.sphere();
    let p = rep.base().coords();
    let u = rep.xi();
    let v = -rep.apply(x);
    let eta_p = eta.value(p)?;
    let z1 = rep.apply_adjoint(&eta_p);
    let dz1 = s.fd_derivative(p, x, |q| Ok(ambient_shape_matrix(field, q)?.transpose() * eta.value(q)?))?;
    let dz2 = s.covariant_derivative_vec(eta, p, x)?;
    let (h, w) = lifted_derivative(s, u, x, &v, &z1, &dz1, &eta_p, &dz2);
    Ok(BundleVector::new(rep.base().clone(), u.clone(), h, w))
}

/// The normal connection `∇̄⊥_{X^τ} Y^ν` for the Hopf field, in every form
/// that gets compared.
#[derive(Debug, Clone)]
pub struct NormalConnection {
    /// `(∇_X Y)^ν − ½⟨ξ,X⟩(A Y)^ν`
    pub nu_form: BundleVector,
    /// `−⟨ξ,X⟩Yʰ + 2(∇_X Y)ᵗ`, as written in closed form.
    pub raw_form: BundleVector,
    /// Normal component of `raw_form`.
    pub raw_normal: BundleVector,
    /// `∇̄_{X^τ} Y^ν` from the connection of the Sasaki metric.
    pub direct: BundleVector,
    pub direct_tangent: BundleVector,
    pub direct_normal: BundleVector,
}

pub fn normal_connection<E: VectorField + ?Sized>(
    field: &UnitVectorField,
    x: &TangentVector,
    y: &E,
) -> Result<NormalConnection> {
    if !field.is_hopf() || (field.sphere().radius() - 1.0).abs() > 1e-12 {
        return Err(GeometryError::Precondition(
            "normal connection closed forms need the Hopf field on a unit sphere".into(),
        ));
    }
    let s = field.sphere();
    let p = x.base();
    let rep = shape_operator_rep(field, p)?;
    let xi = rep.xi().clone();
    let yp = y.value(p.coords())?;
    let off = yp.dot(&xi);
    if off.abs() > 1e-9 {
        return Err(GeometryError::Precondition(format!("Y is not orthogonal to ξ: ⟨Y,ξ⟩ = {off:e}")));
    }
    let c = xi.dot(x.vec());
    let dy = s.covariant_derivative_vec(y, p.coords(), x.vec())?;
    let nu_form = &nu_lift(&rep, &dy) - &(&nu_lift(&rep, &rep.apply(&yp)) * (0.5 * c));
    let raw_form = BundleVector::new(p.clone(), xi.clone(), &yp * -c, tangential(&xi, &dy) * 2.0);
    let raw_normal = tangency_decomposition_with(&rep, &raw_form).normal;
    let direct = normal_lift_derivative(field, &rep, x.vec(), y)?;
    let split = tangency_decomposition_with(&rep, &direct);
    Ok(NormalConnection {
        nu_form,
        raw_form,
        raw_normal,
        direct,
        direct_tangent: split.tangent,
        direct_normal: split.normal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{complex_structure, hopf_field};
    use crate::manifold::FnField;
    use crate::rng;

    /// `q ↦ P_q w − ⟨w, ξ(q)⟩ ξ(q)`: the horizontal projection of a constant.
    fn horizontal_constant(w: Vector) -> impl Fn(&Vector) -> Result<Vector> {
        move |q: &Vector| {
            let jq = complex_structure(q);
            Ok(&w - q * w.dot(q) - &jq * w.dot(&jq))
        }
    }

    #[test]
    fn tangent_part_vanishes_for_hopf() {
        let xi = hopf_field(2, 1.0).unwrap();
        let s = *xi.sphere();
        let mut rng = rng::stream(50, 0);
        for _ in 0..5 {
            let p = s.random_point_with(&mut rng);
            let x = s.random_tangent_with(&p, &mut rng);
            let w = crate::manifold::gaussian_vector(6, &mut rng);
            let y = FnField(horizontal_constant(w));
            let nc = normal_connection(&xi, &x, &y).unwrap();
            assert!(nc.direct_tangent.norm() < 1e-4);
            // the ν-form is the true normal derivative
            assert!(nc.direct_normal.max_diff(&nc.nu_form) < 1e-4);
        }
    }

    #[test]
    fn raw_form_differs_from_the_normal_derivative_when_x_has_a_xi_part() {
        let xi = hopf_field(1, 1.0).unwrap();
        let s = *xi.sphere();
        let mut rng = rng::stream(51, 0);
        let p = s.random_point_with(&mut rng);
        let u = xi.at(&p).unwrap();
        let w = crate::manifold::gaussian_vector(4, &mut rng);
        let y = FnField(horizontal_constant(w));
        let nc = normal_connection(&xi, &u, &y).unwrap();
        // with X = ξ the raw form carries a tangent component
        assert!(nc.raw_normal.max_diff(&nc.raw_form) > 1e-3);
        assert!(nc.direct_normal.max_diff(&nc.nu_form) < 1e-4);

        let x = s.random_tangent_with(&p, &mut rng);
        let x = x.with_vec(x.vec() - u.vec() * u.vec().dot(x.vec()));
        let nc = normal_connection(&xi, &x, &y).unwrap();
        assert!(nc.raw_normal.max_diff(&nc.direct_normal) < 1e-4);
    }

    #[test]
    fn rejects_non_hopf_and_non_horizontal_input() {
        let xi = hopf_field(1, 2.0).unwrap();
        let p = xi.sphere().random_point(1);
        let x = xi.at(&p).unwrap();
        let y = FnField(|q: &Vector| Ok(complex_structure(q)));
        assert!(normal_connection(&xi, &x, &y).is_err());
        let unit = hopf_field(1, 1.0).unwrap();
        let p = unit.sphere().random_point(1);
        let x = unit.at(&p).unwrap();
        assert!(matches!(normal_connection(&unit, &x, &y), Err(GeometryError::Precondition(_))));
    }
}
