//! Pointwise structural predicates of a unit vector field.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::fields::curvature::{half_curvature, random_horizontal};
use crate::fields::shape::shape_operator_rep;
use crate::fields::UnitVectorField;
use crate::manifold::{SpherePoint, VectorField, TOL_ANALYTIC, TOL_FD};
use crate::rng;

/// Random frame triples sampled per point by the sampled predicates.
pub const DEFAULT_SAMPLES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl PredicateResult {
    fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        PredicateResult { name: name.into(), residual, tolerance, holds: residual <= tolerance }
    }
}

/// Tolerance for a quantity computed from `field`: analytic when it needs
/// only first derivatives of a field with a known Jacobian.
pub fn default_tolerance(field: &UnitVectorField, second_order: bool) -> f64 {
    if field.uses_jacobian() && !second_order {
        TOL_ANALYTIC
    } else {
        TOL_FD
    }
}

/// `|A_ξ ξ|`.
pub fn is_geodesic(field: &UnitVectorField, p: &SpherePoint, tol: Option<f64>) -> Result<PredicateResult> {
    let xi = field.at(p)?;
    let d = field.sphere().covariant_derivative(field, &xi)?;
    Ok(PredicateResult::new("geodesic", d.norm(), tol.unwrap_or(default_tolerance(field, false))))
}

/// Spectral norm of `A_ξ + A_ξ*`.
pub fn is_killing(field: &UnitVectorField, p: &SpherePoint, tol: Option<f64>) -> Result<PredicateResult> {
    let rep = shape_operator_rep(field, p)?;
    Ok(PredicateResult::new("killing", rep.skew_defect(), tol.unwrap_or(default_tolerance(field, false))))
}

/// Largest `|⟨R(X,Y)Z, ξ⟩|` over sampled unit `X, Y, Z ⊥ ξ`.
pub fn is_normal(
    field: &UnitVectorField,
    p: &SpherePoint,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<PredicateResult> {
    let s = field.sphere();
    let xi = field.value(p.coords())?;
    let mut rng = rng::stream(seed, 10);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_horizontal(field, p, &xi, &mut rng);
        let y = random_horizontal(field, p, &xi, &mut rng);
        let z = random_horizontal(field, p, &xi, &mut rng);
        worst = worst.max(s.curvature_vec(x.vec(), y.vec(), z.vec()).dot(&xi).abs());
    }
    Ok(PredicateResult::new("normal", worst, tol.unwrap_or(TOL_ANALYTIC)))
}

/// Largest `|⟨(∇_X A)Y, Z⟩| = |⟨r(X,Y)ξ, Z⟩|` over sampled unit `X, Y, Z ⊥ ξ`.
pub fn is_strongly_normal(
    field: &UnitVectorField,
    p: &SpherePoint,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<PredicateResult> {
    let xi = field.value(p.coords())?;
    let mut rng = rng::stream(seed, 11);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_horizontal(field, p, &xi, &mut rng);
        let y = random_horizontal(field, p, &xi, &mut rng);
        let z = random_horizontal(field, p, &xi, &mut rng);
        let r = half_curvature(field, &x, &y)?;
        worst = worst.max(r.vec().dot(z.vec()).abs());
    }
    Ok(PredicateResult::new("strongly-normal", worst, tol.unwrap_or(TOL_FD)))
}

/// Residuals of the Sasakian structure identities with `φ = ∇ξ = −A_ξ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SasakianResidual {
    /// `‖φ²X + X − ⟨X,ξ⟩ξ‖`
    pub structure: f64,
    /// `‖(∇_X φ)Y − (⟨ξ,Y⟩X − ⟨X,Y⟩ξ)‖`
    pub derivative: f64,
    /// `‖R(X,Y)ξ − (⟨ξ,Y⟩X − ⟨ξ,X⟩Y)‖`
    pub curvature: f64,
    pub result: PredicateResult,
}

pub fn sasakian_identity_residual(
    field: &UnitVectorField,
    p: &SpherePoint,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<SasakianResidual> {
    let s = field.sphere();
    let xi = field.value(p.coords())?;
    let rep = shape_operator_rep(field, p)?;
    let mut rng = rng::stream(seed, 12);
    let (mut st, mut de, mut cu) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let x = s.random_unit_tangent_with(p, &mut rng);
        let y = s.random_unit_tangent_with(p, &mut rng);
        let (xv, yv) = (x.vec(), y.vec());
        // φ² = A²
        let phi2 = rep.apply(&rep.apply(xv));
        st = st.max((phi2 + xv - &xi * xi.dot(xv)).norm());
        // (∇_X φ)Y = −(∇_X A)Y = r(X,Y)ξ
        let dphi = half_curvature(field, &x, &y)?;
        let want = xv * xi.dot(yv) - &xi * xv.dot(yv);
        de = de.max((dphi.vec() - want).norm());
        let rxy = s.curvature_vec(xv, yv, &xi);
        let want = xv * xi.dot(yv) - yv * xi.dot(xv);
        cu = cu.max((rxy - want).norm());
    }
    let worst = st.max(de).max(cu);
    Ok(SasakianResidual {
        structure: st,
        derivative: de,
        curvature: cu,
        result: PredicateResult::new("sasakian", worst, tol.unwrap_or(TOL_FD)),
    })
}

/// Largest `‖A*A X − R(X,ξ)ξ‖` over the tangent basis. Requires a Killing field.
pub fn jacobi_relation_residual(field: &UnitVectorField, p: &SpherePoint) -> Result<f64> {
    let s = field.sphere();
    let rep = shape_operator_rep(field, p)?;
    let tol = if field.uses_jacobian() { 1e-8 } else { TOL_FD };
    let defect = rep.skew_defect();
    if defect > tol {
        return Err(GeometryError::Precondition(format!(
            "Jacobi relation needs a Killing field, |A + A*| = {defect:e}"
        )));
    }
    let xi = rep.xi().clone();
    let mut worst: f64 = 0.0;
    for x in rep.frame().vectors() {
        let lhs = rep.apply_adjoint(&rep.apply(x.vec()));
        let rhs = s.curvature_vec(x.vec(), &xi, &xi);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{hopf_field, meridian_field};
    use crate::manifold::{Sphere, Vector};
    use approx::assert_abs_diff_eq;

    #[test]
    fn hopf_on_unit_spheres_satisfies_everything() {
        for m in 1..=3 {
            let xi = hopf_field(m, 1.0).unwrap();
            let p = xi.sphere().random_point(m as u64);
            assert!(is_geodesic(&xi, &p, None).unwrap().residual < 1e-6);
            assert!(is_killing(&xi, &p, None).unwrap().residual < 1e-6);
            assert!(is_normal(&xi, &p, 32, 1, None).unwrap().residual < 1e-6);
            assert!(is_strongly_normal(&xi, &p, 32, 1, None).unwrap().residual < 1e-6);
            assert!(sasakian_identity_residual(&xi, &p, 32, 1, None).unwrap().result.residual < 1e-6);
            assert!(jacobi_relation_residual(&xi, &p).unwrap() < 1e-10);
        }
    }

    #[test]
    fn hopf_on_radius_two_is_killing_but_not_sasakian() {
        let xi = hopf_field(1, 2.0).unwrap();
        let p = xi.sphere().random_point(4);
        assert!(is_killing(&xi, &p, None).unwrap().holds);
        let sas = sasakian_identity_residual(&xi, &p, 32, 1, None).unwrap();
        assert!(sas.result.residual > 0.1);
        assert!(!sas.result.holds);
        assert!(jacobi_relation_residual(&xi, &p).unwrap() < 1e-10);
    }

    #[test]
    fn meridian_is_geodesic_not_killing() {
        let s = Sphere::unit(4).unwrap();
        let axis = Vector::from_row_slice(&[0.0, 0.0, 0.0, 1.0]);
        let mer = meridian_field(s, axis).unwrap();
        let theta: f64 = 1.0;
        let p = s.point(Vector::from_row_slice(&[theta.sin(), 0.0, 0.0, theta.cos()])).unwrap();
        assert!(is_geodesic(&mer, &p, None).unwrap().holds);
        let k = is_killing(&mer, &p, None).unwrap();
        assert!(!k.holds);
        assert_abs_diff_eq!(k.residual, 2.0 / theta.tan(), epsilon = 1e-9);
        assert!(matches!(jacobi_relation_residual(&mer, &p), Err(GeometryError::Precondition(_))));
    }
}
