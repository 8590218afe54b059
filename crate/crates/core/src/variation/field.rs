use std::sync::Arc;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GeometryError, Result};
use crate::fields::shape::shape_operator_rep;
use crate::fields::{complex_structure, complex_structure_matrix, FieldDescriptor, UnitVectorField};
use crate::manifold::{Matrix, SpherePoint, TangentVector, Vector, VectorField};
use crate::rng::{self, Rng};
use crate::sasaki::bundle::{nu_lift, BundleVector};

/// A variation field `η ⊥ ξ` of the submanifold `ξ(M)`, together with the
/// normal field `η̃ = η^ν_ξ` it induces.
#[derive(Clone)]
pub struct VariationField {
    xi: UnitVectorField,
    eta: Arc<dyn VectorField + Send + Sync>,
    descriptor: FieldDescriptor,
}

impl std::fmt::Debug for VariationField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VariationField")
            .field("xi", self.xi.descriptor())
            .field("eta", &self.descriptor)
            .finish()
    }
}

impl VariationField {
    pub fn new(xi: UnitVectorField, eta: Arc<dyn VectorField + Send + Sync>, descriptor: FieldDescriptor) -> Self {
        VariationField { xi, eta, descriptor }
    }

    pub fn xi(&self) -> &UnitVectorField {
        &self.xi
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.descriptor
    }

    pub fn eta(&self, p: &SpherePoint) -> Result<TangentVector> {
        self.xi.sphere().tangent(p, self.eta.value(p.coords())?)
    }

    /// `η̃ = (A*η)ʰ + ηᵗ` at `ξ(p)`.
    pub fn eta_tilde(&self, p: &SpherePoint) -> Result<BundleVector> {
        let rep = shape_operator_rep(&self.xi, p)?;
        Ok(nu_lift(&rep, &self.eta.value(p.coords())?))
    }

    /// `ζ = A η`.
    pub fn zeta(&self, p: &SpherePoint) -> Result<TangentVector> {
        let rep = shape_operator_rep(&self.xi, p)?;
        let eta = self.eta.value(p.coords())?;
        self.xi.sphere().tangent(p, rep.apply(&eta))
    }

    /// `|⟨η, ξ⟩|`.
    pub fn orthogonality_defect(&self, p: &SpherePoint) -> Result<f64> {
        Ok(self.eta.value(p.coords())?.dot(self.xi.at(p)?.vec()).abs())
    }
}

impl VectorField for VariationField {
    fn value(&self, x: &Vector) -> Result<Vector> {
        self.eta.value(x)
    }
    fn jacobian(&self, x: &Vector) -> Option<Result<Matrix>> {
        self.eta.jacobian(x)
    }
}

fn require_unit_hopf(xi: &UnitVectorField) -> Result<()> {
    if !xi.is_hopf() || (xi.sphere().radius() - 1.0).abs() > 1e-12 {
        return Err(GeometryError::Precondition("needs the Hopf field on a unit sphere".into()));
    }
    Ok(())
}

/// `J₂` and `J₃ = J₁J₂` on `R⁴`; with `J₁ = J` they act as the unit
/// quaternions `i, j, k`.
pub fn quaternion_structures() -> [Matrix; 3] {
    let j1 = complex_structure_matrix(4);
    // (x1, y1, x2, y2) -> (-x2, y2, x1, -y1)
    #[rustfmt::skip]
    let j2 = Matrix::from_row_slice(4, 4, &[
        0.0, 0.0, -1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, -1.0, 0.0, 0.0,
    ]);
    let j3 = &j1 * &j2;
    [j1, j2, j3]
}

/// `w − ⟨w,x⟩x − ⟨w,Jx⟩Jx` on the unit sphere.
pub(crate) fn horizontal_project(x: &Vector, w: &Vector) -> Vector {
    let jx = complex_structure(x);
    w - x * w.dot(x) - &jx * w.dot(&jx)
}

/// Horizontal projection of a constant vector `v`.
#[derive(Debug, Clone)]
pub struct HorizontalConstant {
    v: Vector,
    j: Matrix,
}

impl HorizontalConstant {
    pub fn new(v: Vector) -> Self {
        let j = complex_structure_matrix(v.len());
        HorizontalConstant { v, j }
    }
}

impl VectorField for HorizontalConstant {
    fn value(&self, x: &Vector) -> Result<Vector> {
        Ok(horizontal_project(x, &self.v))
    }

    fn jacobian(&self, x: &Vector) -> Option<Result<Matrix>> {
        let d = x.len();
        let v = &self.v;
        let jx = &self.j * x;
        let jtv = self.j.transpose() * v;
        let id = Matrix::identity(d, d);
        let m = -(x * v.transpose() + id * v.dot(x)) - (&jx * jtv.transpose() + &self.j * v.dot(&jx));
        Some(Ok(m))
    }
}

/// `c₀ + Σ c_k sin(⟨w_k, x⟩ + φ_k)` on the ambient space.
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    constant: f64,
    terms: Vec<(f64, Vector, f64)>,
}

impl TrigPolynomial {
    pub fn random(dim: usize, terms: usize, rng: &mut Rng) -> Self {
        let constant: f64 = StandardNormal.sample(rng);
        let terms = (1..=terms)
            .map(|k| {
                let c: f64 = StandardNormal.sample(rng);
                let w = Vector::from_fn(dim, |_, _| { let z: f64 = StandardNormal.sample(rng); 2.0 * z });
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                (c / k as f64, w, phase)
            })
            .collect();
        TrigPolynomial { constant, terms }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.constant + self.terms.iter().map(|(c, w, ph)| c * (w.dot(x) + ph).sin()).sum::<f64>()
    }

    /// Ambient gradient.
    pub fn gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(x.len());
        for (c, w, ph) in &self.terms {
            g += w * (c * (w.dot(x) + ph).cos());
        }
        g
    }
}

/// `η = a(x)J₂x + b(x)J₃x` on `S³`.
#[derive(Debug, Clone)]
pub struct HopfFrameCombination {
    a: TrigPolynomial,
    b: TrigPolynomial,
    j2: Matrix,
    j3: Matrix,
}

impl HopfFrameCombination {
    pub fn new(a: TrigPolynomial, b: TrigPolynomial) -> Self {
        let [_, j2, j3] = quaternion_structures();
        HopfFrameCombination { a, b, j2, j3 }
    }

    /// `(η¹, η²) = (a(x), b(x))`.
    pub fn coefficients(&self, x: &Vector) -> (f64, f64) {
        (self.a.value(x), self.b.value(x))
    }
}

impl VectorField for HopfFrameCombination {
    fn value(&self, x: &Vector) -> Result<Vector> {
        Ok(&self.j2 * x * self.a.value(x) + &self.j3 * x * self.b.value(x))
    }

    fn jacobian(&self, x: &Vector) -> Option<Result<Matrix>> {
        let m = &self.j2 * x * self.a.gradient(x).transpose()
            + &self.j2 * self.a.value(x)
            + &self.j3 * x * self.b.gradient(x).transpose()
            + &self.j3 * self.b.value(x);
        Some(Ok(m))
    }
}

/// Random smooth combination of the two Hopf fields orthogonal to `ξ` on
/// the unit `S³`. `terms = 0` gives constant coefficients.
pub fn stable_s3_field(seed: u64, terms: usize) -> Result<VariationField> {
    let xi = crate::fields::hopf_field(1, 1.0)?;
    let mut rng = rng::stream(seed, 0);
    let a = TrigPolynomial::random(4, terms, &mut rng);
    let b = TrigPolynomial::random(4, terms, &mut rng);
    let mut params = std::collections::BTreeMap::new();
    params.insert("seed".into(), seed as f64);
    params.insert("terms".into(), terms as f64);
    let descriptor = FieldDescriptor { name: "hopf-frame-combination".into(), params };
    Ok(VariationField::new(xi, Arc::new(HopfFrameCombination::new(a, b)), descriptor))
}

/// `q ↦ v − ⟨v,q⟩q − ⟨v,Jq⟩Jq` as a variation of the Hopf field.
pub fn horizontal_constant_field(xi: &UnitVectorField, v: Vector) -> Result<VariationField> {
    require_unit_hopf(xi)?;
    if v.len() != xi.sphere().ambient_dim() {
        return Err(GeometryError::DimensionMismatch { expected: xi.sphere().ambient_dim(), got: v.len() });
    }
    let descriptor = FieldDescriptor { name: "horizontal-constant".into(), params: Default::default() };
    Ok(VariationField::new(xi.clone(), Arc::new(HorizontalConstant::new(v)), descriptor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Sphere;

    #[test]
    fn quaternion_relations() {
        let [j1, j2, j3] = quaternion_structures();
        let id = Matrix::identity(4, 4);
        for j in [&j1, &j2, &j3] {
            assert!((j * j + &id).amax() < 1e-15);
            assert!((j + j.transpose()).amax() < 1e-15);
        }
        assert!((&j1 * &j2 + &j2 * &j1).amax() < 1e-15);
        assert!((&j2 * &j3 - &j1).amax() < 1e-15);
    }

    #[test]
    fn analytic_jacobians_match_differences() {
        let s = Sphere::unit(6).unwrap();
        let mut rng = rng::stream(90, 0);
        let p = s.random_point_with(&mut rng);
        let v = crate::manifold::gaussian_vector(6, &mut rng);
        let h = HorizontalConstant::new(v);
        let fd = crate::manifold::FnField(|q: &Vector| h.value(q));
        for _ in 0..5 {
            let x = s.random_tangent_with(&p, &mut rng);
            let a = s.covariant_derivative(&h, &x).unwrap();
            let b = s.covariant_derivative(&fd, &x).unwrap();
            assert!((a.vec() - b.vec()).amax() < 1e-8);
        }

        let eta = stable_s3_field(91, 3).unwrap();
        let s3 = *eta.xi().sphere();
        let fd = crate::manifold::FnField(|q: &Vector| eta.value(q));
        for _ in 0..5 {
            let p = s3.random_point_with(&mut rng);
            assert!(eta.orthogonality_defect(&p).unwrap() < 1e-12);
            let x = s3.random_tangent_with(&p, &mut rng);
            let a = s3.covariant_derivative(&eta, &x).unwrap();
            let b = s3.covariant_derivative(&fd, &x).unwrap();
            assert!((a.vec() - b.vec()).amax() < 1e-7);
        }
    }
}
