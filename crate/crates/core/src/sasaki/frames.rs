use crate::error::Result;
use crate::fields::{singular_decomposition, SingularData, UnitVectorField};
use crate::manifold::{Matrix, SpherePoint};
use crate::sasaki::bundle::BundleVector;

/// Orthonormal tangent and normal frames of `ξ(M)` at `ξ(p)`:
/// `ẽ_i = (e_iʰ − λ_i f_iᵗ)/√(1+λ_i²)` and `ñ_σ = (λ_σ e_σʰ + f_σᵗ)/√(1+λ_σ²)`.
#[derive(Debug, Clone)]
pub struct SubmanifoldFrames {
    tangent: Vec<BundleVector>,
    normal: Vec<BundleVector>,
    singular: SingularData,
}

impl SubmanifoldFrames {
    pub fn from_singular(singular: SingularData) -> Self {
        let base = singular.base().clone();
        let u = singular.f(0).clone();
        let k = singular.lambdas().len();
        let mut tangent = Vec::with_capacity(k);
        let mut normal = Vec::with_capacity(k - 1);
        for i in 0..k {
            let l = singular.lambdas()[i];
            let c = (1.0 + l * l).sqrt();
            let (e, f) = (singular.e(i), singular.f(i));
            let ft = f - &u * u.dot(f);
            tangent.push(BundleVector::new(base.clone(), u.clone(), e / c, &ft * (-l / c)));
            if i > 0 {
                normal.push(BundleVector::new(base.clone(), u.clone(), e * (l / c), ft / c));
            }
        }
        SubmanifoldFrames { tangent, normal, singular }
    }

    pub fn at(field: &UnitVectorField, p: &SpherePoint) -> Result<Self> {
        Ok(SubmanifoldFrames::from_singular(singular_decomposition(field, p)?))
    }

    /// `ẽ_0 … ẽ_n`.
    pub fn tangent(&self) -> &[BundleVector] {
        &self.tangent
    }

    /// `ñ_1 … ñ_n`, stored from index 0.
    pub fn normal(&self) -> &[BundleVector] {
        &self.normal
    }

    pub fn singular(&self) -> &SingularData {
        &self.singular
    }

    pub fn lambdas(&self) -> &[f64] {
        self.singular.lambdas()
    }

    /// Normal component, expanded in the normal frame.
    pub fn normal_part(&self, v: &BundleVector) -> BundleVector {
        let mut out = v.zero_like();
        for n in &self.normal {
            out = &out + &(n * v.dot(n));
        }
        out
    }

    /// Coordinates `⟨⟨v, ñ_σ⟩⟩`.
    pub fn normal_coords(&self, v: &BundleVector) -> Vec<f64> {
        self.normal.iter().map(|n| v.dot(n)).collect()
    }

    /// Largest deviation of the joint Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let all: Vec<&BundleVector> = self.tangent.iter().chain(&self.normal).collect();
        let k = all.len();
        let g = Matrix::from_fn(k, k, |i, j| all[i].dot(all[j]));
        (g - Matrix::identity(k, k)).amax()
    }
}
