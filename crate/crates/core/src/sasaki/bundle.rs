//! Vectors tangent to the unit tangent bundle, the Sasaki inner product and
//! the lifts of base vectors.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{GeometryError, Result};
use crate::fields::{ShapeOperatorRep, UnitVectorField};
use crate::fields::shape::shape_operator_rep;
use crate::manifold::{Matrix, SpherePoint, TangentVector, Vector};

const ANCHOR_TOL: f64 = 1e-9;

/// A tangent vector to `TM` at `(p, u)`, split into horizontal and vertical
/// parts.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleVector {
    base: SpherePoint,
    anchor: Vector,
    horiz: Vector,
    vert: Vector,
}

impl BundleVector {
    /// The caller vouches that `anchor`, `horiz` and `vert` are tangent at `base`.
    pub fn new(base: SpherePoint, anchor: Vector, horiz: Vector, vert: Vector) -> Self {
        BundleVector { base, anchor, horiz, vert }
    }

    pub fn from_parts(anchor: &TangentVector, horiz: &TangentVector, vert: &TangentVector) -> Self {
        BundleVector {
            base: anchor.base().clone(),
            anchor: anchor.vec().clone(),
            horiz: horiz.vec().clone(),
            vert: vert.vec().clone(),
        }
    }

    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    pub fn horiz(&self) -> &Vector {
        &self.horiz
    }

    pub fn vert(&self) -> &Vector {
        &self.vert
    }

    pub fn zero_like(&self) -> Self {
        let z = Vector::zeros(self.horiz.len());
        BundleVector::new(self.base.clone(), self.anchor.clone(), z.clone(), z)
    }

    /// Sasaki norm.
    pub fn norm(&self) -> f64 {
        (self.horiz.norm_squared() + self.vert.norm_squared()).sqrt()
    }

    /// `|⟨vert, anchor⟩|`, zero for vectors tangent to `T₁M`.
    pub fn vertical_defect(&self) -> f64 {
        self.vert.dot(&self.anchor).abs()
    }

    /// Inner product without the anchor check.
    pub(crate) fn dot(&self, other: &BundleVector) -> f64 {
        self.horiz.dot(&other.horiz) + self.vert.dot(&other.vert)
    }

    pub(crate) fn with_parts(&self, horiz: Vector, vert: Vector) -> Self {
        BundleVector::new(self.base.clone(), self.anchor.clone(), horiz, vert)
    }

    /// Largest difference of the components.
    pub fn max_diff(&self, other: &BundleVector) -> f64 {
        (&self.horiz - &other.horiz).amax().max((&self.vert - &other.vert).amax())
    }
}

impl Add for &BundleVector {
    type Output = BundleVector;
    fn add(self, rhs: &BundleVector) -> BundleVector {
        self.with_parts(&self.horiz + &rhs.horiz, &self.vert + &rhs.vert)
    }
}

impl Sub for &BundleVector {
    type Output = BundleVector;
    fn sub(self, rhs: &BundleVector) -> BundleVector {
        self.with_parts(&self.horiz - &rhs.horiz, &self.vert - &rhs.vert)
    }
}

impl Mul<f64> for &BundleVector {
    type Output = BundleVector;
    fn mul(self, s: f64) -> BundleVector {
        self.with_parts(&self.horiz * s, &self.vert * s)
    }
}

impl Neg for &BundleVector {
    type Output = BundleVector;
    fn neg(self) -> BundleVector {
        self * -1.0
    }
}

/// `⟨⟨X̃,Ỹ⟩⟩ = ⟨π*X̃, π*Ỹ⟩ + ⟨KX̃, KỸ⟩`.
pub fn sasaki_inner(a: &BundleVector, b: &BundleVector) -> Result<f64> {
    let d = (&a.anchor - &b.anchor).norm() + (a.base.coords() - b.base.coords()).norm();
    if d > ANCHOR_TOL {
        return Err(GeometryError::BasePointMismatch(d));
    }
    Ok(a.dot(b))
}

fn tangential(u: &Vector, x: &Vector) -> Vector {
    x - u * u.dot(x)
}

/// `Xʰ` at `(p, u)`.
pub fn horizontal_lift(u: &TangentVector, x: &TangentVector) -> BundleVector {
    let z = Vector::zeros(x.vec().len());
    BundleVector::new(u.base().clone(), u.vec().clone(), x.vec().clone(), z)
}

/// `Xᵛ` at `(p, u)`.
pub fn vertical_lift(u: &TangentVector, x: &TangentVector) -> BundleVector {
    let z = Vector::zeros(x.vec().len());
    BundleVector::new(u.base().clone(), u.vec().clone(), z, x.vec().clone())
}

/// `Xᵗ = Xᵛ − ⟨X,u⟩uᵛ`, tangent to `T₁M`.
pub fn tangential_lift(u: &TangentVector, x: &TangentVector) -> BundleVector {
    let z = Vector::zeros(x.vec().len());
    BundleVector::new(u.base().clone(), u.vec().clone(), z, tangential(u.vec(), x.vec()))
}

/// `X^τ = Xʰ − (A X)ᵗ` from a precomputed shape operator.
pub fn tau_lift(rep: &ShapeOperatorRep, x: &Vector) -> BundleVector {
    let u = rep.xi();
    let ax = rep.apply(x);
    BundleVector::new(rep.base().clone(), u.clone(), x.clone(), -tangential(u, &ax))
}

/// `Y^ν = (A* Y)ʰ + Yᵗ` from a precomputed shape operator.
pub fn nu_lift(rep: &ShapeOperatorRep, y: &Vector) -> BundleVector {
    let u = rep.xi();
    BundleVector::new(rep.base().clone(), u.clone(), rep.apply_adjoint(y), tangential(u, y))
}

/// ξ-tangential lift `X^τ_ξ`; spans the tangent space of `ξ(M)`.
pub fn xi_tangential_lift(field: &UnitVectorField, x: &TangentVector) -> Result<BundleVector> {
    let rep = shape_operator_rep(field, x.base())?;
    Ok(tau_lift(&rep, x.vec()))
}

/// ξ-normal lift `Y^ν_ξ`; spans the normal space of `ξ(M)`.
pub fn xi_normal_lift(field: &UnitVectorField, y: &TangentVector) -> Result<BundleVector> {
    let rep = shape_operator_rep(field, y.base())?;
    Ok(nu_lift(&rep, y.vec()))
}

/// Orthogonal split of a vector tangent to `T₁M` into its parts tangent and
/// normal to `ξ(M)`.
#[derive(Debug, Clone)]
pub struct TangencySplit {
    /// `X` with `tangent = X^τ_ξ`.
    pub base_vector: Vector,
    pub tangent: BundleVector,
    pub normal: BundleVector,
}

pub fn tangency_decomposition_with(rep: &ShapeOperatorRep, v: &BundleVector) -> TangencySplit {
    // minimize |h − X|² + |v + A X|²  ⇒  (I + A*A) X = h − A* v
    let b = rep.frame_matrix();
    let m = rep.matrix_in_frame();
    let k = m.ncols();
    let lhs = Matrix::identity(k, k) + m.transpose() * m;
    let rhs = b.transpose() * (v.horiz() - rep.apply_adjoint(v.vert()));
    let coeffs = lhs
        .cholesky()
        .expect("I + A*A is positive definite")
        .solve(&rhs);
    let x = b * coeffs;
    let tangent = tau_lift(rep, &x);
    let tangent = v.with_parts(tangent.horiz, tangent.vert);
    let normal = v - &tangent;
    TangencySplit { base_vector: x, tangent, normal }
}

pub fn tangency_decomposition(field: &UnitVectorField, v: &BundleVector) -> Result<TangencySplit> {
    let rep = shape_operator_rep(field, v.base())?;
    Ok(tangency_decomposition_with(&rep, v))
}
