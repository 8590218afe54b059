//! Round spheres `S^{n+1}(r)` embedded in `R^{n+2}`.
//!
//! Points and tangent vectors are ambient coordinate vectors. The Levi-Civita
//! connection is the tangential projection of the ambient derivative, and the
//! curvature tensor is the constant-curvature closed form with
//! `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z`.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{GeometryError, Result};
use crate::rng::{self, Rng};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Central-difference step, relative to the radius.
pub const FD_STEP: f64 = 1e-5;
/// Tolerance for quantities that pass through finite differences.
pub const TOL_FD: f64 = 1e-4;
/// Tolerance for closed-form quantities.
pub const TOL_ANALYTIC: f64 = 1e-9;
/// Gram determinants below this are treated as degenerate planes.
pub const DEGENERATE_PLANE: f64 = 1e-14;
/// Pivot threshold for Gram-Schmidt.
pub const GS_PIVOT: f64 = 1e-10;

const POINT_TOL: f64 = 1e-12;
const BASE_TOL: f64 = 1e-9;
const UNIT_TOL: f64 = 1e-9;

/// A vector field on (a neighbourhood of) the sphere, given in ambient
/// coordinates.
pub trait VectorField {
    fn value(&self, x: &Vector) -> Result<Vector>;

    /// Ambient Jacobian of [`VectorField::value`], when known in closed form.
    fn jacobian(&self, _x: &Vector) -> Option<Result<Matrix>> {
        None
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn value(&self, x: &Vector) -> Result<Vector> {
        (**self).value(x)
    }
    fn jacobian(&self, x: &Vector) -> Option<Result<Matrix>> {
        (**self).jacobian(x)
    }
}

/// Adapter turning a closure into a [`VectorField`] without a Jacobian.
pub struct FnField<F>(pub F);

impl<F> VectorField for FnField<F>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    fn value(&self, x: &Vector) -> Result<Vector> {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    ambient_dim: usize,
    radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: SpherePoint,
    vec: Vector,
}

/// Ordered orthonormal family of tangent vectors at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    base: SpherePoint,
    vectors: Vec<TangentVector>,
}

impl SpherePoint {
    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    pub fn into_coords(self) -> Vector {
        self.coords
    }
}

impl TangentVector {
    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn vec(&self) -> &Vector {
        &self.vec
    }

    pub fn into_vec(self) -> Vector {
        self.vec
    }

    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }

    pub fn scaled(&self, s: f64) -> TangentVector {
        TangentVector { base: self.base.clone(), vec: &self.vec * s }
    }

    /// Same base point, new vector part. The caller vouches for tangency.
    pub(crate) fn with_vec(&self, vec: Vector) -> TangentVector {
        TangentVector { base: self.base.clone(), vec }
    }
}

impl Frame {
    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn vectors(&self) -> &[TangentVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Ambient matrix with the frame vectors as columns.
    pub fn as_matrix(&self) -> Matrix {
        let cols: Vec<Vector> = self.vectors.iter().map(|v| v.vec.clone()).collect();
        Matrix::from_columns(&cols)
    }

    /// Frame from ambient vectors already known to be orthonormal and tangent.
    pub(crate) fn from_raw(base: &SpherePoint, vecs: Vec<Vector>) -> Frame {
        Frame {
            base: base.clone(),
            vectors: vecs.into_iter().map(|v| TangentVector { base: base.clone(), vec: v }).collect(),
        }
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let b = self.as_matrix();
        let g = b.transpose() * &b - Matrix::identity(self.len(), self.len());
        g.amax()
    }
}

impl Sphere {
    pub fn new(ambient_dim: usize, radius: f64) -> Result<Self> {
        if ambient_dim < 3 {
            return Err(GeometryError::InvalidSphere(format!(
                "ambient dimension must be at least 3, got {ambient_dim}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::InvalidSphere(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(Sphere { ambient_dim, radius })
    }

    /// `S^{n+1}(1)` in `R^{ambient_dim}`.
    pub fn unit(ambient_dim: usize) -> Result<Self> {
        Sphere::new(ambient_dim, 1.0)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Intrinsic dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.ambient_dim - 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Constant sectional curvature `1/r²`.
    pub fn curvature_constant(&self) -> f64 {
        1.0 / (self.radius * self.radius)
    }

    fn check_len(&self, v: &Vector) -> Result<()> {
        if v.len() != self.ambient_dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.ambient_dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Validate `coords` as a point of the sphere.
    pub fn point(&self, coords: Vector) -> Result<SpherePoint> {
        self.check_len(&coords)?;
        let norm = coords.norm();
        if (norm - self.radius).abs() > POINT_TOL * self.radius.max(1.0) * 10.0 {
            return Err(GeometryError::NotOnSphere { norm, radius: self.radius });
        }
        Ok(SpherePoint { coords })
    }

    /// Radial projection of a nonzero ambient vector onto the sphere.
    pub fn normalize_point(&self, coords: Vector) -> Result<SpherePoint> {
        self.check_len(&coords)?;
        let norm = coords.norm();
        if norm < 1e-300 {
            return Err(GeometryError::DegenerateInput("cannot project the origin".into()));
        }
        Ok(SpherePoint { coords: coords * (self.radius / norm) })
    }

    /// Validate `v` as a tangent vector at `p`.
    pub fn tangent(&self, p: &SpherePoint, v: Vector) -> Result<TangentVector> {
        self.check_len(&v)?;
        let dot = v.dot(&p.coords);
        if dot.abs() > POINT_TOL * self.radius * v.norm().max(1.0) * 10.0 {
            return Err(GeometryError::NotTangent(dot));
        }
        Ok(TangentVector { base: p.clone(), vec: v })
    }

    /// `v − (⟨v,p⟩/r²) p`, attached at `p`.
    pub fn project_to_tangent(&self, p: &SpherePoint, v: &Vector) -> TangentVector {
        TangentVector { base: p.clone(), vec: self.project_vec(&p.coords, v) }
    }

    pub(crate) fn project_vec(&self, p: &Vector, v: &Vector) -> Vector {
        let r2 = self.radius * self.radius;
        v - p * (v.dot(p) / r2)
    }

    fn same_base(&self, a: &TangentVector, b: &TangentVector) -> Result<()> {
        let d = (&a.base.coords - &b.base.coords).norm();
        if d > BASE_TOL * self.radius.max(1.0) {
            return Err(GeometryError::BasePointMismatch(d));
        }
        Ok(())
    }

    pub fn metric(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        self.same_base(x, y)?;
        Ok(x.vec.dot(&y.vec))
    }

    /// `∇_X W`: analytic Jacobian when the field supplies one, otherwise a
    /// central difference along the geodesic through `X.base` in direction `X`.
    pub fn covariant_derivative<W: VectorField + ?Sized>(
        &self,
        w: &W,
        x: &TangentVector,
    ) -> Result<TangentVector> {
        let v = self.covariant_derivative_vec(w, &x.base.coords, &x.vec)?;
        Ok(x.with_vec(v))
    }

    pub(crate) fn covariant_derivative_vec<W: VectorField + ?Sized>(
        &self,
        w: &W,
        p: &Vector,
        x: &Vector,
    ) -> Result<Vector> {
        match w.jacobian(p) {
            Some(jac) => Ok(self.project_vec(p, &(jac? * x))),
            None => self.fd_derivative(p, x, |q| w.value(q)),
        }
    }

    /// Covariant derivative along `X` of a vector-valued function on the
    /// sphere, always by central differences.
    pub fn covariant_derivative_fd<F>(&self, x: &TangentVector, f: F) -> Result<TangentVector>
    where
        F: Fn(&SpherePoint) -> Result<Vector>,
    {
        let v = self.fd_derivative(&x.base.coords, &x.vec, |q| f(&SpherePoint { coords: q.clone() }))?;
        Ok(x.with_vec(v))
    }

    /// Ambient directional derivative of `f` along the geodesic, projected.
    pub(crate) fn fd_derivative<F>(&self, p: &Vector, x: &Vector, f: F) -> Result<Vector>
    where
        F: Fn(&Vector) -> Result<Vector>,
    {
        let raw = self.fd_directional(p, x, f)?;
        Ok(self.project_vec(p, &raw))
    }

    /// Unprojected `d/dt f(γ(t))` at `t = 0` for the geodesic with `γ'(0) = x`.
    pub(crate) fn fd_directional<F>(&self, p: &Vector, x: &Vector, f: F) -> Result<Vector>
    where
        F: Fn(&Vector) -> Result<Vector>,
    {
        let speed = x.norm();
        if speed == 0.0 {
            return Ok(Vector::zeros(self.ambient_dim));
        }
        let u = x / speed;
        let h = FD_STEP * self.radius;
        let fwd = f(&self.geodesic_vec(p, &u, h))?;
        let bwd = f(&self.geodesic_vec(p, &u, -h))?;
        Ok((fwd - bwd) * (speed / (2.0 * h)))
    }

    pub(crate) fn geodesic_vec(&self, p: &Vector, u: &Vector, t: f64) -> Vector {
        let r = self.radius;
        let q = p * (t / r).cos() + u * (r * (t / r).sin());
        // renormalize so repeated stepping never drifts off the sphere
        let n = q.norm();
        q * (r / n)
    }

    /// `(1/r²)(⟨Y,Z⟩X − ⟨X,Z⟩Y)`.
    pub fn curvature(
        &self,
        x: &TangentVector,
        y: &TangentVector,
        z: &TangentVector,
    ) -> Result<TangentVector> {
        self.same_base(x, y)?;
        self.same_base(x, z)?;
        Ok(x.with_vec(self.curvature_vec(&x.vec, &y.vec, &z.vec)))
    }

    pub(crate) fn curvature_vec(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        (x * y.dot(z) - y * x.dot(z)) * self.curvature_constant()
    }

    pub fn sectional_curvature(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        self.same_base(x, y)?;
        let gram = x.vec.norm_squared() * y.vec.norm_squared() - x.vec.dot(&y.vec).powi(2);
        if gram < DEGENERATE_PLANE {
            return Err(GeometryError::DegeneratePlane(gram));
        }
        let ryy = self.curvature_vec(&x.vec, &y.vec, &y.vec);
        Ok(ryy.dot(&x.vec) / gram)
    }

    /// Arc-length geodesic `cos(t/r) p + r sin(t/r) v`.
    pub fn geodesic_point(&self, p: &SpherePoint, v: &TangentVector, t: f64) -> Result<SpherePoint> {
        let n = v.vec.norm();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::NotUnit(n));
        }
        Ok(SpherePoint { coords: self.geodesic_vec(&p.coords, &v.vec, t) })
    }

    pub fn random_point(&self, seed: u64) -> SpherePoint {
        self.random_point_with(&mut rng::stream(seed, 0))
    }

    /// Uniform point: normalized Gaussian sample.
    pub fn random_point_with(&self, rng: &mut Rng) -> SpherePoint {
        loop {
            let g = gaussian_vector(self.ambient_dim, rng);
            let n = g.norm();
            if n > 1e-8 {
                return SpherePoint { coords: g * (self.radius / n) };
            }
        }
    }

    /// Projected Gaussian tangent vector (not normalized).
    pub fn random_tangent_with(&self, p: &SpherePoint, rng: &mut Rng) -> TangentVector {
        let g = gaussian_vector(self.ambient_dim, rng);
        self.project_to_tangent(p, &g)
    }

    pub fn random_unit_tangent_with(&self, p: &SpherePoint, rng: &mut Rng) -> TangentVector {
        loop {
            let t = self.random_tangent_with(p, rng);
            let n = t.norm();
            if n > 1e-6 {
                return t.scaled(1.0 / n);
            }
        }
    }

    pub fn random_orthonormal_frame(&self, p: &SpherePoint, seed: u64) -> Result<Frame> {
        self.random_orthonormal_frame_with(p, &mut rng::stream(seed, 1))
    }

    pub fn random_orthonormal_frame_with(&self, p: &SpherePoint, rng: &mut Rng) -> Result<Frame> {
        let vs: Vec<TangentVector> =
            (0..self.dim()).map(|_| self.random_tangent_with(p, rng)).collect();
        gram_schmidt(&vs)
    }

    /// Deterministic orthonormal basis of `T_p`: Gram-Schmidt on the projected
    /// standard basis, taking the best-conditioned candidates first.
    pub fn tangent_basis(&self, p: &SpherePoint) -> Frame {
        let d = self.ambient_dim;
        let mut candidates: Vec<Vector> = (0..d)
            .map(|k| self.project_vec(&p.coords, &Vector::from_fn(d, |i, _| f64::from(u8::from(i == k)))))
            .collect();
        let mut chosen: Vec<Vector> = Vec::with_capacity(d - 1);
        while chosen.len() < d - 1 {
            // pick the candidate with the largest residual after orthogonalization
            let (best, residual) = candidates
                .iter()
                .enumerate()
                .map(|(k, c)| (k, orthogonalize(c, &chosen)))
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .expect("candidates are never exhausted before the basis is full");
            let n = residual.norm();
            chosen.push(residual / n);
            candidates.swap_remove(best);
        }
        Frame {
            base: p.clone(),
            vectors: chosen.into_iter().map(|v| TangentVector { base: p.clone(), vec: v }).collect(),
        }
    }

}

pub(crate) fn gaussian_vector(len: usize, rng: &mut Rng) -> Vector {
    Vector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

/// Remove the components along an orthonormal family (modified Gram-Schmidt,
/// two passes).
pub(crate) fn orthogonalize(v: &Vector, basis: &[Vector]) -> Vector {
    let mut w = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = w.dot(b);
            w.axpy(-c, b, 1.0);
        }
    }
    w
}

/// Orthonormalize a list of tangent vectors at a common base point.
pub fn gram_schmidt(vectors: &[TangentVector]) -> Result<Frame> {
    let Some(first) = vectors.first() else {
        return Err(GeometryError::DegenerateInput("empty list".into()));
    };
    let base = first.base.clone();
    let mut out: Vec<Vector> = Vec::with_capacity(vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        let d = (&v.base.coords - &base.coords).norm();
        if d > BASE_TOL * base.coords.norm().max(1.0) {
            return Err(GeometryError::BasePointMismatch(d));
        }
        let w = orthogonalize(&v.vec, &out);
        let n = w.norm();
        if n < GS_PIVOT {
            return Err(GeometryError::DegenerateInput(format!(
                "vector {k} is linearly dependent on its predecessors (pivot {n:e})"
            )));
        }
        out.push(w / n);
    }
    Ok(Frame {
        vectors: out.into_iter().map(|v| TangentVector { base: base.clone(), vec: v }).collect(),
        base,
    })
}

/// Volume of the round sphere `S^k(r)`.
pub fn sphere_volume(k: usize, radius: f64) -> f64 {
    // vol S^k = 2π/(k−1) · vol S^{k−2}, vol S^0 = 2, vol S^1 = 2π
    let unit = match k {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => (2.0 * std::f64::consts::PI / (k as f64 - 1.0)) * sphere_volume(k - 2, 1.0),
    };
    unit * radius.powi(k as i32)
}
