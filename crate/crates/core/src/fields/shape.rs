use crate::error::Result;
use crate::fields::UnitVectorField;
use crate::manifold::{Frame, Matrix, SpherePoint, TangentVector, Vector};

/// `A_ξ` at one point, written in an orthonormal tangent frame.
#[derive(Debug, Clone)]
pub struct ShapeOperatorRep {
    base: SpherePoint,
    xi: Vector,
    matrix: Matrix,
    frame: Frame,
    frame_matrix: Matrix,
}

impl ShapeOperatorRep {
    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    /// `ξ(p)`.
    pub fn xi(&self) -> &Vector {
        &self.xi
    }

    /// Entry `(i, j)` is `⟨A frame_j, frame_i⟩`.
    pub fn matrix_in_frame(&self) -> &Matrix {
        &self.matrix
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Frame vectors as the columns of an ambient matrix.
    pub fn frame_matrix(&self) -> &Matrix {
        &self.frame_matrix
    }

    /// `A` as an ambient matrix (zero on the normal line).
    pub fn ambient(&self) -> Matrix {
        &self.frame_matrix * &self.matrix * self.frame_matrix.transpose()
    }

    /// `A*` as an ambient matrix.
    pub fn ambient_adjoint(&self) -> Matrix {
        &self.frame_matrix * self.matrix.transpose() * self.frame_matrix.transpose()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.frame_matrix * (&self.matrix * (self.frame_matrix.transpose() * x))
    }

    pub fn apply_adjoint(&self, y: &Vector) -> Vector {
        &self.frame_matrix * (self.matrix.transpose() * (self.frame_matrix.transpose() * y))
    }

    /// Spectral norm of `A + A*`; zero exactly for Killing fields.
    pub fn skew_defect(&self) -> f64 {
        let s = &self.matrix + self.matrix.transpose();
        s.singular_values().max()
    }

    /// Spectral norm of `A A* − A* A`.
    pub fn normality_defect(&self) -> f64 {
        let a = &self.matrix;
        let c = a * a.transpose() - a.transpose() * a;
        c.singular_values().max()
    }
}

/// Frame representation of `A_ξ` at `p` in the deterministic tangent basis.
pub fn shape_operator_rep(field: &UnitVectorField, p: &SpherePoint) -> Result<ShapeOperatorRep> {
    let sphere = field.sphere();
    let frame = sphere.tangent_basis(p);
    let xi = crate::manifold::VectorField::value(field, p.coords())?;
    let b = frame.as_matrix();
    let k = frame.len();
    let mut m = Matrix::zeros(k, k);
    for j in 0..k {
        let col = b.column(j).into_owned();
        let w = sphere.covariant_derivative_vec(field, p.coords(), &col)?;
        let a_col = -(b.transpose() * w);
        m.set_column(j, &a_col);
    }
    Ok(ShapeOperatorRep { base: p.clone(), xi, matrix: m, frame, frame_matrix: b })
}

/// `A_ξ` at an arbitrary point `q` as the ambient matrix `Y ↦ A_q(P_q Y)`.
///
/// Built column by column from the projected standard basis, so it varies
/// smoothly with `q` even when the field has no Jacobian.
pub fn ambient_shape_matrix(field: &UnitVectorField, q: &Vector) -> Result<Matrix> {
    let s = field.sphere();
    let d = s.ambient_dim();
    let proj = Matrix::identity(d, d) - q * q.transpose() / q.norm_squared();
    if let Some(jac) = crate::manifold::VectorField::jacobian(field, q) {
        return Ok(-(&proj * jac? * &proj));
    }
    let mut a = Matrix::zeros(d, d);
    for k in 0..d {
        let dir = proj.column(k).into_owned();
        let w = s.covariant_derivative_vec(field, q, &dir)?;
        a.set_column(k, &(-w));
    }
    Ok(a)
}

/// Ambient matrix of `Y ↦ r(X,Y)ξ = −(∇_X A)Y` at `X.base`, differentiating
/// [`ambient_shape_matrix`] along the geodesic through `X`.
pub fn half_curvature_operator(field: &UnitVectorField, x: &TangentVector) -> Result<Matrix> {
    let s = field.sphere();
    let p = x.base().coords();
    let speed = x.norm();
    let d = s.ambient_dim();
    if speed == 0.0 {
        return Ok(Matrix::zeros(d, d));
    }
    let u = x.vec() / speed;
    let h = crate::manifold::FD_STEP * s.radius();
    let fwd = ambient_shape_matrix(field, &s.geodesic_vec(p, &u, h))?;
    let bwd = ambient_shape_matrix(field, &s.geodesic_vec(p, &u, -h))?;
    let proj = Matrix::identity(d, d) - p * p.transpose() / p.norm_squared();
    Ok(&proj * (bwd - fwd) * &proj * (speed / (2.0 * h)))
}

/// `A_ξ X = −∇_X ξ`.
pub fn shape_operator(field: &UnitVectorField, x: &TangentVector) -> Result<TangentVector> {
    let d = field.sphere().covariant_derivative(field, x)?;
    Ok(d.scaled(-1.0))
}

/// `A*_ξ Y`, the adjoint of `A_ξ` in the metric.
pub fn conjugate_shape_operator(field: &UnitVectorField, y: &TangentVector) -> Result<TangentVector> {
    let rep = shape_operator_rep(field, y.base())?;
    Ok(y.with_vec(rep.apply_adjoint(y.vec())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{hopf_field, meridian_field};
    use crate::manifold::Sphere;
    use crate::rng;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hopf_shape_operator_norms() {
        for (m, r) in [(1, 1.0), (2, 2.0), (1, 0.5)] {
            let xi = hopf_field(m, r).unwrap();
            let s = *xi.sphere();
            let mut rng = rng::stream(21, m as u64);
            for _ in 0..10 {
                let p = s.random_point_with(&mut rng);
                let e = xi.at(&p).unwrap();
                assert!(shape_operator(&xi, &e).unwrap().norm() < 1e-12);
                let x = s.random_unit_tangent_with(&p, &mut rng);
                let x = x.with_vec(x.vec() - e.vec() * e.vec().dot(x.vec()));
                let x = x.scaled(1.0 / x.norm());
                let ax = shape_operator(&xi, &x).unwrap();
                assert_abs_diff_eq!(ax.norm(), 1.0 / r, epsilon = 1e-12);
                // closed form A X = -J X / r on the orthogonal complement of ξ
                let jx = crate::fields::complex_structure(x.vec()) / r;
                assert_abs_diff_eq!((ax.vec() + jx).norm(), 0.0, epsilon = 1e-12);
                let fd = shape_operator(&xi.numeric(), &x).unwrap();
                assert_abs_diff_eq!((fd.vec() - ax.vec()).norm(), 0.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn conjugate_operator_examples() {
        let xi = hopf_field(2, 1.0).unwrap();
        let s = *xi.sphere();
        let p = s.random_point(3);
        let e = xi.at(&p).unwrap();
        assert!(conjugate_shape_operator(&xi, &e).unwrap().norm() < 1e-12);
        let rep = shape_operator_rep(&xi, &p).unwrap();
        assert!(rep.skew_defect() < 1e-12);
        assert!(rep.normality_defect() < 1e-12);

        let axis = Vector::from_row_slice(&[0.0, 0.0, 0.0, 1.0]);
        let mer = meridian_field(Sphere::unit(4).unwrap(), axis).unwrap();
        let q = mer.sphere().random_point(8);
        let rep = shape_operator_rep(&mer, &q).unwrap();
        let a = rep.ambient();
        let at = rep.ambient_adjoint();
        let e = mer.at(&q).unwrap();
        assert!(rep.apply_adjoint(e.vec()).norm() < 1e-12);
        // self-adjoint on ξ^⊥
        let proj = crate::manifold::Matrix::identity(4, 4)
            - e.vec() * e.vec().transpose()
            - q.coords() * q.coords().transpose();
        assert!((&proj * (&a - &at) * &proj).amax() < 1e-12);
    }

    #[test]
    fn meridian_principal_curvatures() {
        let s = Sphere::new(4, 2.0).unwrap();
        let axis = Vector::from_row_slice(&[0.0, 0.0, 0.0, 1.0]);
        let mer = meridian_field(s, axis).unwrap();
        let theta: f64 = 1.1;
        let p = s
            .point(Vector::from_row_slice(&[2.0 * theta.sin(), 0.0, 0.0, 2.0 * theta.cos()]))
            .unwrap();
        for field in [mer.clone(), mer.numeric()] {
            let rep = shape_operator_rep(&field, &p).unwrap();
            let mut sv: Vec<f64> = rep.matrix_in_frame().singular_values().iter().copied().collect();
            sv.sort_by(f64::total_cmp);
            let want = (1.0 / theta.tan()) / 2.0;
            assert!(sv[0] < 1e-6);
            assert_abs_diff_eq!(sv[1], want, epsilon = 1e-6);
            assert_abs_diff_eq!(sv[2], want, epsilon = 1e-6);
        }
    }
}
