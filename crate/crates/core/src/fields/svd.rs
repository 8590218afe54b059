//! Singular frames of the shape operator.
//!
//! `A e_i = λ_i f_i`, `A* f_i = λ_i e_i`, with `λ_0 = 0`, `f_0 = ξ` and the
//! remaining values sorted in decreasing order.

use crate::error::{GeometryError, Result};
use crate::fields::shape::{shape_operator_rep, ShapeOperatorRep};
use crate::fields::UnitVectorField;
use crate::manifold::{orthogonalize, Frame, Matrix, SpherePoint, Vector, GS_PIVOT};

/// Singular values below this count as zero.
pub const ZERO_SINGULAR: f64 = 1e-7;
/// Largest acceptable residual in the frame relations after assembly.
pub const ASSEMBLY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SingularData {
    lambdas: Vec<f64>,
    right: Frame,
    left: Frame,
    shape: ShapeOperatorRep,
}

impl SingularData {
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn right_frame(&self) -> &Frame {
        &self.right
    }

    pub fn left_frame(&self) -> &Frame {
        &self.left
    }

    pub fn shape(&self) -> &ShapeOperatorRep {
        &self.shape
    }

    pub fn base(&self) -> &SpherePoint {
        self.shape.base()
    }

    pub fn e(&self, i: usize) -> &Vector {
        self.right.vectors()[i].vec()
    }

    pub fn f(&self, i: usize) -> &Vector {
        self.left.vectors()[i].vec()
    }

    /// Number of nonzero singular values.
    pub fn rank(&self) -> usize {
        self.lambdas.iter().filter(|&&l| l > ZERO_SINGULAR).count()
    }

    /// Largest of `‖A e_i − λ_i f_i‖` and `‖A* f_i − λ_i e_i‖`.
    pub fn relation_residual(&self) -> f64 {
        (0..self.lambdas.len())
            .map(|i| {
                let l = self.lambdas[i];
                let r1 = (self.shape.apply(self.e(i)) - self.f(i) * l).norm();
                let r2 = (self.shape.apply_adjoint(self.f(i)) - self.e(i) * l).norm();
                r1.max(r2)
            })
            .fold(0.0, f64::max)
    }

    pub fn orthonormality_residual(&self) -> f64 {
        self.right.orthonormality_residual().max(self.left.orthonormality_residual())
    }

    /// How far `λ_1 ≥ … ≥ λ_n ≥ 0` and `λ_0 = 0` are from holding.
    pub fn ordering_violation(&self) -> f64 {
        let mut worst = self.lambdas[0].abs();
        for w in self.lambdas[1..].windows(2) {
            worst = worst.max(w[1] - w[0]);
        }
        worst.max(0.0 - self.lambdas.iter().copied().fold(0.0, f64::min))
    }

    /// Largest deviation between the `λ_i` and the square roots of the
    /// eigenvalues of `A*A`.
    pub fn spectrum_residual(&self) -> f64 {
        let m = self.shape.matrix_in_frame();
        let ata = m.transpose() * m;
        let mut eig: Vec<f64> =
            ata.symmetric_eigenvalues().iter().map(|&e| e.max(0.0).sqrt()).collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        let mut lam = self.lambdas.clone();
        lam.sort_by(|a, b| b.total_cmp(a));
        eig.iter().zip(&lam).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Largest of the four canonical pairing relations for a Killing frame
    /// with `rank = 2m` (zero for frames that are not canonically paired
    /// only by coincidence).
    pub fn canonical_residual(&self) -> f64 {
        let m = self.rank() / 2;
        let mut worst: f64 = 0.0;
        for a in 1..=m {
            let l = self.lambdas[a];
            worst = worst.max((self.shape.apply(self.e(a)) - self.e(m + a) * l).norm());
            worst = worst.max((self.shape.apply(self.e(m + a)) + self.e(a) * l).norm());
            worst = worst.max((self.f(a) - self.e(m + a)).norm());
            worst = worst.max((self.f(m + a) + self.e(a)).norm());
            worst = worst.max((self.lambdas[m + a] - l).abs());
        }
        for k in std::iter::once(0).chain(2 * m + 1..self.lambdas.len()) {
            worst = worst.max(self.shape.apply(self.e(k)).norm());
            worst = worst.max((self.f(k) - self.e(k)).norm());
        }
        worst
    }
}

fn sorted_svd(m: &Matrix) -> (Vec<f64>, Matrix) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let lambdas = order.iter().map(|&k| svd.singular_values[k]).collect();
    let cols: Vec<Vector> = order.iter().map(|&k| v_t.row(k).transpose()).collect();
    (lambdas, Matrix::from_columns(&cols))
}

/// Complete `basis` to `count` orthonormal vectors inside the span of
/// `candidates`, taking the best-conditioned candidate each time.
fn complete(basis: &mut Vec<Vector>, candidates: &[Vector], count: usize) -> Result<()> {
    while basis.len() < count {
        let best = candidates
            .iter()
            .map(|c| orthogonalize(c, basis))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .ok_or_else(|| GeometryError::DegenerateInput("no completion candidates".into()))?;
        let n = best.norm();
        if n < GS_PIVOT {
            return Err(GeometryError::DecompositionFailure(n));
        }
        basis.push(best / n);
    }
    Ok(())
}

/// Singular frames of `A_ξ` at `p`.
pub fn singular_decomposition(field: &UnitVectorField, p: &SpherePoint) -> Result<SingularData> {
    let shape = shape_operator_rep(field, p)?;
    singular_decomposition_of(shape)
}

pub fn singular_decomposition_of(shape: ShapeOperatorRep) -> Result<SingularData> {
    let b = shape.frame_matrix().clone();
    let k = b.ncols();
    let (sv, v) = sorted_svd(shape.matrix_in_frame());
    let rank = sv.iter().filter(|&&l| l > ZERO_SINGULAR).count();
    if rank == k {
        // A*ξ = 0 forces a kernel; a full-rank matrix means the field is broken
        return Err(GeometryError::DecompositionFailure(sv[k - 1]));
    }
    let right_all: Vec<Vector> = (0..k).map(|i| &b * v.column(i)).collect();
    let kernel = &right_all[rank..];
    let xi = shape.xi().clone();

    // e_0: the kernel direction closest to ξ
    let mut xi_in_kernel = Vector::zeros(xi.len());
    for w in kernel {
        xi_in_kernel += w * w.dot(&xi);
    }
    let e0 = if xi_in_kernel.norm() > 1e-3 {
        xi_in_kernel.normalize()
    } else {
        kernel[kernel.len() - 1].clone()
    };

    let mut right = vec![e0];
    let mut lambdas = vec![0.0];
    let mut left = vec![xi.clone()];
    for i in 0..rank {
        let e = right_all[i].clone();
        let l = sv[i];
        left.push(shape.apply(&e) / l);
        right.push(e);
        lambdas.push(l);
    }
    // remaining kernel directions, orthogonal to e_0
    let mut kbasis = vec![right[0].clone()];
    complete(&mut kbasis, kernel, kernel.len())?;
    for e in kbasis.into_iter().skip(1) {
        right.push(e);
        lambdas.push(0.0);
    }
    // left completion against ξ and the f's already fixed
    let tangent: Vec<Vector> = (0..k).map(|i| b.column(i).into_owned()).collect();
    complete(&mut left, &tangent, k)?;

    let data = SingularData {
        lambdas,
        right: Frame::from_raw(shape.base(), right),
        left: Frame::from_raw(shape.base(), left),
        shape,
    };
    let residual = data.relation_residual().max(data.orthonormality_residual());
    if !(residual <= ASSEMBLY_TOL) {
        return Err(GeometryError::DecompositionFailure(residual));
    }
    Ok(data)
}

/// Singular frames arranged in the canonical pairing of a Killing field:
/// `A e_α = λ_α e_{m+α}`, `A e_{m+α} = −λ_α e_α`, `f_α = e_{m+α}`,
/// `f_{m+α} = −e_α`, and `f = e` on the kernel with `e_0 = f_0 = ξ`.
pub fn killing_canonical_frames(field: &UnitVectorField, p: &SpherePoint) -> Result<SingularData> {
    let shape = shape_operator_rep(field, p)?;
    let tol = if field.uses_jacobian() { 1e-8 } else { crate::manifold::TOL_FD };
    let defect = shape.skew_defect();
    if defect > tol {
        return Err(GeometryError::Precondition(format!(
            "field is not Killing here: |A + A*| = {defect:e}"
        )));
    }
    let b = shape.frame_matrix().clone();
    let k = b.ncols();
    let (sv, v) = sorted_svd(shape.matrix_in_frame());
    let rank = sv.iter().filter(|&&l| l > ZERO_SINGULAR).count();
    if rank % 2 == 1 {
        return Err(GeometryError::Precondition(format!("odd rank {rank} for a skew operator")));
    }
    let m = rank / 2;
    let candidates: Vec<Vector> = (0..rank).map(|i| &b * v.column(i)).collect();

    let mut firsts: Vec<Vector> = Vec::with_capacity(m);
    let mut seconds: Vec<Vector> = Vec::with_capacity(m);
    let mut lams: Vec<f64> = Vec::with_capacity(m);
    let mut span: Vec<Vector> = Vec::with_capacity(rank);
    for _ in 0..m {
        let best = candidates
            .iter()
            .map(|c| orthogonalize(c, &span))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("rank is positive when m is");
        let n = best.norm();
        if n < 1e-6 {
            return Err(GeometryError::DecompositionFailure(n));
        }
        let e = best / n;
        let ae = shape.apply(&e);
        let l = ae.norm();
        let partner = orthogonalize(&(ae / l), &span);
        let partner = &partner / partner.norm();
        span.push(e.clone());
        span.push(partner.clone());
        firsts.push(e);
        seconds.push(partner);
        lams.push(l);
    }
    // sort pairs by decreasing λ so the ordering invariant still holds
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| lams[b].total_cmp(&lams[a]));

    let xi = shape.xi().clone();
    let mut right = vec![xi.clone()];
    let mut lambdas = vec![0.0];
    for &a in &order {
        right.push(firsts[a].clone());
        lambdas.push(lams[a]);
    }
    for &a in &order {
        right.push(seconds[a].clone());
        lambdas.push(lams[a]);
    }
    let tangent: Vec<Vector> = (0..k).map(|i| b.column(i).into_owned()).collect();
    complete(&mut right, &tangent, k)?;
    lambdas.resize(k, 0.0);

    let mut left = right.clone();
    for a in 0..m {
        left[1 + a] = right[1 + m + a].clone();
        left[1 + m + a] = -&right[1 + a];
    }
    let data = SingularData {
        lambdas,
        right: Frame::from_raw(shape.base(), right),
        left: Frame::from_raw(shape.base(), left),
        shape,
    };
    let residual = data.relation_residual().max(data.orthonormality_residual());
    if !(residual <= ASSEMBLY_TOL.max(10.0 * tol)) {
        return Err(GeometryError::DecompositionFailure(residual));
    }
    Ok(data)
}
