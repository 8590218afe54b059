//! Second fundamental form of `ξ(M) ⊂ T₁M`, by the closed-form lemma and
//! directly from the Sasaki connection.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::fields::shape::{ambient_shape_matrix, half_curvature_operator};
use crate::fields::{singular_decomposition, SingularData, UnitVectorField};
use crate::manifold::{orthogonalize, Matrix, Sphere, SpherePoint, Vector, TOL_FD};
use crate::sasaki::connection::lifted_derivative;

/// Components `Ω_{σ|ij}`, `σ = 1..n`, `i, j = 0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondFormTensor {
    n: usize,
    omega: Vec<f64>,
}

impl SecondFormTensor {
    pub fn zeros(n: usize) -> Self {
        SecondFormTensor { n, omega: vec![0.0; n * (n + 1) * (n + 1)] }
    }

    /// `n`, one less than the dimension of the base.
    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, sigma: usize, i: usize, j: usize) -> usize {
        assert!((1..=self.n).contains(&sigma), "σ ranges over 1..=n");
        ((sigma - 1) * (self.n + 1) + i) * (self.n + 1) + j
    }

    pub fn get(&self, sigma: usize, i: usize, j: usize) -> f64 {
        self.omega[self.idx(sigma, i, j)]
    }

    pub fn set(&mut self, sigma: usize, i: usize, j: usize, v: f64) {
        let k = self.idx(sigma, i, j);
        self.omega[k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.omega.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|Ω_{σ|ij} − Ω_{σ|ji}|`.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 1..=self.n {
            for i in 0..=self.n {
                for j in 0..i {
                    worst = worst.max((self.get(s, i, j) - self.get(s, j, i)).abs());
                }
            }
        }
        worst
    }

    pub fn max_diff(&self, other: &SecondFormTensor) -> f64 {
        self.omega.iter().zip(&other.omega).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Entries with `|Ω| > threshold`, as `(σ, i, j, value)`.
    pub fn nonzero(&self, threshold: f64) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for s in 1..=self.n {
            for i in 0..=self.n {
                for j in 0..=self.n {
                    let v = self.get(s, i, j);
                    if v.abs() > threshold {
                        out.push((s, i, j, v));
                    }
                }
            }
        }
        out
    }
}

fn lambda_factor(l: &[f64], s: usize, i: usize, j: usize) -> f64 {
    ((1.0 + l[s] * l[s]) * (1.0 + l[i] * l[i]) * (1.0 + l[j] * l[j])).sqrt().recip()
}

fn resolve(field: &UnitVectorField, p: &SpherePoint, sd: Option<&SingularData>) -> Result<SingularData> {
    match sd {
        Some(d) => Ok(d.clone()),
        None => singular_decomposition(field, p),
    }
}

/// `Ω_{σ|ij} = ½Λ_{σij}{⟨r(e_i,e_j)ξ + r(e_j,e_i)ξ, f_σ⟩
///   + λ_σ[λ_j⟨R(e_σ,e_i)ξ, f_j⟩ + λ_i⟨R(e_σ,e_j)ξ, f_i⟩]}`.
pub fn second_form_lemma(
    field: &UnitVectorField,
    p: &SpherePoint,
    sd: Option<&SingularData>,
) -> Result<SecondFormTensor> {
    let sd = resolve(field, p, sd)?;
    let s = field.sphere();
    let k = sd.lambdas().len();
    let n = k - 1;
    let l = sd.lambdas();
    let xi = sd.f(0).clone();
    let frame = sd.right_frame();
    // r(e_i, e_j)ξ for all pairs
    let ops: Vec<Matrix> = frame
        .vectors()
        .iter()
        .map(|e| half_curvature_operator(field, e))
        .collect::<Result<_>>()?;
    let r = |i: usize, j: usize| &ops[i] * sd.e(j);
    let big = |a: usize, b: usize| s.curvature_vec(sd.e(a), sd.e(b), &xi);
    let mut out = SecondFormTensor::zeros(n);
    for sigma in 1..=n {
        let f_s = sd.f(sigma);
        for i in 0..k {
            for j in 0..k {
                let sym = (r(i, j) + r(j, i)).dot(f_s);
                let curv = l[sigma]
                    * (l[j] * big(sigma, i).dot(sd.f(j)) + l[i] * big(sigma, j).dot(sd.f(i)));
                out.set(sigma, i, j, 0.5 * lambda_factor(l, sigma, i, j) * (sym + curv));
            }
        }
    }
    Ok(out)
}

/// Projection transport: the frame at `p` projected to `T_q` and
/// re-orthonormalized.
fn transported_frame(s: &Sphere, q: &Vector, frame: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(frame.len());
    for e in frame {
        let w = orthogonalize(&s.project_vec(q, e), &out);
        let nrm = w.norm();
        out.push(w / nrm);
    }
    out
}

/// `Ω_{σ|ij} = ⟨⟨∇̄_{ẽ_i} Ẽ_j, ñ_σ⟩⟩ / √(1+λ_j²)` with `Ẽ_j = E_jʰ + (∇_{E_j}ξ)ᵛ`
/// tangent to `ξ(M)` along a transported frame field `E_j`.
pub fn second_form_direct(
    field: &UnitVectorField,
    p: &SpherePoint,
    sd: Option<&SingularData>,
) -> Result<SecondFormTensor> {
    let sd = resolve(field, p, sd)?;
    let s = field.sphere();
    let k = sd.lambdas().len();
    let n = k - 1;
    let l = sd.lambdas();
    let u = sd.f(0).clone();
    let pc = p.coords();
    let frame: Vec<Vector> = (0..k).map(|j| sd.e(j).clone()).collect();
    // E_j(q) and W_j(q) = ∇_{E_j(q)} ξ = −A_q E_j(q), stacked as one vector
    let stacked = |q: &Vector| -> Result<Vector> {
        let es = transported_frame(s, q, &frame);
        let a = ambient_shape_matrix(field, q)?;
        let d = q.len();
        let mut out = Vector::zeros(2 * k * d);
        for (j, e) in es.iter().enumerate() {
            out.rows_mut(2 * j * d, d).copy_from(e);
            out.rows_mut((2 * j + 1) * d, d).copy_from(&(-(&a * e)));
        }
        Ok(out)
    };
    let d = pc.len();
    let mut out = SecondFormTensor::zeros(n);
    for i in 0..k {
        let ci = (1.0 + l[i] * l[i]).sqrt();
        let x = sd.e(i) / ci;
        let v = sd.f(i) * (-l[i] / ci);
        let raw = s.fd_directional(pc, &x, stacked)?;
        for j in 0..k {
            let cj = (1.0 + l[j] * l[j]).sqrt();
            let e_j = sd.e(j);
            let w_j = sd.f(j) * (-l[j]);
            let de = s.project_vec(pc, &raw.rows(2 * j * d, d).into_owned());
            let dw = s.project_vec(pc, &raw.rows((2 * j + 1) * d, d).into_owned());
            let (h, vert) = lifted_derivative(s, &u, &x, &v, e_j, &de, &w_j, &dw);
            for sigma in 1..=n {
                let cs = (1.0 + l[sigma] * l[sigma]).sqrt();
                let proj = (l[sigma] * h.dot(sd.e(sigma)) + vert.dot(sd.f(sigma))) / cs;
                out.set(sigma, i, j, proj / cj);
            }
        }
    }
    Ok(out)
}

/// `M_{σα} = −½Λ_{σα0}⟨A²e_α + e_α, f_σ⟩` for a geodesic field on the unit
/// sphere; row-major over `σ, α = 1..n`.
pub fn geodesic_field_obstruction(
    field: &UnitVectorField,
    p: &SpherePoint,
    sd: Option<&SingularData>,
) -> Result<Matrix> {
    if (field.sphere().radius() - 1.0).abs() > 1e-12 {
        return Err(GeometryError::Precondition("obstruction is stated on the unit sphere".into()));
    }
    let sd = resolve(field, p, sd)?;
    let rep = sd.shape();
    let geo = rep.apply(rep.xi()).norm();
    let tol = if field.uses_jacobian() { 1e-8 } else { TOL_FD };
    if geo > tol {
        return Err(GeometryError::Precondition(format!("field is not geodesic: |Aξ| = {geo:e}")));
    }
    let l = sd.lambdas();
    let n = l.len() - 1;
    Ok(Matrix::from_fn(n, n, |s, a| {
        let (s, a) = (s + 1, a + 1);
        let e = sd.e(a);
        let v = rep.apply(&rep.apply(e)) + e;
        -0.5 * lambda_factor(l, s, a, 0) * v.dot(sd.f(s))
    }))
}

/// The entries `Ω_{σ|α0}` that the obstruction predicts, row-major over `σ, α`.
pub fn obstruction_entries(omega: &SecondFormTensor) -> Matrix {
    let n = omega.n();
    Matrix::from_fn(n, n, |s, a| omega.get(s + 1, a + 1, 0))
}
