use std::f64::consts::TAU;

use crate::error::{GeometryError, Result};
use crate::fields::{complex_structure, complex_structure_matrix, hopf_field, UnitVectorField};
use crate::manifold::{orthogonalize, Matrix, Sphere, SpherePoint, Vector, VectorField, TOL_FD};

const CLOSURE_TOL: f64 = 1e-6;
/// Minimum number of RK4 steps per turn, whatever the sample count.
const MIN_RK_STEPS: usize = 256;

/// Frames `e₀ = Jγ, e₁ … e_{2k}` sampled along the Hopf fiber
/// `γ(t) = cos t·p₀ + sin t·Jp₀`, with `e_{2j} = −J e_{2j−1}`.
#[derive(Debug, Clone)]
pub struct FiberFrame {
    p0: Vector,
    pairs: usize,
    params: Vec<f64>,
    points: Vec<Vector>,
    frames: Vec<Vec<Vector>>,
    closure_residual: f64,
    oracle_residual: f64,
    table_residual: f64,
    frame_residual: f64,
}

impl FiberFrame {
    pub fn p0(&self) -> &Vector {
        &self.p0
    }

    /// Number of J-pairs `k`.
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn param(&self, j: usize) -> f64 {
        self.params[j]
    }

    pub fn point(&self, j: usize) -> &Vector {
        &self.points[j]
    }

    /// `e₀ … e_{2k}` at sample `j`.
    pub fn frame(&self, j: usize) -> &[Vector] {
        &self.frames[j]
    }

    /// `max |e_a(2π) − e_a(0)|` after integrating once around the fiber.
    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }

    /// Deviation from the explicit rotation `e_{2j−1}(t) = cos t·v₁ − sin t·v₂`,
    /// `e_{2j}(t) = cos t·v₂ + sin t·v₁`.
    pub fn oracle_residual(&self) -> f64 {
        self.oracle_residual
    }

    /// Largest deviation from the table of covariant derivatives.
    pub fn table_residual(&self) -> f64 {
        self.table_residual
    }

    /// Orthonormality and horizontality of the sampled frames.
    pub fn frame_residual(&self) -> f64 {
        self.frame_residual
    }

    /// `e_a(0)` for `a ≥ 1`.
    pub fn initial(&self, a: usize) -> &Vector {
        &self.frames[0][a]
    }

    /// The S¹-equivariant horizontal extension of `e_a` off the fiber.
    pub fn extension(&self, a: usize) -> FrameExtension {
        FrameExtension::new(self.p0.clone(), self.initial(a).clone())
    }

    /// Expected `∇_{e_a} e_b` from the table, at sample `j`.
    pub fn table_entry(&self, j: usize, a: usize, b: usize) -> Vector {
        let e = &self.frames[j];
        let zero = Vector::zeros(self.p0.len());
        // index of the J-partner and the sign in ∇_{e_a}e_0 = J e_a
        let partner = |c: usize| if c % 2 == 1 { c + 1 } else { c - 1 };
        match (a, b) {
            (0, 0) => zero,
            (0, b) if b % 2 == 1 => -&e[b + 1],
            (0, b) => e[b - 1].clone(),
            (a, 0) if a % 2 == 1 => -&e[a + 1],
            (a, 0) => e[a - 1].clone(),
            (a, b) if b == partner(a) && a % 2 == 1 => e[0].clone(),
            (a, b) if b == partner(a) => -&e[0],
            _ => zero,
        }
    }
}

/// `x ↦ H_x((⟨x,p₀⟩ + ⟨x,Jp₀⟩J) v)`, the horizontal lift of a field on
/// `CPᵐ` that equals `v` at `p₀`.
#[derive(Debug, Clone)]
pub struct FrameExtension {
    p0: Vector,
    jp0: Vector,
    v: Vector,
    jv: Vector,
    j: Matrix,
}

impl FrameExtension {
    pub fn new(p0: Vector, v: Vector) -> Self {
        let jp0 = complex_structure(&p0);
        let jv = complex_structure(&v);
        let j = complex_structure_matrix(p0.len());
        FrameExtension { p0, jp0, v, jv, j }
    }

    fn w(&self, x: &Vector) -> Vector {
        &self.v * x.dot(&self.p0) + &self.jv * x.dot(&self.jp0)
    }
}

impl VectorField for FrameExtension {
    fn value(&self, x: &Vector) -> Result<Vector> {
        Ok(super::field::horizontal_project(x, &self.w(x)))
    }

    fn jacobian(&self, x: &Vector) -> Option<Result<Matrix>> {
        let d = x.len();
        let w = self.w(x);
        let dw = &self.v * self.p0.transpose() + &self.jv * self.jp0.transpose();
        let jx = &self.j * x;
        let m = &dw
            - x * (dw.transpose() * x).transpose()
            - x * w.transpose()
            - Matrix::identity(d, d) * w.dot(x)
            - &jx * (dw.transpose() * &jx).transpose()
            - &jx * (self.j.transpose() * &w).transpose()
            - &self.j * w.dot(&jx);
        Some(Ok(m))
    }
}

/// Orthonormal horizontal J-pairs at `p₀`, chosen deterministically.
fn initial_frame(p0: &Vector, pairs: usize) -> Vec<Vector> {
    let d = p0.len();
    let mut basis = vec![p0.clone(), complex_structure(p0)];
    let mut out = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let best = (0..d)
            .map(|i| orthogonalize(&Vector::from_fn(d, |r, _| if r == i { 1.0 } else { 0.0 }), &basis))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("nonempty");
        let v1 = best.normalize();
        let v2 = -complex_structure(&v1);
        basis.push(v1.clone());
        basis.push(v2.clone());
        out.push(v1);
        out.push(v2);
    }
    out
}

/// `e_{2j−1}' = −e_{2j}`, `e_{2j}' = e_{2j−1}`.
fn rhs(state: &[Vector]) -> Vec<Vector> {
    state
        .chunks(2)
        .flat_map(|c| [-&c[1], c[0].clone()])
        .collect()
}

fn rk4_step(state: &[Vector], h: f64) -> Vec<Vector> {
    let axpy = |y: &[Vector], k: &[Vector], s: f64| -> Vec<Vector> {
        y.iter().zip(k).map(|(a, b)| a + b * s).collect()
    };
    let k1 = rhs(state);
    let k2 = rhs(&axpy(state, &k1, h / 2.0));
    let k3 = rhs(&axpy(state, &k2, h / 2.0));
    let k4 = rhs(&axpy(state, &k3, h));
    state
        .iter()
        .enumerate()
        .map(|(i, y)| y + (&k1[i] + &k2[i] * 2.0 + &k3[i] * 2.0 + &k4[i]) * (h / 6.0))
        .collect()
}

/// Propagate `pairs` J-pairs of a horizontal frame around the Hopf fiber
/// through `p₀`, sampling `steps` equally spaced parameters in `[0, 2π)`.
pub fn propagate_fiber_frame(p0: &SpherePoint, pairs: usize, steps: usize) -> Result<FiberFrame> {
    let x0 = p0.coords();
    let d = x0.len();
    if d < 4 || d % 2 == 1 {
        return Err(GeometryError::Precondition(format!("Hopf fibers need an odd sphere, got ambient dimension {d}")));
    }
    if (x0.norm() - 1.0).abs() > 1e-12 {
        return Err(GeometryError::NotOnSphere { norm: x0.norm(), radius: 1.0 });
    }
    let m = d / 2 - 1;
    if pairs == 0 || pairs > m {
        return Err(GeometryError::Precondition(format!("pairs must lie in 1..={m}, got {pairs}")));
    }
    if steps < 5 {
        return Err(GeometryError::Precondition("at least 5 fiber steps are needed".into()));
    }
    let sphere = Sphere::unit(d)?;
    let xi = hopf_field(m, 1.0)?;
    let jp0 = complex_structure(x0);
    let h = TAU / steps as f64;
    let sub = MIN_RK_STEPS.div_ceil(steps);
    let start = initial_frame(x0, pairs);

    let mut params = Vec::with_capacity(steps);
    let mut points = Vec::with_capacity(steps);
    let mut frames = Vec::with_capacity(steps);
    let mut state = start.clone();
    for j in 0..steps {
        let t = j as f64 * h;
        let g = x0 * t.cos() + &jp0 * t.sin();
        let mut f = vec![complex_structure(&g)];
        f.extend(state.iter().cloned());
        params.push(t);
        points.push(g);
        frames.push(f);
        for _ in 0..sub {
            state = rk4_step(&state, h / sub as f64);
        }
    }
    let closure_residual = state
        .iter()
        .zip(&start)
        .map(|(a, b)| (a - b).amax())
        .fold(0.0, f64::max);

    let mut out = FiberFrame {
        p0: x0.clone(),
        pairs,
        params,
        points,
        frames,
        closure_residual,
        oracle_residual: 0.0,
        table_residual: 0.0,
        frame_residual: 0.0,
    };

    for j in 0..steps {
        let t = out.params[j];
        let e = &out.frames[j];
        for c in 0..pairs {
            let (v1, v2) = (&start[2 * c], &start[2 * c + 1]);
            let a = v1 * t.cos() - v2 * t.sin();
            let b = v2 * t.cos() + v1 * t.sin();
            let r = (&e[2 * c + 1] - a).amax().max((&e[2 * c + 2] - b).amax());
            out.oracle_residual = out.oracle_residual.max(r);
        }
        let g = &out.points[j];
        let mut basis = vec![g.clone()];
        basis.extend(e.iter().cloned());
        let k = basis.len();
        let gram = Matrix::from_fn(k, k, |r, s| basis[r].dot(&basis[s]));
        out.frame_residual = out.frame_residual.max((gram - Matrix::identity(k, k)).amax());
    }

    out.table_residual = table_residual(&out, &sphere, &xi)?;
    if out.table_residual > TOL_FD {
        return Err(GeometryError::PropagationFailure(out.table_residual));
    }
    if out.closure_residual > CLOSURE_TOL {
        return Err(GeometryError::PropagationFailure(out.closure_residual));
    }
    Ok(out)
}

/// Fiber derivatives come from the samples by a periodic five-point stencil;
/// the others from the equivariant extension.
fn table_residual(fr: &FiberFrame, sphere: &Sphere, xi: &UnitVectorField) -> Result<f64> {
    let n = fr.len();
    let h = TAU / n as f64;
    let k = 2 * fr.pairs + 1;
    let ext: Vec<FrameExtension> = (1..k).map(|a| fr.extension(a)).collect();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let g = &fr.points[j];
        let e = &fr.frames[j];
        let at = |s: isize| &fr.frames[(j as isize + s).rem_euclid(n as isize) as usize];
        for b in 1..k {
            let d = (&at(-2)[b] - &at(2)[b] + (&at(1)[b] - &at(-1)[b]) * 8.0) / (12.0 * h);
            let got = sphere.project_vec(g, &d);
            worst = worst.max((got - fr.table_entry(j, 0, b)).amax());
        }
        for a in 0..k {
            for b in 0..k {
                let got = if b == 0 {
                    sphere.covariant_derivative_vec(xi, g, &e[a])?
                } else {
                    sphere.covariant_derivative_vec(&ext[b - 1], g, &e[a])?
                };
                worst = worst.max((got - fr.table_entry(j, a, b)).amax());
            }
        }
    }
    Ok(worst)
}
