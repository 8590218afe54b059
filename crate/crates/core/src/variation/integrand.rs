use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::fields::SingularData;
use crate::manifold::{Matrix, SpherePoint, Vector, VectorField};
use crate::sasaki::connection::normal_lift_derivative;
use crate::sasaki::curvature::bundle_sectional_curvature;
use crate::sasaki::frames::SubmanifoldFrames;
use crate::sasaki::second_form::second_form_lemma;
use crate::variation::field::VariationField;

const DEGENERATE_NORM: f64 = 1e-12;

/// The pieces of the second variation integrand
/// `Σ‖∇̄⊥_{ẽ_i}η̃‖² − ‖η̃‖²(−Σ_{i≠j}k_ik_j + ΣK̃(ẽ_i,η̃))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuschekTerms {
    /// `Σ_i ‖∇̄⊥_{ẽ_i}η̃‖²`
    pub connection: f64,
    /// `‖η̃‖² Σ_i K̃(ẽ_i, η̃)`
    pub curvature: f64,
    /// `‖η̃‖² Σ_{i≠j} k_i k_j`
    pub k_term: f64,
    /// `|η|²`
    pub eta_sq: f64,
    /// `‖η̃‖²`
    pub eta_tilde_sq: f64,
    /// Largest `|k_i|`.
    pub max_principal: f64,
    pub value: f64,
    pub degenerate: bool,
}

/// Pointwise second variation integrand from the connection and curvature of
/// the Sasaki metric. A vanishing `η̃` gives zero with `degenerate` set.
pub fn duschek_integrand_general(v: &VariationField, p: &SpherePoint) -> Result<DuschekTerms> {
    let xi = v.xi();
    let s = xi.sphere();
    let frames = SubmanifoldFrames::at(xi, p)?;
    let sd = frames.singular();
    let rep = sd.shape();
    let eta_p = v.value(p.coords())?;
    let eta_t = v.eta_tilde(p)?;
    let nt2 = eta_t.norm().powi(2);
    let eta_sq = eta_p.norm_squared();
    if nt2.sqrt() < DEGENERATE_NORM {
        return Ok(DuschekTerms {
            connection: 0.0,
            curvature: 0.0,
            k_term: 0.0,
            eta_sq,
            eta_tilde_sq: nt2,
            max_principal: 0.0,
            value: 0.0,
            degenerate: true,
        });
    }
    let l = sd.lambdas();
    let k = l.len();

    let mut connection = 0.0;
    for i in 0..k {
        let x = sd.e(i) / (1.0 + l[i] * l[i]).sqrt();
        let d = normal_lift_derivative(xi, rep, &x, v)?;
        connection += frames.normal_part(&d).norm().powi(2);
    }

    let mut sum_k = 0.0;
    for e in frames.tangent() {
        sum_k += bundle_sectional_curvature(s, e, &eta_t)?.value;
    }
    let curvature = nt2 * sum_k;

    // η̃-directed second fundamental form
    let omega = second_form_lemma(xi, p, Some(sd))?;
    let coords = frames.normal_coords(&eta_t);
    let nt = nt2.sqrt();
    let shape = Matrix::from_fn(k, k, |i, j| {
        (1..k).map(|sig| omega.get(sig, i, j) * coords[sig - 1]).sum::<f64>() / nt
    });
    let sym = (&shape + shape.transpose()) * 0.5;
    let tr = sym.trace();
    let pairs = tr * tr - (&sym * &sym).trace();
    let k_term = nt2 * pairs;
    let max_principal = sym.symmetric_eigenvalues().amax();

    Ok(DuschekTerms {
        connection,
        curvature,
        k_term,
        eta_sq,
        eta_tilde_sq: nt2,
        max_principal,
        value: connection + k_term - curvature,
        degenerate: false,
    })
}

/// The closed form for the unit Hopf field,
/// `4|∇_{e₀}η|² + 2Σ_α|∇_{e_α}η|² − (2n−1)/2·|η|²`, split as the claimed
/// connection term `4|∇_{e₀}η|² + 2Σ|∇_{e_α}η|² − |η|²` minus the claimed
/// curvature term `½|η|² + (n−2)|η|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedTerms {
    /// `|∇_{e₀}η|²`
    pub fiber: f64,
    /// `Σ_α |∇_{e_α}η|²`
    pub horizontal: f64,
    pub eta_sq: f64,
    pub connection: f64,
    pub curvature: f64,
    pub value: f64,
}

impl ReducedTerms {
    pub fn ratio(&self) -> f64 {
        self.value / self.eta_sq
    }
}

pub fn reduced_integrand(v: &VariationField, p: &SpherePoint, sd: Option<&SingularData>) -> Result<ReducedTerms> {
    let xi = v.xi();
    if !xi.is_hopf() || (xi.sphere().radius() - 1.0).abs() > 1e-12 {
        return Err(GeometryError::Precondition("reduced integrand needs the Hopf field on a unit sphere".into()));
    }
    let owned;
    let sd = match sd {
        Some(d) => d,
        None => {
            owned = crate::fields::singular_decomposition(xi, p)?;
            &owned
        }
    };
    let s = xi.sphere();
    let pc = p.coords();
    let n = s.dim() - 1;
    let eta_sq = v.value(pc)?.norm_squared();
    let d = |e: &Vector| s.covariant_derivative_vec(v, pc, e);
    let fiber = d(sd.e(0))?.norm_squared();
    let mut horizontal = 0.0;
    for a in 1..=n {
        horizontal += d(sd.e(a))?.norm_squared();
    }
    let connection = 4.0 * fiber + 2.0 * horizontal - eta_sq;
    let curvature = 0.5 * eta_sq + (n as f64 - 2.0) * eta_sq;
    Ok(ReducedTerms { fiber, horizontal, eta_sq, connection, curvature, value: connection - curvature })
}

/// `4|∇_{e₀}η|² + 2Σ_{α,β}(e_β η^α)² + ½|η|²` on `S³`, where `η^α` are the
/// coefficients of `η` in the Hopf frame `J₂x, J₃x`.
pub fn s3_stable_form(v: &VariationField, p: &SpherePoint) -> Result<f64> {
    let xi = v.xi();
    if !xi.is_hopf() || xi.sphere().ambient_dim() != 4 || (xi.sphere().radius() - 1.0).abs() > 1e-12 {
        return Err(GeometryError::Precondition("S³ form needs the Hopf field on the unit S³".into()));
    }
    let s = xi.sphere();
    let x = p.coords();
    let [j1, j2, j3] = crate::variation::field::quaternion_structures();
    let e = [&j1 * x, &j2 * x, &j3 * x];
    let eta = v.value(x)?;
    let d = |w: &Vector| s.covariant_derivative_vec(v, x, w);
    let fiber = d(&e[0])?.norm_squared();
    let mut grad = 0.0;
    for beta in 1..3 {
        let de = d(&e[beta])?;
        for (alpha, j) in [(1, &j2), (2, &j3)] {
            // e_β⟨η, J x⟩ = ⟨∇_{e_β}η, Jx⟩ + ⟨η, J e_β⟩
            let val = de.dot(&e[alpha]) + eta.dot(&(j * &e[beta]));
            grad += val * val;
        }
    }
    Ok(4.0 * fiber + 2.0 * grad + 0.5 * eta.norm_squared())
}

/// `Σ_i‖∇̄⊥_{ẽ_i}η̃‖²` as given by the normal connection of `ξ(M)` for the
/// unit Hopf field: `2|∇_ξη − ½Aη|² + Σ_α|(∇_{e_α}η)^⊥|²`, where `⊥` drops
/// the `ξ` component.
pub fn hopf_connection_term(v: &VariationField, p: &SpherePoint, sd: &SingularData) -> Result<f64> {
    let xi = v.xi();
    let s = xi.sphere();
    let pc = p.coords();
    let rep = sd.shape();
    let u = rep.xi();
    let eta = v.value(pc)?;
    let d0 = s.covariant_derivative_vec(v, pc, sd.e(0))?;
    let mut total = 2.0 * (&d0 - rep.apply(&eta) * 0.5).norm_squared();
    for a in 1..sd.lambdas().len() {
        let da = s.covariant_derivative_vec(v, pc, sd.e(a))?;
        total += (&da - u * u.dot(&da)).norm_squared();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::hopf_field;
    use crate::manifold::Sphere;
    use crate::variation::field::{horizontal_constant_field, stable_s3_field};
    use crate::rng;
    use approx::assert_abs_diff_eq;

    #[test]
    fn principal_curvatures_vanish_for_hopf() {
        let v = stable_s3_field(130, 2).unwrap();
        let p = v.xi().sphere().random_point(130);
        let t = duschek_integrand_general(&v, &p).unwrap();
        assert!(t.max_principal < 1e-5);
        assert!(t.k_term.abs() < 1e-8);
    }

    #[test]
    fn curvature_term_identity() {
        for (d, seed) in [(4usize, 131u64), (6, 132), (8, 133)] {
            let xi = hopf_field(d / 2 - 1, 1.0).unwrap();
            let s = Sphere::unit(d).unwrap();
            let mut rng = rng::stream(seed, 0);
            let p = s.random_point_with(&mut rng);
            let w = crate::manifold::gaussian_vector(d, &mut rng);
            let v = horizontal_constant_field(&xi, w).unwrap();
            let g = duschek_integrand_general(&v, &p).unwrap();
            let r = reduced_integrand(&v, &p, None).unwrap();
            let n = (d - 2) as f64;
            assert_abs_diff_eq!(g.eta_tilde_sq, 2.0 * g.eta_sq, epsilon = 1e-10);
            assert_abs_diff_eq!(g.curvature, (n - 1.5) * g.eta_sq, epsilon = 1e-8);
            assert_abs_diff_eq!(g.curvature, r.curvature, epsilon = 1e-8);
        }
    }

    #[test]
    fn true_connection_term_and_the_gap_to_the_closed_form() {
        // Σ‖∇̄⊥η̃‖² (direct) = 2|∇_ξη − ½Aη|² + Σ|(∇_{e_α}η)^⊥|², and the closed form
        // 4|∇_ξη|² + 2Σ|∇_{e_α}η|² − |η|² equals twice that plus 4⟨∇_ξη, Aη⟩
        let v = stable_s3_field(134, 3).unwrap();
        let s = *v.xi().sphere();
        let mut rng = rng::stream(134, 1);
        for _ in 0..5 {
            let p = s.random_point_with(&mut rng);
            let sd = crate::fields::singular_decomposition(v.xi(), &p).unwrap();
            let g = duschek_integrand_general(&v, &p).unwrap();
            let h = hopf_connection_term(&v, &p, &sd).unwrap();
            assert!((g.connection - h).abs() < 1e-5 * (1.0 + h), "{} vs {}", g.connection, h);
            let r = reduced_integrand(&v, &p, Some(&sd)).unwrap();
            let d0 = s.covariant_derivative_vec(&v, p.coords(), sd.e(0)).unwrap();
            let a_eta = sd.shape().apply(&v.value(p.coords()).unwrap());
            let gap = r.connection - 2.0 * h - 4.0 * d0.dot(&a_eta);
            assert!(gap.abs() < 1e-6 * (1.0 + r.connection.abs()), "gap {gap}");
        }
    }

    #[test]
    fn s3_form_equals_reduced_integrand() {
        for seed in 140..145 {
            let v = stable_s3_field(seed, 3).unwrap();
            let p = v.xi().sphere().random_point(seed);
            let r = reduced_integrand(&v, &p, None).unwrap();
            let f = s3_stable_form(&v, &p).unwrap();
            assert_abs_diff_eq!(r.value, f, epsilon = 1e-9 * (1.0 + f.abs()));
        }
    }

    #[test]
    fn constant_coefficients_on_s3() {
        let v = stable_s3_field(150, 0).unwrap();
        let s = *v.xi().sphere();
        let p = s.random_point(150);
        let r = reduced_integrand(&v, &p, None).unwrap();
        assert_abs_diff_eq!(r.ratio(), 4.5, epsilon = 1e-9);
        let g = duschek_integrand_general(&v, &p).unwrap();
        assert!(g.value.abs() < 1e-5 * g.eta_sq);
    }

    #[test]
    fn parallel_at_a_point_leaves_the_curvature_part() {
        // q ↦ w − ⟨w,q⟩q has vanishing covariant derivative at p when w ⊥ p
        let xi = hopf_field(2, 1.0).unwrap();
        let s = *xi.sphere();
        let p = s.random_point(151);
        let w = crate::manifold::gaussian_vector(6, &mut rng::stream(151, 9));
        let w = crate::variation::field::horizontal_project(p.coords(), &w);
        let eta = crate::manifold::FnField(move |q: &Vector| Ok(&w - q * w.dot(q)));
        let desc = crate::fields::FieldDescriptor { name: "parallel".into(), params: Default::default() };
        let v = VariationField::new(xi, std::sync::Arc::new(eta), desc);
        let r = reduced_integrand(&v, &p, None).unwrap();
        assert!(r.fiber < 1e-16 && r.horizontal < 1e-16);
        assert_abs_diff_eq!(r.ratio(), -3.5, epsilon = 1e-9);
    }
}
